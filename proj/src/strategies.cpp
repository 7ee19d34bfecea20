#include "edt/strategies.hpp"

#include "edt/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace edt {

namespace {

constexpr double kMixTolerance = 1e-12;

void require_genes(Vector const& gamma, Eigen::Index genes, char const* what)
{
    if (gamma.size() != genes) {
        throw Error(ErrorKind::Dimension, std::string(what) + ": gamma has length " + std::to_string(gamma.size()) + ", expected "
                + std::to_string(genes));
    }
}

} // namespace

void StrategyMix::validate() const
{
    for (double w : {gene_dom, gene_alt, organism_bal, organism_sel}) {
        if (!std::isfinite(w) || w < 0.0) {
            throw Error(ErrorKind::Config, "strategy mix weights must be nonnegative: " + to_string(*this));
        }
    }
    if (std::abs(gene_dom + gene_alt - 1.0) > kMixTolerance || std::abs(organism_bal + organism_sel - 1.0) > kMixTolerance) {
        throw Error(ErrorKind::Config, "strategy mix is not normalized: " + to_string(*this));
    }
}

auto parse_mix(std::string const& text) -> StrategyMix
{
    std::optional<double> dom;
    std::optional<double> alt;
    std::optional<double> bal;
    std::optional<double> sel;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto const eq = item.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorKind::Config, "mix entry '" + item + "' is not key=value");
        }
        auto const key = item.substr(0, eq);
        auto const value_text = item.substr(eq + 1);
        char* end = nullptr;
        double const value = std::strtod(value_text.c_str(), &end);
        if (value_text.empty() || end != value_text.c_str() + value_text.size()) {
            throw Error(ErrorKind::Config, "mix entry '" + item + "' has a non-numeric weight");
        }
        if (key == "g:dom") {
            dom = value;
        } else if (key == "g:alt") {
            alt = value;
        } else if (key == "w:bal") {
            bal = value;
        } else if (key == "w:sel") {
            sel = value;
        } else {
            throw Error(ErrorKind::Config, "unknown mix key '" + key + "' (expected g:dom, g:alt, w:bal, w:sel)");
        }
    }
    if (!dom && !alt) {
        throw Error(ErrorKind::Config, "mix '" + text + "' sets no gene weight (g:dom or g:alt)");
    }
    if (!bal && !sel) {
        throw Error(ErrorKind::Config, "mix '" + text + "' sets no organism weight (w:bal or w:sel)");
    }
    StrategyMix mix;
    mix.gene_dom = dom ? *dom : 1.0 - *alt;
    mix.gene_alt = alt ? *alt : 1.0 - *dom;
    mix.organism_bal = bal ? *bal : 1.0 - *sel;
    mix.organism_sel = sel ? *sel : 1.0 - *bal;
    mix.validate();
    return mix;
}

auto to_string(StrategyMix const& mix) -> std::string
{
    char buf[128];
    std::snprintf(buf, sizeof buf, "g:dom=%g,g:alt=%g,w:bal=%g,w:sel=%g", mix.gene_dom, mix.gene_alt, mix.organism_bal,
        mix.organism_sel);
    return buf;
}

auto delta_dombal(Vector const& gamma, Moments const& moments) -> Vector
{
    auto const m = moments.column_means.size();
    require_genes(gamma, m, "delta_dombal");
    double const shared = 2.0 / static_cast<double>(m) * gamma.dot(moments.column_means);
    return (-gamma.array() * (moments.column_means.array() + 0.5) + shared).matrix();
}

auto delta_explicit_dombal(Vector const& gamma, FitnessMatrix const& phi) -> Vector
{
    auto const& values = phi.values();
    auto const n = values.rows();
    auto const m = values.cols();
    require_genes(gamma, m, "delta_explicit_dombal");
    Vector delta = Vector::Zero(m);
    for (Eigen::Index i = 0; i < n; ++i) {
        double const r = values.row(i).dot(gamma);
        for (Eigen::Index j = 0; j < m; ++j) {
            double const dom = gamma(j) * (values(i, j) - 0.5);
            double const bal = -2.0 * (gamma(j) * values(i, j) - r / static_cast<double>(m));
            delta(j) += dom + bal;
        }
    }
    return delta / static_cast<double>(n);
}

auto build_dombal_payoff(Moments const& moments) -> Matrix
{
    auto const m = moments.column_means.size();
    double const c = 2.0 / static_cast<double>(m);
    Matrix a(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index l = 0; l < m; ++l) {
            a(j, l) = c * moments.column_means(l);
        }
        a(j, j) = (c - 1.0) * moments.column_means(j) - 0.5;
    }
    return a;
}

auto build_altsel_payoff(FitnessMatrix const& phi, Moments const& moments, KinshipMatrices const& kinship) -> PayoffBundle
{
    auto const& values = phi.values();
    auto const n = values.rows();
    auto const m = values.cols();
    if (kinship.gene.rows() != m || kinship.organism.rows() != n || moments.column_means.size() != m) {
        throw Error(ErrorKind::Dimension, "build_altsel_payoff: moments/kinship do not match the fitness matrix");
    }
    if (!(moments.gene_dispersion > kDispersionEpsilon)) {
        throw Error(ErrorKind::DegenerateDispersion, "gene dispersion is zero (all column means equal); AltSel is undefined, use DomBal");
    }
    if (!(moments.organism_dispersion > kDispersionEpsilon)) {
        throw Error(ErrorKind::DegenerateDispersion,
            "organism dispersion is zero (all harmonic organism fitness values equal); AltSel is undefined, use DomBal");
    }
    auto const nd = static_cast<double>(n);

    // G_jl = sum_i (phi_ij - 1/2) phi_il, so sum_i (phi_ij - 1/2)(phi_il - phi_ij) = G_jl - G_jj.
    Matrix const centered = values.array() - 0.5;
    Matrix const g = centered.transpose() * values;
    PayoffBundle bundle;
    bundle.gene.resize(m, m);
    double const gene_scale = 1.0 / (nd * moments.gene_dispersion);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index l = 0; l < m; ++l) {
            bundle.gene(j, l) = j == l ? 0.0 : gene_scale * kinship.gene(j, l) * (g(j, l) - g(j, j));
        }
    }

    // sum_{i,t} phi_ij k_it (phi_il - phi_tl) = [Phi^T (diag(K 1) - K) Phi]_jl
    Matrix laplacian = -kinship.organism;
    laplacian.diagonal() += kinship.organism.rowwise().sum();
    double const organism_scale = -2.0 / (nd * nd * moments.organism_dispersion);
    bundle.organism = organism_scale * (values.transpose() * (laplacian * values));

    bundle.combined = bundle.gene + bundle.organism;
    return bundle;
}

auto delta_altsel(Vector const& gamma, PayoffBundle const& bundle) -> Vector
{
    require_genes(gamma, bundle.combined.rows(), "delta_altsel");
    return gamma.cwiseProduct(bundle.combined * gamma);
}

auto delta_components(Vector const& gamma, Moments const& moments, PayoffBundle const* bundle) -> DeltaComponents
{
    auto const m = moments.column_means.size();
    require_genes(gamma, m, "delta_components");
    auto const& means = moments.column_means;
    DeltaComponents c;
    c.gene_dom = gamma.cwiseProduct((means.array() - 0.5).matrix());
    double const shared = 2.0 / static_cast<double>(m) * gamma.dot(means);
    c.organism_bal = (-2.0 * gamma.array() * means.array() + shared).matrix();
    if (bundle != nullptr) {
        c.gene_alt = gamma.cwiseProduct(bundle->gene * gamma);
        c.organism_sel = gamma.cwiseProduct(bundle->organism * gamma);
    }
    return c;
}

namespace {

auto payoff_or_throw(PayoffBundle const* bundle, char const* what) -> PayoffBundle const&
{
    if (bundle == nullptr) {
        throw Error(ErrorKind::DegenerateDispersion, std::string(what) + ": the mix uses alt/sel weights but no payoff bundle is available");
    }
    return *bundle;
}

} // namespace

auto delta_mixed(Vector const& gamma, FitnessMatrix const& phi, Moments const& moments, PayoffBundle const* bundle,
    StrategyMix const& mix) -> Vector
{
    mix.validate();
    require_genes(gamma, phi.genes(), "delta_mixed");
    if (mix.needs_payoff()) {
        payoff_or_throw(bundle, "delta_mixed");
    }
    auto const c = delta_components(gamma, moments, mix.needs_payoff() ? bundle : nullptr);
    Vector delta = mix.gene_dom * c.gene_dom + mix.organism_bal * c.organism_bal;
    if (mix.gene_alt != 0.0) {
        delta += mix.gene_alt * c.gene_alt;
    }
    if (mix.organism_sel != 0.0) {
        delta += mix.organism_sel * c.organism_sel;
    }
    return delta;
}

auto delta_mixed_per_gene(Vector const& gamma, Moments const& moments, PayoffBundle const* bundle,
    std::vector<StrategyMix> const& mixes) -> Vector
{
    auto const m = moments.column_means.size();
    if (static_cast<Eigen::Index>(mixes.size()) != m) {
        throw Error(ErrorKind::Dimension, "per-gene mix needs one entry per gene");
    }
    bool needs = false;
    for (auto const& mix : mixes) {
        mix.validate();
        needs = needs || mix.needs_payoff();
    }
    if (needs) {
        payoff_or_throw(bundle, "delta_mixed_per_gene");
    }
    auto const c = delta_components(gamma, moments, needs ? bundle : nullptr);
    Vector delta(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        auto const& mix = mixes[static_cast<std::size_t>(j)];
        delta(j) = mix.gene_dom * c.gene_dom(j) + mix.organism_bal * c.organism_bal(j);
        if (mix.gene_alt != 0.0) {
            delta(j) += mix.gene_alt * c.gene_alt(j);
        }
        if (mix.organism_sel != 0.0) {
            delta(j) += mix.organism_sel * c.organism_sel(j);
        }
    }
    return delta;
}

auto organism_fitness(Vector const& gamma, FitnessMatrix const& phi) -> Vector
{
    require_genes(gamma, phi.genes(), "organism_fitness");
    return phi.values() * gamma;
}

auto to_string(StrategyKind kind) -> std::string
{
    switch (kind) {
    case StrategyKind::DomBal: return "dombal";
    case StrategyKind::AltSel: return "altsel";
    case StrategyKind::Mixed: return "mixed";
    }
    return "unknown";
}

auto parse_strategy_kind(std::string const& raw) -> StrategyKind
{
    std::string text = raw;
    std::transform(text.begin(), text.end(), text.begin(), [](unsigned char c) { return std::tolower(c); });
    if (text == "dombal") {
        return StrategyKind::DomBal;
    }
    if (text == "altsel") {
        return StrategyKind::AltSel;
    }
    if (text == "mixed") {
        return StrategyKind::Mixed;
    }
    throw Error(ErrorKind::Config, "unknown strategy '" + raw + "' (expected dombal, altsel or mixed)");
}

auto StrategySpec::needs_payoff() const -> bool
{
    if (!per_gene.empty()) {
        for (auto const& mix : per_gene) {
            if (mix.needs_payoff()) {
                return true;
            }
        }
        return false;
    }
    switch (kind) {
    case StrategyKind::DomBal: return false;
    case StrategyKind::AltSel: return true;
    case StrategyKind::Mixed: return mix.needs_payoff();
    }
    return false;
}

void StrategySpec::validate(Eigen::Index genes) const
{
    if (!per_gene.empty()) {
        if (!experimental) {
            throw Error(ErrorKind::Config, "per-gene mixing weights are experimental and must be enabled explicitly");
        }
        if (static_cast<Eigen::Index>(per_gene.size()) != genes) {
            throw Error(ErrorKind::Config, "per-gene mix has " + std::to_string(per_gene.size()) + " entries for " + std::to_string(genes) + " genes");
        }
        for (auto const& mix : per_gene) {
            mix.validate();
        }
    } else if (kind == StrategyKind::Mixed) {
        mix.validate();
    }
}

Game::Game(FitnessMatrix phi, KinshipNorm norm, DispersionNormalization normalization)
    : phi_(std::move(phi))
    , moments_(compute_moments(phi_, normalization))
    , kinship_(compute_kinship(phi_, norm))
    , dombal_(build_dombal_payoff(moments_))
{
    try {
        payoff_ = build_altsel_payoff(phi_, moments_, kinship_);
    } catch (Error const& e) {
        if (e.kind() != ErrorKind::DegenerateDispersion) {
            throw;
        }
        payoff_error_ = e.what();
    }
}

auto Game::payoff() const -> PayoffBundle const&
{
    if (!payoff_) {
        throw Error(ErrorKind::DegenerateDispersion, payoff_error_);
    }
    return *payoff_;
}

auto Game::delta(StrategySpec const& spec, Vector const& gamma) const -> Vector
{
    if (spec.needs_payoff() && !payoff_) {
        throw Error(ErrorKind::DegenerateDispersion, payoff_error_);
    }
    PayoffBundle const* bundle = payoff_ ? &*payoff_ : nullptr;
    if (!spec.per_gene.empty()) {
        return delta_mixed_per_gene(gamma, moments_, bundle, spec.per_gene);
    }
    switch (spec.kind) {
    case StrategyKind::DomBal: return delta_dombal(gamma, moments_);
    case StrategyKind::AltSel: return delta_altsel(gamma, payoff());
    case StrategyKind::Mixed: return delta_mixed(gamma, phi_, moments_, bundle, spec.mix);
    }
    return {};
}

} // namespace edt
