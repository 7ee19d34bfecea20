#include "edt/analysis.hpp"

#include "edt/error.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace edt {

namespace {

void require_converged(RestPoint const& rest, char const* what)
{
    if (!rest.converged) {
        throw Error(ErrorKind::NotConverged, std::string(what) + ": rest point did not converge (" + std::to_string(rest.iterations)
                + " iterations, residual " + std::to_string(rest.bc_residual) + ", tail " + to_string(rest.tail) + ")");
    }
}

constexpr double kTieTolerance = 1e-12;

// True when a should be preferred over b: smaller error, ties to the DomBal-heavier cell.
auto better_cell(FitCell const& a, FitCell const& b) -> bool
{
    if (a.mse < b.mse - kTieTolerance) {
        return true;
    }
    if (b.mse < a.mse - kTieTolerance) {
        return false;
    }
    double const weight_a = a.mix.gene_dom + a.mix.organism_bal;
    double const weight_b = b.mix.gene_dom + b.mix.organism_bal;
    if (weight_a != weight_b) {
        return weight_a > weight_b;
    }
    return a.mix.gene_dom > b.mix.gene_dom;
}

} // namespace

auto rank_scores(Vector const& scores, Labels const& labels) -> Ranking
{
    if (static_cast<Eigen::Index>(labels.size()) != scores.size()) {
        throw Error(ErrorKind::Dimension, "rank_scores: label count does not match score count");
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(scores.size()));
    std::iota(order.begin(), order.end(), Eigen::Index {0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return scores(a) > scores(b); });
    Ranking ranking;
    int rank = 0;
    for (auto idx : order) {
        ranking.entries.push_back({labels[static_cast<std::size_t>(idx)], scores(idx), ++rank, idx});
    }
    return ranking;
}

auto rank_genes(RestPoint const& rest, Labels const& gene_labels) -> Ranking
{
    require_converged(rest, "rank_genes");
    return rank_scores(rest.gamma, gene_labels);
}

auto rank_organisms(RestPoint const& rest, FitnessMatrix const& phi) -> Ranking
{
    require_converged(rest, "rank_organisms");
    return rank_scores(organism_fitness(rest.gamma, phi), phi.row_labels());
}

auto distribution_from_scores(Vector const& organism_scores, Labels const& labels) -> DistributionPlan
{
    if (static_cast<Eigen::Index>(labels.size()) != organism_scores.size()) {
        throw Error(ErrorKind::Dimension, "distribution: label count does not match organism count");
    }
    if ((organism_scores.array() < 0.0).any()) {
        throw Error(ErrorKind::Domain, "distribution: organism fitness must be nonnegative");
    }
    double const total = organism_scores.sum();
    if (!(total > 0.0)) {
        throw Error(ErrorKind::Degenerate, "distribution: total organism fitness is zero");
    }
    DistributionPlan plan;
    plan.labels = labels;
    plan.shares = organism_scores / total;
    plan.deviations = (static_cast<double>(organism_scores.size()) * plan.shares.array() - 1.0).matrix();
    return plan;
}

auto distribution(RestPoint const& rest, FitnessMatrix const& phi) -> DistributionPlan
{
    require_converged(rest, "distribution");
    return distribution_from_scores(organism_fitness(rest.gamma, phi), phi.row_labels());
}

auto persistence_report(Trajectory const& trajectory, RestPoint const& rest) -> PersistenceReport
{
    PersistenceReport report;
    report.final_gamma = rest.gamma;
    report.min_gamma_seen = trajectory.min_gamma_seen.size() == rest.gamma.size() ? trajectory.min_gamma_seen : rest.gamma;
    for (auto const& it : trajectory.iterates) {
        report.min_gamma_seen = report.min_gamma_seen.cwiseMin(it.gamma);
    }
    report.persistent = rest.gamma.size() > 0 && rest.gamma.minCoeff() > report.threshold;
    return report;
}

auto default_mix_grid() -> std::vector<double>
{
    std::vector<double> grid;
    for (int k = 0; k <= 10; ++k) {
        grid.push_back(k / 10.0);
    }
    return grid;
}

auto min_max_rescale(Vector const& v) -> Vector
{
    double const lo = v.minCoeff();
    double const hi = v.maxCoeff();
    if (!(hi > lo)) {
        return Vector::Zero(v.size());
    }
    return ((v.array() - lo) / (hi - lo)).matrix();
}

auto fit_mix(std::vector<TrainingSet> const& training, FitOptions const& options) -> FitResult
{
    if (training.empty()) {
        throw Error(ErrorKind::Fit, "fit_mix needs at least one training set");
    }
    for (std::size_t s = 0; s < training.size(); ++s) {
        if (training[s].target.size() != training[s].phi.organisms()) {
            throw Error(ErrorKind::Dimension, "training set " + std::to_string(s) + ": target has length " + std::to_string(training[s].target.size())
                    + ", expected " + std::to_string(training[s].phi.organisms()));
        }
    }
    auto const dom_grid = options.gene_dom_grid.empty() ? default_mix_grid() : options.gene_dom_grid;
    auto const bal_grid = options.organism_bal_grid.empty() ? default_mix_grid() : options.organism_bal_grid;

    std::vector<Game> games;
    std::vector<Vector> targets;
    for (auto const& set : training) {
        games.emplace_back(set.phi, options.norm);
        targets.push_back(min_max_rescale(set.target));
    }

    FitResult result;
    for (double dom : dom_grid) {
        for (double bal : bal_grid) {
            result.cells.push_back({StrategyMix::blend(dom, bal), 0.0, false, {}});
        }
    }

    detail::parallel_for(result.cells.size(), [&](std::size_t c) {
        auto& cell = result.cells[c];
        try {
            auto const spec = StrategySpec::mixed(cell.mix);
            double total = 0.0;
            for (std::size_t s = 0; s < games.size(); ++s) {
                auto const run_result = run(games[s], spec, options.engine);
                if (!run_result.rest_point.converged) {
                    cell.note = "training set " + std::to_string(s) + " did not converge";
                    return;
                }
                Vector const r = min_max_rescale(organism_fitness(run_result.rest_point.gamma, games[s].phi()));
                total += (r - targets[s]).squaredNorm() / static_cast<double>(r.size());
            }
            cell.mse = total / static_cast<double>(games.size());
            cell.ok = true;
        } catch (Error const& e) {
            cell.note = e.what();
        }
    });

    FitCell const* best = nullptr;
    for (auto const& cell : result.cells) {
        if (cell.ok && (best == nullptr || better_cell(cell, *best))) {
            best = &cell;
        }
    }
    if (best == nullptr) {
        throw Error(ErrorKind::Fit, "fit_mix: no grid cell converged on every training set");
    }
    result.mix = best->mix;
    result.mse = best->mse;
    return result;
}

} // namespace edt
