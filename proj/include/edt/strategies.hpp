#ifndef EDT_STRATEGIES_HPP
#define EDT_STRATEGIES_HPP

#include "edt/dataset.hpp"
#include "edt/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace edt {

// Convex weights over the gene strategies {dom, alt} and the organism
// strategies {bal, sel}. Each pair sums to one.
struct StrategyMix {
    double gene_dom = 1.0;
    double gene_alt = 0.0;
    double organism_bal = 1.0;
    double organism_sel = 0.0;

    static auto dombal() -> StrategyMix { return {1.0, 0.0, 1.0, 0.0}; }
    static auto altsel() -> StrategyMix { return {0.0, 1.0, 0.0, 1.0}; }
    // Complements are implied by normalization.
    static auto blend(double gene_dom, double organism_bal) -> StrategyMix
    {
        return {gene_dom, 1.0 - gene_dom, organism_bal, 1.0 - organism_bal};
    }

    [[nodiscard]] auto needs_payoff() const -> bool { return gene_alt != 0.0 || organism_sel != 0.0; }

    // Throws ErrorKind::Config for negative or unnormalized weights.
    void validate() const;
};

// Parses "g:dom=0.3,w:bal=0.6" style text. Missing complements are implied,
// "g:alt" and "w:sel" are accepted too.
auto parse_mix(std::string const& text) -> StrategyMix;
auto to_string(StrategyMix const& mix) -> std::string;

// Precomputed payoff matrices of the altruistic/selfish strategies.
struct PayoffBundle {
    Matrix gene;     // D^g, zero diagonal
    Matrix organism; // D^w, symmetric
    Matrix combined; // D = D^g + D^w
};

// Dispersions at or below this are treated as zero.
inline constexpr double kDispersionEpsilon = 1e-12;

// Dominant/balanced delta in closed form, depends on column means only.
auto delta_dombal(Vector const& gamma, Moments const& moments) -> Vector;

// Same quantity evaluated cell by cell from Phi and averaged over organisms.
auto delta_explicit_dombal(Vector const& gamma, FitnessMatrix const& phi) -> Vector;

// A with delta_dombal(gamma) = A gamma for every gamma on the simplex.
auto build_dombal_payoff(Moments const& moments) -> Matrix;

// Throws ErrorKind::DegenerateDispersion when either dispersion vanishes.
auto build_altsel_payoff(FitnessMatrix const& phi, Moments const& moments, KinshipMatrices const& kinship)
    -> PayoffBundle;

// Delta_j = gamma_j [D gamma]_j
auto delta_altsel(Vector const& gamma, PayoffBundle const& bundle) -> Vector;

// The four pure components, each averaged over organisms.
struct DeltaComponents {
    Vector gene_dom;
    Vector gene_alt;
    Vector organism_bal;
    Vector organism_sel;
};

// The alt/sel components need a payoff bundle; they come back empty without one.
auto delta_components(Vector const& gamma, Moments const& moments, PayoffBundle const* bundle) -> DeltaComponents;

auto delta_mixed(Vector const& gamma, FitnessMatrix const& phi, Moments const& moments, PayoffBundle const* bundle,
    StrategyMix const& mix) -> Vector;

// Per-gene weights: gene j uses mixes[j]. Convergence is not guaranteed here.
auto delta_mixed_per_gene(Vector const& gamma, Moments const& moments, PayoffBundle const* bundle,
    std::vector<StrategyMix> const& mixes) -> Vector;

// r_i = sum_l gamma_l phi_il
auto organism_fitness(Vector const& gamma, FitnessMatrix const& phi) -> Vector;

enum class StrategyKind { DomBal, AltSel, Mixed };

auto to_string(StrategyKind kind) -> std::string;
auto parse_strategy_kind(std::string const& text) -> StrategyKind;

struct StrategySpec {
    StrategyKind kind = StrategyKind::DomBal;
    StrategyMix mix = StrategyMix::dombal(); // used when kind == Mixed
    std::vector<StrategyMix> per_gene;       // requires experimental
    bool experimental = false;

    static auto dombal() -> StrategySpec { return {}; }
    static auto altsel() -> StrategySpec { return {StrategyKind::AltSel, StrategyMix::altsel(), {}, false}; }
    static auto mixed(StrategyMix mix) -> StrategySpec { return {StrategyKind::Mixed, mix, {}, false}; }

    [[nodiscard]] auto needs_payoff() const -> bool;
    void validate(Eigen::Index genes) const;
};

// Everything about a dataset that does not depend on gamma: Phi, its moments,
// kinship and, when the dispersions allow it, the AltSel payoff bundle.
// Immutable after construction.
class Game {
public:
    explicit Game(FitnessMatrix phi, KinshipNorm norm = kDefaultKinshipNorm,
        DispersionNormalization normalization = DispersionNormalization::DistinctPairs);

    [[nodiscard]] auto phi() const -> FitnessMatrix const& { return phi_; }
    [[nodiscard]] auto moments() const -> Moments const& { return moments_; }
    [[nodiscard]] auto kinship() const -> KinshipMatrices const& { return kinship_; }
    [[nodiscard]] auto genes() const -> Eigen::Index { return phi_.genes(); }
    [[nodiscard]] auto organisms() const -> Eigen::Index { return phi_.organisms(); }

    [[nodiscard]] auto has_payoff() const -> bool { return payoff_.has_value(); }
    // Throws the degenerate-dispersion error recorded at construction.
    [[nodiscard]] auto payoff() const -> PayoffBundle const&;
    [[nodiscard]] auto dombal_payoff() const -> Matrix const& { return dombal_; }

    [[nodiscard]] auto delta(StrategySpec const& spec, Vector const& gamma) const -> Vector;

private:
    FitnessMatrix phi_;
    Moments moments_;
    KinshipMatrices kinship_;
    Matrix dombal_;
    std::optional<PayoffBundle> payoff_;
    std::string payoff_error_;
};

} // namespace edt

#endif
