#ifndef EDT_ANALYSIS_HPP
#define EDT_ANALYSIS_HPP

#include "edt/engine.hpp"
#include "edt/strategies.hpp"

#include <string>
#include <vector>

namespace edt {

struct RankEntry {
    std::string label;
    double score = 0.0;
    int rank = 0;           // 1-based, consecutive
    Eigen::Index index = 0; // original row/column
};

// Scores descending; equal scores keep their original order.
struct Ranking {
    std::vector<RankEntry> entries;
    std::string tie_policy = "original index";
};

auto rank_scores(Vector const& scores, Labels const& labels) -> Ranking;

// Both refuse unconverged rest points with ErrorKind::NotConverged.
auto rank_genes(RestPoint const& rest, Labels const& gene_labels) -> Ranking;
auto rank_organisms(RestPoint const& rest, FitnessMatrix const& phi) -> Ranking;

struct DistributionPlan {
    Labels labels;
    Vector shares;     // r_i / sum r, sums to one
    Vector deviations; // n * share_i - 1, sums to zero
};

auto distribution(RestPoint const& rest, FitnessMatrix const& phi) -> DistributionPlan;
auto distribution_from_scores(Vector const& organism_scores, Labels const& labels) -> DistributionPlan;

struct PersistenceReport {
    Vector min_gamma_seen;
    Vector final_gamma;
    bool persistent = false;
    double threshold = kPersistenceThreshold;
};

auto persistence_report(Trajectory const& trajectory, RestPoint const& rest) -> PersistenceReport;

struct TrainingSet {
    FitnessMatrix phi;
    Vector target; // organism scores, length n
};

struct FitOptions {
    std::vector<double> gene_dom_grid;     // alpha^{g:dom} values; empty -> 0, 0.1, ..., 1
    std::vector<double> organism_bal_grid; // alpha^{w:bal} values; empty -> 0, 0.1, ..., 1
    ReplicatorConfig engine;
    KinshipNorm norm = kDefaultKinshipNorm;
};

struct FitCell {
    StrategyMix mix;
    double mse = 0.0;
    bool ok = false;
    std::string note; // why the cell was skipped
};

struct FitResult {
    StrategyMix mix;
    double mse = 0.0;
    std::vector<FitCell> cells; // grid order: gene_dom outer, organism_bal inner
};

auto default_mix_grid() -> std::vector<double>;

// (x - min) / (max - min); all zeros for a constant vector.
auto min_max_rescale(Vector const& v) -> Vector;

// Exhaustive grid search over mixing weights minimizing the mean squared error
// between rescaled organism fitness and rescaled targets.
auto fit_mix(std::vector<TrainingSet> const& training, FitOptions const& options = {}) -> FitResult;

} // namespace edt

#endif
