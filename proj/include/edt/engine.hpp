#ifndef EDT_ENGINE_HPP
#define EDT_ENGINE_HPP

#include "edt/strategies.hpp"
#include "edt/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace edt {

struct ReplicatorConfig {
    double step_size = 0.5;
    int max_iterations = 10000;
    double convergence_tolerance = 1e-10; // on max_j |gamma'_j - gamma_j|
    std::optional<Vector> initial_gamma;  // uniform 1/m when absent
    bool record_trajectory = false;

    void validate(Eigen::Index genes) const;
};

// Bishop-Cannings residual that must hold at a converged rest point.
inline constexpr double kRestPointResidualTolerance = 1e-8;
// Genes below this share count as extinct.
inline constexpr double kPersistenceThreshold = 1e-6;
inline constexpr int kMaxStepHalvings = 10;

struct Iterate {
    int iteration = 0;
    Vector gamma;
    Vector delta;
};

struct Trajectory {
    std::vector<Iterate> iterates;
    Vector min_gamma_seen;
};

enum class RestPointMethod { Iterated, ClosedFormDomBal, LvLinear };
enum class TailBehavior { None, Stalled, Oscillating, Extinction };

auto to_string(RestPointMethod method) -> std::string;
auto to_string(TailBehavior tail) -> std::string;

struct RestPoint {
    Vector gamma;
    double bc_residual = 0.0;
    int iterations = 0;
    bool converged = false;
    RestPointMethod method = RestPointMethod::Iterated;
    TailBehavior tail = TailBehavior::None;
    int step_halvings = 0; // total over the run

    [[nodiscard]] auto persistent() const -> bool;
};

struct RunResult {
    Trajectory trajectory;
    RestPoint rest_point;
};

using DeltaFunction = std::function<Vector(Vector const&)>;

struct StepResult {
    Vector gamma;
    double step_size = 0.0; // after any halving
    int halvings = 0;
};

// One discrete replicator update. Halves h (at most kMaxStepHalvings times)
// while some 1 + h Delta_j <= 0 on the support, then throws ErrorKind::StepSize.
auto step(Vector const& gamma, Vector const& delta, double step_size) -> StepResult;

// max_j |Delta_j - sum_l gamma_l Delta_l| over genes with gamma_j > 1e-14.
auto bc_residual(Vector const& gamma, Vector const& delta) -> double;

// Iterates until the iterate difference and the residual are both small or the
// budget runs out. Non-convergence is reported in the rest point, not thrown.
auto run(DeltaFunction const& delta, Eigen::Index genes, ReplicatorConfig const& config) -> RunResult;
auto run(Game const& game, StrategySpec const& spec, ReplicatorConfig const& config) -> RunResult;

// Closed-form DomBal rest point: gamma_j proportional to 1 / (mean_j + 1/2).
auto dombal_rest_point(Moments const& moments) -> RestPoint;

struct LvSystem {
    Matrix reduced; // A', (m-1) x (m-1)
    Vector offset;  // b, length m-1
};

// Maps a linear replicator payoff onto the equivalent Lotka-Volterra system.
auto lv_map(Matrix const& payoff) -> LvSystem;

struct LvFixedPoint {
    std::optional<Vector> gamma; // absent when singular or outside the simplex
    Vector y;                    // LV coordinates with y_m = 1, when solved
    Eigen::Index rank = 0;       // numerical rank of A'
    std::string diagnostic;
};

auto lv_fixed_point(Matrix const& payoff) -> LvFixedPoint;

// Wraps an LV solution as a rest point certified against Delta = A gamma.
auto lv_rest_point(Matrix const& payoff) -> std::optional<RestPoint>;

// Numerical rank; pivots below 1e-10 times the largest count as zero.
auto rank_of(Matrix const& m) -> Eigen::Index;

// Random strictly interior simplex points (flat Dirichlet).
auto random_interior_starts(Eigen::Index genes, int count, std::uint64_t seed) -> std::vector<Vector>;

struct MultiStartResult {
    std::vector<RestPoint> rest_points;
    double max_disagreement = 0.0; // over converged runs, max-norm
    bool all_converged = false;
    bool anomaly = false;          // converged runs disagree beyond tolerance
};

// Independent runs from each start, executed concurrently.
auto run_multistart(Game const& game, StrategySpec const& spec, ReplicatorConfig const& config,
    std::vector<Vector> const& starts, double agreement_tolerance = 1e-6) -> MultiStartResult;

} // namespace edt

#endif
