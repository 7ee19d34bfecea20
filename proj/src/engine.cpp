#include "edt/engine.hpp"

#include "edt/error.hpp"
#include "parallel.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

namespace edt {

namespace {

constexpr double kSupportThreshold = 1e-14;
constexpr double kRankThreshold = 1e-10;
constexpr std::size_t kTailWindow = 10;

// Oscillation: the path travelled by some gene is much longer than where it ended up.
auto classify_tail(std::deque<Vector> const& window) -> TailBehavior
{
    if (window.size() < 3) {
        return TailBehavior::Stalled;
    }
    double travelled = 0.0;
    double net = 0.0;
    auto const m = window.front().size();
    for (Eigen::Index j = 0; j < m; ++j) {
        double path = 0.0;
        for (std::size_t k = 1; k < window.size(); ++k) {
            path += std::abs(window[k](j) - window[k - 1](j));
        }
        travelled = std::max(travelled, path);
        net = std::max(net, std::abs(window.back()(j) - window.front()(j)));
    }
    return travelled > 2.0 * net ? TailBehavior::Oscillating : TailBehavior::Stalled;
}

auto run_impl(DeltaFunction const& delta, Eigen::Index genes, ReplicatorConfig const& config, bool monitor_persistence)
    -> RunResult
{
    config.validate(genes);
    Vector gamma = config.initial_gamma ? *config.initial_gamma : Vector::Constant(genes, 1.0 / static_cast<double>(genes));

    RunResult result;
    auto& traj = result.trajectory;
    auto& rest = result.rest_point;
    traj.min_gamma_seen = gamma;

    Vector d = delta(gamma);
    if (config.record_trajectory) {
        traj.iterates.push_back({0, gamma, d});
    }
    std::deque<Vector> window {gamma};

    for (int k = 1; k <= config.max_iterations; ++k) {
        auto next = step(gamma, d, config.step_size);
        rest.step_halvings += next.halvings;
        double const change = (next.gamma - gamma).cwiseAbs().maxCoeff();
        gamma = std::move(next.gamma);
        d = delta(gamma);
        traj.min_gamma_seen = traj.min_gamma_seen.cwiseMin(gamma);
        if (config.record_trajectory) {
            traj.iterates.push_back({k, gamma, d});
        }
        window.push_back(gamma);
        if (window.size() > kTailWindow) {
            window.pop_front();
        }
        rest.iterations = k;

        if (monitor_persistence && gamma.minCoeff() < kPersistenceThreshold) {
            rest.tail = TailBehavior::Extinction;
            break;
        }
        if (change < config.convergence_tolerance && bc_residual(gamma, d) < kRestPointResidualTolerance) {
            rest.converged = true;
            break;
        }
    }

    rest.gamma = gamma;
    rest.bc_residual = bc_residual(gamma, d);
    rest.method = RestPointMethod::Iterated;
    if (!rest.converged && rest.tail == TailBehavior::None) {
        rest.tail = classify_tail(window);
    }
    return result;
}

} // namespace

void ReplicatorConfig::validate(Eigen::Index genes) const
{
    if (!(step_size > 0.0 && step_size < 1.0)) {
        throw Error(ErrorKind::Config, "step size h must lie in (0,1), got " + std::to_string(step_size));
    }
    if (max_iterations < 1) {
        throw Error(ErrorKind::Config, "max iterations must be positive");
    }
    if (!(convergence_tolerance > 0.0)) {
        throw Error(ErrorKind::Config, "convergence tolerance must be positive");
    }
    if (genes < 1) {
        throw Error(ErrorKind::Dimension, "need at least one gene");
    }
    if (initial_gamma) {
        require_simplex(*initial_gamma, genes, "initial gamma");
        if ((initial_gamma->array() <= 0.0).any()) {
            throw Error(ErrorKind::Config, "initial gamma must be strictly interior (all entries > 0)");
        }
    }
}

auto to_string(RestPointMethod method) -> std::string
{
    switch (method) {
    case RestPointMethod::Iterated: return "iterated";
    case RestPointMethod::ClosedFormDomBal: return "closedFormDomBal";
    case RestPointMethod::LvLinear: return "lvLinear";
    }
    return "unknown";
}

auto to_string(TailBehavior tail) -> std::string
{
    switch (tail) {
    case TailBehavior::None: return "none";
    case TailBehavior::Stalled: return "stalled";
    case TailBehavior::Oscillating: return "oscillating";
    case TailBehavior::Extinction: return "extinction";
    }
    return "unknown";
}

auto RestPoint::persistent() const -> bool { return gamma.size() > 0 && gamma.minCoeff() > kPersistenceThreshold; }

auto step(Vector const& gamma, Vector const& delta, double step_size) -> StepResult
{
    if (gamma.size() != delta.size()) {
        throw Error(ErrorKind::Dimension, "step: gamma and delta differ in length");
    }
    if (!delta.allFinite()) {
        throw Error(ErrorKind::StepSize, "step: delta has non-finite entries");
    }
    StepResult result;
    double h = step_size;
    for (int halvings = 0; halvings <= kMaxStepHalvings; ++halvings, h *= 0.5) {
        Vector const factor = (1.0 + h * delta.array()).matrix();
        bool admissible = true;
        for (Eigen::Index j = 0; j < gamma.size(); ++j) {
            if (gamma(j) > 0.0 && factor(j) <= 0.0) {
                admissible = false;
                break;
            }
        }
        if (!admissible) {
            continue;
        }
        Vector next = gamma.cwiseProduct(factor);
        double const denominator = next.sum();
        if (!(denominator > 0.0)) {
            continue;
        }
        result.gamma = next / denominator;
        result.step_size = h;
        result.halvings = halvings;
        return result;
    }
    throw Error(ErrorKind::StepSize, "step: 1 + h*delta stays non-positive after " + std::to_string(kMaxStepHalvings)
            + " halvings of h; the strategy produced out-of-range deltas");
}

auto bc_residual(Vector const& gamma, Vector const& delta) -> double
{
    if (gamma.size() != delta.size()) {
        throw Error(ErrorKind::Dimension, "bc_residual: gamma and delta differ in length");
    }
    double const mean = gamma.dot(delta);
    double residual = 0.0;
    for (Eigen::Index j = 0; j < gamma.size(); ++j) {
        if (gamma(j) > kSupportThreshold) {
            residual = std::max(residual, std::abs(delta(j) - mean));
        }
    }
    return residual;
}

auto run(DeltaFunction const& delta, Eigen::Index genes, ReplicatorConfig const& config) -> RunResult
{
    return run_impl(delta, genes, config, false);
}

auto run(Game const& game, StrategySpec const& spec, ReplicatorConfig const& config) -> RunResult
{
    spec.validate(game.genes());
    if (spec.needs_payoff()) {
        (void)game.payoff(); // surfaces the degenerate-dispersion error before iterating
    }
    auto const delta = [&](Vector const& gamma) { return game.delta(spec, gamma); };
    return run_impl(delta, game.genes(), config, spec.experimental);
}

auto dombal_rest_point(Moments const& moments) -> RestPoint
{
    Vector const inverse = (moments.column_means.array() + 0.5).inverse().matrix();
    RestPoint rest;
    rest.gamma = inverse / inverse.sum();
    rest.bc_residual = bc_residual(rest.gamma, delta_dombal(rest.gamma, moments));
    rest.converged = true;
    rest.method = RestPointMethod::ClosedFormDomBal;
    return rest;
}

auto lv_map(Matrix const& payoff) -> LvSystem
{
    auto const m = payoff.rows();
    if (m < 2 || payoff.cols() != m) {
        throw Error(ErrorKind::Dimension, "lv_map needs a square payoff matrix of size >= 2");
    }
    LvSystem lv;
    auto const last = m - 1;
    lv.reduced = payoff.topLeftCorner(last, last).rowwise() - payoff.row(last).head(last);
    lv.offset = payoff.col(last).head(last).array() - payoff(last, last);
    return lv;
}

auto lv_fixed_point(Matrix const& payoff) -> LvFixedPoint
{
    auto const lv = lv_map(payoff);
    auto const k = lv.reduced.rows();
    LvFixedPoint result;
    Eigen::FullPivLU<Matrix> lu(lv.reduced);
    lu.setThreshold(kRankThreshold);
    result.rank = lu.rank();
    if (result.rank < k) {
        result.diagnostic = "reduced LV matrix is singular (rank " + std::to_string(result.rank) + " of " + std::to_string(k) + ")";
        return result;
    }
    result.y.resize(k + 1);
    result.y.head(k) = lu.solve(-lv.offset);
    result.y(k) = 1.0;
    if (!result.y.allFinite() || (result.y.array() <= 0.0).any()) {
        result.diagnostic = "LV solution has non-positive coordinates; no interior rest point";
        return result;
    }
    result.gamma = result.y / result.y.sum();
    result.diagnostic = "ok";
    return result;
}

auto lv_rest_point(Matrix const& payoff) -> std::optional<RestPoint>
{
    auto const fp = lv_fixed_point(payoff);
    if (!fp.gamma) {
        return std::nullopt;
    }
    RestPoint rest;
    rest.gamma = *fp.gamma;
    rest.bc_residual = bc_residual(rest.gamma, payoff * rest.gamma);
    rest.converged = rest.bc_residual < kRestPointResidualTolerance;
    rest.method = RestPointMethod::LvLinear;
    return rest;
}

auto rank_of(Matrix const& m) -> Eigen::Index
{
    if (m.size() == 0) {
        return 0;
    }
    Eigen::FullPivLU<Matrix> lu(m);
    lu.setThreshold(kRankThreshold);
    return lu.rank();
}

auto random_interior_starts(Eigen::Index genes, int count, std::uint64_t seed) -> std::vector<Vector>
{
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> draw(1.0);
    std::vector<Vector> starts;
    starts.reserve(static_cast<std::size_t>(std::max(count, 0)));
    for (int s = 0; s < count; ++s) {
        Vector v(genes);
        for (Eigen::Index j = 0; j < genes; ++j) {
            double x = 0.0;
            while (!(x > 1e-12)) {
                x = draw(rng);
            }
            v(j) = x;
        }
        starts.push_back(v / v.sum());
    }
    return starts;
}

auto run_multistart(Game const& game, StrategySpec const& spec, ReplicatorConfig const& config,
    std::vector<Vector> const& starts, double agreement_tolerance) -> MultiStartResult
{
    MultiStartResult result;
    result.rest_points.resize(starts.size());
    detail::parallel_for(starts.size(), [&](std::size_t k) {
        auto cfg = config;
        cfg.initial_gamma = starts[k];
        cfg.record_trajectory = false;
        result.rest_points[k] = run(game, spec, cfg).rest_point;
    });
    result.all_converged = std::all_of(result.rest_points.begin(), result.rest_points.end(), [](auto const& r) { return r.converged; });
    auto const& points = result.rest_points;
    for (std::size_t a = 0; a < points.size(); ++a) {
        for (std::size_t b = a + 1; b < points.size(); ++b) {
            if (points[a].converged && points[b].converged) {
                result.max_disagreement = std::max(result.max_disagreement, (points[a].gamma - points[b].gamma).cwiseAbs().maxCoeff());
            }
        }
    }
    result.anomaly = result.max_disagreement > agreement_tolerance;
    return result;
}

} // namespace edt
