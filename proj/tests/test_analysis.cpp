#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "edt/analysis.hpp"
#include "edt/error.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <numeric>
#include <set>

using namespace edt;

namespace {

RestPoint converged(Vector gamma)
{
    RestPoint r;
    r.gamma = std::move(gamma);
    r.converged = true;
    return r;
}

std::set<std::string> positive_deviations(DistributionPlan const& plan)
{
    std::set<std::string> out;
    for (std::size_t i = 0; i < plan.labels.size(); ++i) {
        if (plan.deviations(static_cast<Eigen::Index>(i)) > 0.0) {
            out.insert(plan.labels[i]);
        }
    }
    return out;
}

} // namespace

TEST_CASE("ranking basics")
{
    Vector s(4);
    s << 0.2, 0.5, 0.2, 0.1;
    auto const r = rank_scores(s, {"a", "b", "c", "d"});
    REQUIRE(r.entries.size() == 4);
    CHECK(r.entries[0].label == "b");
    CHECK(r.entries[1].label == "a"); // tie resolved by original index
    CHECK(r.entries[2].label == "c");
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(r.entries[k].rank == static_cast<int>(k) + 1);
    }
    auto const flat = rank_scores(Vector::Constant(3, 0.3), {"x", "y", "z"});
    CHECK(flat.entries[0].label == "x");
    CHECK(flat.entries[2].label == "z");
    CHECK_THROWS_AS(rank_scores(s, {"a"}), Error);

    RestPoint bad = converged(s);
    bad.converged = false;
    try {
        rank_genes(bad, {"a", "b", "c", "d"});
        FAIL("expected refusal");
    } catch (Error const& e) {
        CHECK(e.kind() == ErrorKind::NotConverged);
    }
}

TEST_CASE("supermarket rankings")
{
    auto const phi = fixture::supermarket();
    Game const game(phi);
    auto const dombal = dombal_rest_point(game.moments());
    CHECK(rank_genes(dombal, phi.column_labels()).entries.front().label == "flagship");
    CHECK(rank_organisms(dombal, phi).entries.front().label == "E");

    auto const altsel = run(game, StrategySpec::altsel(), {}).rest_point;
    auto const genes = rank_genes(altsel, phi.column_labels());
    CHECK(genes.entries.front().label == "store space");
    CHECK(genes.entries.back().label == "flagship");
    CHECK(rank_organisms(altsel, phi).entries.front().label == "J");

    Matrix same(3, 2);
    same << 0.2, 0.8, 0.2, 0.8, 0.2, 0.8;
    auto const tie = rank_organisms(converged(Vector::Constant(2, 0.5)), FitnessMatrix::from_values(same));
    CHECK(tie.entries[0].index == 0);
    CHECK(tie.entries[2].index == 2);
}

TEST_CASE("ranking is stable under positive rescaling")
{
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> c(0.01, 100.0);
    for (int trial = 0; trial < 50; ++trial) {
        Vector s = oracle::random_matrix(rng, 8, 1).col(0);
        Labels labels(8);
        for (std::size_t i = 0; i < 8; ++i) {
            labels[i] = std::to_string(i);
        }
        auto const a = rank_scores(s, labels);
        auto const b = rank_scores(c(rng) * s, labels);
        for (std::size_t k = 0; k < 8; ++k) {
            CHECK(a.entries[k].index == b.entries[k].index);
        }
    }
}

TEST_CASE("distribution")
{
    auto const phi = fixture::supermarket();
    auto const plan = distribution(dombal_rest_point(compute_moments(phi)), phi);
    CHECK(std::abs(plan.shares.sum() - 1.0) < 1e-12);
    CHECK(std::abs(plan.deviations.sum()) < 1e-9);
    CHECK(plan.shares.minCoeff() >= 0.0);
    CHECK(positive_deviations(plan) == std::set<std::string> {"C", "D", "E", "H", "I"});

    auto const even = distribution_from_scores(Vector::Constant(4, 0.3), {"a", "b", "c", "d"});
    CHECK(even.shares.isApproxToConstant(0.25));
    CHECK(even.deviations.cwiseAbs().maxCoeff() < 1e-15);

    CHECK_THROWS_AS(distribution_from_scores(Vector::Zero(3), {"a", "b", "c"}), Error);
    CHECK_THROWS_AS(distribution_from_scores(Vector::Ones(3), {"a"}), Error);
}

TEST_CASE("distribution is permutation equivariant")
{
    std::mt19937_64 rng(73);
    for (int trial = 0; trial < 30; ++trial) {
        Vector r = oracle::random_matrix(rng, 9, 1).col(0);
        std::vector<int> perm(9);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        Vector permuted(9);
        Labels labels(9);
        Labels permuted_labels(9);
        for (int i = 0; i < 9; ++i) {
            permuted(i) = r(perm[static_cast<std::size_t>(i)]);
            labels[static_cast<std::size_t>(i)] = std::to_string(i);
            permuted_labels[static_cast<std::size_t>(i)] = std::to_string(perm[static_cast<std::size_t>(i)]);
        }
        auto const a = distribution_from_scores(r, labels);
        auto const b = distribution_from_scores(permuted, permuted_labels);
        for (int i = 0; i < 9; ++i) {
            CHECK(std::abs(b.shares(i) - a.shares(perm[static_cast<std::size_t>(i)])) < 1e-15);
        }
        CHECK(std::abs(a.deviations.sum()) < 1e-9);
    }
}

TEST_CASE("persistence report")
{
    auto const phi = fixture::supermarket();
    Game const game(phi);
    ReplicatorConfig cfg;
    cfg.record_trajectory = true;
    auto const d = run(game, StrategySpec::dombal(), cfg);
    CHECK(persistence_report(d.trajectory, d.rest_point).persistent);

    auto const a = run(game, StrategySpec::altsel(), cfg);
    auto const rep = persistence_report(a.trajectory, a.rest_point);
    CHECK(rep.persistent);
    CHECK(rep.final_gamma.minCoeff() > 0.04);
    CHECK((rep.min_gamma_seen.array() <= rep.final_gamma.array()).all());

    Trajectory t;
    Vector g0(2);
    g0 << 0.5, 0.5;
    Vector g1(2);
    g1 << 1.0 - 1e-8, 1e-8;
    t.iterates.push_back({0, g0, Vector::Zero(2)});
    t.iterates.push_back({1, g1, Vector::Zero(2)});
    auto const decayed = persistence_report(t, converged(g1));
    CHECK_FALSE(decayed.persistent);
    CHECK(decayed.min_gamma_seen(1) == 1e-8);
}

TEST_CASE("mix fitting")
{
    std::mt19937_64 rng(79);
    auto const phi = sanitize(FitnessMatrix::from_values(oracle::random_matrix(rng, 8, 4)));
    auto const target = organism_fitness(dombal_rest_point(compute_moments(phi)).gamma, phi);

    SUBCASE("self recovery and determinism")
    {
        auto const a = fit_mix({{phi, target}});
        CHECK(a.mix.gene_dom == 1.0);
        CHECK(a.mix.organism_bal == 1.0);
        CHECK(a.mse < 1e-6);
        CHECK(a.cells.size() == 121);
        auto const b = fit_mix({{phi, target}});
        CHECK(b.mix.gene_dom == a.mix.gene_dom);
        CHECK(b.mix.organism_bal == a.mix.organism_bal);
        CHECK(b.mse == a.mse);
    }
    SUBCASE("single cell grid")
    {
        FitOptions opt;
        opt.gene_dom_grid = {0.3};
        opt.organism_bal_grid = {0.6};
        auto const r = fit_mix({{phi, target}}, opt);
        CHECK(r.mix.gene_dom == 0.3);
        CHECK(r.mix.organism_bal == 0.6);
        CHECK(r.cells.size() == 1);
    }
    SUBCASE("errors")
    {
        CHECK_THROWS_AS(fit_mix({}), Error);
        try {
            fit_mix({{phi, Vector::Ones(3)}});
            FAIL("expected dimension error");
        } catch (Error const& e) {
            CHECK(e.kind() == ErrorKind::Dimension);
        }
        FitOptions opt;
        opt.gene_dom_grid = {0.0};
        opt.organism_bal_grid = {0.0};
        opt.engine.max_iterations = 1;
        try {
            fit_mix({{phi, target}}, opt);
            FAIL("expected fit error");
        } catch (Error const& e) {
            CHECK(e.kind() == ErrorKind::Fit);
        }
    }
}

TEST_CASE("min-max rescale")
{
    Vector v(3);
    v << 2.0, 4.0, 3.0;
    auto const r = min_max_rescale(v);
    CHECK(r(0) == 0.0);
    CHECK(r(1) == 1.0);
    CHECK(r(2) == 0.5);
    CHECK(min_max_rescale(Vector::Constant(3, 2.0)).isZero());
}
