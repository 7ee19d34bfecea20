#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "edt/engine.hpp"
#include "edt/error.hpp"
#include "edt/strategies.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace edt;

namespace {

Vector vec(std::initializer_list<double> xs)
{
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index k = 0;
    for (double x : xs) {
        v(k++) = x;
    }
    return v;
}

Vector uniform(Eigen::Index m) { return Vector::Constant(m, 1.0 / static_cast<double>(m)); }

template <typename Derived>
double max_abs(Eigen::MatrixBase<Derived> const& x)
{
    return x.cwiseAbs().maxCoeff();
}

} // namespace

TEST_CASE("mix parsing and validation")
{
    auto const m = parse_mix("g:dom=0.3,w:bal=0.6");
    CHECK(m.gene_dom == doctest::Approx(0.3));
    CHECK(m.gene_alt == doctest::Approx(0.7));
    CHECK(m.organism_bal == doctest::Approx(0.6));
    CHECK(m.organism_sel == doctest::Approx(0.4));
    auto const alt = parse_mix("g:alt=1,w:sel=0.25");
    CHECK(alt.gene_dom == 0.0);
    CHECK(alt.organism_bal == doctest::Approx(0.75));
    CHECK_THROWS_AS(parse_mix("g:dom=1.2"), Error);
    CHECK_THROWS_AS(parse_mix("g:dom=0.5,g:alt=0.7"), Error);
    CHECK_THROWS_AS(parse_mix("x:foo=1"), Error);
    CHECK_THROWS_AS((StrategyMix {0.5, 0.6, 1.0, 0.0}.validate()), Error);
    CHECK_NOTHROW(StrategyMix::blend(0.2, 0.9).validate());
    CHECK(parse_strategy_kind("AltSel") == StrategyKind::AltSel);
    CHECK_THROWS_AS(parse_strategy_kind("greedy"), Error);
}

TEST_CASE("closed-form DomBal delta")
{
    Matrix half = Matrix::Constant(4, 3, 0.5);
    half(0, 0) = 0.4;
    half(1, 0) = 0.6; // column means stay 1/2
    auto const mo = compute_moments(FitnessMatrix::from_values(half));
    CHECK(max_abs(delta_dombal(uniform(3), mo)) < 1e-15);
    auto const g = vec({0.2, 0.5, 0.3});
    Vector expected = (-g.array() + 1.0 / 3.0).matrix();
    CHECK(max_abs(delta_dombal(g, mo) - expected) < 1e-15);

    auto const phi = fixture::supermarket();
    auto const sm = compute_moments(phi);
    auto const pinned = vec({0.01675948767785501, 0.01725399317236051, 0.00846278438115172, 0.00541028132864868,
        -0.00405683885275723, 0.00699758291595026, 0.04033091624928359});
    CHECK(max_abs(delta_dombal(uniform(7), sm) - pinned) < 1e-12);
    CHECK_THROWS_AS(delta_dombal(uniform(3), sm), Error);
}

TEST_CASE("explicit DomBal delta")
{
    Matrix one(1, 2);
    one << 1.0, 0.0;
    // a single organism is fine for the per-cell evaluation
    auto const d = delta_explicit_dombal(vec({0.5, 0.5}), FitnessMatrix(one, {"a", "b"}, {"x"}));
    CHECK(d(0) == doctest::Approx(-0.25));
    CHECK(d(1) == doctest::Approx(0.25));

    Matrix half = Matrix::Constant(3, 4, 0.5);
    CHECK(max_abs(delta_explicit_dombal(uniform(4), FitnessMatrix::from_values(half))) < 1e-15);
}

TEST_CASE("closed form equals explicit and oracle evaluation on random inputs")
{
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> nd(2, 20);
    std::uniform_int_distribution<int> md(2, 10);
    for (int trial = 0; trial < 100; ++trial) {
        auto const n = nd(rng);
        auto const m = md(rng);
        auto const phi = FitnessMatrix::from_values(oracle::random_matrix(rng, n, m));
        auto const mo = compute_moments(phi);
        auto const g = oracle::random_simplex(rng, m);
        auto const closed = delta_dombal(g, mo);
        CHECK(max_abs(closed - delta_explicit_dombal(g, phi)) < 1e-12);
        CHECK(max_abs(closed - oracle::dombal_delta(g, phi.values())) < 1e-12);
        CHECK(max_abs(build_dombal_payoff(mo) * g - closed) < 1e-12);
    }
}

TEST_CASE("DomBal payoff matrix")
{
    Matrix v(2, 2);
    v << 0.25, 0.75, 0.75, 0.25;
    auto const a = build_dombal_payoff(compute_moments(FitnessMatrix::from_values(v)));
    Matrix expected(2, 2);
    expected << -0.5, 0.5, 0.5, -0.5;
    CHECK(max_abs(a - expected) < 1e-15);

    auto const sm = build_dombal_payoff(compute_moments(fixture::supermarket()));
    CHECK(sm(6, 6) == doctest::Approx(-0.7857142857142858).epsilon(1e-12));
}

TEST_CASE("AltSel payoff on the supermarket data")
{
    auto const phi = fixture::supermarket();
    Game const game(phi);
    auto const& b = game.payoff();
    CHECK(max_abs(b.organism - fixture::printed_dw()) <= 0.02);
    CHECK(max_abs(b.combined - fixture::printed_d()) <= 0.03);
    CHECK(b.combined == b.gene + b.organism);
    CHECK(b.organism(0, 1) == doctest::Approx(1.46).epsilon(0.02 / 1.46));
    CHECK(std::abs(b.combined(1, 0) - 0.84) <= 0.03);
    CHECK(std::abs(b.combined(6, 6) + 7.69) <= 0.03);

    auto const row = vec({-3.8096082503974884, 0.21886655298300162, -1.7230724174060168, -0.7220823007278261,
        0.07269033603194597, -0.34401056778543915, 0.22460010423104682});
    CHECK(max_abs(Vector(b.combined.row(0).transpose()) - row) < 1e-12);
    CHECK(b.combined(1, 0) == doctest::Approx(0.8445193931671917).epsilon(1e-12));
    CHECK(b.combined(6, 6) == doctest::Approx(-7.690956998684325).epsilon(1e-12));
    CHECK(rank_of(b.combined) == 7);

    // gene part checked against D - D^w built from the two complete printed matrices
    Matrix const printed_dg = fixture::printed_d() - fixture::printed_dw();
    CHECK(max_abs(b.gene - printed_dg) <= 0.05);
}

TEST_CASE("AltSel delta at uniform weights is the row sums over m^2")
{
    Game const game(fixture::supermarket());
    auto const d = delta_altsel(uniform(7), game.payoff());
    auto const pinned = vec({-0.12413503149124032, -0.04408369769320279, -0.04825347230975321, -0.07309399492749637,
        -0.05591681207531423, -0.06937031067591841, -0.32261362190266446});
    CHECK(max_abs(d - pinned) < 1e-12);
    Vector const printed_rows = fixture::printed_d().rowwise().sum() / 49.0;
    CHECK(max_abs(d - printed_rows) < 0.001);
}

TEST_CASE("AltSel payoff matches the quadruple-loop oracle")
{
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<int> nd(3, 9);
    std::uniform_int_distribution<int> md(2, 6);
    for (int trial = 0; trial < 40; ++trial) {
        auto const phi = FitnessMatrix::from_values(oracle::random_matrix(rng, nd(rng), md(rng)));
        for (auto norm : {KinshipNorm::L1, KinshipNorm::L2}) {
            bool const l2 = norm == KinshipNorm::L2;
            Game const game(phi, norm);
            auto const& b = game.payoff();
            CHECK(max_abs(b.gene - oracle::dg(phi.values(), l2)) < 1e-10);
            CHECK(max_abs(b.organism - oracle::dw(phi.values(), l2)) < 1e-10);
            CHECK(max_abs(Vector(b.gene.diagonal())) < 1e-15);
            CHECK(max_abs(b.organism - b.organism.transpose()) < 1e-12);

            auto const g = oracle::random_simplex(rng, phi.genes());
            CHECK(max_abs(delta_altsel(g, b) - oracle::altsel_delta(g, phi.values(), l2)) < 1e-10);
        }
    }
}

TEST_CASE("AltSel vertex evaluation")
{
    Game const game(fixture::supermarket());
    auto const& d = game.payoff().combined;
    for (Eigen::Index j = 0; j < 7; ++j) {
        Vector e = Vector::Zero(7);
        e(j) = 1.0;
        auto const delta = delta_altsel(e, game.payoff());
        CHECK(delta(j) == doctest::Approx(d(j, j)));
        CHECK((delta.array() != 0.0).count() == 1);
    }
}

TEST_CASE("degenerate dispersion")
{
    Matrix flat = Matrix::Constant(3, 2, 0.5);
    auto const phi = FitnessMatrix::from_values(flat);
    Game const game(phi);
    CHECK_FALSE(game.has_payoff());
    try {
        (void)game.payoff();
        FAIL("expected degenerate dispersion");
    } catch (Error const& e) {
        CHECK(e.kind() == ErrorKind::DegenerateDispersion);
    }
    CHECK_NOTHROW((void)game.delta(StrategySpec::dombal(), uniform(2)));
    CHECK_THROWS_AS((void)game.delta(StrategySpec::altsel(), uniform(2)), Error);
}

TEST_CASE("identical organisms contribute nothing to their own pair")
{
    Matrix v(3, 2);
    v << 0.2, 0.9, 0.2, 0.9, 0.7, 0.1;
    auto const phi = FitnessMatrix::from_values(v);
    Game const game(phi);
    CHECK(game.kinship().organism(0, 1) == 1.0);
    CHECK(max_abs(game.payoff().organism - oracle::dw(v)) < 1e-12);
}

TEST_CASE("mixed strategy limits and linearity")
{
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 20; ++trial) {
        auto const phi = FitnessMatrix::from_values(oracle::random_matrix(rng, 7, 4));
        Game const game(phi);
        auto const g = oracle::random_simplex(rng, 4);
        auto const& mo = game.moments();
        auto const* b = &game.payoff();
        auto const dombal = delta_explicit_dombal(g, phi);
        auto const altsel = delta_altsel(g, *b);
        CHECK(max_abs(delta_mixed(g, phi, mo, b, StrategyMix::dombal()) - dombal) < 1e-12);
        CHECK(max_abs(delta_mixed(g, phi, mo, b, StrategyMix::altsel()) - altsel) < 1e-12);
        CHECK(max_abs(delta_mixed(g, phi, mo, b, StrategyMix::blend(0.5, 0.5)) - 0.5 * (dombal + altsel)) < 1e-12);
        CHECK_THROWS_AS(delta_mixed(g, phi, mo, b, StrategyMix {0.5, 0.4, 1.0, 0.0}), Error);

        std::vector<StrategyMix> same(4, StrategyMix::blend(0.3, 0.8));
        CHECK(max_abs(delta_mixed_per_gene(g, mo, b, same) - delta_mixed(g, phi, mo, b, same.front())) < 1e-12);

        CHECK(max_abs(game.delta(StrategySpec::mixed(StrategyMix::blend(0.5, 0.5)), g) - 0.5 * (dombal + altsel)) < 1e-12);
    }
}

TEST_CASE("organism fitness")
{
    auto const phi = fixture::supermarket();
    auto const mo = compute_moments(phi);
    CHECK(max_abs(organism_fitness(uniform(7), phi) - mo.harmonic_fitness) < 1e-15);
    Vector e = Vector::Zero(7);
    e(2) = 1.0;
    CHECK(max_abs(organism_fitness(e, phi) - Vector(phi.values().col(2))) == 0.0);
    CHECK_THROWS_AS(organism_fitness(uniform(3), phi), Error);
}

TEST_CASE("constant shift keeps fixed points")
{
    // any gamma whose deltas are all equal stays put, shifted or not
    auto const g = vec({0.2, 0.3, 0.5});
    Vector const d = Vector::Constant(3, -0.3);
    for (double c : {-0.5, 0.0, 0.25, 2.0}) {
        Vector const shifted = (d.array() + c).matrix();
        CHECK(max_abs(step(g, shifted, 0.5).gamma - g) < 1e-15);
    }
}

TEST_CASE("StrategySpec validation")
{
    auto spec = StrategySpec::mixed(StrategyMix::blend(0.5, 0.5));
    spec.per_gene.assign(3, StrategyMix::dombal());
    CHECK_THROWS_AS(spec.validate(3), Error);
    spec.experimental = true;
    CHECK_NOTHROW(spec.validate(3));
    CHECK_THROWS_AS(spec.validate(4), Error);
    CHECK_FALSE(StrategySpec::dombal().needs_payoff());
    CHECK(StrategySpec::altsel().needs_payoff());
}
