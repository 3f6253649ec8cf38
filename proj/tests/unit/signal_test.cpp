#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <doctest.h>

#include "oracle.hpp"
#include "prime_lab/errors.hpp"
#include "prime_lab/signal.hpp"

using namespace prime_lab;
using doctest::Approx;

namespace {

const double kPi = std::numbers::pi;

WeightedEnsemble ensemble(std::uint64_t cutoff, double x) {
    return WeightedEnsemble(sieve_primes(cutoff), x);
}

double slope_scale(const WeightedEnsemble& e) {
    double s = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) s += e.weights()[i] * e.frequencies()[i];
    return s;
}

}  // namespace

TEST_CASE("grid: sample positions") {
    const SampleGrid g(140.0, 160.0, 3000);
    CHECK(g.size() == 3000);
    CHECK(g.at(0) == 140.0);
    CHECK(g.at(2999) == 160.0);
    CHECK(g.spacing() == Approx(20.0 / 2999.0).epsilon(1e-15));
    CHECK(g.at(1500) == Approx(140.0 + 1500 * 20.0 / 2999.0).epsilon(1e-15));
    CHECK_THROWS_AS(SampleGrid(1.0, 1.0, 10), DomainError);
    CHECK_THROWS_AS(SampleGrid(2.0, 1.0, 10), DomainError);
    CHECK_THROWS_AS(SampleGrid(0.0, 1.0, 1), DomainError);
}

TEST_CASE("eval_point: reference values") {
    // Direct sums at 40 digits.
    CHECK(eval_point(ensemble(10, 0.5), 0.0) == Approx(2.1096351188853585).epsilon(1e-14));
    CHECK(eval_point(ensemble(2, 0.5), kPi / std::log(2.0)) ==
          Approx(-0.70710678118654752).epsilon(1e-14));
    CHECK(eval_point(ensemble(100, 0.5), 0.0) == Approx(5.5364818525985161).epsilon(1e-14));
    CHECK(eval_point(ensemble(100, 1.0), 0.0) == Approx(1.8028172010488709).epsilon(1e-14));
}

TEST_CASE("eval_point: t = 0 gives the weight sum; S is even in t") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> ut(-500.0, 500.0);
    for (std::uint64_t cutoff : {2ull, 10ull, 97ull, 1000ull}) {
        const auto e = ensemble(cutoff, 0.5);
        CHECK(eval_point(e, 0.0) == Approx(e.weight_sum()).epsilon(1e-15));
        for (int i = 0; i < 20; ++i) {
            const double t = ut(gen);
            CHECK(std::abs(eval_point(e, t) - eval_point(e, -t)) < 1e-12);
        }
    }
}

TEST_CASE("eval_point: agrees with the long-double oracle") {
    const auto table = sieve_primes(10'000);
    const WeightedEnsemble e(table, 0.5);
    for (double t : {0.5, 14.134725, 150.0, 1234.5}) {
        const long double ref = oracle::signal(table.primes(), 0.5L, t);
        CHECK(std::abs(eval_point(e, t) - static_cast<double>(ref)) < 1e-11);
    }
}

TEST_CASE("eval_derivative_point: analytic and finite-difference checks") {
    CHECK(eval_derivative_point(ensemble(1000, 0.5), 0.0) == 0.0);
    CHECK(eval_derivative_point(ensemble(2, 0.5), 0.5 * kPi / std::log(2.0)) ==
          Approx(-0.49012907173427360).epsilon(1e-14));

    const auto e = ensemble(10, 0.5);
    const double h = 1e-6;
    for (double t : {0.3, 1.7, 12.0, 151.25}) {
        const double fd = (eval_point(e, t + h) - eval_point(e, t - h)) / (2 * h);
        CHECK(std::abs(eval_derivative_point(e, t) - fd) < 1e-6);
    }
}

TEST_CASE("eval_derivative_point: 100 random ensembles vs centered difference") {
    std::mt19937_64 gen(20240601);
    std::uniform_int_distribution<std::uint64_t> ucut(2, 1000);
    std::uniform_real_distribution<double> ux(0.1, 1.5), ut(-300.0, 300.0);
    const double h = 1e-6;
    for (int i = 0; i < 100; ++i) {
        const auto e = ensemble(ucut(gen), ux(gen));
        const double t = ut(gen);
        const double fd = (eval_point(e, t + h) - eval_point(e, t - h)) / (2 * h);
        CAPTURE(e.table().cutoff());
        CAPTURE(t);
        CHECK(std::abs(eval_derivative_point(e, t) - fd) < 1e-5 * (1.0 + slope_scale(e)));
    }
}

TEST_CASE("eval_grid: small grid matches direct evaluation") {
    const auto e = ensemble(10, 0.5);
    const SampleGrid g(0.0, 10.0, 11);
    const auto s = eval_grid(e, g);
    // S at t = 0..10, 40-digit direct sums.
    const double expected[] = {2.1096351188853585,   0.65077688939474089,  -0.93112324087711411,
                               -0.52204516632554952, -0.37154841795446953, -0.71038365150683822,
                               -0.019230653220639407, 0.49842889237322284, 0.11040227986818603,
                               0.12514590614242675,  0.45384954964152287};
    REQUIRE(s.values.size() == 11);
    CHECK(!s.derivatives.has_value());
    for (std::size_t k = 0; k < 11; ++k) {
        CHECK(std::abs(s.values[k] - expected[k]) < 1e-12);
        CHECK(std::abs(s.values[k] - eval_point(e, g.at(k))) < 1e-12);
    }
}

TEST_CASE("eval_grid: two-point grid") {
    const auto e = ensemble(500, 0.7);
    const SampleGrid g(-3.0, 41.5, 2);
    const auto s = eval_grid(e, g, true);
    CHECK(std::abs(s.values[0] - eval_point(e, -3.0)) < 1e-14);
    CHECK(std::abs(s.values[1] - eval_point(e, 41.5)) < 1e-14);
    CHECK(std::abs((*s.derivatives)[1] - eval_derivative_point(e, 41.5)) < 1e-13);
}

TEST_CASE("eval_grid: rotation recurrence holds 1e-9 relative on a 10^5-point grid") {
    const auto e = ensemble(20'000, 0.5);
    const SampleGrid g(100.0, 5100.0, 100'000);
    const auto s = eval_grid(e, g, true);
    const double tol = 1e-9 * e.weight_sum();
    const double dtol = 1e-9 * slope_scale(e);
    std::mt19937_64 gen(3);
    std::uniform_int_distribution<std::size_t> uk(0, g.size() - 1);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const std::size_t k = i < 2 ? (i == 0 ? 255 : g.size() - 1) : uk(gen);
        worst = std::max(worst, std::abs(s.values[k] - eval_point(e, g.at(k))));
        CHECK(std::abs((*s.derivatives)[k] - eval_derivative_point(e, g.at(k))) < dtol);
    }
    CHECK(worst < tol);
}

TEST_CASE("eval_grid: identical output for any thread count") {
    const auto e = ensemble(50'000, 0.5);  // several mode blocks
    const SampleGrid g(140.0, 160.0, 1000);
    const auto one = eval_grid(e, g, true, {1});
    for (unsigned threads : {2u, 3u, 8u}) {
        const auto many = eval_grid(e, g, true, {threads});
        CHECK(one.values == many.values);
        CHECK(*one.derivatives == *many.derivatives);
    }
}

TEST_CASE("eval_grid: triangle-inequality bound") {
    for (double x : {0.25, 0.5, 0.75}) {
        const auto e = ensemble(3000, x);
        const auto s = eval_grid(e, SampleGrid(-50.0, 50.0, 2001));
        double worst = 0.0;
        for (double v : s.values) worst = std::max(worst, std::abs(v) / e.weight_sum() - 1.0);
        // rotation drift over one tile is a few dozen ulps at most
        CHECK(worst <= 1e-13);
    }
}

TEST_CASE("phase reference: parsing and evaluation") {
    CHECK(PhaseReference::parse("zero").kind() == PhaseReference::Kind::Zero);
    CHECK(PhaseReference::parse("rs").kind() == PhaseReference::Kind::RiemannSiegel);
    const auto lin = PhaseReference::parse("linear:0.25");
    CHECK(lin.kind() == PhaseReference::Kind::Linear);
    CHECK(lin(8.0) == 2.0);
    CHECK_THROWS_AS(PhaseReference::parse("cubic"), ValidationError);
    CHECK_THROWS_AS(PhaseReference::parse("linear:abc"), ParseError);
    CHECK_THROWS_AS(PhaseReference::riemann_siegel()(0.0), DomainError);
    CHECK(PhaseReference::riemann_siegel()(150.0) ==
          Approx(static_cast<double>(oracle::rs_theta(150.0L))).epsilon(1e-15));
}

TEST_CASE("eval_phase_referenced: closed forms") {
    const auto two = ensemble(2, 0.5);
    const auto lin = eval_phase_referenced(two, SampleGrid(-20.0, 80.0, 501),
                                           PhaseReference::linear(std::log(2.0)));
    for (double v : lin.values) CHECK(std::abs(v - std::numbers::sqrt2) < 1e-12);

    const auto e = ensemble(300, 0.6);
    const SampleGrid g(-40.0, 40.0, 777);
    const auto w = eval_phase_referenced(e, g, PhaseReference::zero());
    const auto s = eval_grid(e, g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        CHECK(w.values[k] == 2.0 * s.values[k]);
        CHECK(std::abs(w.values[k] - 2.0 * eval_point(e, g.at(k))) < 1e-12);
        CHECK(std::abs(w.values[k]) <= 2.0 * e.weight_sum());
    }
}

TEST_CASE("eval_phase_referenced: Riemann-Siegel phase against the oracle") {
    const auto table = sieve_primes(10);
    const WeightedEnsemble e(table, 0.5);
    const auto w = eval_phase_referenced(e, SampleGrid(150.0, 151.0, 2),
                                         PhaseReference::riemann_siegel());
    // 40-digit term-by-term sum.
    CHECK(std::abs(w.values[0] - (-2.8573436970582105)) < 1e-9);
    const long double ref = oracle::phase_signal(table.primes(), 0.5L, 150.0L, oracle::rs_theta(150.0L));
    CHECK(std::abs(w.values[0] - static_cast<double>(ref)) < 1e-9);

    CHECK_THROWS_AS(eval_phase_referenced(e, SampleGrid(0.0, 1.0, 5),
                                          PhaseReference::riemann_siegel()),
                    DomainError);
    CHECK_THROWS_AS(eval_phase_referenced(e, SampleGrid(-1.0, 1.0, 5),
                                          PhaseReference::riemann_siegel()),
                    DomainError);
}

TEST_CASE("progressive_partial_sums: telescoping prefixes") {
    const auto e = ensemble(97, 0.5);
    const SampleGrid g(140.0, 160.0, 600);
    const auto parts = progressive_partial_sums(e, g, PhaseReference::zero());
    REQUIRE(parts.size() == 25);
    for (std::size_t j = 0; j + 1 < parts.size(); ++j) {
        const double a = e.weights()[j + 1], f = e.frequencies()[j + 1];
        for (std::size_t k = 0; k < g.size(); ++k) {
            const double term = 2.0 * a * std::cos(g.at(k) * f);
            CHECK(std::abs(parts[j + 1].values[k] - parts[j].values[k] - term) < 1e-12);
        }
    }
    const auto full = eval_phase_referenced(e, g, PhaseReference::zero());
    for (std::size_t k = 0; k < g.size(); ++k)
        CHECK(std::abs(parts.back().values[k] - full.values[k]) < 1e-12);
}

TEST_CASE("progressive_partial_sums: degenerate and reference cases") {
    const SampleGrid g(0.0, 30.0, 301);
    const auto single = progressive_partial_sums(ensemble(2, 0.5), g, PhaseReference::zero());
    REQUIRE(single.size() == 1);
    for (std::size_t k = 0; k < g.size(); ++k)
        CHECK(std::abs(single[0].values[k] - 2.0 / std::sqrt(2.0) * std::cos(g.at(k) * std::log(2.0))) < 1e-14);

    const auto ten = progressive_partial_sums(ensemble(10, 0.5), g, PhaseReference::zero());
    CHECK(ten.back().values[0] == Approx(4.2192702377707171).epsilon(1e-14));

    const auto rs_grid = SampleGrid(140.0, 160.0, 300);
    const auto e = ensemble(97, 0.5);
    const auto rs = progressive_partial_sums(e, rs_grid, PhaseReference::riemann_siegel());
    const auto rs_full = eval_phase_referenced(e, rs_grid, PhaseReference::riemann_siegel());
    for (std::size_t k = 0; k < rs_grid.size(); ++k)
        CHECK(std::abs(rs.back().values[k] - rs_full.values[k]) < 1e-12);

    CHECK_THROWS_AS(progressive_partial_sums(ensemble(1009, 0.5), g, PhaseReference::zero()),
                    CapacityError);
    CHECK_NOTHROW(progressive_partial_sums(ensemble(1009, 0.5), SampleGrid(0.0, 1.0, 2),
                                           PhaseReference::zero(), {2000}));
}

TEST_CASE("signal CSV: round trip is exact") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> uv(-1e3, 1e3);
    for (int trial = 0; trial < 20; ++trial) {
        const bool deriv = trial % 2 == 0;
        const SampleGrid g(uv(gen) - 2000.0, uv(gen) + 2000.0, 2 + trial * 7);
        SampledSignal s{g, {}, std::nullopt};
        for (std::size_t k = 0; k < g.size(); ++k) s.values.push_back(uv(gen) * 1e-7);
        if (deriv) {
            s.derivatives.emplace();
            for (std::size_t k = 0; k < g.size(); ++k) s.derivatives->push_back(uv(gen));
        }
        std::stringstream buf;
        write_csv(buf, s);
        const auto back = read_signal_csv(buf);
        CHECK(back.grid == s.grid);
        CHECK(back.values == s.values);
        CHECK(back.derivatives == s.derivatives);
    }
}

TEST_CASE("signal CSV: header and malformed input") {
    const auto s = eval_grid(ensemble(10, 0.5), SampleGrid(0.0, 1.0, 3), true);
    std::stringstream buf;
    write_csv(buf, s);
    std::string header;
    std::getline(buf, header);
    CHECK(header == "t,value,derivative");

    std::stringstream bad("t,value\n0,1\nx,2\n");
    CHECK_THROWS_AS(read_signal_csv(bad), ParseError);
    std::stringstream wrong("time,value\n0,1\n1,2\n");
    CHECK_THROWS_AS(read_signal_csv(wrong), ParseError);
}
