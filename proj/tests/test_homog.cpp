#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "plap/errors.hpp"
#include "plap/homog.hpp"
#include "plap/rayleigh.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace plap;

namespace {

Coefficient two_phase(double left, double right) { return Coefficient::piecewise_constant({0.0, 0.5, 1.0}, {left, right}); }

}  // namespace

TEST_CASE("effective coefficient")
{
    CHECK(effective_coefficient(Coefficient::constant(2.7, 0.0, 1.0), Exponent(2.0)) == doctest::Approx(2.7).epsilon(1e-15));
    CHECK(effective_coefficient(two_phase(1, 4), Exponent(2.0)) == doctest::Approx(1.6).epsilon(1e-15));
    CHECK(std::abs(effective_coefficient(two_phase(1, 4), Exponent(3.0)) - 16.0 / 9.0) <= 1e-12);

    // linear cell 1 -> 3: harmonic mean 2/ln 3 at p = 2, (sqrt 3 - 1)^{-2} at p = 3
    const Coefficient lin = Coefficient::piecewise_linear({0.0, 1.0}, {1.0, 3.0});
    CHECK(effective_coefficient(lin, Exponent(2.0)) == doctest::Approx(2.0 / std::log(3.0)).epsilon(1e-12));
    CHECK(effective_coefficient(lin, Exponent(3.0)) ==
          doctest::Approx(std::pow(std::sqrt(3.0) - 1.0, -2.0)).epsilon(1e-12));

    // a periodic wrapper is reduced to its cell
    CHECK(effective_coefficient(Coefficient::periodic(two_phase(1, 4), 0.1), Exponent(2.0)) == doctest::Approx(1.6));
    CHECK_THROWS_AS(effective_coefficient(Coefficient::constant(1.0, 0.0, 2.0), Exponent(2.0)), std::invalid_argument);
}

TEST_CASE("effective coefficient is a power mean")
{
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> val(0.5, 6.0), ps(1.2, 6.0), cut(0.05, 0.95);
    for (int i = 0; i < 200; ++i) {
        const double c = cut(rng);
        const double a0 = val(rng);
        const double a1 = val(rng);
        const Exponent e(ps(rng));
        const Coefficient cell = Coefficient::piecewise_constant({0.0, c, 1.0}, {a0, a1});
        const double star = effective_coefficient(cell, e);
        const double mean = c * a0 + (1 - c) * a1;
        CHECK(star >= std::min(a0, a1) * (1 - 1e-14));
        CHECK(star <= std::max(a0, a1) * (1 + 1e-14));
        CHECK(star < mean);
        // raising one phase raises the effective value
        const Coefficient up = Coefficient::piecewise_constant({0.0, c, 1.0}, {a0 * 1.1, a1});
        CHECK(effective_coefficient(up, e) > star);
        // harmonic mean at p = 2
        CHECK(effective_coefficient(cell, Exponent(2.0)) ==
              doctest::Approx(1.0 / (c / a0 + (1 - c) / a1)).epsilon(1e-14));
    }
}

TEST_CASE("effective weight and homogenized eigenvalue")
{
    CHECK(effective_weight(Coefficient::constant(1.0, 0.0, 1.0)) == 1.0);
    CHECK(effective_weight(two_phase(1, 3)) == doctest::Approx(2.0));
    CHECK(effective_weight(Coefficient::piecewise_linear({0.0, 1.0}, {1.0, 3.0})) == doctest::Approx(2.0));

    const double pi2 = std::numbers::pi * std::numbers::pi;
    const Exponent e2(2.0);
    CHECK(homogenized_eigenvalue(1.0, 1.0, e2, 1.0, 1) == doctest::Approx(pi2).epsilon(1e-14));
    CHECK(homogenized_eigenvalue(1.6, 1.0, e2, 1.0, 1) == doctest::Approx(1.6 * pi2).epsilon(1e-14));
    const Exponent e3(3.0);
    CHECK(homogenized_eigenvalue(1.3, 2.0, e3, 1.4, 6) ==
          doctest::Approx(8.0 * homogenized_eigenvalue(1.3, 2.0, e3, 1.4, 3)).epsilon(1e-14));
    CHECK_THROWS_AS(homogenized_eigenvalue(0.0, 1.0, e2, 1.0, 1), DomainError);
}

TEST_CASE("sweep with constant cells sits at solver accuracy")
{
    const CellProblem cell{1.0, Exponent(3.0), Coefficient::constant(2.0, 0.0, 1.0), Coefficient::constant(1.0, 0.0, 1.0)};
    const SweepResult s = sweep_epsilon(cell, 2, {2, 4, 8}, 1e-10);
    CHECK(s.complete());
    for (double r : s.rel_errors) CHECK(r <= 1e-9);
    const ConvergenceReport rep = convergence_report(s);
    CHECK_FALSE(rep.order_defined);
    CHECK(std::isnan(rep.mean_order));
}

TEST_CASE("two-phase sweeps converge to the homogenized spectrum")
{
    struct Case {
        double p;
        int k;
    };
    for (const Case c : {Case{2.0, 1}, Case{3.0, 2}}) {
        const CellProblem cell{1.0, Exponent(c.p), two_phase(1, 4), Coefficient::constant(1.0, 0.0, 1.0)};
        const SweepResult s = sweep_epsilon(cell, c.k, {2, 4, 8, 16, 32, 64}, 1e-10);
        REQUIRE(s.complete());
        CAPTURE(c.p);
        CHECK(s.rel_errors.back() <= 0.05);
        CHECK(s.rel_errors.back() < s.rel_errors[2]);
        for (std::size_t i = 3; i < s.rel_errors.size(); ++i) CHECK(s.rel_errors[i] < s.rel_errors[i - 1]);
        for (std::size_t i = 1; i < s.epsilons.size(); ++i) CHECK(s.epsilons[i] < s.epsilons[i - 1]);
        REQUIRE(s.finest.has_value());
        CHECK(s.finest->zeros.size() == static_cast<std::size_t>(c.k - 1));

        for (std::size_t i = 0; i < s.ns.size(); ++i) {
            Eigenpair ep;
            ep.k = c.k;
            ep.lambda = s.lambdas[i];
            const Eigenpair list[] = {ep};
            CHECK(check_weyl(cell.at(s.ns[i]), list).ok);
        }

        const ConvergenceReport rep = convergence_report(s);
        CHECK(rep.order_defined);
        CHECK(rep.mean_order > 0.0);
        CHECK(rep.rows.size() == 6);
        CHECK(std::isnan(rep.rows[0].order));
    }
}

TEST_CASE("sweep at p = 2 is second order in epsilon")
{
    const CellProblem cell{1.0, Exponent(2.0), two_phase(1, 4), Coefficient::constant(1.0, 0.0, 1.0)};
    const SweepResult s = sweep_epsilon(cell, 1, {8, 16, 32, 64}, 1e-11);
    const ConvergenceReport rep = convergence_report(s);
    CHECK(rep.monotone);
    CHECK(rep.mean_order == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("sweep argument checks and partial failures")
{
    const CellProblem cell{1.0, Exponent(2.0), two_phase(1, 4), Coefficient::constant(1.0, 0.0, 1.0)};
    CHECK_THROWS_AS(sweep_epsilon(cell, 1, {}, 1e-8), std::invalid_argument);
    CHECK_THROWS_AS(sweep_epsilon(cell, 1, {4, 2}, 1e-8), std::invalid_argument);
    CHECK_THROWS_AS(sweep_epsilon(cell, 1, {0, 2}, 1e-8), std::invalid_argument);

    SolveOptions strict;
    strict.ivp.drift_ceiling = 0.0;
    strict.steps_per_unit = 50;
    const SweepResult s = sweep_epsilon(cell, 1, {2, 4}, 1e-8, strict);
    CHECK_FALSE(s.complete());
    CHECK(s.ns.size() == 2);
    CHECK(std::isnan(s.lambdas[0]));
    CHECK_FALSE(s.failures[0].empty());

    SweepResult one;
    one.ns = {4};
    CHECK_THROWS_AS(convergence_report(one), std::invalid_argument);
}
