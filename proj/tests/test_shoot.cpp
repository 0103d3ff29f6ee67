#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "plap/errors.hpp"
#include "plap/shoot.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace plap;

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

Problem constant_problem(double p, double a = 1.0, double rho = 1.0, double length = 1.0)
{
    return Problem(length, Exponent(p), Coefficient::constant(a, 0.0, length), Coefficient::constant(rho, 0.0, length));
}

Problem two_phase(double p, double cut, double a0, double a1, double rho_cut, double r0, double r1)
{
    return Problem(1.0, Exponent(p), Coefficient::piecewise_constant({0.0, cut, 1.0}, {a0, a1}),
                   Coefficient::piecewise_constant({0.0, rho_cut, 1.0}, {r0, r1}));
}

Problem random_piecewise(std::mt19937_64& rng, double p, int pieces)
{
    std::uniform_real_distribution<double> val(1.0, 4.0), cut(0.1, 0.9);
    std::vector<double> bps{0.0};
    std::vector<double> cuts;
    for (int i = 0; i + 1 < pieces; ++i) cuts.push_back(cut(rng));
    std::sort(cuts.begin(), cuts.end());
    bps.insert(bps.end(), cuts.begin(), cuts.end());
    bps.push_back(1.0);
    std::vector<double> av, rv;
    for (int i = 0; i < pieces; ++i) {
        av.push_back(val(rng));
        rv.push_back(val(rng));
    }
    return Problem(1.0, Exponent(p), Coefficient::piecewise_constant(bps, av), Coefficient::piecewise_constant(bps, rv));
}

}  // namespace

TEST_CASE("integrate_ivp on constant coefficients")
{
    const Trajectory t = integrate_ivp(constant_problem(2.0), kPi2, 0.0, 1.0, 10000);
    CHECK(std::abs(t.u.back()) <= 1e-6);
    CHECK(t.hamiltonian_drift <= 1e-10);

    const Trajectory lin = integrate_ivp(constant_problem(3.0), 0.0, 0.0, 1.0, 1000);
    for (std::size_t i = 0; i < lin.grid.size(); ++i) CHECK(lin.u[i] == doctest::Approx(lin.grid[i]).epsilon(1e-13));

    const Exponent e3(3.0);
    const double mu = std::pow(pi_p(e3), 3.0);
    const Trajectory t3 = integrate_ivp(constant_problem(3.0), mu, 0.0, 1.0, 10000);
    CHECK(std::abs(t3.u.back()) <= 1e-5);

    CHECK_THROWS_AS(integrate_ivp(constant_problem(2.0), -1.0, 0.0, 1.0, 100), DomainError);
    CHECK_THROWS_AS(integrate_ivp(constant_problem(2.0), 1.0, 0.0, 0.0, 100), DomainError);
}

TEST_CASE("drift ceiling rejects a coarse step")
{
    IvpOptions opts;
    opts.drift_ceiling = 1e-12;
    CHECK_THROWS_AS(integrate_ivp(constant_problem(3.0), 2000.0, 0.0, 1.0, 20, opts), NonconvergenceError);
}

TEST_CASE("Hamiltonian drift at the production step size")
{
    std::mt19937_64 rng(5);
    for (double p : {1.5, 2.0, 3.0}) {
        const Problem prob = random_piecewise(rng, p, 3);
        for (int k : {1, 4, 8}) {
            const double lam = solve_k(prob, k, 1e-10).lambda;
            const int spu = default_steps_per_unit(prob, bracket_k(prob, k).hi);
            const Trajectory t = integrate_ivp(prob, lam, 0.0, 1.0, spu);
            CAPTURE(p);
            CAPTURE(k);
            CHECK(t.hamiltonian_drift <= 1e-8);
        }
    }
}

TEST_CASE("interior zero counting")
{
    const Exponent e2(2.0);
    const Problem prob = constant_problem(2.0);
    CHECK(count_interior_zeros(integrate_ivp(prob, 4.0 * kPi2 * 1.01, 0.0, 1.0, 4000)) == 2);
    CHECK(count_interior_zeros(integrate_ivp(prob, 0.9 * kPi2, 0.0, 1.0, 4000)) == 0);

    // samples of sin_p(3 pi_p x) on [0, 1]
    const Exponent e(3.0);
    Trajectory t;
    const int n = 600;
    for (int i = 0; i <= n; ++i) {
        const double x = static_cast<double>(i) / n;
        const SinCos sc = sincos_p(e, 3.0 * e.pi() * x);
        t.grid.push_back(x);
        t.u.push_back(sc.sin);
        t.du_minus.push_back(3.0 * e.pi() * sc.dsin);
        t.du_plus.push_back(3.0 * e.pi() * sc.dsin);
    }
    t.u.back() = 0.0;  // sin_p(3 pi_p) is rounding noise of either sign
    const auto z = interior_zeros(t);
    REQUIRE(z.size() == 2);
    CHECK(z[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    CHECK(z[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("Weyl bracket")
{
    const Bracket b = bracket_k(constant_problem(2.0), 1);
    CHECK(b.lo < kPi2);
    CHECK(b.hi > kPi2);

    const Problem var(1.0, Exponent(2.0), Coefficient::piecewise_constant({0, 0.5, 1}, {1, 4}),
                      Coefficient::constant(1, 0, 1));
    const Bracket b2 = bracket_k(var, 2);
    CHECK(b2.lo <= 4.0 * kPi2);
    CHECK(b2.hi >= 16.0 * kPi2);

    const Bracket bc = bracket_k(constant_problem(2.0, 3.0), 2);
    CHECK(bc.lo < 3.0 * 4.0 * kPi2);
    CHECK(bc.hi > 3.0 * 4.0 * kPi2);
    CHECK_THROWS_AS(bracket_k(var, 0), std::invalid_argument);
}

TEST_CASE("solve_k on constant coefficients")
{
    const Eigenpair e3 = solve_k(constant_problem(2.0), 3, 1e-10);
    CHECK(std::abs(e3.lambda - 9.0 * kPi2) <= 1e-8 * 9.0 * kPi2);
    CHECK(e3.zeros.size() == 2);

    const Eigenpair a2 = solve_k(constant_problem(2.0, 2.0), 1, 1e-10);
    CHECK(std::abs(a2.lambda - 2.0 * kPi2) <= 1e-8 * 2.0 * kPi2);

    // pi_3^3 from the closed form in 30-digit arithmetic
    const Eigenpair p3 = solve_k(constant_problem(3.0), 1, 1e-10);
    CHECK(std::abs(p3.lambda - 28.288761976002555416) <= 1e-6 * 28.288761976002555416);

    for (double p : {1.5, 2.0, 3.0}) {
        const Exponent e(p);
        for (int k = 1; k <= 10; ++k) {
            const Problem prob = constant_problem(p, 2.5, 0.5, 1.7);
            const Eigenpair ep = solve_k(prob, k, 1e-11);
            const double expect = 5.0 * unweighted_eigenvalue(e, 1.7, k);
            CAPTURE(p);
            CAPTURE(k);
            CHECK(std::abs(ep.lambda - expect) <= 1e-8 * expect);
            REQUIRE(ep.zeros.size() == static_cast<std::size_t>(k - 1));
            for (int j = 1; j < k; ++j) CHECK(ep.zeros[j - 1] == doctest::Approx(1.7 * j / k).epsilon(1e-7));
        }
    }

    CHECK_THROWS_AS(solve_k(constant_problem(2.0), 0, 1e-8), std::invalid_argument);
    CHECK_THROWS_AS(solve_k(constant_problem(2.0), 1, 0.0), std::invalid_argument);
}

TEST_CASE("eigenfunction normalization and sign")
{
    std::mt19937_64 rng(9);
    for (double p : {1.5, 3.0}) {
        const Problem prob = random_piecewise(rng, p, 4);
        for (int k : {1, 3}) {
            const Eigenpair ep = solve_k(prob, k, 1e-10);
            CHECK(std::abs(lp_norm_p(ep.grid, ep.u, p) - 1.0) <= 1e-8);
            CHECK(ep.u[1] > 0.0);
            CHECK(ep.u.front() == 0.0);
            CHECK(std::abs(ep.u.back()) <= 1e-6);
        }
    }
}

TEST_CASE("spectrum ordering, zero counts and weight scaling on random problems")
{
    std::mt19937_64 rng(17);
    for (double p : {1.5, 2.0, 3.0}) {
        for (int trial = 0; trial < 2; ++trial) {
            const Problem prob = random_piecewise(rng, p, 3);
            double previous = 0.0;
            for (int k = 1; k <= 10; ++k) {
                const Eigenpair ep = solve_k(prob, k, 1e-10);
                CAPTURE(p);
                CAPTURE(k);
                CHECK(ep.lambda > previous);
                CHECK(ep.zeros.size() == static_cast<std::size_t>(k - 1));
                previous = ep.lambda;
            }
            // rho -> 3 rho scales the spectrum by 1/3
            std::vector<double> scaled = prob.rho().values();
            for (double& r : scaled) r *= 3.0;
            const Problem heavy(1.0, prob.exponent(), prob.a(),
                                Coefficient::piecewise_constant(prob.rho().breakpoints(), scaled));
            for (int k : {1, 2, 5}) {
                const double l0 = solve_k(prob, k, 1e-11).lambda;
                const double l1 = solve_k(heavy, k, 1e-11).lambda;
                CHECK(std::abs(3.0 * l1 - l0) <= 1e-9 * l0);
            }
        }
    }
}

TEST_CASE("exact propagator")
{
    const Exponent e3(3.0);
    const double mu = std::pow(pi_p(e3), 3.0);
    const EndState one = exact_propagate_pc(constant_problem(3.0), mu, 0.0, 1.0);
    CHECK(std::abs(one.u) <= 1e-11);
    CHECK(one.zeros == 0);

    const Problem tp = two_phase(2.0, 0.4, 1.0, 4.0, 0.7, 2.0, 1.0);
    const EndState flat = exact_propagate_pc(tp, 0.0, 0.0, 1.5);
    CHECK(flat.v == doctest::Approx(1.5).epsilon(1e-14));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> lam(5.0, 400.0);
    for (double p : {1.5, 2.0, 3.0}) {
        const Problem prob = two_phase(p, 0.37, 1.0, 4.0, 0.61, 2.0, 1.0);
        for (int i = 0; i < 5; ++i) {
            const double l = lam(rng);
            const EndState ex = exact_propagate_pc(prob, l, 0.0, 1.0);
            const Trajectory rk = integrate_ivp(prob, l, 0.0, 1.0, 10000);
            CAPTURE(p);
            CAPTURE(l);
            CHECK(std::abs(ex.u - rk.u.back()) <= 1e-6);
            CHECK(ex.zeros == count_interior_zeros(rk));
        }
    }

    const Problem lin(1.0, Exponent(2.0), Coefficient::piecewise_linear({0, 1}, {1, 2}), Coefficient::constant(1, 0, 1));
    CHECK_THROWS_AS(exact_propagate_pc(lin, 10.0, 0.0, 1.0), DomainError);
    SolveOptions ex;
    ex.propagator = Propagator::exact;
    CHECK_THROWS_AS(solve_k(lin, 1, 1e-8, ex), DomainError);
}

TEST_CASE("solve_k propagators agree")
{
    SolveOptions ex;
    ex.propagator = Propagator::exact;
    for (double p : {1.5, 2.0, 3.0}) {
        const Problem prob = two_phase(p, 0.37, 1.0, 4.0, 0.61, 2.0, 1.0);
        for (int k : {1, 2, 6}) {
            const double l_rk = solve_k(prob, k, 1e-11).lambda;
            const double l_ex = solve_k(prob, k, 1e-11, ex).lambda;
            CHECK(std::abs(l_rk - l_ex) <= 1e-9 * l_ex);
        }
    }
}

TEST_CASE("piecewise-linear coefficients")
{
    // a = (1 + x)^2 with rho = 1 at p = 2 has eigenfunctions sin(k pi log(1+x)/log 2) / sqrt(1+x)
    // with lambda_k = (k pi / log 2)^2 + 1/4; the quadratic a is approximated by fine linear pieces.
    std::vector<double> nodes, vals;
    for (int i = 0; i <= 400; ++i) {
        const double x = i / 400.0;
        nodes.push_back(x);
        vals.push_back((1 + x) * (1 + x));
    }
    const Problem prob(1.0, Exponent(2.0), Coefficient::piecewise_linear(nodes, vals), Coefficient::constant(1, 0, 1));
    for (int k : {1, 2}) {
        const double expect = std::pow(k * std::numbers::pi / std::numbers::ln2, 2) + 0.25;
        CHECK(solve_k(prob, k, 1e-10).lambda == doctest::Approx(expect).epsilon(1e-5));
    }
}
