#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "plap/errors.hpp"
#include "plap/problem.hpp"

#include <cmath>
#include <random>

using namespace plap;

namespace {

Coefficient two_phase(double left, double right) { return Coefficient::piecewise_constant({0.0, 0.5, 1.0}, {left, right}); }

}  // namespace

TEST_CASE("phi_p and its inverse")
{
    const Exponent p2(2.0), p3(3.0), p15(1.5);
    for (double s : {-3.0, 0.0, 7.0}) CHECK(phi_p(p2, s) == s);
    CHECK(phi_p(p3, -2.0) == doctest::Approx(-4.0).epsilon(1e-15));
    CHECK(phi_p(p15, 4.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(phi_p_inv(p3, -4.0) == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK(phi_p_inv(p2, 0.25) == 0.25);
    for (double p : {1.3, 2.6}) CHECK(std::abs(phi_p_inv(Exponent(p), phi_p(Exponent(p), 0.37)) - 0.37) <= 1e-13);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ps(1.05, 8.0), ss(-10.0, 10.0);
    for (int i = 0; i < 1000; ++i) {
        const Exponent e(ps(rng));
        const double s = ss(rng);
        CHECK(phi_p(e, -s) == -phi_p(e, s));
        CHECK(std::abs(phi_p(e, phi_p_inv(e, s)) - s) <= 1e-12 * (1.0 + std::abs(s)));
    }
}

TEST_CASE("big_phi values, homogeneity and derivative")
{
    CHECK(big_phi(1.0, Exponent(2.0), -3.0) == doctest::Approx(9.0));
    CHECK(big_phi(2.0, Exponent(3.0), 0.5) == doctest::Approx(0.25));
    CHECK_THROWS_AS(big_phi(0.0, Exponent(2.0), 1.0), DomainError);

    for (double p : {1.4, 2.0, 3.5}) {
        const Exponent e(p);
        for (double xi : {-1.3, 0.2, 2.0}) {
            for (double t : {0.5, 3.0}) {
                const double lhs = big_phi(1.7, e, t * xi);
                CHECK(std::abs(lhs - std::pow(t, p) * big_phi(1.7, e, xi)) <= 1e-12 * lhs);
            }
            const double h = 1e-5;
            const double fd = (big_phi(1.7, e, xi + h) - big_phi(1.7, e, xi - h)) / (2 * h);
            CHECK(fd == doctest::Approx(p * 1.7 * phi_p(e, xi)).epsilon(1e-7));
        }
    }
}

TEST_CASE("coefficient evaluation")
{
    const Coefficient c = two_phase(1.0, 4.0);
    CHECK(eval_coeff(c, 0.25) == 1.0);
    CHECK(eval_coeff(c, 0.5) == 4.0);
    CHECK(eval_coeff(c, 1.0) == 4.0);
    CHECK(c.lower() == 1.0);
    CHECK(c.upper() == 4.0);
    CHECK_THROWS_AS(eval_coeff(c, 1.5), DomainError);
    CHECK_THROWS_AS(eval_coeff(c, -0.1), DomainError);

    const Coefficient per = Coefficient::periodic(c, 0.1);
    CHECK(eval_coeff(per, 0.77) == 4.0);
    CHECK(eval_coeff(per, 0.72) == 1.0);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> xs(0.0, 0.1);
    for (int i = 0; i < 200; ++i) {
        // cell offsets kept away from the jumps, where rounding of x/eps can pick either side
        const double y = xs(rng);
        if (std::abs(y - 0.05) < 1e-9 || y < 1e-9) continue;
        for (int m = 1; m < 5; ++m) CHECK(eval_coeff(per, y + m * 0.1) == eval_coeff(per, y));
    }

    const Coefficient lin = Coefficient::piecewise_linear({0.0, 1.0}, {1.0, 3.0});
    CHECK(eval_coeff(lin, 0.25) == doctest::Approx(1.5));
    CHECK(lin.kind() == CoefficientKind::piecewise_linear);
    CHECK_FALSE(lin.is_piecewise_constant());
}

TEST_CASE("coefficient validation")
{
    CHECK_THROWS_AS(Coefficient::piecewise_constant({0.0, 0.5, 1.0}, {1.0, 0.0}), DomainError);
    CHECK_THROWS_AS(Coefficient::piecewise_constant({0.0, 0.5, 1.0}, {1.0, -2.0}), DomainError);
    CHECK_THROWS_AS(Coefficient::piecewise_constant({0.0, 1.0}, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(Coefficient::piecewise_constant({0.0, 0.7, 0.5}, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(Coefficient::piecewise_linear({0.0}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(Coefficient::periodic(two_phase(1, 2), 0.0), DomainError);
    CHECK_THROWS_AS(Coefficient::periodic(Coefficient::constant(1.0, 0.0, 2.0), 0.5), std::invalid_argument);
}

TEST_CASE("problem segments and restriction")
{
    const Problem prob(1.0, Exponent(2.0), two_phase(1.0, 4.0),
                       Coefficient::piecewise_constant({0.0, 0.3, 1.0}, {2.0, 1.0}));
    const auto segs = prob.segments();
    REQUIRE(segs.size() == 4);
    CHECK(segs[1] == 0.3);
    CHECK(segs[2] == 0.5);
    CHECK(prob.is_piecewise_constant());

    const Problem sub = prob.restricted(0.4, 1.0);
    CHECK(sub.length() == doctest::Approx(0.6));
    CHECK(sub.a()(0.05) == 1.0);
    CHECK(sub.a()(0.15) == 4.0);
    CHECK(sub.rho()(0.0) == 1.0);

    const Problem per(1.0, Exponent(3.0), Coefficient::periodic(two_phase(1, 4), 0.25), Coefficient::constant(1, 0, 1));
    CHECK(per.segments().size() == 9);

    CHECK_THROWS_AS(Problem(0.0, Exponent(2.0), two_phase(1, 4), two_phase(1, 1)), DomainError);
    CHECK_THROWS_AS(Problem(2.0, Exponent(2.0), two_phase(1, 4), two_phase(1, 1)), std::invalid_argument);
}

TEST_CASE("Picone identity pointwise")
{
    const Exponent p2(2.0);
    const PiconeTerms hand = picone_LR(p2, 1.0, 1.0, 0.0, 1.0, 1.0);
    CHECK(hand.L == doctest::Approx(1.0));
    CHECK(hand.R == doctest::Approx(1.0));

    CHECK_THROWS_AS(picone_LR(p2, 1.0, 1.0, 0.0, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(picone_LR(p2, 1.0, -0.1, 0.0, 1.0, 1.0), DomainError);

    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ps(1.2, 4.0), pos(0.05, 2.0), der(-2.0, 2.0), as(0.5, 4.0), scale(0.2, 3.0);
    for (int i = 0; i < 2000; ++i) {
        const Exponent e(ps(rng));
        const double a = as(rng);
        const double v = pos(rng);
        const double dv = der(rng);
        const PiconeTerms t = picone_LR(e, a, pos(rng), der(rng), v, dv);
        CHECK(std::abs(t.L - t.R) <= 1e-12 * (1.0 + std::abs(t.L)));
        CHECK(t.L >= -1e-12);

        const double c = scale(rng);
        const PiconeTerms prop = picone_LR(e, a, c * v, c * dv, v, dv);
        CHECK(std::abs(prop.L) <= 1e-12 * (1.0 + big_phi(a, e, c * dv)));
    }
}
