#include "plap/pfunc.hpp"

#include "plap/errors.hpp"

#include "gauss_kronrod.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace plap {

namespace detail {

// The defining integrand f(t) = ((p-1)/(1-t^p))^{1/p} is split at s_split,
// where t^p = 1/2. Below it f is bounded and evaluated directly. Above it we
// substitute t = 1 - sigma^{p'}, which turns the (1-t)^{-1/p} endpoint
// singularity into the bounded integrand g(sigma) = p' (p-1)^{1/p} r^{-1/p},
// r = (1 - (1-sigma^{p'})^p) / sigma^{p'}.
struct SineTable {
    static constexpr int kCells = 32;

    double p = 2.0;
    double m = 2.0;   // conjugate exponent, also the substitution power
    double c0 = 1.0;  // (p-1)^{1/p}
    double s_split = 0.0;
    double tau_split = 0.0;
    double x_split = 0.0;  // asin_p(s_split)
    double y_split = 0.0;  // pi_p/2 - x_split
    double half_pi = 0.0;
    double pi = 0.0;
    std::vector<double> s_nodes, x_nodes;      // x_nodes[i] = int_0^{s_i} f
    std::vector<double> tau_nodes, y_nodes;    // y_nodes[j] = int_0^{tau_j} g

    double f(double t) const { return c0 * std::pow(1.0 - std::pow(t, p), -1.0 / p); }

    double g(double sigma) const
    {
        const double w = std::pow(sigma, m);
        const double r = w > 0.0 ? -std::expm1(p * std::log1p(-w)) / w : p;
        return m * c0 * std::pow(r, -1.0 / p);
    }

    template <class F>
    static double integrate(const F& fn, double a, double b)
    {
        if (b <= a) return 0.0;
        return integrate_gk(fn, a, b);
    }

    double integrate_f(double a, double b) const
    {
        return integrate([this](double t) { return f(t); }, a, b);
    }
    double integrate_g(double a, double b) const
    {
        return integrate([this](double s) { return g(s); }, a, b);
    }

    static std::size_t cell_of(const std::vector<double>& nodes, double v)
    {
        auto it = std::upper_bound(nodes.begin(), nodes.end(), v);
        auto idx = static_cast<std::ptrdiff_t>(it - nodes.begin()) - 1;
        return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(idx, 0, kCells - 1));
    }

    // int_0^s f, for 0 <= s <= s_split
    double x_of_s(double s) const
    {
        const auto i = cell_of(s_nodes, s);
        return x_nodes[i] + integrate_f(s_nodes[i], s);
    }

    // int_0^tau g, for 0 <= tau <= tau_split
    double y_of_tau(double tau) const
    {
        const auto j = cell_of(tau_nodes, tau);
        return y_nodes[j] + integrate_g(tau_nodes[j], tau);
    }

    // Newton on F(s) = int_{lo}^{s} h - target, bracketed to one table cell.
    template <class H>
    static double invert(const std::vector<double>& nodes, const std::vector<double>& values,
                         double target, const H& h, const SineTable& tab)
    {
        const auto i = cell_of(values, target);
        const double lo = nodes[i];
        const double hi = nodes[i + 1];
        const double frac = (target - values[i]) / (values[i + 1] - values[i]);
        const double guess = lo + std::clamp(frac, 0.0, 1.0) * (hi - lo);
        std::uintmax_t iters = 60;
        auto fn = [&](double s) {
            const double val = values[i] + integrate([&](double t) { return h(tab, t); }, lo, s) - target;
            return std::make_pair(val, h(tab, s));
        };
        return boost::math::tools::newton_raphson_iterate(fn, guess, lo, hi,
                                                          std::numeric_limits<double>::digits - 3, iters);
    }
};

namespace {

std::shared_ptr<const SineTable> build_table(double p)
{
    auto tab = std::make_shared<SineTable>();
    tab->p = p;
    tab->m = p / (p - 1.0);
    tab->c0 = std::pow(p - 1.0, 1.0 / p);
    tab->s_split = std::pow(0.5, 1.0 / p);
    tab->tau_split = std::pow(1.0 - tab->s_split, 1.0 / tab->m);

    const int n = SineTable::kCells;
    tab->s_nodes.resize(n + 1);
    tab->x_nodes.resize(n + 1);
    tab->tau_nodes.resize(n + 1);
    tab->y_nodes.resize(n + 1);
    tab->x_nodes[0] = 0.0;
    tab->y_nodes[0] = 0.0;
    for (int i = 0; i <= n; ++i) {
        tab->s_nodes[i] = tab->s_split * i / n;
        tab->tau_nodes[i] = tab->tau_split * i / n;
    }
    tab->s_nodes[n] = tab->s_split;
    tab->tau_nodes[n] = tab->tau_split;
    for (int i = 0; i < n; ++i) {
        tab->x_nodes[i + 1] = tab->x_nodes[i] + tab->integrate_f(tab->s_nodes[i], tab->s_nodes[i + 1]);
        tab->y_nodes[i + 1] = tab->y_nodes[i] + tab->integrate_g(tab->tau_nodes[i], tab->tau_nodes[i + 1]);
    }
    tab->x_split = tab->x_nodes[n];
    tab->y_split = tab->y_nodes[n];
    tab->half_pi = tab->x_split + tab->y_split;
    tab->pi = 2.0 * tab->half_pi;
    return tab;
}

// sin_p and its derivative for r in [0, pi_p/2].
SinCos first_quadrant(const SineTable& tab, double r)
{
    if (r <= tab.x_split) {
        if (r <= 0.0) return {0.0, std::pow(tab.p - 1.0, -1.0 / tab.p)};
        const double s = SineTable::invert(
            tab.s_nodes, tab.x_nodes, r, [](const SineTable& t, double v) { return t.f(v); }, tab);
        const double ds = std::pow((1.0 - std::pow(s, tab.p)) / (tab.p - 1.0), 1.0 / tab.p);
        return {s, ds};
    }
    const double y = std::max(tab.half_pi - r, 0.0);
    double tau = 0.0;
    if (y > 0.0) {
        tau = SineTable::invert(
            tab.tau_nodes, tab.y_nodes, y, [](const SineTable& t, double v) { return t.g(v); }, tab);
    }
    const double w = std::pow(tau, tab.m);
    const double q = -std::expm1(tab.p * std::log1p(-w));  // 1 - s^p, without cancellation
    return {1.0 - w, std::pow(q / (tab.p - 1.0), 1.0 / tab.p)};
}

}  // namespace
}  // namespace detail

Exponent::Exponent(double p) : p_(p), conj_(0.0)
{
    if (!(p > 1.0) || !std::isfinite(p))
        throw DomainError("Exponent: p must satisfy 1 < p < inf, got " + std::to_string(p));
    conj_ = p / (p - 1.0);
    table_ = detail::build_table(p);
}

double Exponent::pi() const noexcept { return table_->pi; }

double pi_p(const Exponent& p) { return p.pi(); }

double asin_p(const Exponent& p, double s)
{
    if (!(std::abs(s) <= 1.0)) throw DomainError("asin_p: |s| must not exceed 1");
    const auto& tab = p.table();
    const double a = std::abs(s);
    double x;
    if (a <= tab.s_split) {
        x = tab.x_of_s(a);
    } else {
        const double tau = std::pow(1.0 - a, 1.0 / tab.m);
        x = tab.half_pi - tab.y_of_tau(std::min(tau, tab.tau_split));
    }
    return std::copysign(x, s);
}

SinCos sincos_p(const Exponent& p, double x)
{
    const auto& tab = p.table();
    if (!std::isfinite(x)) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    double r = std::fmod(x, 2.0 * tab.pi);
    if (r < 0.0) r += 2.0 * tab.pi;
    double sign = 1.0;
    if (r >= tab.pi) {
        r -= tab.pi;
        sign = -1.0;
    }
    double dsign = 1.0;
    if (r > tab.half_pi) {
        r = tab.pi - r;
        dsign = -1.0;
    }
    const SinCos q = detail::first_quadrant(tab, r);
    return {sign * q.sin, sign * dsign * q.dsin};
}

double sin_p(const Exponent& p, double x) { return sincos_p(p, x).sin; }

double dsin_p(const Exponent& p, double x) { return sincos_p(p, x).dsin; }

Phase phase_p(const Exponent& p, double s, double c)
{
    const auto& tab = p.table();
    const double ps = std::pow(std::abs(s), tab.p);
    const double pc = (tab.p - 1.0) * std::pow(std::abs(c), tab.p);
    const double total = ps + pc;
    if (!(total > 0.0)) throw DomainError("phase_p: (s, c) must not both vanish");
    const double amplitude = std::pow(total, 1.0 / tab.p);

    double theta0;
    if (ps <= 0.5 * total) {
        theta0 = tab.x_of_s(std::min(std::abs(s) / amplitude, tab.s_split));
    } else {
        // s is close to +-amplitude: recover the phase from the small c term
        const double q = pc / total;
        const double w = -std::expm1(std::log1p(-q) / tab.p);
        const double tau = std::pow(w, 1.0 / tab.m);
        theta0 = tab.half_pi - tab.y_of_tau(std::min(tau, tab.tau_split));
    }
    theta0 = std::copysign(theta0, s);
    double theta = theta0;
    if (c < 0.0) theta = (s >= 0.0 ? tab.pi : -tab.pi) - theta0;
    if (theta <= -tab.pi) theta += 2.0 * tab.pi;
    return {theta, amplitude};
}

}  // namespace plap
