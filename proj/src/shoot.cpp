#include "plap/shoot.hpp"

#include "plap/errors.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace plap {

namespace {

struct State {
    double u;
    double v;
};

// Right-hand side on one smooth segment, with the coefficients in affine form.
struct SegmentRhs {
    double p;
    double lambda;
    LocalForm a;
    LocalForm rho;

    double slope(double a_val, double v) const
    {
        const double t = v / a_val;
        return p == 2.0 ? t : std::copysign(std::pow(std::abs(t), 1.0 / (p - 1.0)), t);
    }

    State operator()(double x, const State& y) const
    {
        const double phi_u = p == 2.0 ? y.u : std::copysign(std::pow(std::abs(y.u), p - 1.0), y.u);
        return {slope(a(x), y.v), -lambda * rho(x) * phi_u};
    }
};

State rk4_step(const SegmentRhs& f, double x, double h, const State& y)
{
    const State k1 = f(x, y);
    const State k2 = f(x + 0.5 * h, {y.u + 0.5 * h * k1.u, y.v + 0.5 * h * k1.v});
    const State k3 = f(x + 0.5 * h, {y.u + 0.5 * h * k2.u, y.v + 0.5 * h * k2.v});
    const State k4 = f(x + h, {y.u + h * k3.u, y.v + h * k3.v});
    return {y.u + h / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u),
            y.v + h / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v)};
}

enum class Singular { none, u, v };

double singular_value(Singular which, const State& y) { return which == Singular::u ? y.u : y.v; }

// Distance from x to the nearest zero of the singular variable, by linearization.
double zero_distance(Singular which, const SegmentRhs& f, double x, const State& y)
{
    const State d = f(x, y);
    const double rate = std::abs(which == Singular::u ? d.u : d.v);
    const double val = std::abs(singular_value(which, y));
    return rate > 0.0 ? val / rate : std::numeric_limits<double>::infinity();
}

// phi_p (p < 2) and phi_p^{-1} (p > 2) are only Hoelder continuous at zero.
// RK4 loses order on steps across such a zero and on steps close to one, so
// those are subdivided recursively, which grades the mesh towards the zero.
State advance(const SegmentRhs& f, double x, double h, const State& y, Singular which, int levels, double reach)
{
    const State trial = rk4_step(f, x, h, y);
    if (which == Singular::none || levels <= 0) return trial;
    const double s0 = singular_value(which, y);
    const double s1 = singular_value(which, trial);
    const bool crossing = s0 == 0.0 || (s0 > 0.0) != (s1 > 0.0);
    if (!crossing && std::min(zero_distance(which, f, x, y), zero_distance(which, f, x + h, trial)) > reach * h)
        return trial;
    const double hs = 0.25 * h;
    State s = y;
    for (int i = 0; i < 4; ++i) s = advance(f, x + i * hs, hs, s, which, levels - 1, reach);
    return s;
}

double hamiltonian(double p, double a_val, double lambda_rho, const State& y)
{
    const double pc = p / (p - 1.0);
    return std::pow(a_val, -1.0 / (p - 1.0)) * std::pow(std::abs(y.v), pc) / pc +
           lambda_rho * std::pow(std::abs(y.u), p) / p;
}

// Drives RK4 over all segments and reports each grid node to the sink as
// sink(x, state, du_minus, du_plus). Returns the largest relative drift of H
// over the constant-coefficient segments.
template <class Sink>
double integrate_core(const Problem& prob, double lambda, State y, int steps_per_unit, const IvpOptions& opts,
                      Sink&& sink)
{
    const double p = prob.exponent().p();
    const Singular which = p < 2.0 ? Singular::u : (p > 2.0 ? Singular::v : Singular::none);
    const auto segs = prob.segments();
    double drift = 0.0;
    double pending_du_minus = 0.0;

    for (std::size_t s = 0; s + 1 < segs.size(); ++s) {
        const double x0 = segs[s];
        const double x1 = segs[s + 1];
        const double mid = 0.5 * (x0 + x1);
        const SegmentRhs f{p, lambda, prob.a().local(mid), prob.rho().local(mid)};
        const bool constant = f.a.slope == 0.0 && f.rho.slope == 0.0;
        const double du0 = f.slope(f.a(x0), y.v);
        sink(x0, y, s == 0 ? du0 : pending_du_minus, du0);

        const auto n = static_cast<long long>(std::max(1.0, std::ceil((x1 - x0) * steps_per_unit)));
        const double h = (x1 - x0) / static_cast<double>(n);
        const double h0 = constant ? hamiltonian(p, f.a.value, lambda * f.rho.value, y) : 0.0;
        for (long long j = 1; j <= n; ++j) {
            const double xs = x0 + static_cast<double>(j - 1) * h;
            y = advance(f, xs, h, y, which, opts.singular_levels, opts.singular_reach);
            const double x = j == n ? x1 : x0 + static_cast<double>(j) * h;
            if (constant && h0 > 0.0) {
                const double hj = hamiltonian(p, f.a.value, lambda * f.rho.value, y);
                drift = std::max(drift, std::abs(hj - h0) / h0);
            }
            const double du = f.slope(f.a(x), y.v);
            if (j < n) {
                sink(x, y, du, du);
            } else {
                pending_du_minus = du;
            }
        }
    }
    const double l = segs.back();
    sink(l, y, pending_du_minus, pending_du_minus);
    return drift;
}

// Counts sign changes of u over the nodes; a change between two nonzero
// samples is a zero strictly inside (0, l).
struct ZeroCounter {
    int zeros = 0;
    int last_sign = 0;
    State end{0.0, 0.0};

    void operator()(double, const State& y, double, double)
    {
        const int sgn = (y.u > 0.0) - (y.u < 0.0);
        if (sgn != 0) {
            if (last_sign != 0 && sgn != last_sign) ++zeros;
            last_sign = sgn;
        }
        end = y;
    }
};

void check_initial(double lambda, double u0, double v0)
{
    if (!(lambda >= 0.0)) throw DomainError("lambda must be nonnegative");
    if (u0 == 0.0 && v0 == 0.0) throw DomainError("initial data (u0, v0) must not vanish");
}

// Zero of the cubic Hermite interpolant on [x0, x1], given a sign change.
double hermite_zero(double x0, double x1, double u0, double u1, double m0, double m1)
{
    const double h = x1 - x0;
    auto H = [&](double t) {
        const double t2 = t * t;
        const double t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * u0 + (t3 - 2 * t2 + t) * h * m0 + (-2 * t3 + 3 * t2) * u1 +
               (t3 - t2) * h * m1;
    };
    double lo = 0.0;
    double hi = 1.0;
    const bool lo_positive = u0 > 0.0;
    for (int it = 0; it < 100 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double val = H(mid);
        if (val == 0.0) return x0 + mid * h;
        if ((val > 0.0) == lo_positive) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return x0 + 0.5 * (lo + hi) * h;
}

struct PcPiece {
    double a;
    double rho;
    double x0;
    double x1;
};

std::vector<PcPiece> pc_pieces(const Problem& prob)
{
    if (!prob.is_piecewise_constant())
        throw DomainError("exact propagation requires piecewise-constant coefficients");
    const auto segs = prob.segments();
    std::vector<PcPiece> out;
    for (std::size_t s = 0; s + 1 < segs.size(); ++s) {
        const double mid = 0.5 * (segs[s] + segs[s + 1]);
        out.push_back({prob.a().local(mid).value, prob.rho().local(mid).value, segs[s], segs[s + 1]});
    }
    return out;
}

// Closed-form solution on one constant piece, started from (u, v) at x_start.
struct PieceSolution {
    const Exponent* p;
    double a;
    double x_start;
    double omega;      // 0 when lambda = 0
    double theta;      // phase at x_start
    double amplitude;
    double u_start;
    double du_start;

    PieceSolution(const Exponent& e, double a_val, double rho_val, double lambda, double x, const State& y)
        : p(&e), a(a_val), x_start(x), omega(0.0), theta(0.0), amplitude(0.0), u_start(y.u), du_start(0.0)
    {
        du_start = phi_p_inv(e, y.v / a_val);
        if (lambda > 0.0) {
            omega = std::pow(lambda * rho_val / a_val, 1.0 / e.p());
            const Phase ph = phase_p(e, y.u, du_start / omega);
            theta = ph.theta;
            amplitude = ph.amplitude;
        }
    }

    double phase_at(double x) const { return theta + omega * (x - x_start); }

    // u, u' at x
    std::pair<double, double> eval(double x) const
    {
        if (omega == 0.0) return {u_start + du_start * (x - x_start), du_start};
        const SinCos sc = sincos_p(*p, phase_at(x));
        return {amplitude * sc.sin, amplitude * omega * sc.dsin};
    }

    // zeros in (x_start, x], or (x_start, x) when open_end
    int zeros_until(double x, bool open_end) const
    {
        if (omega == 0.0) {
            const double u_end = u_start + du_start * (x - x_start);
            if (u_start == 0.0) return 0;
            if (u_end == 0.0) return open_end ? 0 : 1;
            return (u_start > 0.0) != (u_end > 0.0) ? 1 : 0;
        }
        const double pi = p->pi();
        const double t0 = theta / pi;
        const double t1 = phase_at(x) / pi;
        const double upper = open_end ? std::ceil(t1) - 1.0 : std::floor(t1);
        return static_cast<int>(std::max(0.0, upper - std::floor(t0)));
    }
};

}  // namespace

Trajectory integrate_ivp(const Problem& prob, double lambda, double u0, double v0, int steps_per_unit,
                         const IvpOptions& opts)
{
    check_initial(lambda, u0, v0);
    if (steps_per_unit < 1) throw std::invalid_argument("integrate_ivp: steps_per_unit must be positive");
    Trajectory t;
    const auto expected = static_cast<std::size_t>(prob.length() * steps_per_unit) + 2;
    t.grid.reserve(expected);
    t.u.reserve(expected);
    t.v.reserve(expected);
    t.du_minus.reserve(expected);
    t.du_plus.reserve(expected);
    t.hamiltonian_drift = integrate_core(prob, lambda, State{u0, v0}, steps_per_unit, opts,
                                         [&t](double x, const State& y, double dm, double dp) {
                                             t.grid.push_back(x);
                                             t.u.push_back(y.u);
                                             t.v.push_back(y.v);
                                             t.du_minus.push_back(dm);
                                             t.du_plus.push_back(dp);
                                         });
    if (t.hamiltonian_drift > opts.drift_ceiling)
        throw NonconvergenceError("integrate_ivp: Hamiltonian drift " + std::to_string(t.hamiltonian_drift) +
                                  " exceeds ceiling; refine the step");
    return t;
}

std::vector<double> interior_zeros(const Trajectory& t)
{
    std::vector<double> zeros;
    std::ptrdiff_t last = -1;
    for (std::size_t i = 0; i < t.u.size(); ++i) {
        if (t.u[i] == 0.0) continue;
        if (last >= 0 && (t.u[i] > 0.0) != (t.u[static_cast<std::size_t>(last)] > 0.0)) {
            const auto j = static_cast<std::size_t>(last);
            if (j + 1 == i) {
                zeros.push_back(hermite_zero(t.grid[j], t.grid[i], t.u[j], t.u[i], t.du_plus[j], t.du_minus[i]));
            } else {
                zeros.push_back(t.grid[j + 1]);  // sampled exactly at a zero
            }
        }
        last = static_cast<std::ptrdiff_t>(i);
    }
    return zeros;
}

int count_interior_zeros(const Trajectory& t) { return static_cast<int>(interior_zeros(t).size()); }

double unweighted_eigenvalue(const Exponent& p, double length, int k)
{
    return std::pow(p.pi() * k / length, p.p());
}

Bracket bracket_k(const Problem& prob, int k)
{
    if (k < 1) throw std::invalid_argument("bracket_k: k must be positive");
    const double mu = unweighted_eigenvalue(prob.exponent(), prob.length(), k);
    return {0.5 * prob.a().lower() / prob.rho().upper() * mu, 2.0 * prob.a().upper() / prob.rho().lower() * mu};
}

EndState exact_propagate_pc(const Problem& prob, double lambda, double u0, double v0)
{
    check_initial(lambda, u0, v0);
    const auto pieces = pc_pieces(prob);
    const Exponent& e = prob.exponent();
    State y{u0, v0};
    int zeros = 0;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const auto& pc = pieces[i];
        const PieceSolution sol(e, pc.a, pc.rho, lambda, pc.x0, y);
        zeros += sol.zeros_until(pc.x1, i + 1 == pieces.size());
        const auto [u, du] = sol.eval(pc.x1);
        y = {u, pc.a * phi_p(e, du)};
    }
    return {y.u, y.v, zeros};
}

Trajectory exact_trajectory_pc(const Problem& prob, double lambda, double u0, double v0, int samples_per_unit)
{
    check_initial(lambda, u0, v0);
    if (samples_per_unit < 1) throw std::invalid_argument("exact_trajectory_pc: samples_per_unit must be positive");
    const auto pieces = pc_pieces(prob);
    const Exponent& e = prob.exponent();
    Trajectory t;
    State y{u0, v0};
    double pending_du = 0.0;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const auto& pc = pieces[i];
        const PieceSolution sol(e, pc.a, pc.rho, lambda, pc.x0, y);
        t.grid.push_back(pc.x0);
        t.u.push_back(y.u);
        t.v.push_back(y.v);
        t.du_minus.push_back(i == 0 ? sol.du_start : pending_du);
        t.du_plus.push_back(sol.du_start);
        const auto n = static_cast<long long>(std::max(1.0, std::ceil((pc.x1 - pc.x0) * samples_per_unit)));
        const double h = (pc.x1 - pc.x0) / static_cast<double>(n);
        for (long long j = 1; j <= n; ++j) {
            const double x = j == n ? pc.x1 : pc.x0 + static_cast<double>(j) * h;
            const auto [u, du] = sol.eval(x);
            y = {u, pc.a * phi_p(e, du)};
            if (j < n) {
                t.grid.push_back(x);
                t.u.push_back(y.u);
                t.v.push_back(y.v);
                t.du_minus.push_back(du);
                t.du_plus.push_back(du);
            } else {
                pending_du = du;
            }
        }
    }
    t.grid.push_back(pieces.back().x1);
    t.u.push_back(y.u);
    t.v.push_back(y.v);
    t.du_minus.push_back(pending_du);
    t.du_plus.push_back(pending_du);
    return t;
}

int default_steps_per_unit(const Problem& prob, double lambda_max)
{
    const double omega =
        std::pow(lambda_max * prob.rho().upper() / prob.a().lower(), 1.0 / prob.exponent().p());
    const double spu = std::max(400.0 * omega, 2000.0 / prob.length());
    return static_cast<int>(std::min(std::ceil(spu), 4.0e6));
}

double lp_norm_p(const std::vector<double>& grid, const std::vector<double>& u, double p)
{
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        sum += 0.5 * (grid[i + 1] - grid[i]) * (std::pow(std::abs(u[i]), p) + std::pow(std::abs(u[i + 1]), p));
    return sum;
}

Eigenpair solve_k(const Problem& prob, int k, double tol, const SolveOptions& opts)
{
    if (k < 1) throw std::invalid_argument("solve_k: k must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("solve_k: tol must be positive");
    const bool exact = opts.propagator == Propagator::exact;
    if (exact && !prob.is_piecewise_constant())
        throw DomainError("solve_k: the exact propagator requires piecewise-constant coefficients");

    Bracket br = bracket_k(prob, k);
    const int spu = opts.steps_per_unit > 0 ? opts.steps_per_unit : default_steps_per_unit(prob, br.hi);

    auto shoot = [&](double lambda) -> EndState {
        if (exact) return exact_propagate_pc(prob, lambda, 0.0, 1.0);
        ZeroCounter counter;
        const double drift = integrate_core(prob, lambda, State{0.0, 1.0}, spu, opts.ivp, counter);
        if (drift > opts.ivp.drift_ceiling)
            throw NonconvergenceError("solve_k: Hamiltonian drift " + std::to_string(drift) +
                                      " exceeds ceiling at lambda = " + std::to_string(lambda));
        return {counter.end.u, counter.end.v, counter.zeros};
    };

    EndState lo = shoot(br.lo);
    EndState hi = shoot(br.hi);
    if (!(lo.zeros < k && hi.zeros >= k))
        throw BracketError("solve_k: zero counts " + std::to_string(lo.zeros) + ", " + std::to_string(hi.zeros) +
                           " at the bracket ends do not enclose index " + std::to_string(k));

    int iterations = 0;
    while (lo.zeros != k - 1 || hi.zeros != k) {
        if (++iterations > opts.max_iterations)
            throw NonconvergenceError("solve_k: bisection did not isolate eigenvalue " + std::to_string(k));
        const double mid = 0.5 * (br.lo + br.hi);
        if (br.hi - br.lo <= 4.0 * std::numeric_limits<double>::epsilon() * br.hi)
            throw BracketError("solve_k: zero count jumps by more than one at lambda = " + std::to_string(mid));
        const EndState m = shoot(mid);
        if (m.zeros < k) {
            br.lo = mid;
            lo = m;
        } else {
            br.hi = mid;
            hi = m;
        }
    }

    double lambda_lo = br.lo;
    double lambda_hi = br.hi;
    if (lo.u != 0.0 && hi.u != 0.0) {
        if ((lo.u > 0.0) == (hi.u > 0.0))
            throw BracketError("solve_k: u(l) does not change sign across the isolating bracket");
        const double rel = std::max(tol, 4.0 * std::numeric_limits<double>::epsilon());
        auto done = [rel](double a, double b) { return std::abs(b - a) <= rel * std::min(std::abs(a), std::abs(b)); };
        const auto remaining = opts.max_iterations - iterations;
        std::uintmax_t max_iter = static_cast<std::uintmax_t>(std::max(remaining, 1));
        const auto root = boost::math::tools::toms748_solve([&](double lam) { return shoot(lam).u; }, br.lo, br.hi,
                                                            lo.u, hi.u, done, max_iter);
        if (!done(root.first, root.second))
            throw NonconvergenceError("solve_k: root solve did not reach the requested tolerance");
        lambda_lo = root.first;
        lambda_hi = root.second;
    } else if (lo.u == 0.0) {
        lambda_hi = lambda_lo;
    } else {
        lambda_lo = lambda_hi;
    }

    // eigenfunction from the low side, where the k-1 interior zeros are unambiguous
    Trajectory traj = exact ? exact_trajectory_pc(prob, lambda_lo, 0.0, 1.0, std::min(spu, 4000))
                            : integrate_ivp(prob, lambda_lo, 0.0, 1.0, spu, opts.ivp);
    Eigenpair ep;
    ep.k = k;
    ep.lambda = 0.5 * (lambda_lo + lambda_hi);
    ep.zeros = interior_zeros(traj);
    const double scale = std::pow(lp_norm_p(traj.grid, traj.u, prob.exponent().p()), -1.0 / prob.exponent().p());
    ep.u = std::move(traj.u);
    for (double& x : ep.u) x *= scale;
    ep.grid = std::move(traj.grid);
    return ep;
}

}  // namespace plap
