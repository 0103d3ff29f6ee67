#include "plap/homog.hpp"

#include "plap/errors.hpp"

#include "gauss_kronrod.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>

namespace plap {

namespace {

const Coefficient& unit_cell(const Coefficient& c)
{
    const Coefficient& cell = c.kind() == CoefficientKind::periodic_cell ? c.cell() : c;
    if (cell.breakpoints().front() != 0.0 || cell.breakpoints().back() != 1.0)
        throw std::invalid_argument("cell coefficient must be defined on [0, 1]");
    return cell;
}

// int_0^1 f(c(y)) dy over the pieces of a unit cell
template <class F>
double cell_integral(const Coefficient& cell, const F& f)
{
    const auto& bp = cell.breakpoints();
    const auto& val = cell.values();
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
        const double h = bp[i + 1] - bp[i];
        if (cell.kind() == CoefficientKind::piecewise_constant) {
            sum += h * f(val[i]);
        } else {
            const double v0 = val[i];
            const double v1 = val[i + 1];
            sum += h * detail::integrate_gk([&](double t) { return f(v0 + t * (v1 - v0)); }, 0.0, 1.0);
        }
    }
    return sum;
}

}  // namespace

double effective_coefficient(const Coefficient& a_cell, const Exponent& p)
{
    const Coefficient& cell = unit_cell(a_cell);
    if (!(cell.lower() > 0.0)) throw DomainError("effective_coefficient: cell must be positive");
    const double q = 1.0 / (p.p() - 1.0);
    const double mean = cell_integral(cell, [q](double a) { return std::pow(a, -q); });
    return std::pow(mean, -(p.p() - 1.0));
}

double effective_weight(const Coefficient& rho_cell)
{
    const Coefficient& cell = unit_cell(rho_cell);
    if (!(cell.lower() > 0.0)) throw DomainError("effective_weight: cell must be positive");
    if (cell.kind() == CoefficientKind::piecewise_linear) {
        const auto& bp = cell.breakpoints();
        const auto& val = cell.values();
        double sum = 0.0;
        for (std::size_t i = 0; i + 1 < bp.size(); ++i) sum += 0.5 * (bp[i + 1] - bp[i]) * (val[i] + val[i + 1]);
        return sum;
    }
    return cell_integral(cell, [](double r) { return r; });
}

double homogenized_eigenvalue(double a_star, double rho_star, const Exponent& p, double length, int k)
{
    if (!(a_star > 0.0 && rho_star > 0.0)) throw DomainError("homogenized_eigenvalue: coefficients must be positive");
    return a_star / rho_star * unweighted_eigenvalue(p, length, k);
}

Problem CellProblem::at(int n) const
{
    if (n < 1) throw std::invalid_argument("CellProblem: cell count must be positive");
    const double eps = length / n;
    return Problem(length, exponent, Coefficient::periodic(unit_cell(a_cell), eps),
                   Coefficient::periodic(unit_cell(rho_cell), eps));
}

bool SweepResult::complete() const
{
    return std::all_of(failures.begin(), failures.end(), [](const std::string& f) { return f.empty(); });
}

SweepResult sweep_epsilon(const CellProblem& cell, int k, const std::vector<int>& n_list, double tol,
                          const SolveOptions& opts)
{
    if (n_list.empty()) throw std::invalid_argument("sweep_epsilon: n_list is empty");
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (n_list[i] < 1) throw std::invalid_argument("sweep_epsilon: n must be positive");
        if (i > 0 && n_list[i] <= n_list[i - 1]) throw std::invalid_argument("sweep_epsilon: n_list must ascend");
    }

    SweepResult res;
    res.k = k;
    res.a_star = effective_coefficient(cell.a_cell, cell.exponent);
    res.rho_star = effective_weight(cell.rho_cell);
    res.lambda_star = homogenized_eigenvalue(res.a_star, res.rho_star, cell.exponent, cell.length, k);

    std::vector<std::future<Eigenpair>> jobs;
    jobs.reserve(n_list.size());
    for (int n : n_list) {
        jobs.push_back(std::async(std::launch::async, [&cell, n, k, tol, &opts] {
            return solve_k(cell.at(n), k, tol, opts);
        }));
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        res.ns.push_back(n_list[i]);
        res.epsilons.push_back(cell.length / n_list[i]);
        try {
            Eigenpair ep = jobs[i].get();
            res.lambdas.push_back(ep.lambda);
            res.rel_errors.push_back(std::abs(ep.lambda - res.lambda_star) / res.lambda_star);
            res.failures.emplace_back();
            if (i + 1 == n_list.size()) res.finest = std::move(ep);
        } catch (const std::exception& ex) {
            res.lambdas.push_back(nan);
            res.rel_errors.push_back(nan);
            res.failures.emplace_back(ex.what());
        }
    }
    return res;
}

ConvergenceReport convergence_report(const SweepResult& s, double noise_floor)
{
    if (s.ns.size() < 3) throw std::invalid_argument("convergence_report: need at least three sweep points");
    ConvergenceReport rep;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    double order_sum = 0.0;
    int order_count = 0;
    for (std::size_t i = 0; i < s.ns.size(); ++i) {
        ConvergenceRow row{s.ns[i], s.epsilons[i], s.lambdas[i], s.rel_errors[i], nan};
        if (i > 0) {
            const double e0 = s.rel_errors[i - 1];
            const double e1 = s.rel_errors[i];
            if (!(e1 < e0)) rep.monotone = false;
            if (e0 > noise_floor && e1 > noise_floor) {
                row.order = std::log(e0 / e1) / std::log(s.epsilons[i - 1] / s.epsilons[i]);
                order_sum += row.order;
                ++order_count;
            } else {
                rep.order_defined = false;
            }
        }
        rep.rows.push_back(row);
    }
    rep.mean_order = rep.order_defined && order_count > 0 ? order_sum / order_count : nan;
    if (order_count == 0) rep.order_defined = false;
    return rep;
}

}  // namespace plap
