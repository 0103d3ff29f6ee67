#pragma once

// Periodic homogenization in one dimension. For a_eps(x) = a(x/eps) the
// operators -(a_eps |u'|^{p-2} u')' converge to -(a* |u'|^{p-2} u')' with
//
//     a* = ( int_0^1 a(y)^{-1/(p-1)} dy )^{-(p-1)},
//
// and the weights rho_eps converge weakly-* to their cell average.

#include "plap/problem.hpp"
#include "plap/shoot.hpp"

#include <optional>
#include <string>
#include <vector>

namespace plap {

/// (p-1)-power harmonic mean of the unit cell. Exact for piecewise-constant
/// cells, adaptive quadrature on piecewise-linear ones.
double effective_coefficient(const Coefficient& a_cell, const Exponent& p);

/// Cell average of the weight.
double effective_weight(const Coefficient& rho_cell);

/// (a* / rho*) (pi_p k / l)^p.
double homogenized_eigenvalue(double a_star, double rho_star, const Exponent& p, double length, int k);

/// Eigenproblem whose coefficients are given on the unit cell [0, 1] and
/// repeated with period l / n.
struct CellProblem {
    double length;
    Exponent exponent;
    Coefficient a_cell;
    Coefficient rho_cell;

    Problem at(int n) const;
};

struct SweepResult {
    int k = 0;
    std::vector<int> ns;
    std::vector<double> epsilons;
    std::vector<double> lambdas;     // NaN where the solve failed
    std::vector<double> rel_errors;  // NaN where the solve failed
    std::vector<std::string> failures;  // empty string where the solve succeeded
    double a_star = 0.0;
    double rho_star = 0.0;
    double lambda_star = 0.0;
    std::optional<Eigenpair> finest;  // eigenpair at the smallest epsilon

    bool complete() const;
};

/// lambda_k for eps = l / n, n in n_list (ascending), against the homogenized
/// limit. The n are solved concurrently; results are ordered by n.
SweepResult sweep_epsilon(const CellProblem& cell, int k, const std::vector<int>& n_list, double tol,
                          const SolveOptions& opts = {});

struct ConvergenceRow {
    int n;
    double epsilon;
    double lambda;
    double rel_error;
    double order;  // log(e_{i-1}/e_i) / log(eps_{i-1}/eps_i); NaN for the first row or when undefined
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    bool monotone = true;         // errors strictly decreasing in n
    bool order_defined = true;    // false when errors sit at the noise floor
    double mean_order = 0.0;      // NaN when undefined
};

/// Table and empirical orders of a sweep. Errors at or below noise_floor
/// are treated as solver noise and leave the order undefined.
ConvergenceReport convergence_report(const SweepResult& s, double noise_floor = 1e-9);

}  // namespace plap
