#pragma once

// Shooting for the Dirichlet eigenvalues of the weighted p-Laplacian.
//
// The equation is integrated as a first-order system in u and the flux
// v = a phi_p(u'):
//
//     u' = phi_p^{-1}(v / a),    v' = -lambda rho phi_p(u).
//
// u and v are continuous across coefficient jumps. On a piece where a and
// rho are constant the quantity
//
//     H = (1/p') a^{-1/(p-1)} |v|^{p'} + (lambda rho / p) |u|^p
//
// is conserved; its drift monitors the integrator.

#include "plap/problem.hpp"

#include <vector>

namespace plap {

struct Trajectory {
    std::vector<double> grid;
    std::vector<double> u;
    std::vector<double> v;
    std::vector<double> du_minus;  // u'(x-), computed with the coefficient on the left
    std::vector<double> du_plus;   // u'(x+)
    /// Largest relative drift of H over the constant-coefficient pieces.
    double hamiltonian_drift = 0.0;
};

struct IvpOptions {
    /// integrate_ivp throws NonconvergenceError above this drift.
    double drift_ceiling = 1e-6;
    /// Levels of 4-way subdivision applied to steps on which the non-Lipschitz
    /// variable (u for p < 2, v for p > 2) changes sign or comes within
    /// singular_reach step lengths of zero.
    int singular_levels = 10;
    double singular_reach = 16.0;
};

/// Fixed-step classical RK4 with steps aligned to the coefficient breakpoints.
/// Each segment between breakpoints gets ceil(length * steps_per_unit) steps.
Trajectory integrate_ivp(const Problem& prob, double lambda, double u0, double v0, int steps_per_unit,
                         const IvpOptions& opts = {});

/// Interior zeros of u, each located by bisection on the cubic Hermite interpolant of the step.
std::vector<double> interior_zeros(const Trajectory& t);
int count_interior_zeros(const Trajectory& t);

struct Bracket {
    double lo;
    double hi;
};

/// Eigenvalue bracket from the two-sided comparison with the unweighted spectrum
/// mu_k = (pi_p k / l)^p, widened by a factor 2 on each side.
Bracket bracket_k(const Problem& prob, int k);

/// mu_k = (pi_p k / l)^p.
double unweighted_eigenvalue(const Exponent& p, double length, int k);

struct EndState {
    double u;
    double v;
    int zeros;  // zeros strictly inside (0, l)
};

/// Closed-form propagation for piecewise-constant coefficients: on each piece
/// the solution is A sin_p(omega (x - x0)) with omega = (lambda rho / a)^{1/p}.
EndState exact_propagate_pc(const Problem& prob, double lambda, double u0, double v0);

/// Samples of the closed-form solution, at least samples_per_unit points per unit length.
Trajectory exact_trajectory_pc(const Problem& prob, double lambda, double u0, double v0, int samples_per_unit);

enum class Propagator { runge_kutta, exact };

struct SolveOptions {
    Propagator propagator = Propagator::runge_kutta;
    /// 0 selects a step size from the largest local frequency in the bracket.
    int steps_per_unit = 0;
    int max_iterations = 200;
    IvpOptions ivp{};
};

/// Steps per unit length used by solve_k when SolveOptions::steps_per_unit is 0.
int default_steps_per_unit(const Problem& prob, double lambda_max);

/// k-th Dirichlet eigenvalue and its L^p-normalized eigenfunction.
///
/// Bisection on the ordering predicate "lambda is too small iff the shooting
/// solution from (u, v)(0) = (0, 1) has fewer than k interior zeros" until the
/// bracket ends have k-1 and k zeros, then a bracketing root solve on u(l).
Eigenpair solve_k(const Problem& prob, int k, double tol, const SolveOptions& opts = {});

/// int_0^l |u|^p by the composite trapezoid rule.
double lp_norm_p(const std::vector<double>& grid, const std::vector<double>& u, double p);

}  // namespace plap
