#pragma once

// Variational cross-checks for the shooting solver: a P1 finite-element
// Rayleigh quotient minimized for lambda_1, the nodal-equalization
// construction of lambda_2, and checkers for the two-sided eigenvalue bounds
// and the minimal nodal-domain length.

#include "plap/problem.hpp"
#include "plap/shoot.hpp"

#include <span>
#include <vector>

namespace plap {

/// Nodes on [0, l] (uniform, plus every coefficient breakpoint) and the
/// element midpoint values of a and rho.
struct Mesh {
    std::vector<double> nodes;
    std::vector<double> a_mid;
    std::vector<double> rho_mid;

    std::size_t elements() const noexcept { return a_mid.size(); }
};

Mesh make_mesh(const Problem& prob, int n);

/// sum_e a_e |dU_e / h_e|^p h_e  /  sum_e rho_e |Ubar_e|^p h_e, with Ubar_e the element midpoint value.
/// Throws DegenerateInputError when the denominator vanishes.
double rayleigh_quotient(const Mesh& mesh, const Exponent& p, std::span<const double> U);

/// Gradient of the quotient with respect to every nodal value (boundary entries included).
std::vector<double> rayleigh_gradient(const Mesh& mesh, const Exponent& p, std::span<const double> U);

struct Lambda1Result {
    double lambda1 = 0.0;
    std::vector<double> nodes;
    std::vector<double> U;  // normalized so that the discrete int rho |U|^p is 1
    int iterations = 0;
    double gradient_norm = 0.0;
    std::vector<double> history;  // quotient after each accepted step
};

/// Preconditioned projected descent on the discrete quotient, started from the
/// interpolated first mode sin_p(pi_p x / l). The gradient is measured in the
/// dual norm of the p = 2 stiffness matrix, relative to the quotient; the
/// iteration stops once it is <= tol, or earlier when the quotient stops
/// decreasing to rounding (no Armijo step, or relative decrease <= 1e-14 over
/// 50 steps); gradient_norm then reports where it stalled.
Lambda1Result minimize_lambda1(const Problem& prob, int n, double tol, int max_iterations = 5000);

struct Lambda2Result {
    double lambda2 = 0.0;
    double c_star = 0.0;
    double lambda_left = 0.0;   // lambda_1 on (0, c*)
    double lambda_right = 0.0;  // lambda_1 on (c*, l)
};

/// lambda_2 as the common value of lambda_1(0, c) and lambda_1(c, l) at the
/// crossing point c*, each evaluated by solve_k(k = 1) on the subinterval.
Lambda2Result lambda2_equalize(const Problem& prob, double tol, const SolveOptions& opts = {});

/// Lower bound on the length of any nodal domain of the k-th eigenfunction:
/// l [(alpha/beta)(rho-/rho+)]^{1/p} / k.
double nodal_length_bound(const Problem& prob, int k);

struct WeylRow {
    int k = 0;
    double lambda = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double margin_lower = 0.0;  // lambda - lower
    double margin_upper = 0.0;  // upper - lambda
    bool ok = false;
};

struct WeylReport {
    std::vector<WeylRow> rows;
    bool ok = true;
};

/// (alpha/rho+) mu_k <= lambda_k <= (beta/rho-) mu_k for every eigenpair.
/// A bound counts as met if it is violated by at most rtol relative.
WeylReport check_weyl(const Problem& prob, std::span<const Eigenpair> eigs, double rtol = 0.0);

struct NodalReport {
    int k = 0;
    std::vector<double> lengths;
    double bound = 0.0;
    double min_length = 0.0;
    bool ok = false;
};

/// Every nodal interval of the eigenfunction is at least nodal_length_bound long,
/// up to rtol * l.
NodalReport check_nodal_measure(const Problem& prob, const Eigenpair& eig, double rtol = 0.0);

}  // namespace plap
