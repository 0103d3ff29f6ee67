#pragma once

// Statement of the weighted one-dimensional eigenproblem
//
//     -(a(x) |u'|^{p-2} u')' = lambda rho(x) |u|^{p-2} u   on (0, l),   u(0) = u(l) = 0,
//
// together with its coefficient descriptors and scalar kernels.

#include "plap/pfunc.hpp"

#include <cmath>
#include <memory>
#include <string_view>
#include <vector>

namespace plap {

enum class CoefficientKind { piecewise_constant, piecewise_linear, periodic_cell };

std::string_view to_string(CoefficientKind kind);

/// Affine form c(x) = value + slope (x - x0), exact on one smooth piece.
struct LocalForm {
    double x0 = 0.0;
    double value = 0.0;
    double slope = 0.0;

    double operator()(double x) const { return value + slope * (x - x0); }
};

/// Positive bounded coefficient a(x) or rho(x).
///
/// Piecewise-constant coefficients are right-continuous at breakpoints.
/// A periodic-cell coefficient wraps a piecewise coefficient on the unit
/// cell [0, 1] and evaluates it at the fractional part of x / period.
class Coefficient {
public:
    static Coefficient constant(double value, double lo, double hi);
    static Coefficient piecewise_constant(std::vector<double> breakpoints, std::vector<double> values);
    static Coefficient piecewise_linear(std::vector<double> nodes, std::vector<double> values);
    static Coefficient periodic(const Coefficient& cell, double period);

    CoefficientKind kind() const noexcept { return kind_; }
    /// Breakpoints and values of the piecewise description (of the cell when periodic).
    const std::vector<double>& breakpoints() const;
    const std::vector<double>& values() const;
    double period() const noexcept { return period_; }
    const Coefficient& cell() const;

    double lower() const noexcept { return lower_; }
    double upper() const noexcept { return upper_; }
    /// Domain of definition; the whole real line for periodic coefficients.
    double domain_lo() const;
    double domain_hi() const;

    bool is_piecewise_constant() const noexcept;

    double operator()(double x) const;

    /// Affine form of the piece containing x_inside, valid on its closure.
    LocalForm local(double x_inside) const;

    /// Breakpoints lying strictly inside (lo, hi), ascending.
    std::vector<double> breakpoints_in(double lo, double hi) const;

    /// This coefficient on [lo, hi], shifted to [0, hi - lo], as a non-periodic piecewise description.
    Coefficient restricted(double lo, double hi) const;

    friend bool operator==(const Coefficient& a, const Coefficient& b);

private:
    Coefficient() = default;
    void validate_and_bound();

    CoefficientKind kind_ = CoefficientKind::piecewise_constant;
    std::vector<double> breakpoints_;
    std::vector<double> values_;
    double period_ = 0.0;
    std::shared_ptr<const Coefficient> cell_;
    double lower_ = 0.0;
    double upper_ = 0.0;
};

/// eval_coeff: value of the coefficient at x; throws DomainError outside its domain.
double eval_coeff(const Coefficient& c, double x);

class Problem {
public:
    Problem(double length, Exponent p, Coefficient a, Coefficient rho);

    double length() const noexcept { return length_; }
    const Exponent& exponent() const noexcept { return p_; }
    const Coefficient& a() const noexcept { return a_; }
    const Coefficient& rho() const noexcept { return rho_; }

    bool is_piecewise_constant() const noexcept { return a_.is_piecewise_constant() && rho_.is_piecewise_constant(); }

    /// Ordered abscissae 0 = x_0 < ... < x_m = l containing every breakpoint of a and rho.
    std::vector<double> segments() const;

    /// The same equation on (lo, hi), translated to (0, hi - lo).
    Problem restricted(double lo, double hi) const;

private:
    double length_;
    Exponent p_;
    Coefficient a_;
    Coefficient rho_;
};

struct Eigenpair {
    int k = 0;
    double lambda = 0.0;
    std::vector<double> grid;
    std::vector<double> u;      // normalized: int |u|^p = 1, u'(0) > 0
    std::vector<double> zeros;  // interior zeros, ascending
};

/// phi_p(s) = |s|^{p-2} s.
inline double phi_p(const Exponent& p, double s) { return std::copysign(std::pow(std::abs(s), p.p() - 1.0), s); }

/// Inverse of phi_p, equal to phi_{p'}.
inline double phi_p_inv(const Exponent& p, double t)
{
    return std::copysign(std::pow(std::abs(t), p.conj() - 1.0), t);
}

/// Energy density Phi(xi) = a |xi|^p; its derivative is p a phi_p(xi).
double big_phi(double a_val, const Exponent& p, double xi);

struct PiconeTerms {
    double L;
    double R;
};

/// Both sides of the Picone identity at a point, for Phi = a|xi|^p:
///   L = Phi(u') + (p-1)(u/v)^p Phi(v') - p (u/v)^{p-1} a phi_p(v') u'
///   R = a phi_p(u') u' - a phi_p(v') (u^p / v^{p-1})'
/// Requires v > 0, u >= 0.
PiconeTerms picone_LR(const Exponent& p, double a_val, double u, double du, double v, double dv);

}  // namespace plap
