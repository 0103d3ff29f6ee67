#pragma once

// Generalized trigonometric functions of the one-dimensional p-Laplacian.
//
// sin_p is the amplitude-1 solution of -(phi_p(u'))' = phi_p(u), u(0) = 0,
// defined on [0, pi_p/2] implicitly by
//
//     x = int_0^{sin_p(x)} ((p-1)/(1-t^p))^{1/p} dt
//
// and extended by sin_p(pi_p - x) = sin_p(x), oddness and 2 pi_p periodicity.
// It satisfies the first integral (p-1)|sin_p'|^p + |sin_p|^p = 1.

#include <memory>

namespace plap {

namespace detail {
struct SineTable;
}

/// Exponent p in (1, inf) of the p-Laplacian, with its conjugate p' = p/(p-1).
///
/// Construction tabulates the inverse generalized sine for this p, so an
/// Exponent should be built once and passed around by reference. Copies share
/// the immutable table and are safe to use from many threads.
class Exponent {
public:
    explicit Exponent(double p);

    double p() const noexcept { return p_; }
    double conj() const noexcept { return conj_; }
    /// Half period pi_p, the first positive zero of sin_p.
    double pi() const noexcept;

    const detail::SineTable& table() const noexcept { return *table_; }

    friend bool operator==(const Exponent& a, const Exponent& b) noexcept { return a.p_ == b.p_; }

private:
    double p_;
    double conj_;
    std::shared_ptr<const detail::SineTable> table_;
};

struct SinCos {
    double sin;
    double dsin;
};

double pi_p(const Exponent& p);

/// Inverse of sin_p on [-pi_p/2, pi_p/2]. Throws DomainError for |s| > 1.
double asin_p(const Exponent& p, double s);

double sin_p(const Exponent& p, double x);
double dsin_p(const Exponent& p, double x);

/// sin_p and its derivative in one evaluation. Both are accurate to a few ulp,
/// including dsin_p near its zeros where the first integral is ill-conditioned.
SinCos sincos_p(const Exponent& p, double x);

/// Phase of a point on the generalized circle: returns theta in (-pi_p, pi_p]
/// and A > 0 such that (s, c) = A (sin_p(theta), dsin_p(theta)).
/// (s, c) must not both vanish.
struct Phase {
    double theta;
    double amplitude;
};
Phase phase_p(const Exponent& p, double s, double c);

}  // namespace plap
