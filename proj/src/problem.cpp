#include "plap/problem.hpp"

#include "plap/errors.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace plap {

std::string_view to_string(CoefficientKind kind)
{
    switch (kind) {
    case CoefficientKind::piecewise_constant: return "piecewise-constant";
    case CoefficientKind::piecewise_linear: return "piecewise-linear";
    case CoefficientKind::periodic_cell: return "periodic-cell";
    }
    return "unknown";
}

namespace {

// Drops points that rounding has pushed within tol of their predecessor.
// The first and last points are kept.
std::vector<double> merge_close(std::vector<double> pts, double tol)
{
    std::vector<double> out;
    out.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const bool last = i + 1 == pts.size();
        if (!out.empty() && pts[i] - out.back() <= tol) {
            if (last && out.size() > 1) out.back() = pts[i];
            continue;
        }
        out.push_back(pts[i]);
    }
    return out;
}

std::size_t piece_index(const std::vector<double>& bps, double x)
{
    auto it = std::upper_bound(bps.begin(), bps.end(), x);
    auto idx = static_cast<std::ptrdiff_t>(it - bps.begin()) - 1;
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(bps.size()) - 2));
}

}  // namespace

Coefficient Coefficient::constant(double value, double lo, double hi)
{
    return piecewise_constant({lo, hi}, {value});
}

Coefficient Coefficient::piecewise_constant(std::vector<double> breakpoints, std::vector<double> values)
{
    if (breakpoints.size() < 2 || values.size() + 1 != breakpoints.size())
        throw std::invalid_argument("piecewise-constant coefficient needs n+1 breakpoints for n values");
    Coefficient c;
    c.kind_ = CoefficientKind::piecewise_constant;
    c.breakpoints_ = std::move(breakpoints);
    c.values_ = std::move(values);
    c.validate_and_bound();
    return c;
}

Coefficient Coefficient::piecewise_linear(std::vector<double> nodes, std::vector<double> values)
{
    if (nodes.size() < 2 || values.size() != nodes.size())
        throw std::invalid_argument("piecewise-linear coefficient needs one value per node, at least two nodes");
    Coefficient c;
    c.kind_ = CoefficientKind::piecewise_linear;
    c.breakpoints_ = std::move(nodes);
    c.values_ = std::move(values);
    c.validate_and_bound();
    return c;
}

Coefficient Coefficient::periodic(const Coefficient& cell, double period)
{
    if (cell.kind_ == CoefficientKind::periodic_cell)
        throw std::invalid_argument("periodic-cell coefficient cannot wrap another periodic cell");
    if (cell.breakpoints_.front() != 0.0 || cell.breakpoints_.back() != 1.0)
        throw std::invalid_argument("periodic-cell coefficient needs a unit cell on [0, 1]");
    if (!(period > 0.0) || !std::isfinite(period)) throw DomainError("periodic-cell period must be positive");
    Coefficient c;
    c.kind_ = CoefficientKind::periodic_cell;
    c.period_ = period;
    c.cell_ = std::make_shared<const Coefficient>(cell);
    c.lower_ = cell.lower_;
    c.upper_ = cell.upper_;
    return c;
}

void Coefficient::validate_and_bound()
{
    for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
        if (!std::isfinite(breakpoints_[i])) throw std::invalid_argument("coefficient breakpoints must be finite");
        if (i > 0 && !(breakpoints_[i] > breakpoints_[i - 1]))
            throw std::invalid_argument("coefficient breakpoints must be strictly increasing");
    }
    for (double v : values_) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw DomainError("coefficient values must be strictly positive and finite, got " + std::to_string(v));
    }
    const auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
    lower_ = *lo;
    upper_ = *hi;
}

const std::vector<double>& Coefficient::breakpoints() const { return cell_ ? cell_->breakpoints_ : breakpoints_; }
const std::vector<double>& Coefficient::values() const { return cell_ ? cell_->values_ : values_; }

const Coefficient& Coefficient::cell() const
{
    if (!cell_) throw std::logic_error("coefficient is not periodic");
    return *cell_;
}

double Coefficient::domain_lo() const
{
    return kind_ == CoefficientKind::periodic_cell ? -std::numeric_limits<double>::infinity() : breakpoints_.front();
}

double Coefficient::domain_hi() const
{
    return kind_ == CoefficientKind::periodic_cell ? std::numeric_limits<double>::infinity() : breakpoints_.back();
}

bool Coefficient::is_piecewise_constant() const noexcept
{
    if (kind_ == CoefficientKind::periodic_cell) return cell_->kind_ == CoefficientKind::piecewise_constant;
    return kind_ == CoefficientKind::piecewise_constant;
}

double Coefficient::operator()(double x) const
{
    if (kind_ == CoefficientKind::periodic_cell) {
        const double t = x / period_;
        double y = t - std::floor(t);
        if (y >= 1.0) y = 0.0;
        return (*cell_)(y);
    }
    if (!(x >= breakpoints_.front() && x <= breakpoints_.back()))
        throw DomainError("coefficient evaluated outside its domain at x = " + std::to_string(x));
    const auto i = piece_index(breakpoints_, x);
    if (kind_ == CoefficientKind::piecewise_constant) return values_[i];
    const double w = (x - breakpoints_[i]) / (breakpoints_[i + 1] - breakpoints_[i]);
    return values_[i] + w * (values_[i + 1] - values_[i]);
}

LocalForm Coefficient::local(double x_inside) const
{
    if (kind_ == CoefficientKind::periodic_cell) {
        const double t = x_inside / period_;
        const double j = std::floor(t);
        const LocalForm f = cell_->local(std::clamp(t - j, 0.0, 1.0));
        return {(j + f.x0) * period_, f.value, f.slope / period_};
    }
    if (!(x_inside >= breakpoints_.front() && x_inside <= breakpoints_.back()))
        throw DomainError("coefficient evaluated outside its domain at x = " + std::to_string(x_inside));
    const auto i = piece_index(breakpoints_, x_inside);
    if (kind_ == CoefficientKind::piecewise_constant) return {x_inside, values_[i], 0.0};
    const double slope = (values_[i + 1] - values_[i]) / (breakpoints_[i + 1] - breakpoints_[i]);
    return {breakpoints_[i], values_[i], slope};
}

std::vector<double> Coefficient::breakpoints_in(double lo, double hi) const
{
    std::vector<double> out;
    if (kind_ != CoefficientKind::periodic_cell) {
        for (double b : breakpoints_)
            if (b > lo && b < hi) out.push_back(b);
        return out;
    }
    const auto& cb = cell_->breakpoints_;
    const auto j0 = static_cast<long long>(std::floor(lo / period_));
    const auto j1 = static_cast<long long>(std::ceil(hi / period_));
    for (long long j = j0; j <= j1; ++j) {
        for (std::size_t i = 0; i + 1 < cb.size(); ++i) {
            const double x = (static_cast<double>(j) + cb[i]) * period_;
            if (x > lo && x < hi) out.push_back(x);
        }
    }
    return out;
}

Coefficient Coefficient::restricted(double lo, double hi) const
{
    if (!(hi > lo)) throw std::invalid_argument("restricted: empty interval");
    if (lo < domain_lo() || hi > domain_hi()) throw DomainError("restricted: interval outside coefficient domain");
    std::vector<double> pts{lo};
    for (double b : breakpoints_in(lo, hi)) pts.push_back(b);
    pts.push_back(hi);
    pts = merge_close(std::move(pts), 1e-13 * (hi - lo));

    std::vector<double> shifted(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) shifted[i] = pts[i] - lo;
    shifted.front() = 0.0;
    shifted.back() = hi - lo;

    std::vector<double> vals;
    if (is_piecewise_constant()) {
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) vals.push_back(local(0.5 * (pts[i] + pts[i + 1])).value);
        return piecewise_constant(std::move(shifted), std::move(vals));
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double mid = i + 1 < pts.size() ? 0.5 * (pts[i] + pts[i + 1]) : 0.5 * (pts[i - 1] + pts[i]);
        vals.push_back(local(mid)(pts[i]));
    }
    return piecewise_linear(std::move(shifted), std::move(vals));
}

bool operator==(const Coefficient& a, const Coefficient& b)
{
    if (a.kind_ != b.kind_) return false;
    if (a.kind_ == CoefficientKind::periodic_cell) return a.period_ == b.period_ && *a.cell_ == *b.cell_;
    return a.breakpoints_ == b.breakpoints_ && a.values_ == b.values_;
}

double eval_coeff(const Coefficient& c, double x) { return c(x); }

Problem::Problem(double length, Exponent p, Coefficient a, Coefficient rho)
    : length_(length), p_(std::move(p)), a_(std::move(a)), rho_(std::move(rho))
{
    if (!(length_ > 0.0) || !std::isfinite(length_)) throw DomainError("problem length must be positive");
    const double slack = 1e-12 * length_;
    for (const Coefficient* c : {&a_, &rho_}) {
        if (c->domain_lo() > slack || c->domain_hi() < length_ - slack)
            throw std::invalid_argument("coefficient domain does not cover [0, length]");
    }
}

std::vector<double> Problem::segments() const
{
    std::vector<double> pts{0.0};
    for (double b : a_.breakpoints_in(0.0, length_)) pts.push_back(b);
    for (double b : rho_.breakpoints_in(0.0, length_)) pts.push_back(b);
    pts.push_back(length_);
    std::sort(pts.begin() + 1, pts.end() - 1);
    return merge_close(std::move(pts), 1e-12 * length_);
}

Problem Problem::restricted(double lo, double hi) const
{
    if (!(lo >= 0.0 && hi <= length_ && hi > lo)) throw std::invalid_argument("restricted: bad subinterval");
    return Problem(hi - lo, p_, a_.restricted(lo, hi), rho_.restricted(lo, hi));
}

double big_phi(double a_val, const Exponent& p, double xi)
{
    if (!(a_val > 0.0)) throw DomainError("big_phi: coefficient must be positive");
    return a_val * std::pow(std::abs(xi), p.p());
}

PiconeTerms picone_LR(const Exponent& p, double a_val, double u, double du, double v, double dv)
{
    if (!(v > 0.0)) throw DomainError("picone_LR: v must be positive");
    if (!(u >= 0.0)) throw DomainError("picone_LR: u must be nonnegative");
    if (!(a_val > 0.0)) throw DomainError("picone_LR: coefficient must be positive");
    const double q = p.p();
    const double t = u / v;
    const double tq1 = std::pow(t, q - 1.0);
    const double tq = tq1 * t;
    const double flux_v = a_val * phi_p(p, dv);  // a(x, v')

    const double L = big_phi(a_val, p, du) + (q - 1.0) * tq * big_phi(a_val, p, dv) - q * tq1 * flux_v * du;
    // (u^p / v^{p-1})' = p (u/v)^{p-1} u' - (p-1) (u/v)^p v'
    const double d_ratio = q * tq1 * du - (q - 1.0) * tq * dv;
    const double R = a_val * phi_p(p, du) * du - flux_v * d_ratio;
    return {L, R};
}

}  // namespace plap
