#include "plap/rayleigh.hpp"

#include "plap/errors.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <numeric>
#include <stdexcept>
#include <string>

namespace plap {

namespace {

void check_vector(const Mesh& mesh, std::span<const double> U)
{
    if (U.size() != mesh.nodes.size()) throw std::invalid_argument("nodal vector does not match the mesh");
    if (U.front() != 0.0 || U.back() != 0.0)
        throw std::invalid_argument("nodal vector must vanish at both boundary nodes");
}

struct Energies {
    double numerator;
    double denominator;
};

Energies energies(const Mesh& mesh, double p, std::span<const double> U)
{
    double num = 0.0;
    double den = 0.0;
    for (std::size_t e = 0; e < mesh.elements(); ++e) {
        const double h = mesh.nodes[e + 1] - mesh.nodes[e];
        const double d = (U[e + 1] - U[e]) / h;
        const double m = 0.5 * (U[e] + U[e + 1]);
        num += mesh.a_mid[e] * std::pow(std::abs(d), p) * h;
        den += mesh.rho_mid[e] * std::pow(std::abs(m), p) * h;
    }
    return {num, den};
}

// Solves the interior system of the p = 2 stiffness matrix with weights a_e / h_e.
class StiffnessSolver {
public:
    explicit StiffnessSolver(const Mesh& mesh)
    {
        const std::size_t ne = mesh.elements();
        std::vector<double> w(ne);
        for (std::size_t e = 0; e < ne; ++e) w[e] = mesh.a_mid[e] / (mesh.nodes[e + 1] - mesh.nodes[e]);
        const std::size_t m = ne - 1;  // interior nodes 1..ne-1
        diag_.resize(m);
        off_.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            diag_[i] = w[i] + w[i + 1];
            off_[i] = -w[i + 1];
        }
        // forward elimination, stored for repeated solves
        cprime_.resize(m);
        denom_.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            const double prev = i == 0 ? 0.0 : off_[i - 1] * cprime_[i - 1];
            denom_[i] = diag_[i] - prev;
            cprime_[i] = off_[i] / denom_[i];
        }
    }

    // rhs and result indexed by all nodes; boundary entries are ignored / zero.
    std::vector<double> solve(const std::vector<double>& rhs) const
    {
        const std::size_t m = diag_.size();
        std::vector<double> d(m);
        for (std::size_t i = 0; i < m; ++i) {
            const double prev = i == 0 ? 0.0 : off_[i - 1] * d[i - 1];
            d[i] = (rhs[i + 1] - prev) / denom_[i];
        }
        std::vector<double> x(m + 2, 0.0);
        for (std::size_t i = m; i-- > 0;) {
            const double next = i + 1 < m ? cprime_[i] * x[i + 2] : 0.0;
            x[i + 1] = d[i] - next;
        }
        return x;
    }

private:
    std::vector<double> diag_, off_, cprime_, denom_;
};

void normalize(const Mesh& mesh, double p, std::vector<double>& U)
{
    const double den = energies(mesh, p, U).denominator;
    if (!(den > 0.0)) throw DegenerateInputError("normalize: zero denominator");
    const double s = std::pow(den, -1.0 / p);
    for (double& x : U) x *= s;
}

}  // namespace

Mesh make_mesh(const Problem& prob, int n)
{
    if (n < 1) throw std::invalid_argument("make_mesh: element count must be positive");
    const double l = prob.length();
    std::vector<double> pts;
    for (int i = 0; i <= n; ++i) pts.push_back(l * i / n);
    const auto segs = prob.segments();
    pts.insert(pts.end(), segs.begin() + 1, segs.end() - 1);
    std::sort(pts.begin(), pts.end());

    Mesh mesh;
    const double tol = 1e-12 * l;
    for (double x : pts) {
        if (!mesh.nodes.empty() && x - mesh.nodes.back() <= tol) continue;
        mesh.nodes.push_back(x);
    }
    mesh.nodes.back() = l;
    for (std::size_t e = 0; e + 1 < mesh.nodes.size(); ++e) {
        const double mid = 0.5 * (mesh.nodes[e] + mesh.nodes[e + 1]);
        mesh.a_mid.push_back(prob.a().local(mid)(mid));
        mesh.rho_mid.push_back(prob.rho().local(mid)(mid));
    }
    return mesh;
}

double rayleigh_quotient(const Mesh& mesh, const Exponent& p, std::span<const double> U)
{
    check_vector(mesh, U);
    const auto en = energies(mesh, p.p(), U);
    if (!(en.denominator > 0.0)) throw DegenerateInputError("rayleigh_quotient: zero denominator");
    return en.numerator / en.denominator;
}

std::vector<double> rayleigh_gradient(const Mesh& mesh, const Exponent& p, std::span<const double> U)
{
    check_vector(mesh, U);
    const auto en = energies(mesh, p.p(), U);
    if (!(en.denominator > 0.0)) throw DegenerateInputError("rayleigh_gradient: zero denominator");
    const double q = en.numerator / en.denominator;
    std::vector<double> g(U.size(), 0.0);
    for (std::size_t e = 0; e < mesh.elements(); ++e) {
        const double h = mesh.nodes[e + 1] - mesh.nodes[e];
        const double d = (U[e + 1] - U[e]) / h;
        const double m = 0.5 * (U[e] + U[e + 1]);
        const double dn = mesh.a_mid[e] * p.p() * phi_p(p, d);
        const double dd = mesh.rho_mid[e] * p.p() * phi_p(p, m) * 0.5 * h;
        g[e] += -dn - q * dd;
        g[e + 1] += dn - q * dd;
    }
    for (double& x : g) x /= en.denominator;
    return g;
}

namespace {
constexpr std::size_t kStallWindow = 50;
constexpr double kStallRel = 1e-14;
}  // namespace

Lambda1Result minimize_lambda1(const Problem& prob, int n, double tol, int max_iterations)
{
    if (n < 16) throw std::invalid_argument("minimize_lambda1: need at least 16 elements");
    if (!(tol > 0.0)) throw std::invalid_argument("minimize_lambda1: tol must be positive");
    const Exponent& e = prob.exponent();
    const double p = e.p();
    const Mesh mesh = make_mesh(prob, n);
    const StiffnessSolver K(mesh);

    std::vector<double> U(mesh.nodes.size());
    for (std::size_t i = 0; i < U.size(); ++i) U[i] = sin_p(e, e.pi() * mesh.nodes[i] / prob.length());
    U.front() = 0.0;
    U.back() = 0.0;
    normalize(mesh, p, U);

    Lambda1Result res;
    double q = rayleigh_quotient(mesh, e, U);
    double step = 1.0 / p;
    std::vector<double> trial(U.size());
    for (int it = 0;; ++it) {
        std::vector<double> g = rayleigh_gradient(mesh, e, U);
        g.front() = 0.0;
        g.back() = 0.0;
        const std::vector<double> z = K.solve(g);
        const double gz = std::inner_product(g.begin(), g.end(), z.begin(), 0.0);
        res.gradient_norm = std::sqrt(std::abs(gz) / q);
        res.iterations = it;
        if (res.gradient_norm <= tol) break;
        if (it >= max_iterations)
            throw NonconvergenceError("minimize_lambda1: no convergence after " + std::to_string(it) +
                                      " iterations, gradient norm " + std::to_string(res.gradient_norm));

        // Armijo backtracking along d = -K^{-1} g; directional derivative is -gz
        double t = std::min(2.0 * step, 4.0 / p);
        double qt = q;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t i = 0; i < U.size(); ++i) trial[i] = U[i] - t * z[i];
            qt = rayleigh_quotient(mesh, e, trial);
            if (qt <= q - 1e-4 * t * gz) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            // no representable decrease left: the iterate is stationary to rounding
            break;
        }
        step = t;
        U.swap(trial);
        normalize(mesh, p, U);
        q = qt;
        res.history.push_back(q);
        // stalled: decreases over the last window are at rounding level
        const std::size_t h = res.history.size();
        if (h > kStallWindow && res.history[h - 1 - kStallWindow] - q <= kStallRel * q) break;
    }
    if (std::accumulate(U.begin(), U.end(), 0.0) < 0.0)
        for (double& x : U) x = -x;
    res.lambda1 = q;
    res.U = std::move(U);
    res.nodes = mesh.nodes;
    return res;
}

double nodal_length_bound(const Problem& prob, int k)
{
    const double ratio = (prob.a().lower() / prob.a().upper()) * (prob.rho().lower() / prob.rho().upper());
    return prob.length() * std::pow(ratio, 1.0 / prob.exponent().p()) / k;
}

Lambda2Result lambda2_equalize(const Problem& prob, double tol, const SolveOptions& opts)
{
    if (!(tol > 0.0)) throw std::invalid_argument("lambda2_equalize: tol must be positive");
    const double l = prob.length();
    const double p = prob.exponent().p();
    const double inner_tol = 0.1 * tol;

    struct Sides {
        double left;
        double right;
    };
    auto sides = [&](double c) -> Sides {
        auto left = std::async(std::launch::async,
                               [&] { return solve_k(prob.restricted(0.0, c), 1, inner_tol, opts).lambda; });
        const double right = solve_k(prob.restricted(c, l), 1, inner_tol, opts).lambda;
        return {left.get(), right};
    };

    // the crossing lies at distance >= nodal_length_bound from both ends
    const double delta = 0.5 * nodal_length_bound(prob, 2);
    double c_lo = delta;
    double c_hi = l - delta;
    const Sides s_lo = sides(c_lo);
    const Sides s_hi = sides(c_hi);
    const double f_lo = s_lo.left - s_lo.right;
    const double f_hi = s_hi.left - s_hi.right;
    if (!(f_lo > 0.0 && f_hi < 0.0))
        throw BracketError("lambda2_equalize: subinterval eigenvalues do not cross inside the nodal bracket");

    const double c_tol = 0.1 * tol * delta / p;
    auto done = [c_tol](double a, double b) { return std::abs(b - a) <= c_tol; };
    std::uintmax_t max_iter = 100;
    const auto root = boost::math::tools::toms748_solve(
        [&](double c) {
            const Sides s = sides(c);
            return s.left - s.right;
        },
        c_lo, c_hi, f_lo, f_hi, done, max_iter);
    if (!done(root.first, root.second))
        throw NonconvergenceError("lambda2_equalize: crossing point did not converge");

    Lambda2Result res;
    res.c_star = 0.5 * (root.first + root.second);
    const Sides s = sides(res.c_star);
    res.lambda_left = s.left;
    res.lambda_right = s.right;
    res.lambda2 = 0.5 * (s.left + s.right);
    return res;
}

WeylReport check_weyl(const Problem& prob, std::span<const Eigenpair> eigs, double rtol)
{
    WeylReport rep;
    const double lo_factor = prob.a().lower() / prob.rho().upper();
    const double hi_factor = prob.a().upper() / prob.rho().lower();
    for (const auto& ep : eigs) {
        WeylRow row;
        row.k = ep.k;
        row.lambda = ep.lambda;
        const double mu = unweighted_eigenvalue(prob.exponent(), prob.length(), ep.k);
        row.lower = lo_factor * mu;
        row.upper = hi_factor * mu;
        row.margin_lower = ep.lambda - row.lower;
        row.margin_upper = row.upper - ep.lambda;
        row.ok = ep.lambda >= row.lower * (1.0 - rtol) && ep.lambda <= row.upper * (1.0 + rtol);
        rep.ok = rep.ok && row.ok;
        rep.rows.push_back(row);
    }
    return rep;
}

NodalReport check_nodal_measure(const Problem& prob, const Eigenpair& eig, double rtol)
{
    NodalReport rep;
    rep.k = eig.k;
    rep.bound = nodal_length_bound(prob, eig.k);
    double prev = 0.0;
    for (double z : eig.zeros) {
        rep.lengths.push_back(z - prev);
        prev = z;
    }
    rep.lengths.push_back(prob.length() - prev);
    rep.min_length = *std::min_element(rep.lengths.begin(), rep.lengths.end());
    rep.ok = static_cast<int>(rep.lengths.size()) == eig.k && rep.min_length >= rep.bound - rtol * prob.length();
    return rep;
}

}  // namespace plap
