#include "plap/cli.hpp"

#include "plap/errors.hpp"
#include "plap/rayleigh.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <random>
#include <variant>

namespace plap::cli {

using json = nlohmann::json;

namespace {

struct CommandInfo {
    Subcommand command;
    std::string_view name;
};

constexpr CommandInfo kCommands[] = {
    {Subcommand::pfunc, "pfunc"},
    {Subcommand::solve, "solve"},
    {Subcommand::lambda1_fem, "lambda1-fem"},
    {Subcommand::lambda2_eq, "lambda2-eq"},
    {Subcommand::check_bounds, "check-bounds"},
    {Subcommand::picone, "picone"},
    {Subcommand::homogenize, "homogenize"},
    {Subcommand::sweep, "sweep"},
};

enum class Needs { nothing, problem, cell };

Needs needs(Subcommand c)
{
    switch (c) {
    case Subcommand::pfunc:
    case Subcommand::picone: return Needs::nothing;
    case Subcommand::homogenize:
    case Subcommand::sweep: return Needs::cell;
    default: return Needs::problem;
    }
}

std::vector<std::string> allowed_parameters(Subcommand c)
{
    switch (c) {
    case Subcommand::pfunc: return {"p", "samples"};
    case Subcommand::solve: return {"k", "tol", "propagator", "steps_per_unit"};
    case Subcommand::lambda1_fem: return {"mesh", "tol", "max_iterations"};
    case Subcommand::lambda2_eq: return {"tol", "propagator", "steps_per_unit"};
    case Subcommand::check_bounds: return {"k", "tol", "propagator", "steps_per_unit", "eigenvalues"};
    case Subcommand::picone: return {"p", "samples", "seed"};
    case Subcommand::homogenize: return {"k"};
    case Subcommand::sweep: return {"k", "tol", "propagator", "steps_per_unit", "n_list"};
    }
    return {};
}

Parameters default_parameters(Subcommand c)
{
    Parameters p;
    switch (c) {
    case Subcommand::pfunc: p.samples = 9; break;
    case Subcommand::lambda1_fem: p.tol = 1e-8; break;
    case Subcommand::check_bounds: p.k = {1, 2, 3, 4, 5}; break;
    case Subcommand::picone: p.samples = 10000; break;
    default: break;
    }
    return p;
}

// ---- schema helpers -------------------------------------------------------

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void require_object(const json& j, const std::string& path)
{
    if (!j.is_object()) throw ConfigError(path, "expected an object");
}

void check_keys(const json& j, const std::string& path, const std::vector<std::string>& allowed)
{
    for (const auto& item : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
            throw ConfigError(join(path, item.key()), "unknown field");
    }
}

const json& require(const json& j, const std::string& path, const std::string& key)
{
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError(join(path, key), "missing required field");
    return *it;
}

double as_number(const json& j, const std::string& path)
{
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    const double x = j.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path, "expected a finite number");
    return x;
}

double as_positive(const json& j, const std::string& path)
{
    const double x = as_number(j, path);
    if (!(x > 0.0)) throw ConfigError(path, "must be positive");
    return x;
}

long long as_integer(const json& j, const std::string& path)
{
    if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
    return j.get<long long>();
}

int as_int_at_least(const json& j, const std::string& path, int lo)
{
    const long long v = as_integer(j, path);
    if (v < lo || v > std::numeric_limits<int>::max())
        throw ConfigError(path, "must be an integer >= " + std::to_string(lo));
    return static_cast<int>(v);
}

std::vector<double> number_list(const json& j, const std::string& path)
{
    if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], index(path, i)));
    return out;
}

// ---- coefficients ----------------------------------------------------------

Coefficient parse_coefficient(const json& j, const std::string& path, double lo, double hi, bool allow_periodic)
{
    require_object(j, path);
    const json& kind_j = require(j, path, "kind");
    if (!kind_j.is_string()) throw ConfigError(join(path, "kind"), "expected a string");
    const std::string kind = kind_j.get<std::string>();

    if (kind == "constant") {
        check_keys(j, path, {"kind", "value"});
        const std::string vpath = join(path, "value");
        const double v = as_number(require(j, path, "value"), vpath);
        if (!(v > 0.0)) throw ConfigError(vpath, "coefficient values must be strictly positive");
        return Coefficient::constant(v, lo, hi);
    }
    if (kind == "periodic-cell") {
        if (!allow_periodic) throw ConfigError(join(path, "kind"), "periodic-cell is not allowed here");
        check_keys(j, path, {"kind", "period", "cell"});
        const double period = as_positive(require(j, path, "period"), join(path, "period"));
        const Coefficient cell = parse_coefficient(require(j, path, "cell"), join(path, "cell"), 0.0, 1.0, false);
        return Coefficient::periodic(cell, period);
    }
    if (kind != "piecewise-constant" && kind != "piecewise-linear")
        throw ConfigError(join(path, "kind"), "unknown coefficient kind '" + kind + "'");

    check_keys(j, path, {"kind", "breakpoints", "values"});
    const std::string bpath = join(path, "breakpoints");
    const std::string vpath = join(path, "values");
    const std::vector<double> bps = number_list(require(j, path, "breakpoints"), bpath);
    const std::vector<double> vals = number_list(require(j, path, "values"), vpath);
    const bool linear = kind == "piecewise-linear";
    if (bps.size() < 2) throw ConfigError(bpath, "need at least two breakpoints");
    if (vals.size() != (linear ? bps.size() : bps.size() - 1))
        throw ConfigError(vpath, linear ? "need one value per breakpoint" : "need one value per piece");
    for (std::size_t i = 1; i < bps.size(); ++i)
        if (!(bps[i] > bps[i - 1])) throw ConfigError(index(bpath, i), "breakpoints must be strictly increasing");
    for (std::size_t i = 0; i < vals.size(); ++i)
        if (!(vals[i] > 0.0)) throw ConfigError(index(vpath, i), "coefficient values must be strictly positive");
    const double slack = 1e-12 * (hi - lo);
    if (bps.front() > lo + slack || bps.back() < hi - slack)
        throw ConfigError(bpath, "breakpoints must span [" + render_number(lo) + ", " + render_number(hi) + "]");
    return linear ? Coefficient::piecewise_linear(bps, vals) : Coefficient::piecewise_constant(bps, vals);
}

json coefficient_json(const Coefficient& c)
{
    json j;
    j["kind"] = std::string(to_string(c.kind()));
    if (c.kind() == CoefficientKind::periodic_cell) {
        j["period"] = c.period();
        j["cell"] = coefficient_json(c.cell());
        return j;
    }
    j["breakpoints"] = c.breakpoints();
    j["values"] = c.values();
    return j;
}

struct Header {
    double length;
    Exponent p;
};

Header parse_header(const json& j, const std::string& path)
{
    require_object(j, path);
    check_keys(j, path, {"length", "p", "a", "rho"});
    const double length = as_positive(require(j, path, "length"), join(path, "length"));
    const std::string ppath = join(path, "p");
    const double p = as_number(require(j, path, "p"), ppath);
    if (!(p > 1.0)) throw ConfigError(ppath, "p must exceed 1");
    return {length, Exponent(p)};
}

Problem parse_problem(const json& j, const std::string& path)
{
    const Header h = parse_header(j, path);
    Coefficient a = parse_coefficient(require(j, path, "a"), join(path, "a"), 0.0, h.length, true);
    Coefficient rho = parse_coefficient(require(j, path, "rho"), join(path, "rho"), 0.0, h.length, true);
    return Problem(h.length, h.p, std::move(a), std::move(rho));
}

CellProblem parse_cell(const json& j, const std::string& path)
{
    const Header h = parse_header(j, path);
    Coefficient a = parse_coefficient(require(j, path, "a"), join(path, "a"), 0.0, 1.0, false);
    Coefficient rho = parse_coefficient(require(j, path, "rho"), join(path, "rho"), 0.0, 1.0, false);
    return CellProblem{h.length, h.p, std::move(a), std::move(rho)};
}

json problem_json(double length, const Exponent& p, const Coefficient& a, const Coefficient& rho)
{
    return json{{"length", length}, {"p", p.p()}, {"a", coefficient_json(a)}, {"rho", coefficient_json(rho)}};
}

// ---- parameters ------------------------------------------------------------

std::vector<int> k_list(const json& j, const std::string& path)
{
    std::vector<int> out;
    if (j.is_number()) {
        out.push_back(as_int_at_least(j, path, 1));
    } else if (j.is_array()) {
        if (j.empty()) throw ConfigError(path, "must not be empty");
        for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_int_at_least(j[i], index(path, i), 1));
    } else {
        throw ConfigError(path, "expected a positive integer or a list of them");
    }
    return out;
}

Parameters parse_parameters(const json* j, const std::string& path, Subcommand c)
{
    Parameters p = default_parameters(c);
    if (j != nullptr) {
        require_object(*j, path);
        check_keys(*j, path, allowed_parameters(c));
        for (const auto& item : j->items()) {
            const std::string& key = item.key();
            const json& v = item.value();
            const std::string at = join(path, key);
            if (key == "k") {
                p.k = k_list(v, at);
            } else if (key == "tol") {
                p.tol = as_positive(v, at);
            } else if (key == "propagator") {
                if (!v.is_string()) throw ConfigError(at, "expected a string");
                const std::string s = v.get<std::string>();
                if (s == "runge-kutta") {
                    p.propagator = Propagator::runge_kutta;
                } else if (s == "exact") {
                    p.propagator = Propagator::exact;
                } else {
                    throw ConfigError(at, "expected 'runge-kutta' or 'exact'");
                }
            } else if (key == "steps_per_unit") {
                p.steps_per_unit = as_int_at_least(v, at, 0);
            } else if (key == "mesh") {
                p.mesh = as_int_at_least(v, at, 16);
            } else if (key == "max_iterations") {
                p.max_iterations = as_int_at_least(v, at, 1);
            } else if (key == "p") {
                p.p = number_list(v, at);
                if (p.p.empty()) throw ConfigError(at, "must not be empty");
                for (std::size_t i = 0; i < p.p.size(); ++i)
                    if (!(p.p[i] > 1.0)) throw ConfigError(index(at, i), "p must exceed 1");
            } else if (key == "samples") {
                p.samples = as_int_at_least(v, at, c == Subcommand::pfunc ? 2 : 1);
            } else if (key == "seed") {
                if (!v.is_number_unsigned()) throw ConfigError(at, "expected a nonnegative integer");
                p.seed = v.get<std::uint64_t>();
            } else if (key == "eigenvalues") {
                p.eigenvalues = number_list(v, at);
                for (std::size_t i = 0; i < p.eigenvalues.size(); ++i)
                    if (!(p.eigenvalues[i] > 0.0)) throw ConfigError(index(at, i), "eigenvalues must be positive");
            } else if (key == "n_list") {
                if (!v.is_array() || v.empty()) throw ConfigError(at, "expected a nonempty list of positive integers");
                p.n_list.clear();
                for (std::size_t i = 0; i < v.size(); ++i) {
                    p.n_list.push_back(as_int_at_least(v[i], index(at, i), 1));
                    if (i > 0 && p.n_list[i] <= p.n_list[i - 1])
                        throw ConfigError(index(at, i), "n_list must be strictly increasing");
                }
            }
        }
    }
    const std::string at = path.empty() ? "parameters" : path;
    if ((c == Subcommand::pfunc || c == Subcommand::picone) && p.p.empty())
        throw ConfigError(join(at, "p"), "missing required field");
    if (c == Subcommand::sweep && p.n_list.empty()) throw ConfigError(join(at, "n_list"), "missing required field");
    if (c == Subcommand::check_bounds && !p.eigenvalues.empty() && p.eigenvalues.size() != p.k.size())
        throw ConfigError(join(at, "eigenvalues"), "need one eigenvalue per entry of k");
    return p;
}

json parameters_json(const Parameters& p, Subcommand c)
{
    json j = json::object();
    for (const std::string& key : allowed_parameters(c)) {
        if (key == "k") j[key] = p.k;
        if (key == "tol") j[key] = p.tol;
        if (key == "propagator") j[key] = p.propagator == Propagator::exact ? "exact" : "runge-kutta";
        if (key == "steps_per_unit") j[key] = p.steps_per_unit;
        if (key == "mesh") j[key] = p.mesh;
        if (key == "max_iterations") j[key] = p.max_iterations;
        if (key == "p") j[key] = p.p;
        if (key == "samples") j[key] = p.samples;
        if (key == "seed") j[key] = p.seed;
        if (key == "eigenvalues") j[key] = p.eigenvalues;
        if (key == "n_list") j[key] = p.n_list;
    }
    return j;
}

// ---- output tables ---------------------------------------------------------

using Cell = std::variant<double, long long, bool, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    json summary = json::object();

    void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

std::string cell_text(const Cell& c)
{
    if (const auto* d = std::get_if<double>(&c)) return render_number(*d);
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    if (const auto* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
    return std::get<std::string>(c);
}

// Numbers go through the 15-digit rendering so JSON and CSV carry the same values.
json rounded(double x)
{
    if (!std::isfinite(x)) return nullptr;
    return std::strtod(render_number(x).c_str(), nullptr);
}

json cell_json(const Cell& c)
{
    if (const auto* d = std::get_if<double>(&c)) return rounded(*d);
    if (const auto* i = std::get_if<long long>(&c)) return *i;
    if (const auto* b = std::get_if<bool>(&c)) return *b;
    return std::get<std::string>(c);
}

void write_table(const Table& t, Subcommand c, Format f, std::ostream& out)
{
    if (f == Format::csv) {
        for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
        out << '\n';
        for (const auto& row : t.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
            out << '\n';
        }
        return;
    }
    json rows = json::array();
    for (const auto& row : t.rows) {
        json r = json::object();
        for (std::size_t i = 0; i < row.size(); ++i) r[t.columns[i]] = cell_json(row[i]);
        rows.push_back(std::move(r));
    }
    json doc{{"command", std::string(to_string(c))}, {"columns", t.columns}, {"rows", std::move(rows)}};
    if (!t.summary.empty()) doc["summary"] = t.summary;
    out << doc.dump(2) << '\n';
}

// ---- subcommands -----------------------------------------------------------

SolveOptions solve_options(const Parameters& p)
{
    SolveOptions o;
    o.propagator = p.propagator;
    o.steps_per_unit = p.steps_per_unit;
    return o;
}

struct Outcome {
    Table table;
    int status = exit_ok;
};

Outcome run_pfunc(const Parameters& prm)
{
    Outcome o;
    o.table.columns = {"p", "pi_p", "x", "sin_p", "dsin_p"};
    for (double pv : prm.p) {
        const Exponent e(pv);
        const double pi = pi_p(e);
        for (int i = 0; i < prm.samples; ++i) {
            const double x = 2.0 * pi * i / (prm.samples - 1);
            const SinCos sc = sincos_p(e, x);
            o.table.add({pv, pi, x, sc.sin, sc.dsin});
        }
    }
    return o;
}

Outcome run_solve(const Problem& prob, const Parameters& prm)
{
    Outcome o;
    o.table.columns = {"k", "lambda", "zero_count", "zeros"};
    for (int k : prm.k) {
        const Eigenpair ep = solve_k(prob, k, prm.tol, solve_options(prm));
        std::string zeros;
        for (std::size_t i = 0; i < ep.zeros.size(); ++i) zeros += (i ? " " : "") + render_number(ep.zeros[i]);
        o.table.add({static_cast<long long>(k), ep.lambda, static_cast<long long>(ep.zeros.size()), zeros});
    }
    return o;
}

Outcome run_lambda1_fem(const Problem& prob, const Parameters& prm)
{
    Outcome o;
    o.table.columns = {"n", "lambda1_fem", "iterations", "gradient_norm", "lambda1_shooting", "rel_diff"};
    const Lambda1Result r = minimize_lambda1(prob, prm.mesh, prm.tol, prm.max_iterations);
    const double shoot = solve_k(prob, 1, 1e-10).lambda;
    o.table.add({static_cast<long long>(prm.mesh), r.lambda1, static_cast<long long>(r.iterations), r.gradient_norm,
                 shoot, (r.lambda1 - shoot) / shoot});
    return o;
}

Outcome run_lambda2_eq(const Problem& prob, const Parameters& prm)
{
    Outcome o;
    o.table.columns = {"c_star", "lambda2", "lambda_left", "lambda_right", "lambda2_shooting", "rel_diff"};
    const SolveOptions so = solve_options(prm);
    const Lambda2Result r = lambda2_equalize(prob, prm.tol, so);
    const double shoot = solve_k(prob, 2, prm.tol, so).lambda;
    o.table.add({r.c_star, r.lambda2, r.lambda_left, r.lambda_right, shoot, (r.lambda2 - shoot) / shoot});
    return o;
}

Outcome run_check_bounds(const Problem& prob, const Parameters& prm)
{
    Outcome o;
    o.table.columns = {"k",           "lambda",    "weyl_lower", "weyl_upper", "margin_lower", "margin_upper",
                       "weyl_ok",     "nodal_min", "nodal_bound", "nodal_ok"};
    const bool supplied = !prm.eigenvalues.empty();
    std::vector<Eigenpair> eigs;
    for (std::size_t i = 0; i < prm.k.size(); ++i) {
        if (supplied) {
            Eigenpair ep;
            ep.k = prm.k[i];
            ep.lambda = prm.eigenvalues[i];
            eigs.push_back(std::move(ep));
        } else {
            eigs.push_back(solve_k(prob, prm.k[i], prm.tol, solve_options(prm)));
        }
    }
    // solver output is accurate to tol; a bound met to that accuracy counts as met
    const double rtol = supplied ? 0.0 : 10.0 * prm.tol;
    const WeylReport weyl = check_weyl(prob, eigs, rtol);
    bool all_ok = weyl.ok;
    for (std::size_t i = 0; i < eigs.size(); ++i) {
        const WeylRow& w = weyl.rows[i];
        std::vector<Cell> row{static_cast<long long>(w.k), w.lambda, w.lower, w.upper, w.margin_lower, w.margin_upper,
                              w.ok};
        if (supplied) {
            row.insert(row.end(), {std::string(), nodal_length_bound(prob, w.k), std::string()});
        } else {
            const NodalReport nr = check_nodal_measure(prob, eigs[i], 1e-9);
            all_ok = all_ok && nr.ok;
            row.insert(row.end(), {nr.min_length, nr.bound, nr.ok});
        }
        o.table.add(std::move(row));
    }
    o.table.summary = {{"all_ok", all_ok}};
    if (!all_ok) o.status = exit_violation;
    return o;
}

Outcome run_picone(const Parameters& prm)
{
    Outcome o;
    o.table.columns = {"p", "samples", "max_scaled_gap", "min_L", "max_L_proportional", "ok"};
    bool all_ok = true;
    for (double pv : prm.p) {
        const Exponent e(pv);
        std::mt19937_64 rng(prm.seed);
        std::uniform_real_distribution<double> as(0.5, 4.0), us(0.0, 2.0), vs(0.05, 2.0), ds(-2.0, 2.0),
            cs(0.2, 3.0);
        double gap = 0.0;
        double min_l = std::numeric_limits<double>::infinity();
        double prop = 0.0;
        for (int i = 0; i < prm.samples; ++i) {
            const double a = as(rng);
            const double u = us(rng);
            const double du = ds(rng);
            const double v = vs(rng);
            const double dv = ds(rng);
            const PiconeTerms t = picone_LR(e, a, u, du, v, dv);
            gap = std::max(gap, std::abs(t.L - t.R) / (1.0 + std::abs(t.L)));
            min_l = std::min(min_l, t.L);
            const double c = cs(rng);
            const PiconeTerms tp = picone_LR(e, a, c * v, c * dv, v, dv);
            prop = std::max(prop, std::abs(tp.L) / (1.0 + big_phi(a, e, c * dv)));
        }
        const bool ok = gap <= 1e-12 && min_l >= -1e-12 && prop <= 1e-12;
        all_ok = all_ok && ok;
        o.table.add({pv, static_cast<long long>(prm.samples), gap, min_l, prop, ok});
    }
    o.table.summary = {{"all_ok", all_ok}};
    if (!all_ok) o.status = exit_violation;
    return o;
}

Outcome run_homogenize(const CellProblem& cell, const Parameters& prm)
{
    Outcome o;
    o.table.columns = {"k", "a_star", "rho_star", "lambda_star"};
    const double a_star = effective_coefficient(cell.a_cell, cell.exponent);
    const double rho_star = effective_weight(cell.rho_cell);
    for (int k : prm.k)
        o.table.add({static_cast<long long>(k), a_star, rho_star,
                     homogenized_eigenvalue(a_star, rho_star, cell.exponent, cell.length, k)});
    return o;
}

Outcome run_sweep(const CellProblem& cell, const Parameters& prm, std::ostream* log)
{
    Outcome o;
    o.table.columns = {"k", "n", "epsilon", "lambda", "lambda_star", "rel_error", "order"};
    json per_k = json::array();
    for (int k : prm.k) {
        const SweepResult s = sweep_epsilon(cell, k, prm.n_list, prm.tol, solve_options(prm));
        std::vector<double> order(s.ns.size(), std::numeric_limits<double>::quiet_NaN());
        json summary{{"k", k}, {"a_star", rounded(s.a_star)}, {"rho_star", rounded(s.rho_star)},
                     {"lambda_star", rounded(s.lambda_star)}, {"complete", s.complete()}};
        if (s.complete() && s.ns.size() >= 3) {
            const ConvergenceReport rep = convergence_report(s);
            for (std::size_t i = 0; i < rep.rows.size(); ++i) order[i] = rep.rows[i].order;
            summary["monotone"] = rep.monotone;
            summary["order_defined"] = rep.order_defined;
            summary["mean_order"] = rounded(rep.mean_order);
        }
        for (std::size_t i = 0; i < s.ns.size(); ++i) {
            o.table.add({static_cast<long long>(k), static_cast<long long>(s.ns[i]), s.epsilons[i], s.lambdas[i],
                         s.lambda_star, s.rel_errors[i], order[i]});
            if (!s.failures[i].empty()) {
                o.status = exit_nonconvergence;
                if (log) *log << "sweep: k = " << k << ", n = " << s.ns[i] << ": " << s.failures[i] << '\n';
            }
        }
        per_k.push_back(std::move(summary));
    }
    o.table.summary = {{"sweeps", std::move(per_k)}};
    return o;
}

}  // namespace

// ---- public ----------------------------------------------------------------

ConfigError::ConfigError(std::string field, const std::string& message)
    : std::runtime_error(field.empty() ? message : field + ": " + message), field_(std::move(field))
{
}

std::string_view to_string(Subcommand s)
{
    for (const auto& c : kCommands)
        if (c.command == s) return c.name;
    return "unknown";
}

std::optional<Subcommand> parse_subcommand(std::string_view name)
{
    for (const auto& c : kCommands)
        if (c.name == name) return c.command;
    return std::nullopt;
}

const std::vector<Subcommand>& all_subcommands()
{
    static const std::vector<Subcommand> all = [] {
        std::vector<Subcommand> v;
        for (const auto& c : kCommands) v.push_back(c.command);
        return v;
    }();
    return all;
}

std::string render_number(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return "0";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

RunConfig parse_config(std::string_view document, std::optional<Subcommand> command)
{
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& ex) {
        throw ConfigError("", std::string("malformed document: ") + ex.what());
    }
    require_object(doc, "");
    check_keys(doc, "", {"command", "problem", "cell", "parameters"});

    RunConfig cfg;
    std::optional<Subcommand> from_doc;
    if (auto it = doc.find("command"); it != doc.end()) {
        if (!it->is_string()) throw ConfigError("command", "expected a string");
        from_doc = parse_subcommand(it->get<std::string>());
        if (!from_doc) throw ConfigError("command", "unknown subcommand '" + it->get<std::string>() + "'");
    }
    if (from_doc && command && *from_doc != *command)
        throw ConfigError("command", "document is for '" + std::string(to_string(*from_doc)) +
                                         "' but '" + std::string(to_string(*command)) + "' was requested");
    if (!from_doc && !command) throw ConfigError("command", "missing required field");
    cfg.command = from_doc ? *from_doc : *command;

    const Needs need = needs(cfg.command);
    const bool has_problem = doc.contains("problem");
    const bool has_cell = doc.contains("cell");
    if (need != Needs::problem && has_problem) throw ConfigError("problem", "not used by this subcommand");
    if (need != Needs::cell && has_cell) throw ConfigError("cell", "not used by this subcommand");
    try {
        if (need == Needs::problem) cfg.problem = parse_problem(require(doc, "", "problem"), "problem");
        if (need == Needs::cell) cfg.cell = parse_cell(require(doc, "", "cell"), "cell");
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& ex) {
        throw ConfigError(need == Needs::cell ? "cell" : "problem", ex.what());
    }

    auto it = doc.find("parameters");
    cfg.params = parse_parameters(it == doc.end() ? nullptr : &*it, "parameters", cfg.command);
    return cfg;
}

std::string canonical_json(const RunConfig& config)
{
    json j;
    j["command"] = std::string(to_string(config.command));
    if (config.problem) {
        const Problem& p = *config.problem;
        j["problem"] = problem_json(p.length(), p.exponent(), p.a(), p.rho());
    }
    if (config.cell) {
        const CellProblem& c = *config.cell;
        j["cell"] = problem_json(c.length, c.exponent, c.a_cell, c.rho_cell);
    }
    j["parameters"] = parameters_json(config.params, config.command);
    return j.dump(2) + "\n";
}

int run(const RunConfig& config, Format format, std::ostream& out, std::ostream* log, bool verbose)
{
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        const Parameters& prm = config.params;
        switch (config.command) {
        case Subcommand::pfunc: o = run_pfunc(prm); break;
        case Subcommand::solve: o = run_solve(*config.problem, prm); break;
        case Subcommand::lambda1_fem: o = run_lambda1_fem(*config.problem, prm); break;
        case Subcommand::lambda2_eq: o = run_lambda2_eq(*config.problem, prm); break;
        case Subcommand::check_bounds: o = run_check_bounds(*config.problem, prm); break;
        case Subcommand::picone: o = run_picone(prm); break;
        case Subcommand::homogenize: o = run_homogenize(*config.cell, prm); break;
        case Subcommand::sweep: o = run_sweep(*config.cell, prm, log); break;
        }
    } catch (const NonconvergenceError& ex) {
        if (log) *log << "error: " << ex.what() << '\n';
        return exit_nonconvergence;
    } catch (const std::invalid_argument& ex) {
        if (log) *log << "error: " << ex.what() << '\n';
        return exit_config;
    } catch (const std::domain_error& ex) {
        if (log) *log << "error: " << ex.what() << '\n';
        return exit_config;
    } catch (const std::exception& ex) {
        if (log) *log << "error: " << ex.what() << '\n';
        return exit_internal;
    }
    write_table(o.table, config.command, format, out);
    if (log && o.status == exit_violation) *log << to_string(config.command) << ": bound check failed\n";
    if (log && verbose) {
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        *log << to_string(config.command) << ": " << o.table.rows.size() << " rows in " << secs << " s, exit "
             << o.status << '\n';
    }
    return o.status;
}

}  // namespace plap::cli
