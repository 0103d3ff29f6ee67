#pragma once

// Batch front end: one JSON config document per run, dispatched to a
// subcommand, with deterministic CSV or JSON output.

#include "plap/homog.hpp"
#include "plap/problem.hpp"
#include "plap/shoot.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace plap::cli {

enum class Subcommand { pfunc, solve, lambda1_fem, lambda2_eq, check_bounds, picone, homogenize, sweep };

std::string_view to_string(Subcommand s);
std::optional<Subcommand> parse_subcommand(std::string_view name);
const std::vector<Subcommand>& all_subcommands();

enum class Format { csv, json };

enum ExitCode : int {
    exit_ok = 0,
    exit_internal = 1,
    exit_config = 2,
    exit_nonconvergence = 3,
    exit_violation = 4,
};

/// Schema or invariant violation in a config document. field() is the dotted
/// path of the offending entry, e.g. "problem.a.values[1]".
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message);
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct Parameters {
    std::vector<int> k{1};
    double tol = 1e-10;
    Propagator propagator = Propagator::runge_kutta;
    int steps_per_unit = 0;
    int mesh = 400;               // lambda1-fem
    int max_iterations = 5000;    // lambda1-fem
    std::vector<double> p;        // pfunc, picone
    int samples = 0;              // pfunc, picone
    std::uint64_t seed = 1;       // picone
    std::vector<double> eigenvalues;  // check-bounds: check these instead of solving
    std::vector<int> n_list;      // sweep
};

struct RunConfig {
    Subcommand command = Subcommand::solve;
    std::optional<Problem> problem;  // solve, lambda1-fem, lambda2-eq, check-bounds
    std::optional<CellProblem> cell;  // homogenize, sweep
    Parameters params;
};

/// Parses and validates a config document. The subcommand comes from the
/// document's "command" field or from `command`; if both are given they must agree.
RunConfig parse_config(std::string_view document, std::optional<Subcommand> command = std::nullopt);

/// Canonical form of a config: every field explicit, keys sorted.
std::string canonical_json(const RunConfig& config);

/// Fixed 15-significant-digit rendering used for all data output.
std::string render_number(double x);

/// Runs the config and writes its table to `out`. Errors go to `log` when it
/// is non-null, plus a timing line when verbose. Returns one of the ExitCode
/// values; a table is still written on bound violations and partial sweeps.
int run(const RunConfig& config, Format format, std::ostream& out, std::ostream* log = nullptr,
        bool verbose = false);

}  // namespace plap::cli
