#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "meanslab/function_spec.hpp"

namespace meanslab::cli {

/// Malformed command-line input (unknown family, bad grid syntax, missing
/// conditional flag).  Maps to exit code 2; domain/solve errors map to 3.
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Parsed `family[:param[,param]]` expression from the fixed catalog:
/// identity | power:p | log | exp[:c] | affine:a,b | const:c.
struct FunctionExpr {
    FunctionFamily family;
    std::vector<double> params;
};

FunctionExpr parse_function_expr(const std::string& text);

/// Realize an expression as a generator (const is rejected: weights only).
/// The domain hint (typically the --interval flag) restricts the natural
/// domain of the family.
GeneratorSpec generator_from_expr(const FunctionExpr& e,
                                  const std::optional<Interval>& domain_hint);

/// Realize an expression as a weight (log is rejected: not positive;
/// identity means the weight x on positive reals).
WeightSpec weight_from_expr(const FunctionExpr& e,
                            const std::optional<Interval>& domain_hint);

/// "a:b" with a < b; endpoints may be inf/-inf.
Interval parse_interval(const std::string& text);

/// "lo:hi:step" inclusive of both endpoints within 1e-12; lo > hi yields an
/// empty grid.
std::vector<double> parse_grid(const std::string& text);

/// Comma-separated reals.
std::vector<double> parse_points(const std::string& text);

/// Comma-separated positive arities, e.g. "2,3".
std::vector<int> parse_arities(const std::string& text);

/// Canonical function-expression string (round-trips through
/// parse_function_expr with identical semantics).
std::string canonical_expr(const FunctionExpr& e);

/// Run one CLI invocation. `args` excludes the program name.  Reports go to
/// `out` (or the --out file), diagnostics to `err`.  Exit codes: 0 success,
/// 1 cross-validation disagreement, 2 usage error, 3 domain error.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

} // namespace meanslab::cli
