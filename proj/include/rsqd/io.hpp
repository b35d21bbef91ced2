#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"

#include "rsqd/operators.hpp"
#include "rsqd/oracle.hpp"

namespace rsqd {

/// Instance file:
///   { "dim": n, "h0": [n reals], "v_re": [[n x n reals]], "v_im": optional,
///     "model": [1-based indices], "lambda": real (default 1) }
/// Throws ValidationError on any schema or instance violation.
ProblemInstance instance_from_json(const nlohmann::json& j);
nlohmann::json instance_to_json(const ProblemInstance& inst);
ProblemInstance load_instance(const std::string& path);

/// Shortest decimal form that round-trips to the same double.
std::string format_number(double x);

/// CSV with header lambda,order_or_iter,err_vs_exact,lindgren_residual;
/// with_method prepends a method column.
void write_report_csv(std::ostream& out, const ConvergenceReport& report, bool header = true, bool with_method = false);

/// {"method": ..., "rows": n, "fits": [{"order_or_iter", "slope", "intercept", "fit_residual", "points"}]}
nlohmann::json report_summary(const ConvergenceReport& report);

} // namespace rsqd
