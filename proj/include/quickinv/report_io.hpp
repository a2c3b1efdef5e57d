#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "quickinv/invert.hpp"
#include "quickinv/verify.hpp"

namespace quickinv {

inline constexpr std::string_view kReportSchema = "quickinv.identity_report/1";

// Shortest representation that reads back to the same double; "nan", "inf"
// and "-inf" for non-finite values.
std::string format_number(double x);

// Complex arrays are stored as [re, im] pairs, non-finite numbers as null.
// `config` is embedded verbatim as the effective run configuration.
nlohmann::json report_to_json(const IdentityReport& r, const nlohmann::json& config = nullptr);
// Throws InvalidConfig on a schema mismatch or malformed document.
IdentityReport report_from_json(const nlohmann::json& j);
// Two-space indented, keys sorted, trailing newline.
std::string dump_json(const nlohmann::json& j);

// CSV writers: '.' decimals, ',' separators, '\n' line ends, header first.
std::string csv_field(std::string_view s);
void write_summary_csv(std::ostream& os, const std::vector<IdentityReport>& reports);
// s, lhs_re, lhs_im, rhs_re, rhs_im, resid
void write_plot_csv(std::ostream& os, const IdentityReport& r);
// s, estimate_re, estimate_im, err_est, reference, rel_error, method, function,
// accel_engaged, then reference_im and error.
void write_inversion_csv(std::ostream& os, const InversionResult& r, std::string_view function_id);

}  // namespace quickinv
