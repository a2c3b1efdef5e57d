#include "quickinv/report_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "quickinv/errors.hpp"

namespace quickinv {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json pair(cplx z) { return json::array({number(z.real()), number(z.imag())}); }

json numbers(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

json pairs(const std::vector<cplx>& v) {
  json a = json::array();
  for (cplx z : v) a.push_back(pair(z));
  return a;
}

double read_number(const json& j) {
  if (j.is_null()) return kNaN;
  if (!j.is_number()) throw InvalidConfig("report: expected a number");
  return j.get<double>();
}

cplx read_pair(const json& j) {
  if (!j.is_array() || j.size() != 2) throw InvalidConfig("report: expected an [re, im] pair");
  return {read_number(j[0]), read_number(j[1])};
}

std::vector<double> read_numbers(const json& j) {
  if (!j.is_array()) throw InvalidConfig("report: expected an array");
  std::vector<double> v;
  for (const json& x : j) v.push_back(read_number(x));
  return v;
}

std::vector<cplx> read_pairs(const json& j) {
  if (!j.is_array()) throw InvalidConfig("report: expected an array");
  std::vector<cplx> v;
  for (const json& x : j) v.push_back(read_pair(x));
  return v;
}

const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw InvalidConfig(std::string("report: missing field ") + key);
  return *it;
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

json report_to_json(const IdentityReport& r, const json& config) {
  json j;
  j["schema_version"] = kReportSchema;
  j["identity"] = to_string(r.identity);
  j["function_id"] = r.function_id;
  j["grid"] = numbers(r.grid);
  j["lhs"] = pairs(r.lhs);
  j["rhs"] = pairs(r.rhs);
  j["abs_resid"] = numbers(r.abs_resid);
  j["rel_resid"] = numbers(r.rel_resid);
  j["quad_error_budget"] = numbers(r.quad_error_budget);
  j["converged"] = json::array();
  for (bool c : r.converged) j["converged"].push_back(c);
  j["paper_constant"] = pair(r.paper_constant);
  j["fitted_constant"] = r.fitted_constant ? pair(*r.fitted_constant) : json(nullptr);
  j["fit_residual"] = number(r.fit_residual);
  j["verdict"] = to_string(r.verdict);
  j["tol"] = number(r.tol);
  j["floor"] = number(r.floor);
  j["context"] = json::array();
  for (const ContextColumn& c : r.context) j["context"].push_back({{"name", c.name}, {"values", numbers(c.values)}});
  j["errors"] = r.errors;
  j["acceleration"] = kAccelerationMethod;
  j["config"] = config;
  return j;
}

IdentityReport report_from_json(const json& j) {
  if (!j.is_object()) throw InvalidConfig("report: expected an object");
  if (field(j, "schema_version") != kReportSchema) throw InvalidConfig("report: unknown schema version");
  try {
    IdentityReport r;
    const auto id = parse_identity(field(j, "identity").get<std::string>());
    if (!id) throw InvalidConfig("report: unknown identity");
    r.identity = *id;
    r.function_id = field(j, "function_id").get<std::string>();
    r.grid = read_numbers(field(j, "grid"));
    r.lhs = read_pairs(field(j, "lhs"));
    r.rhs = read_pairs(field(j, "rhs"));
    r.abs_resid = read_numbers(field(j, "abs_resid"));
    r.rel_resid = read_numbers(field(j, "rel_resid"));
    r.quad_error_budget = read_numbers(field(j, "quad_error_budget"));
    for (const json& c : field(j, "converged")) r.converged.push_back(c.get<bool>());
    r.paper_constant = read_pair(field(j, "paper_constant"));
    if (const json& f = field(j, "fitted_constant"); !f.is_null()) r.fitted_constant = read_pair(f);
    r.fit_residual = read_number(field(j, "fit_residual"));
    const auto v = parse_verdict(field(j, "verdict").get<std::string>());
    if (!v) throw InvalidConfig("report: unknown verdict");
    r.verdict = *v;
    r.tol = read_number(field(j, "tol"));
    r.floor = read_number(field(j, "floor"));
    for (const json& c : field(j, "context")) {
      r.context.push_back({field(c, "name").get<std::string>(), read_numbers(field(c, "values"))});
    }
    r.errors = field(j, "errors").get<std::vector<std::string>>();
    const std::size_t n = r.grid.size();
    for (std::size_t m : {r.lhs.size(), r.rhs.size(), r.abs_resid.size(), r.rel_resid.size(),
                          r.quad_error_budget.size(), r.converged.size()}) {
      if (m != n) throw InvalidConfig("report: array lengths differ");
    }
    return r;
  } catch (const json::exception& e) {
    throw InvalidConfig(std::string("report: ") + e.what());
  }
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_summary_csv(std::ostream& os, const std::vector<IdentityReport>& reports) {
  os << "identity,function,verdict,n_points,max_rel_resid,max_abs_resid,max_budget,fitted_re,"
        "fitted_im,fit_residual,tol,floor\n";
  for (const IdentityReport& r : reports) {
    auto maxof = [](const std::vector<double>& v) {
      double m = 0.0;
      for (double x : v) m = std::isnan(x) ? x : std::max(m, x);
      return m;
    };
    const cplx k = r.fitted_constant.value_or(cplx(kNaN, kNaN));
    os << to_string(r.identity) << ',' << csv_field(r.function_id) << ',' << to_string(r.verdict) << ','
       << r.grid.size() << ',' << format_number(maxof(r.rel_resid)) << ','
       << format_number(maxof(r.abs_resid)) << ',' << format_number(maxof(r.quad_error_budget)) << ','
       << format_number(k.real()) << ',' << format_number(k.imag()) << ','
       << format_number(r.fit_residual) << ',' << format_number(r.tol) << ',' << format_number(r.floor)
       << '\n';
  }
}

void write_plot_csv(std::ostream& os, const IdentityReport& r) {
  os << "s,lhs_re,lhs_im,rhs_re,rhs_im,resid\n";
  for (std::size_t i = 0; i < r.grid.size(); ++i) {
    os << format_number(r.grid[i]) << ',' << format_number(r.lhs[i].real()) << ','
       << format_number(r.lhs[i].imag()) << ',' << format_number(r.rhs[i].real()) << ','
       << format_number(r.rhs[i].imag()) << ',' << format_number(r.abs_resid[i]) << '\n';
  }
}

void write_inversion_csv(std::ostream& os, const InversionResult& r, std::string_view function_id) {
  os << "s,estimate_re,estimate_im,err_est,reference,rel_error,method,function,accel_engaged,"
        "reference_im,error\n";
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    const cplx ref = r.reference ? (*r.reference)[i] : cplx(kNaN, kNaN);
    const double rel = r.rel_errors ? (*r.rel_errors)[i] : kNaN;
    os << format_number(r.points[i]) << ',' << format_number(r.estimates[i].real()) << ','
       << format_number(r.estimates[i].imag()) << ',' << format_number(r.err_ests[i]) << ','
       << format_number(ref.real()) << ',' << format_number(rel) << ',' << to_string(r.method.kind) << ','
       << csv_field(function_id) << ',' << (r.accel_engaged[i] ? 1 : 0) << ','
       << format_number(ref.imag()) << ',' << csv_field(r.errors[i]) << '\n';
  }
}

}  // namespace quickinv
