#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "quickinv/errors.hpp"
#include "quickinv/report_io.hpp"

using namespace quickinv;

namespace {

IdentityReport sample_report() {
  IdentityReport r;
  r.identity = IdentityId::Theorem2_1;
  r.function_id = "f1";
  r.grid = {0.5, 1.0};
  r.lhs = {cplx(0.1, 1.0 / 3.0), cplx(std::numeric_limits<double>::quiet_NaN(), 2.0)};
  r.rhs = {cplx(0.1, 0.3), cplx(1e-300, -7.25)};
  r.abs_resid = {0.1 / 3.0, std::numeric_limits<double>::quiet_NaN()};
  r.rel_resid = {0.11, std::numeric_limits<double>::infinity()};
  r.quad_error_budget = {1e-13, 2e-12};
  r.converged = {true, false};
  r.paper_constant = cplx(2.0 * 3.141592653589793, 0.0);
  r.fitted_constant = cplx(6.28, -1e-9);
  r.fit_residual = 0.125;
  r.verdict = Verdict::Inconclusive;
  r.context = {{"sign", {1.0, -1.0}}};
  r.errors = {"", "quad: \"no\" convergence, at x"};
  return r;
}

bool same(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

}  // namespace

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_EQ(format_number(1e-300), "1e-300");
  EXPECT_EQ(format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
  for (double x : {0.1, 1.0 / 3.0, 6.283185307179586, -2.5e-17, 123456789.0}) {
    EXPECT_EQ(std::stod(format_number(x)), x);
  }
}

TEST(ReportJson, RoundTripPreservesEveryField) {
  const IdentityReport r = sample_report();
  const nlohmann::json config = {{"tol", 1e-6}};
  const nlohmann::json j = report_to_json(r, config);
  EXPECT_EQ(j["schema_version"], kReportSchema);
  EXPECT_EQ(j["acceleration"], "wynn-epsilon");
  EXPECT_EQ(j["config"], config);
  EXPECT_TRUE(j["lhs"][1][0].is_null());

  const IdentityReport b = report_from_json(nlohmann::json::parse(dump_json(j)));
  EXPECT_EQ(b.identity, r.identity);
  EXPECT_EQ(b.function_id, r.function_id);
  EXPECT_EQ(b.grid, r.grid);
  for (std::size_t i = 0; i < r.grid.size(); ++i) {
    EXPECT_TRUE(same(b.lhs[i].real(), r.lhs[i].real()));
    EXPECT_EQ(b.lhs[i].imag(), r.lhs[i].imag());
    EXPECT_EQ(b.rhs[i], r.rhs[i]);
    EXPECT_TRUE(same(b.abs_resid[i], r.abs_resid[i]));
    EXPECT_EQ(b.quad_error_budget[i], r.quad_error_budget[i]);
  }
  // Infinities are not representable in JSON and come back as NaN.
  EXPECT_EQ(b.rel_resid[0], 0.11);
  EXPECT_TRUE(std::isnan(b.rel_resid[1]));
  EXPECT_EQ(b.converged, r.converged);
  EXPECT_EQ(b.fitted_constant, r.fitted_constant);
  EXPECT_EQ(b.fit_residual, r.fit_residual);
  EXPECT_EQ(b.verdict, r.verdict);
  ASSERT_EQ(b.context.size(), 1u);
  EXPECT_EQ(b.context[0].values, r.context[0].values);
  EXPECT_EQ(b.errors, r.errors);
  // Re-serialising is byte-identical.
  EXPECT_EQ(dump_json(report_to_json(b, config)), dump_json(j));
}

TEST(ReportJson, AbsentFittedConstantIsNull) {
  IdentityReport r = sample_report();
  r.fitted_constant.reset();
  const nlohmann::json j = report_to_json(r);
  EXPECT_TRUE(j["fitted_constant"].is_null());
  EXPECT_FALSE(report_from_json(j).fitted_constant.has_value());
}

TEST(ReportJson, RejectsMalformedDocuments) {
  nlohmann::json j = report_to_json(sample_report());
  nlohmann::json bad = j;
  bad["schema_version"] = "quickinv.identity_report/0";
  EXPECT_THROW(report_from_json(bad), InvalidConfig);
  bad = j;
  bad.erase("grid");
  EXPECT_THROW(report_from_json(bad), InvalidConfig);
  bad = j;
  bad["lhs"].push_back({1.0, 0.0});
  EXPECT_THROW(report_from_json(bad), InvalidConfig);
  bad = j;
  bad["verdict"] = "MAYBE";
  EXPECT_THROW(report_from_json(bad), InvalidConfig);
  bad = j;
  bad["grid"][0] = "x";
  EXPECT_THROW(report_from_json(bad), InvalidConfig);
  EXPECT_THROW(report_from_json(nlohmann::json::array()), InvalidConfig);
}

TEST(Csv, FieldQuoting) {
  EXPECT_EQ(csv_field("f1"), "f1");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
}

TEST(Csv, SummaryAndPlotLayout) {
  const IdentityReport r = sample_report();
  std::ostringstream s;
  write_summary_csv(s, {r});
  std::string header;
  std::string row;
  std::istringstream in(s.str());
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header,
            "identity,function,verdict,n_points,max_rel_resid,max_abs_resid,max_budget,fitted_re,fitted_im,"
            "fit_residual,tol,floor");
  EXPECT_EQ(row.rfind("Theorem2_1,f1,INCONCLUSIVE,2,", 0), 0u) << row;
  EXPECT_NE(row.find(",1e-06,1e-08"), std::string::npos) << row;

  std::ostringstream p;
  write_plot_csv(p, r);
  EXPECT_EQ(p.str(),
            "s,lhs_re,lhs_im,rhs_re,rhs_im,resid\n"
            "0.5,0.1,0.3333333333333333,0.1,0.3,0.03333333333333333\n"
            "1,nan,2,1e-300,-7.25,nan\n");
}

TEST(Csv, EmptySummaryIsHeaderOnly) {
  std::ostringstream s;
  write_summary_csv(s, {});
  const std::string text = s.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
}
