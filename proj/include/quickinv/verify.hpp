#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "quickinv/chains.hpp"
#include "quickinv/invert.hpp"

namespace quickinv {

enum class IdentityId {
  Theorem1,
  Lemma1,
  Theorem2_1,
  Theorem2_2,
  Theorem3_1,
  Theorem3_2,
  Theorem4,
  Theorem5_1,
  QuickInverse,
  Prop1,
  Prop2,
  Prop3,
  Decay22,
  AdditionalTail,
};

const std::vector<IdentityId>& all_identities();
std::string_view to_string(IdentityId id);
// Accepts the tag names case-insensitively.
std::optional<IdentityId> parse_identity(std::string_view name);

enum class Verdict { Pass, Fail, Inconclusive };

std::string_view to_string(Verdict v);
std::optional<Verdict> parse_verdict(std::string_view name);

// A named per-point column recorded alongside the residuals.
struct ContextColumn {
  std::string name;
  std::vector<double> values;

  friend bool operator==(const ContextColumn&, const ContextColumn&) = default;
};

struct IdentityReport {
  IdentityId identity = IdentityId::Theorem1;
  std::string function_id;
  std::vector<double> grid;
  std::vector<cplx> lhs, rhs;
  std::vector<double> abs_resid;
  // abs_resid / max(|rhs|, floor).
  std::vector<double> rel_resid;
  // Summed err_est of both sides.
  std::vector<double> quad_error_budget;
  // False where a stage failed to converge or threw.
  std::vector<bool> converged;
  // The constant the claim states; rhs already includes it.
  cplx paper_constant{1.0, 0.0};
  // Least-squares k in lhs = k * (rhs / paper_constant). Absent when the
  // base is identically zero.
  std::optional<cplx> fitted_constant;
  // ||lhs - k base|| / ||lhs||.
  double fit_residual = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  double tol = 1e-6;
  double floor = 1e-8;
  std::vector<ContextColumn> context;
  std::vector<std::string> errors;

  const ContextColumn* find_context(std::string_view name) const;
};

// Applies the verdict rule of the report's identity to its stored arrays.
Verdict recompute_verdict(const IdentityReport& r);

struct VerifyConfig {
  QuadConfig quad{};
  std::vector<double> grid{0.5, 1.0, 2.0, 5.0};
  double tol = 1e-6;
  double floor = 1e-8;
  std::vector<double> prop1_eps{1e-1, 1e-2, 1e-3};
  double prop1_tol = 1e-3;
  std::vector<double> prop2_radii{10.0, 40.0, 160.0};
  std::vector<double> tail_cutoffs{10.0, 20.0, 40.0};
  double tail_x = 1.0;
  double tail_tol = 1e-10;
  // Decay (2.2) is sampled at integer t in [10, 100].
  int decay_points = 91;

  // Throws InvalidConfig.
  void validate() const;
};

// The checks of one function share one Operators/Chains pair so that
// cached stages are built once.
class Verifier {
 public:
  Verifier(const TestFunction& s, VerifyConfig cfg);

  IdentityReport check(IdentityId id) const;

  IdentityReport check_theorem1() const;
  IdentityReport check_lemma1() const;
  IdentityReport check_theorem2(int part) const;
  IdentityReport check_theorem3(int part) const;
  IdentityReport check_theorem4() const;
  IdentityReport check_theorem5_1() const;
  IdentityReport check_quick_inverse() const;
  IdentityReport check_prop1() const;
  IdentityReport check_prop2() const;
  IdentityReport check_prop3() const;
  IdentityReport check_decay22() const;
  IdentityReport check_additional_tail() const;

  const Chains& chains() const { return chains_; }
  const Operators& ops() const { return chains_.ops(); }

  // One identity as independent point evaluations plus assembly.
  struct Plan;
  Plan plan(IdentityId id) const;

 private:
  TestFunction s_;
  VerifyConfig cfg_;
  Chains chains_;
  QuickInverse quick_;
};

// Runs every selected identity on every selected function, fanning the
// (identity, function, point) evaluations out over `workers` threads.
// Reports are ordered by identity tag, then function id; the output does
// not depend on the worker count.
std::vector<IdentityReport> run_suite(const std::vector<IdentityId>& identities,
                                      const std::vector<TestFunction>& functions,
                                      const VerifyConfig& cfg, int workers = 1);

}  // namespace quickinv
