#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "quickinv/quad.hpp"

namespace quickinv {

struct TestFunction {
  std::string id;
  // Human-readable formula for listings.
  std::string formula;
  RealFn s_eval;
  bool satisfies_11 = false;
  bool s_at_0_is_0 = false;
  bool zero_mean = false;
  std::optional<RealFn> closed_laplace;
  std::optional<RealFn> closed_fcos;
  std::optional<RealFn> closed_fsin;
  // Z1+(t) = int_0^inf e^{i v t} S(v) dv.
  std::optional<ComplexFn> closed_halffourier;
  // (L S)(p) continued to complex p with Re p >= 0; Z1+(t) = (L S)(-i t).
  std::optional<std::function<cplx(cplx)>> closed_laplace_complex;
  double decay_scale = 1.0;
};

// f1, f2, f3, f5 in that order. Each entry passed its registration self-test.
const std::vector<TestFunction>& builtin_corpus();

// S = 0 with every closed form; used for trivial checks.
const TestFunction& zero_function();

// Looks up a builtin entry or "zero". Returns nullptr when absent.
const TestFunction* find_function(std::string_view id);

// a * f + b * g, with closed forms wherever both operands have them.
TestFunction combine(double a, const TestFunction& f, double b, const TestFunction& g,
                     std::string id);

// Registration self-test: the flag invariants and agreement of each closed
// form with a numerical transform at five probes (1e-8 relative, unit floor).
// Throws RegistrationError.
void self_test(const TestFunction& f, const QuadConfig& cfg = {});

}  // namespace quickinv
