#pragma once

#include <memory>
#include <string_view>

#include "quickinv/corpus.hpp"
#include "quickinv/quad.hpp"
#include "quickinv/surrogate.hpp"

namespace quickinv {

enum class TransformKind {
  Laplace,
  DoubleLaplace,
  FourierCos,
  FourierSin,
  FourierFullPlus,
  FourierFullMinus,
  HalfFourierPlus,
  HalfFourierMinus,
  KPlusDirect,
  KPlusAlt,
  KMinusDirect,
  KMinusAlt,
};

std::string_view to_string(TransformKind kind);

enum class Sign { Plus, Minus };

inline double sign_value(Sign s) { return s == Sign::Plus ? 1.0 : -1.0; }
inline Sign flip(Sign s) { return s == Sign::Plus ? Sign::Minus : Sign::Plus; }

enum class Representation { Direct, Alt };

// Representation of K(p) with the faster-decaying integrand at p:
// direct decays like e^{-Re p t}, alt(+) like e^{Im p t}, alt(-) like
// e^{-Im p t}. Ties go to direct. Throws DomainError if neither converges.
Representation choose_representation(cplx p, Sign sign);

// int_0^inf e^{-s t} f(t) dt for s >= 0.
QuadResult laplace_of(const SampleFn& f, double s, const QuadConfig& cfg, double scale = 1.0);

// int_{-inf}^{inf} e^{+-i u x} Z(x) dx for Z supported on [0, inf).
QuadResult fourier_full(const SampleFn& z, double u, Sign sign, const QuadConfig& cfg,
                        double scale = 1.0);

// int_{-inf}^{inf} e^{+-i u x} G(x) dx with G(x) = g_pos(x) and
// G(-x) = g_neg(x) for x >= 0.
QuadResult fourier_line(const SampleFn& g_pos, const SampleFn& g_neg, double u, Sign sign,
                        const QuadConfig& cfg, double scale = 1.0);

// The transforms of one test function under one configuration. Inner
// functions of nested integrals are built once as surrogates on first use
// and shared by all copies; every member is safe to call concurrently.
class Operators {
 public:
  explicit Operators(TestFunction s, QuadConfig cfg = {});

  const TestFunction& function() const;
  const QuadConfig& config() const;
  double scale() const;

  // Each transform also has an overload taking an explicit configuration.

  // (L S)(s), s >= 0.
  QuadResult laplace(double s) const;
  QuadResult laplace(double s, const QuadConfig& cfg) const;
  // int_0^inf S(v) / (s + v) dv, s > 0.
  QuadResult double_laplace(double s) const;
  QuadResult double_laplace(double s, const QuadConfig& cfg) const;
  // L applied to the cached L S.
  QuadResult double_laplace_composed(double s) const;
  QuadResult fourier_cos(double t) const;
  QuadResult fourier_cos(double t, const QuadConfig& cfg) const;
  QuadResult fourier_sin(double t) const;
  QuadResult fourier_sin(double t, const QuadConfig& cfg) const;
  // Z1+-(t) = int_0^inf e^{+-i v t} S(v) dv, any real t.
  QuadResult half_fourier(double t, Sign sign) const;
  QuadResult half_fourier(double t, Sign sign, const QuadConfig& cfg) const;

  // K+-(p) = int_0^inf e^{-p t} Z1+-(t) dt, Re p >= 0.
  QuadResult k_direct(cplx p, Sign sign) const;
  QuadResult k_direct(cplx p, Sign sign, const QuadConfig& cfg) const;
  // k+-(p) = (-+1/i) int_0^inf e^{-+i p t} (L S)(t) dt.
  QuadResult k_alt(cplx p, Sign sign) const;
  QuadResult k_alt(cplx p, Sign sign, const QuadConfig& cfg) const;
  // K+-(p) through choose_representation.
  QuadResult k(cplx p, Sign sign) const;
  // K(-s) = -K-(s), s > 0.
  QuadResult k_on_negative_axis(double s) const;

  // Cached evaluators.
  Sample z(double t, Sign sign) const;         // Z1+-(t), t >= 0
  Sample ls(double t) const;                   // (L S)(t), t >= 0
  Sample lls(double x) const;                  // L L S through the cached L S, x >= 0
  Sample k_plus_real(double x, Sign sign) const;  // K+-(x), x >= 0
  Sample k_line(double x) const;               // K(x) on the real line
  Sample k_plus_imag(double y) const;          // K+(i y) for real y
  Sample fcos(double t) const;                 // (Fc S)(t), t >= 0

  // Total evaluations of S made through this object.
  std::int64_t s_evaluations() const;

  SurrogateOptions surrogate_options(int weight_power) const;
  // The configuration with abs_tol divided by the surrogate weight
  // (1 + x / L)^weight_power, so that weighted samples keep relative accuracy.
  QuadConfig config_at(double x, int weight_power) const;

 private:
  struct State;
  std::shared_ptr<State> state_;
};

// Free-function forms. Each call builds the cached surrogates afresh; use
// Operators directly for repeated evaluation.
QuadResult laplace(const TestFunction& s, double x, const QuadConfig& cfg);
QuadResult double_laplace(const TestFunction& s, double x, const QuadConfig& cfg);
QuadResult fourier_cos(const TestFunction& s, double t, const QuadConfig& cfg);
QuadResult fourier_sin(const TestFunction& s, double t, const QuadConfig& cfg);
QuadResult half_fourier(const TestFunction& s, double t, Sign sign, const QuadConfig& cfg);
QuadResult k_direct(const TestFunction& s, cplx p, Sign sign, const QuadConfig& cfg);
QuadResult k_alt(const TestFunction& s, cplx p, Sign sign, const QuadConfig& cfg);
QuadResult k_on_negative_axis(const TestFunction& s, double x, const QuadConfig& cfg);

}  // namespace quickinv
