#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>

namespace quickinv {

using cplx = std::complex<double>;

// A pointwise value together with an absolute uncertainty attached to it.
// Integrands built from cached (interpolated or nested) functions carry the
// uncertainty of their inputs so that it can be propagated through quadrature.
struct Sample {
  cplx value{};
  double err = 0.0;
};

using RealFn = std::function<double(double)>;
using ComplexFn = std::function<cplx(double)>;
using SampleFn = std::function<Sample(double)>;

struct QuadConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_subdiv = 50;
  int max_halfperiods = 200;
  int accel_order = 12;
  double trunc_safety = 30.0;

  // Throws InvalidConfig when a field is out of range.
  void validate() const;

  friend bool operator==(const QuadConfig&, const QuadConfig&) = default;
};

struct QuadResult {
  cplx value{};
  // Estimated absolute error, including uncertainty propagated from the
  // integrand's samples.
  double err_est = 0.0;
  std::int64_t n_evals = 0;
  bool converged = true;
  // The value is the antilimit of an accelerated partial-sum sequence rather
  // than a directly summed one.
  bool accel_engaged = false;
  // Part of err_est inherited from the integrand's sample uncertainties.
  // `converged` judges the remaining (discretisation) part only.
  double propagated_err = 0.0;
  // Estimate of the integral of |f| over the region actually sampled.
  double abs_integral = 0.0;

  Sample sample() const { return {value, err_est}; }
};

// err <= max(abs_tol, rel_tol * |value|)
bool within_tolerance(cplx value, double err, const QuadConfig& cfg);

enum class OscKind { Sin, Cos, ExpPlus, ExpMinus };

std::string_view to_string(OscKind kind);

// Adaptive 21-point Gauss-Kronrod quadrature on a finite interval (global
// bisection of the worst panel, at most cfg.max_subdiv bisections).
QuadResult integrate_interval(const SampleFn& f, double a, double b,
                              const QuadConfig& cfg);
QuadResult integrate_interval(const ComplexFn& f, double a, double b,
                              const QuadConfig& cfg);

// Integral of f over [0, inf). The finite part [0, T] starts at
// T = trunc_safety * decay_scale and is doubled while the newest panel is
// above tolerance; the remaining tail [T, inf) is integrated after the
// substitution x = T / u, which also covers algebraically decaying f.
QuadResult integrate_decaying(const SampleFn& f, double decay_scale,
                              const QuadConfig& cfg);
QuadResult integrate_decaying(const ComplexFn& f, double decay_scale,
                              const QuadConfig& cfg);

// Integral of g(t) * trig(omega t) over [0, inf) by partition at the zeros
// of the trigonometric factor and extrapolation of the partial sums.
// ExpPlus/ExpMinus use exp(+-i omega t) and the zeros of sin(omega t).
// Panels longer than a few envelope_scale are split geometrically so that
// low frequencies do not hide the envelope's structure inside one panel.
// Conditionally convergent inputs receive their antilimit.
QuadResult integrate_oscillatory(const SampleFn& g, OscKind kind, double omega,
                                 const QuadConfig& cfg,
                                 double envelope_scale = 1.0);
QuadResult integrate_oscillatory(const ComplexFn& g, OscKind kind, double omega,
                                 const QuadConfig& cfg,
                                 double envelope_scale = 1.0);

struct Acceleration {
  cplx limit{};
  double err_est = 0.0;
};

// Wynn epsilon algorithm over the last (2 * order + 1) partial sums.
// err_est is the difference between the two most recent entries of the
// highest even column that could be formed.
Acceleration accelerate_alternating(std::span<const cplx> partial_sums,
                                    int order);

// Name recorded in reports for the acceleration scheme above.
inline constexpr std::string_view kAccelerationMethod = "wynn-epsilon";

}  // namespace quickinv
