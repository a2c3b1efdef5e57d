#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "quickinv/chains.hpp"

namespace quickinv {

enum class InversionKind { QuickSinCos, Theorem4, GaverStehfest, Talbot };

std::string_view to_string(InversionKind kind);
// Accepts the tag names and the short CLI forms quick, theorem4, stehfest, talbot.
std::optional<InversionKind> parse_inversion_kind(std::string_view name);

struct InversionMethod {
  InversionKind kind = InversionKind::Talbot;
  double c = 1.0;  // QuickSinCos normalisation
  int n = 14;      // GaverStehfest terms
  int m = 32;      // Talbot nodes

  // Throws InvalidConfig (or OverflowRisk for n > 18).
  void validate() const;
};

struct InversionResult {
  InversionMethod method;
  std::vector<double> points;
  std::vector<cplx> estimates;
  // NaN for GaverStehfest and Talbot, which have no error estimate.
  std::vector<double> err_ests;
  std::vector<bool> converged;
  std::vector<bool> accel_engaged;
  // Empty string where the point succeeded.
  std::vector<std::string> errors;
  // S(x), or K+(x) for Theorem4.
  std::optional<std::vector<cplx>> reference;
  // |estimate - reference| / |reference|, or the absolute error where
  // |reference| <= kReferenceFloor.
  std::optional<std::vector<double>> rel_errors;
};

inline constexpr double kReferenceFloor = 1e-8;

using LaplaceImage = std::function<cplx(cplx)>;

// (1/c) int_0^inf sin(s t) g(t) dt with g(t) = int_0^inf cos(x t) (L T)(x) dx.
// L T and g are surrogate-cached on first use; safe to share across threads.
class QuickInverse {
 public:
  QuickInverse(SampleFn t, double c, QuadConfig cfg = {}, double scale = 1.0);

  QuadResult operator()(double s) const;
  // Inner stages, exposed for checks.
  Sample lt(double x) const;
  Sample g(double t) const;
  QuadResult g_direct(double t) const;

 private:
  struct State;
  std::shared_ptr<State> state_;
};

QuadResult quick_inverse(const SampleFn& t, double s, double c, const QuadConfig& cfg);

// (1/i) (F- L F+ K)(x) / (2 pi), to be compared with K+(x).
QuadResult theorem4_inverse(const Chains& chains, double x);
QuadResult theorem4_inverse(const TestFunction& s, double x, const QuadConfig& cfg);

// Stehfest weights V_1..V_n; n even in [4, 18].
std::vector<double> stehfest_weights(int n);
double gaver_stehfest(const std::function<double(double)>& t_image, double t, int n);

// Fixed Talbot contour of Abate and Valko with m nodes.
double talbot(const LaplaceImage& t_image, double t, int m);

// Per-point inversion of a corpus function. QuickSinCos and the baselines
// use the closed Laplace image where the corpus has one; QuickSinCos falls
// back to the numerical one. Point failures are recorded, not thrown.
InversionResult invert_grid(const InversionMethod& method, const TestFunction& s,
                            const std::vector<double>& grid, const QuadConfig& cfg);

}  // namespace quickinv
