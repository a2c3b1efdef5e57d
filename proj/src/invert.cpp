#include "quickinv/invert.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>

#include "quickinv/errors.hpp"

namespace quickinv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr cplx kI{0.0, 1.0};
// The fixed-order baselines carry no error estimate.
constexpr double kNotEstimated = std::numeric_limits<double>::quiet_NaN();

QuadResult scaled(QuadResult r, cplx factor) {
  const double m = std::abs(factor);
  r.value *= factor;
  r.err_est *= m;
  r.propagated_err *= m;
  r.abs_integral *= m;
  return r;
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

std::string_view to_string(InversionKind kind) {
  switch (kind) {
    case InversionKind::QuickSinCos: return "QuickSinCos";
    case InversionKind::Theorem4: return "Theorem4";
    case InversionKind::GaverStehfest: return "GaverStehfest";
    case InversionKind::Talbot: return "Talbot";
  }
  return "?";
}

std::optional<InversionKind> parse_inversion_kind(std::string_view name) {
  for (auto k : {InversionKind::QuickSinCos, InversionKind::Theorem4, InversionKind::GaverStehfest,
                 InversionKind::Talbot}) {
    if (name == to_string(k)) return k;
  }
  if (name == "quick") return InversionKind::QuickSinCos;
  if (name == "theorem4") return InversionKind::Theorem4;
  if (name == "stehfest") return InversionKind::GaverStehfest;
  if (name == "talbot") return InversionKind::Talbot;
  return std::nullopt;
}

void InversionMethod::validate() const {
  if (!(c != 0.0) || !std::isfinite(c)) throw InvalidConfig("quick inverse constant must be nonzero");
  if (n < 4 || n % 2 != 0) throw InvalidConfig("Stehfest term count must be even and >= 4");
  if (n > 18) throw OverflowRisk("Stehfest term count above 18 loses all digits in double");
  if (m < 8) throw InvalidConfig("Talbot node count must be >= 8");
}

struct QuickInverse::State {
  SampleFn t;
  double c;
  QuadConfig cfg;
  double scale;
  std::once_flag lt_once, g_once;
  Surrogate lt_sur, g_sur;
};

QuickInverse::QuickInverse(SampleFn t, double c, QuadConfig cfg, double scale)
    : state_(std::make_shared<State>()) {
  if (!(c != 0.0)) throw InvalidConfig("quick inverse constant must be nonzero");
  cfg.validate();
  state_->t = std::move(t);
  state_->c = c;
  state_->cfg = cfg;
  state_->scale = scale;
}

Sample QuickInverse::lt(double x) const {
  State& st = *state_;
  std::call_once(st.lt_once, [&] {
    SurrogateOptions opt;
    opt.scale = st.scale;
    opt.weight_power = 1;
    opt.rel_tol = 0.1 * st.cfg.rel_tol;
    st.lt_sur = Surrogate::build([&st](double y) { return laplace_of(st.t, y, st.cfg, st.scale).sample(); },
                                 opt);
  });
  return st.lt_sur(x);
}

QuadResult QuickInverse::g_direct(double t) const {
  const State& st = *state_;
  if (!(t > 0.0)) throw DomainError("quick inverse inner stage needs t > 0");
  return integrate_oscillatory([this](double x) { return lt(x); }, OscKind::Cos, t, st.cfg, st.scale);
}

Sample QuickInverse::g(double t) const {
  State& st = *state_;
  std::call_once(st.g_once, [&] {
    SurrogateOptions opt;
    opt.scale = st.scale;
    opt.weight_power = 2;
    opt.rel_tol = 0.1 * st.cfg.rel_tol;
    st.g_sur = Surrogate::build([this](double v) { return g_direct(v).sample(); }, opt);
  });
  return st.g_sur(t);
}

QuadResult QuickInverse::operator()(double s) const {
  const State& st = *state_;
  if (!(s > 0.0)) throw DomainError("quick inverse needs s > 0");
  const QuadResult r =
      integrate_oscillatory([this](double t) { return g(t); }, OscKind::Sin, s, st.cfg, st.scale);
  return scaled(r, 1.0 / st.c);
}

QuadResult quick_inverse(const SampleFn& t, double s, double c, const QuadConfig& cfg) {
  return QuickInverse(t, c, cfg)(s);
}

QuadResult theorem4_inverse(const Chains& chains, double x) {
  if (!(x > 0.0)) throw DomainError("theorem4_inverse needs x > 0");
  return scaled(chains.f_minus_l_f_plus_k(x), 1.0 / (kI * kTwoPi));
}

QuadResult theorem4_inverse(const TestFunction& s, double x, const QuadConfig& cfg) {
  return theorem4_inverse(Chains(Operators(s, cfg)), x);
}

std::vector<double> stehfest_weights(int n) {
  InversionMethod{InversionKind::GaverStehfest, 1.0, n, 32}.validate();
  const int h = n / 2;
  std::vector<double> v(n);
  for (int k = 1; k <= n; ++k) {
    double sum = 0.0;
    for (int j = (k + 1) / 2; j <= std::min(k, h); ++j) {
      sum += std::pow(j, h) * factorial(2 * j) /
             (factorial(h - j) * factorial(j) * factorial(j - 1) * factorial(k - j) *
              factorial(2 * j - k));
    }
    v[k - 1] = ((k + h) % 2 == 0 ? 1.0 : -1.0) * sum;
  }
  return v;
}

double gaver_stehfest(const std::function<double(double)>& t_image, double t, int n) {
  if (!(t > 0.0)) throw DomainError("Stehfest inversion needs t > 0");
  const std::vector<double> v = stehfest_weights(n);
  const double a = std::numbers::ln2 / t;
  double sum = 0.0;
  for (int k = 1; k <= n; ++k) sum += v[k - 1] * t_image(k * a);
  return a * sum;
}

double talbot(const LaplaceImage& t_image, double t, int m) {
  if (!(t > 0.0)) throw DomainError("Talbot inversion needs t > 0");
  if (m < 8) throw InvalidConfig("Talbot node count must be >= 8");
  const double r = 2.0 * m / (5.0 * t);
  auto eval = [&](cplx p) {
    const cplx v = t_image(p);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw EvaluationError("Laplace image undefined at a Talbot node");
    }
    return v;
  };
  double sum = 0.5 * std::exp(r * t) * eval(r).real();
  for (int k = 1; k < m; ++k) {
    const double theta = k * std::numbers::pi / m;
    const double cot = 1.0 / std::tan(theta);
    const cplx delta = r * theta * cplx(cot, 1.0);
    const cplx gamma = 1.0 + kI * theta * (1.0 + cot * cot) - kI * cot;
    sum += (std::exp(t * delta) * eval(delta) * gamma).real();
  }
  return r / m * sum;
}

InversionResult invert_grid(const InversionMethod& method, const TestFunction& s,
                            const std::vector<double>& grid, const QuadConfig& cfg) {
  method.validate();
  if (grid.empty()) throw InvalidConfig("inversion grid is empty");
  for (double x : grid) {
    if (!(x > 0.0)) throw DomainError("inversion grid points must be positive");
  }
  InversionResult res;
  res.method = method;
  res.points = grid;
  const std::size_t n = grid.size();
  res.estimates.assign(n, cplx{});
  res.err_ests.assign(n, 0.0);
  res.converged.assign(n, false);
  res.accel_engaged.assign(n, false);
  res.errors.assign(n, std::string{});

  std::optional<Operators> ops;
  std::optional<QuickInverse> quick;
  std::optional<Chains> chains;
  auto operators = [&]() -> Operators& {
    if (!ops) ops.emplace(s, cfg);
    return *ops;
  };

  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid[i];
    try {
      QuadResult r;
      switch (method.kind) {
        case InversionKind::QuickSinCos: {
          if (!quick) {
            SampleFn t;
            if (s.closed_laplace) {
              t = [f = *s.closed_laplace](double y) { return Sample{cplx{f(y)}, 0.0}; };
            } else {
              t = [&operators](double y) { return operators().ls(y); };
            }
            quick.emplace(std::move(t), method.c, cfg, s.decay_scale);
          }
          r = (*quick)(x);
          break;
        }
        case InversionKind::Theorem4: {
          if (!chains) chains.emplace(operators());
          r = theorem4_inverse(*chains, x);
          break;
        }
        case InversionKind::GaverStehfest: {
          std::function<double(double)> t;
          if (s.closed_laplace) {
            t = *s.closed_laplace;
          } else {
            t = [&operators](double y) { return operators().laplace(y).value.real(); };
          }
          r.value = gaver_stehfest(t, x, method.n);
          r.err_est = kNotEstimated;
          break;
        }
        case InversionKind::Talbot: {
          if (!s.closed_laplace_complex) {
            throw EvaluationError("Talbot needs the Laplace image at complex points");
          }
          r.value = talbot(*s.closed_laplace_complex, x, method.m);
          r.err_est = kNotEstimated;
          break;
        }
      }
      res.estimates[i] = r.value;
      res.err_ests[i] = r.err_est;
      res.converged[i] = r.converged;
      res.accel_engaged[i] = r.accel_engaged;
    } catch (const Error& e) {
      res.errors[i] = e.what();
    }
  }

  std::vector<cplx> ref(n);
  std::vector<double> rel(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (method.kind == InversionKind::Theorem4) {
      ref[i] = operators().k_direct(grid[i], Sign::Plus).value;
    } else {
      ref[i] = s.s_eval(grid[i]);
    }
    const double diff = std::abs(res.estimates[i] - ref[i]);
    rel[i] = std::abs(ref[i]) > kReferenceFloor ? diff / std::abs(ref[i]) : diff;
  }
  res.reference = std::move(ref);
  res.rel_errors = std::move(rel);
  return res;
}

}  // namespace quickinv
