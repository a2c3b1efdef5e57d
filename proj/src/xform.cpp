#include "quickinv/xform.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>

#include "quickinv/errors.hpp"

namespace quickinv {

namespace {

constexpr cplx kI{0.0, 1.0};

QuadResult scaled(QuadResult r, cplx factor) {
  const double m = std::abs(factor);
  r.value *= factor;
  r.err_est *= m;
  r.propagated_err *= m;
  r.abs_integral *= m;
  return r;
}

QuadResult combine(const QuadResult& a, cplx fa, const QuadResult& b, cplx fb) {
  QuadResult r;
  r.value = fa * a.value + fb * b.value;
  r.err_est = std::abs(fa) * a.err_est + std::abs(fb) * b.err_est;
  r.propagated_err = std::abs(fa) * a.propagated_err + std::abs(fb) * b.propagated_err;
  r.abs_integral = std::abs(fa) * a.abs_integral + std::abs(fb) * b.abs_integral;
  r.n_evals = a.n_evals + b.n_evals;
  r.converged = a.converged && b.converged;
  r.accel_engaged = a.accel_engaged || b.accel_engaged;
  return r;
}

double effective_scale(double scale, double rate) {
  return rate > 0.0 ? std::min(scale, 1.0 / rate) : scale;
}

// Oscillatory kind for the phase e^{i w t} with real w != 0.
OscKind exp_kind(double w) { return w > 0.0 ? OscKind::ExpPlus : OscKind::ExpMinus; }

}  // namespace

std::string_view to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::Laplace: return "Laplace";
    case TransformKind::DoubleLaplace: return "DoubleLaplace";
    case TransformKind::FourierCos: return "FourierCos";
    case TransformKind::FourierSin: return "FourierSin";
    case TransformKind::FourierFullPlus: return "FourierFullPlus";
    case TransformKind::FourierFullMinus: return "FourierFullMinus";
    case TransformKind::HalfFourierPlus: return "HalfFourierPlus";
    case TransformKind::HalfFourierMinus: return "HalfFourierMinus";
    case TransformKind::KPlusDirect: return "KPlusDirect";
    case TransformKind::KPlusAlt: return "KPlusAlt";
    case TransformKind::KMinusDirect: return "KMinusDirect";
    case TransformKind::KMinusAlt: return "KMinusAlt";
  }
  return "?";
}

Representation choose_representation(cplx p, Sign sign) {
  const double a = p.real();
  const double alt_rate = -sign_value(sign) * p.imag();
  const bool direct_ok = a >= 0.0;
  const bool alt_ok = alt_rate >= 0.0;
  if (direct_ok && alt_ok) return alt_rate > a ? Representation::Alt : Representation::Direct;
  if (direct_ok) return Representation::Direct;
  if (alt_ok) return Representation::Alt;
  throw DomainError("K(p) has no convergent representation at this p");
}

QuadResult laplace_of(const SampleFn& f, double s, const QuadConfig& cfg, double scale) {
  if (!(s >= 0.0)) throw DomainError("Laplace argument must be nonnegative");
  const SampleFn g = [&f, s](double t) {
    Sample v = f(t);
    const double e = std::exp(-s * t);
    return Sample{v.value * e, v.err * e};
  };
  return integrate_decaying(g, effective_scale(scale, s), cfg);
}

QuadResult fourier_full(const SampleFn& z, double u, Sign sign, const QuadConfig& cfg,
                        double scale) {
  if (u == 0.0) return integrate_decaying(z, scale, cfg);
  const double w = sign_value(sign) * u;
  return integrate_oscillatory(z, exp_kind(w), std::abs(w), cfg, scale);
}

QuadResult fourier_line(const SampleFn& g_pos, const SampleFn& g_neg, double u, Sign sign,
                        const QuadConfig& cfg, double scale) {
  if (u < 0.0) return fourier_line(g_pos, g_neg, -u, flip(sign), cfg, scale);
  const SampleFn even = [&](double x) {
    const Sample p = g_pos(x);
    const Sample n = g_neg(x);
    return Sample{p.value + n.value, p.err + n.err};
  };
  if (u == 0.0) return integrate_decaying(even, scale, cfg);
  const SampleFn odd = [&](double x) {
    const Sample p = g_pos(x);
    const Sample n = g_neg(x);
    return Sample{p.value - n.value, p.err + n.err};
  };
  const QuadResult c = integrate_oscillatory(even, OscKind::Cos, u, cfg, scale);
  const QuadResult s = integrate_oscillatory(odd, OscKind::Sin, u, cfg, scale);
  return combine(c, 1.0, s, sign_value(sign) * kI);
}

struct Operators::State {
  TestFunction s;
  QuadConfig cfg;
  std::atomic<std::int64_t> s_evals{0};

  std::once_flag z_once[2];
  Surrogate z_sur[2];
  std::once_flag ls_once;
  Surrogate ls_sur;
  std::once_flag lls_once;
  Surrogate lls_sur;
  std::once_flag k_once[2];
  Surrogate k_sur[2];
  std::once_flag k_imag_once;
  Surrogate k_imag_sur;
  std::once_flag fcos_once;
  Surrogate fcos_sur;
};

Operators::Operators(TestFunction s, QuadConfig cfg) : state_(std::make_shared<State>()) {
  cfg.validate();
  if (!s.s_eval) throw InvalidConfig("test function without evaluator");
  State* st = state_.get();
  st->cfg = cfg;
  RealFn raw = std::move(s.s_eval);
  s.s_eval = [st, raw = std::move(raw)](double x) {
    st->s_evals.fetch_add(1, std::memory_order_relaxed);
    return raw(x);
  };
  st->s = std::move(s);
}

const TestFunction& Operators::function() const { return state_->s; }
const QuadConfig& Operators::config() const { return state_->cfg; }
double Operators::scale() const { return state_->s.decay_scale; }
std::int64_t Operators::s_evaluations() const { return state_->s_evals.load(); }

QuadConfig Operators::config_at(double x, int weight_power) const {
  QuadConfig c = config();
  if (weight_power > 0) {
    const double w = std::pow(1.0 + x / scale(), weight_power);
    if (std::isfinite(w)) c.abs_tol = std::max(c.abs_tol / w, std::numeric_limits<double>::min());
  }
  return c;
}

SurrogateOptions Operators::surrogate_options(int weight_power) const {
  SurrogateOptions opt;
  opt.scale = scale();
  opt.weight_power = weight_power;
  opt.rel_tol = 0.1 * config().rel_tol;
  return opt;
}

QuadResult Operators::laplace(double s) const { return laplace(s, config()); }

QuadResult Operators::laplace(double s, const QuadConfig& cfg) const {
  if (!(s >= 0.0)) throw DomainError("laplace: negative argument");
  if (s == 0.0 && !function().satisfies_11) {
    throw DomainError("laplace at 0 needs an absolutely integrable S");
  }
  const RealFn& f = function().s_eval;
  const ComplexFn g = [&f, s](double x) { return cplx{std::exp(-s * x) * f(x)}; };
  return integrate_decaying(g, effective_scale(scale(), s), cfg);
}

QuadResult Operators::double_laplace(double s) const { return double_laplace(s, config()); }

QuadResult Operators::double_laplace(double s, const QuadConfig& cfg) const {
  if (!(s > 0.0)) throw KernelSingularity("double_laplace needs s > 0");
  const RealFn& f = function().s_eval;
  const ComplexFn g = [&f, s](double v) { return cplx{f(v) / (s + v)}; };
  return integrate_decaying(g, scale(), cfg);
}

QuadResult Operators::double_laplace_composed(double s) const {
  if (!(s > 0.0)) throw KernelSingularity("double_laplace needs s > 0");
  return laplace_of([this](double t) { return ls(t); }, s, config(), scale());
}

QuadResult Operators::fourier_cos(double t) const { return fourier_cos(t, config()); }

QuadResult Operators::fourier_cos(double t, const QuadConfig& cfg) const {
  const RealFn& f = function().s_eval;
  const ComplexFn g = [&f](double x) { return cplx{f(x)}; };
  t = std::abs(t);
  if (t == 0.0) return integrate_decaying(g, scale(), cfg);
  return integrate_oscillatory(g, OscKind::Cos, t, cfg, scale());
}

QuadResult Operators::fourier_sin(double t) const { return fourier_sin(t, config()); }

QuadResult Operators::fourier_sin(double t, const QuadConfig& cfg) const {
  if (t == 0.0) return QuadResult{};
  const RealFn& f = function().s_eval;
  const ComplexFn g = [&f](double x) { return cplx{f(x)}; };
  const QuadResult r = integrate_oscillatory(g, OscKind::Sin, std::abs(t), cfg, scale());
  return t > 0.0 ? r : scaled(r, -1.0);
}

QuadResult Operators::half_fourier(double t, Sign sign) const { return half_fourier(t, sign, config()); }

QuadResult Operators::half_fourier(double t, Sign sign, const QuadConfig& cfg) const {
  const RealFn& f = function().s_eval;
  const ComplexFn g = [&f](double x) { return cplx{f(x)}; };
  if (t == 0.0) return integrate_decaying(g, scale(), cfg);
  const double w = sign_value(sign) * t;
  return integrate_oscillatory(g, exp_kind(w), std::abs(w), cfg, scale());
}

QuadResult Operators::k_direct(cplx p, Sign sign) const { return k_direct(p, sign, config()); }

QuadResult Operators::k_direct(cplx p, Sign sign, const QuadConfig& cfg) const {
  const double a = p.real();
  const double b = p.imag();
  if (!(a >= 0.0)) throw DomainError("direct representation of K needs Re p >= 0");
  if (std::abs(b) <= a || b == 0.0) {
    const SampleFn g = [this, p, sign](double t) {
      const Sample zt = z(t, sign);
      const cplx e = std::exp(-p * t);
      return Sample{e * zt.value, std::abs(e) * zt.err};
    };
    return integrate_decaying(g, effective_scale(scale(), a), cfg);
  }
  const SampleFn g = [this, a, sign](double t) {
    const Sample zt = z(t, sign);
    const double e = std::exp(-a * t);
    return Sample{e * zt.value, e * zt.err};
  };
  return integrate_oscillatory(g, exp_kind(-b), std::abs(b), cfg, scale());
}

QuadResult Operators::k_alt(cplx p, Sign sign) const { return k_alt(p, sign, config()); }

QuadResult Operators::k_alt(cplx p, Sign sign, const QuadConfig& cfg) const {
  const double sg = sign_value(sign);
  const double a = p.real();
  const double rate = -sg * p.imag();
  if (!(rate >= 0.0)) throw DomainError("alternative representation of K diverges at this p");
  const cplx factor = sg * kI;
  if (a == 0.0 || std::abs(a) <= rate) {
    const SampleFn g = [this, p, sg](double t) {
      const Sample l = ls(t);
      const cplx e = std::exp(-sg * kI * p * t);
      return Sample{e * l.value, std::abs(e) * l.err};
    };
    return scaled(integrate_decaying(g, effective_scale(scale(), rate), cfg), factor);
  }
  const SampleFn g = [this, rate](double t) {
    const Sample l = ls(t);
    const double e = std::exp(-rate * t);
    return Sample{e * l.value, e * l.err};
  };
  const double w = -sg * a;
  return scaled(integrate_oscillatory(g, exp_kind(w), std::abs(w), cfg, scale()), factor);
}

QuadResult Operators::k(cplx p, Sign sign) const {
  return choose_representation(p, sign) == Representation::Direct ? k_direct(p, sign)
                                                                   : k_alt(p, sign);
}

QuadResult Operators::k_on_negative_axis(double s) const {
  if (!(s > 0.0)) throw DomainError("k_on_negative_axis needs s > 0");
  return scaled(k_direct(s, Sign::Minus), -1.0);
}

Sample Operators::z(double t, Sign sign) const {
  if (t < 0.0) return z(-t, flip(sign));
  State& st = *state_;
  const int idx = sign == Sign::Plus ? 0 : 1;
  std::call_once(st.z_once[idx], [&] {
    st.z_sur[idx] = Surrogate::build(
        [this, sign](double x) { return half_fourier(x, sign, config_at(x, 2)).sample(); },
        surrogate_options(2));
  });
  return st.z_sur[idx](t);
}

Sample Operators::ls(double t) const {
  State& st = *state_;
  std::call_once(st.ls_once, [&] {
    st.ls_sur = Surrogate::build([this](double x) { return laplace(x, config_at(x, 2)).sample(); },
                                 surrogate_options(2));
  });
  return st.ls_sur(t);
}

Sample Operators::lls(double x) const {
  State& st = *state_;
  std::call_once(st.lls_once, [&] {
    st.lls_sur = Surrogate::build(
        [this](double y) {
          return laplace_of([this](double t) { return ls(t); }, y, config_at(y, 1), scale()).sample();
        },
        surrogate_options(1));
  });
  return st.lls_sur(x);
}

Sample Operators::k_plus_real(double x, Sign sign) const {
  if (x < 0.0) throw DomainError("k_plus_real needs x >= 0");
  State& st = *state_;
  const int idx = sign == Sign::Plus ? 0 : 1;
  std::call_once(st.k_once[idx], [&] {
    st.k_sur[idx] = Surrogate::build(
        [this, sign](double y) { return k_direct(y, sign, config_at(y, 1)).sample(); },
        surrogate_options(1));
  });
  return st.k_sur[idx](x);
}

Sample Operators::k_line(double x) const {
  if (x >= 0.0) return k_plus_real(x, Sign::Plus);
  const Sample m = k_plus_real(-x, Sign::Minus);
  return {-m.value, m.err};
}

Sample Operators::k_plus_imag(double y) const {
  if (y < 0.0) {
    // K+(-i x) = i (L L S)(x), the alt representation.
    const Sample l = lls(-y);
    return {kI * l.value, l.err};
  }
  State& st = *state_;
  std::call_once(st.k_imag_once, [&] {
    st.k_imag_sur = Surrogate::build(
        [this](double v) { return k_direct(cplx{0.0, v}, Sign::Plus, config_at(v, 1)).sample(); },
        surrogate_options(1));
  });
  return st.k_imag_sur(y);
}

Sample Operators::fcos(double t) const {
  State& st = *state_;
  std::call_once(st.fcos_once, [&] {
    st.fcos_sur = Surrogate::build([this](double x) { return fourier_cos(x, config_at(x, 2)).sample(); },
                                   surrogate_options(2));
  });
  return st.fcos_sur(std::abs(t));
}

QuadResult laplace(const TestFunction& s, double x, const QuadConfig& cfg) {
  return Operators(s, cfg).laplace(x);
}
QuadResult double_laplace(const TestFunction& s, double x, const QuadConfig& cfg) {
  return Operators(s, cfg).double_laplace(x);
}
QuadResult fourier_cos(const TestFunction& s, double t, const QuadConfig& cfg) {
  return Operators(s, cfg).fourier_cos(t);
}
QuadResult fourier_sin(const TestFunction& s, double t, const QuadConfig& cfg) {
  return Operators(s, cfg).fourier_sin(t);
}
QuadResult half_fourier(const TestFunction& s, double t, Sign sign, const QuadConfig& cfg) {
  return Operators(s, cfg).half_fourier(t, sign);
}
QuadResult k_direct(const TestFunction& s, cplx p, Sign sign, const QuadConfig& cfg) {
  return Operators(s, cfg).k_direct(p, sign);
}
QuadResult k_alt(const TestFunction& s, cplx p, Sign sign, const QuadConfig& cfg) {
  return Operators(s, cfg).k_alt(p, sign);
}
QuadResult k_on_negative_axis(const TestFunction& s, double x, const QuadConfig& cfg) {
  return Operators(s, cfg).k_on_negative_axis(x);
}

}  // namespace quickinv
