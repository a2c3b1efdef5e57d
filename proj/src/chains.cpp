#include "quickinv/chains.hpp"

#include <cmath>
#include <mutex>
#include <numbers>

#include "quickinv/errors.hpp"

namespace quickinv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Stage {
  std::once_flag once;
  Surrogate sur;
};

Sample negate_conj(const Sample& s) { return {-std::conj(s.value), s.err}; }

}  // namespace

struct Chains::State {
  Stage theorem1_inner, fk, gk, lgk, flgk, lfk, flfk;
};

Chains::Chains(Operators ops) : ops_(std::move(ops)), state_(std::make_shared<State>()) {}

namespace {

template <class Fn>
Sample cached(Stage& st, const Operators& ops, int weight_power, double x, Fn&& build_fn) {
  if (x < 0.0) throw DomainError("stage evaluated at a negative argument");
  std::call_once(st.once, [&] {
    st.sur = Surrogate::build(SampleFn(std::forward<Fn>(build_fn)), ops.surrogate_options(weight_power));
  });
  return st.sur(x);
}

}  // namespace

Sample Chains::theorem1_inner(double t) const {
  return cached(state_->theorem1_inner, ops_, 2, t, [this](double u) {
    // K = L S, so K(ix) = Z1-(x) and K(-ix) = Z1+(x).
    return fourier_line([this](double x) { return ops_.z(x, Sign::Minus); },
                        [this](double x) { return ops_.z(x, Sign::Plus); }, u, Sign::Plus,
                        ops_.config_at(u, 2), ops_.scale())
        .sample();
  });
}

Sample Chains::fk(double u) const {
  return cached(state_->fk, ops_, 2, u, [this](double v) {
    return fourier_line([this](double x) { return ops_.k_line(x); },
                        [this](double x) { return ops_.k_line(-x); }, v, Sign::Plus,
                        ops_.config_at(v, 2), ops_.scale())
        .sample();
  });
}

Sample Chains::gk(double t) const {
  return cached(state_->gk, ops_, 2, t, [this](double v) {
    return fourier_line([this](double x) { return ops_.k_plus_imag(-x); },
                        [this](double x) { return ops_.k_plus_imag(x); }, v, Sign::Minus,
                        ops_.config_at(v, 2), ops_.scale())
        .sample();
  });
}

Sample Chains::lgk_line(double x) const {
  if (x < 0.0) return negate_conj(lgk_line(-x));
  return cached(state_->lgk, ops_, 1, x, [this](double y) {
    return laplace_of([this](double t) { return gk(t); }, y, ops_.config_at(y, 1), ops_.scale())
        .sample();
  });
}

Sample Chains::flgk(double u) const {
  return cached(state_->flgk, ops_, 2, u, [this](double v) {
    return fourier_line([this](double x) { return lgk_line(x); },
                        [this](double x) { return lgk_line(-x); }, v, Sign::Plus,
                        ops_.config_at(v, 2), ops_.scale())
        .sample();
  });
}

Sample Chains::lfk_line(double x) const {
  if (x < 0.0) {
    const Sample k = ops_.k_plus_imag(-x);
    return {kTwoPi * k.value, kTwoPi * k.err};
  }
  return cached(state_->lfk, ops_, 1, x, [this](double y) {
    return laplace_of([this](double t) { return fk(t); }, y, ops_.config_at(y, 1), ops_.scale())
        .sample();
  });
}

Sample Chains::flfk(double t) const {
  return cached(state_->flfk, ops_, 2, t, [this](double v) {
    return f_minus_l_f_plus_k(v, ops_.config_at(v, 2)).sample();
  });
}

QuadResult Chains::theorem1_lhs(double s) const {
  return laplace_of([this](double t) { return theorem1_inner(t); }, s, ops_.config(), ops_.scale());
}

QuadResult Chains::theorem2_lhs(int part, double s) const {
  if (part == 1) {
    return laplace_of([this](double t) { return fk(t); }, s, ops_.config(), ops_.scale());
  }
  if (part == 2) {
    return laplace_of([this](double t) { return gk(t); }, s, ops_.config(), ops_.scale());
  }
  throw InvalidConfig("theorem part must be 1 or 2");
}

QuadResult Chains::theorem3_lhs(int part, double s) const {
  if (part == 1) {
    return laplace_of([this](double t) { return flgk(t); }, s, ops_.config(), ops_.scale());
  }
  if (part == 2) {
    return laplace_of([this](double t) { return flfk(t); }, s, ops_.config(), ops_.scale());
  }
  throw InvalidConfig("theorem part must be 1 or 2");
}

QuadResult Chains::f_minus_l_f_plus_k(double x) const {
  return f_minus_l_f_plus_k(x, ops_.config());
}

QuadResult Chains::f_minus_l_f_plus_k(double x, const QuadConfig& cfg) const {
  return fourier_line([this](double y) { return lfk_line(y); },
                      [this](double y) { return lfk_line(-y); }, x, Sign::Minus, cfg,
                      ops_.scale());
}

QuadResult Chains::theorem5_rhs(double s) const {
  if (!(s > 0.0)) throw DomainError("theorem5_rhs needs s > 0");
  QuadResult r = integrate_oscillatory([this](double t) { return ops_.fcos(t); }, OscKind::Sin, s,
                                       ops_.config(), ops_.scale());
  r.value *= 2.0;
  r.err_est *= 2.0;
  r.propagated_err *= 2.0;
  r.abs_integral *= 2.0;
  return r;
}

}  // namespace quickinv
