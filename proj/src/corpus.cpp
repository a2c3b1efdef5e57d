#include "quickinv/corpus.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "quickinv/errors.hpp"

namespace quickinv {

namespace {

constexpr std::array<double, 5> kProbes = {0.3, 0.7, 1.3, 2.9, 6.1};
constexpr double kSelfTestTol = 1e-8;

cplx a_of(double t) { return {1.0, -t}; }

TestFunction make_f1() {
  TestFunction f;
  f.id = "f1";
  f.formula = "x*exp(-x)";
  f.s_eval = [](double x) { return x * std::exp(-x); };
  f.satisfies_11 = true;
  f.s_at_0_is_0 = true;
  f.closed_laplace = [](double s) { return 1.0 / ((1.0 + s) * (1.0 + s)); };
  f.closed_fcos = [](double t) {
    const double d = 1.0 + t * t;
    return (1.0 - t * t) / (d * d);
  };
  f.closed_fsin = [](double t) {
    const double d = 1.0 + t * t;
    return 2.0 * t / (d * d);
  };
  f.closed_halffourier = [](double t) {
    const cplx a = a_of(t);
    return 1.0 / (a * a);
  };
  f.closed_laplace_complex = [](cplx p) { return 1.0 / ((1.0 + p) * (1.0 + p)); };
  return f;
}

TestFunction make_f2() {
  TestFunction f;
  f.id = "f2";
  f.formula = "x*exp(-x^2)";
  f.s_eval = [](double x) { return x * std::exp(-x * x); };
  f.satisfies_11 = true;
  f.s_at_0_is_0 = true;
  return f;
}

TestFunction make_f3() {
  TestFunction f;
  f.id = "f3";
  f.formula = "sin(x)*exp(-x)";
  f.s_eval = [](double x) { return std::sin(x) * std::exp(-x); };
  f.satisfies_11 = true;
  f.s_at_0_is_0 = true;
  f.closed_laplace = [](double s) { return 1.0 / ((s + 1.0) * (s + 1.0) + 1.0); };
  const ComplexFn z = [](double t) {
    const cplx a = a_of(t);
    return 1.0 / (a * a + 1.0);
  };
  f.closed_halffourier = z;
  f.closed_fcos = [z](double t) { return z(t).real(); };
  f.closed_fsin = [z](double t) { return z(t).imag(); };
  f.closed_laplace_complex = [](cplx p) { return 1.0 / ((p + 1.0) * (p + 1.0) + 1.0); };
  return f;
}

TestFunction make_f5() {
  TestFunction f;
  f.id = "f5";
  f.formula = "x*(2-x)*exp(-x)";
  f.s_eval = [](double x) { return x * (2.0 - x) * std::exp(-x); };
  f.satisfies_11 = true;
  f.s_at_0_is_0 = true;
  f.zero_mean = true;
  f.closed_laplace = [](double s) {
    const double b = s + 1.0;
    return 2.0 / (b * b) - 2.0 / (b * b * b);
  };
  const ComplexFn z = [](double t) {
    const cplx a = a_of(t);
    return 2.0 / (a * a) - 2.0 / (a * a * a);
  };
  f.closed_halffourier = z;
  f.closed_fcos = [z](double t) { return z(t).real(); };
  f.closed_fsin = [z](double t) { return z(t).imag(); };
  f.closed_laplace_complex = [](cplx p) {
    const cplx b = p + 1.0;
    return 2.0 / (b * b) - 2.0 / (b * b * b);
  };
  return f;
}

TestFunction make_zero() {
  TestFunction f;
  f.id = "zero";
  f.formula = "0";
  f.s_eval = [](double) { return 0.0; };
  f.satisfies_11 = true;
  f.s_at_0_is_0 = true;
  f.zero_mean = true;
  f.closed_laplace = [](double) { return 0.0; };
  f.closed_fcos = [](double) { return 0.0; };
  f.closed_fsin = [](double) { return 0.0; };
  f.closed_halffourier = [](double) { return cplx{}; };
  f.closed_laplace_complex = [](cplx) { return cplx{}; };
  return f;
}

// Finiteness test for integrals of |S|, whose kinks defeat the strict
// convergence criterion.
bool finite_integral(const QuadResult& r) {
  return std::isfinite(r.value.real()) && r.err_est <= 1e-6 * (1.0 + std::abs(r.value));
}

[[noreturn]] void reject(const TestFunction& f, const std::string& what) {
  throw RegistrationError("corpus entry '" + f.id + "': " + what);
}

void check_closed(const TestFunction& f, const char* name, const ComplexFn& closed,
                  const std::function<QuadResult(double)>& numeric) {
  for (double p : kProbes) {
    const cplx ref = closed(p);
    const QuadResult r = numeric(p);
    if (!(std::abs(r.value - ref) <= kSelfTestTol * (1.0 + std::abs(ref)))) {
      std::ostringstream msg;
      msg.precision(17);
      msg << name << " disagrees with quadrature at " << p << ": closed " << ref << ", numeric "
          << r.value;
      reject(f, msg.str());
    }
  }
}

}  // namespace

void self_test(const TestFunction& f, const QuadConfig& cfg) {
  if (!f.s_eval) reject(f, "missing evaluator");
  if (!(f.decay_scale > 0.0)) reject(f, "decay_scale must be positive");
  const RealFn& s = f.s_eval;
  const double scale = f.decay_scale;
  if (f.s_at_0_is_0 && s(0.0) != 0.0) reject(f, "S(0) != 0 although flagged");
  if (f.satisfies_11) {
    const QuadResult r = integrate_decaying(ComplexFn([&](double x) { return cplx{std::abs(s(x))}; }),
                                            scale, cfg);
    if (!finite_integral(r)) reject(f, "int |S| not finite");
  }
  if (f.zero_mean) {
    const QuadResult m = integrate_decaying(ComplexFn([&](double x) { return cplx{s(x)}; }), scale, cfg);
    if (std::abs(m.value) > 1e-9) reject(f, "int S != 0 although flagged zero_mean");
    const QuadResult v = integrate_decaying(
        ComplexFn([&](double x) { return cplx{x * std::abs(s(x))}; }), scale, cfg);
    if (!finite_integral(v)) reject(f, "int v |S| not finite");
  }
  if (f.closed_laplace) {
    const RealFn& c = *f.closed_laplace;
    check_closed(f, "closed_laplace", [&](double p) { return cplx{c(p)}; }, [&](double p) {
      return integrate_decaying(ComplexFn([&](double x) { return cplx{std::exp(-p * x) * s(x)}; }),
                                scale, cfg);
    });
  }
  const ComplexFn envelope = [&](double x) { return cplx{s(x)}; };
  if (f.closed_fcos) {
    const RealFn& c = *f.closed_fcos;
    check_closed(f, "closed_fcos", [&](double p) { return cplx{c(p)}; }, [&](double p) {
      return integrate_oscillatory(envelope, OscKind::Cos, p, cfg, scale);
    });
  }
  if (f.closed_fsin) {
    const RealFn& c = *f.closed_fsin;
    check_closed(f, "closed_fsin", [&](double p) { return cplx{c(p)}; }, [&](double p) {
      return integrate_oscillatory(envelope, OscKind::Sin, p, cfg, scale);
    });
  }
  if (f.closed_halffourier) {
    check_closed(f, "closed_halffourier", *f.closed_halffourier, [&](double p) {
      return integrate_oscillatory(envelope, OscKind::ExpPlus, p, cfg, scale);
    });
  }
  if (f.closed_laplace_complex) {
    const auto& c = *f.closed_laplace_complex;
    // On the imaginary axis against Z1+, and off both axes against quadrature.
    check_closed(f, "closed_laplace_complex", [&](double t) { return c(cplx{0.0, -t}); },
                 [&](double t) {
                   return integrate_oscillatory(envelope, OscKind::ExpPlus, t, cfg, scale);
                 });
    check_closed(f, "closed_laplace_complex", [&](double p) { return c(cplx{p, p}); },
                 [&](double p) {
                   return integrate_oscillatory(
                       ComplexFn([&](double x) { return cplx{std::exp(-p * x) * s(x)}; }),
                       OscKind::ExpMinus, p, cfg, scale);
                 });
  }
}

const std::vector<TestFunction>& builtin_corpus() {
  static const std::vector<TestFunction> corpus = [] {
    std::vector<TestFunction> c = {make_f1(), make_f2(), make_f3(), make_f5()};
    for (const auto& f : c) self_test(f);
    return c;
  }();
  return corpus;
}

const TestFunction& zero_function() {
  static const TestFunction z = [] {
    TestFunction f = make_zero();
    self_test(f);
    return f;
  }();
  return z;
}

const TestFunction* find_function(std::string_view id) {
  if (id == "zero") return &zero_function();
  for (const auto& f : builtin_corpus()) {
    if (f.id == id) return &f;
  }
  return nullptr;
}

TestFunction combine(double a, const TestFunction& f, double b, const TestFunction& g,
                     std::string id) {
  TestFunction h;
  h.id = std::move(id);
  std::ostringstream formula;
  formula.precision(17);
  formula << a << "*(" << f.formula << ")+" << b << "*(" << g.formula << ")";
  h.formula = formula.str();
  h.s_eval = [a, b, fs = f.s_eval, gs = g.s_eval](double x) { return a * fs(x) + b * gs(x); };
  h.satisfies_11 = f.satisfies_11 && g.satisfies_11;
  h.s_at_0_is_0 = f.s_at_0_is_0 && g.s_at_0_is_0;
  h.zero_mean = f.zero_mean && g.zero_mean;
  h.decay_scale = std::max(f.decay_scale, g.decay_scale);
  auto lin = [a, b](const std::optional<RealFn>& p, const std::optional<RealFn>& q) {
    std::optional<RealFn> r;
    if (p && q) r = [a, b, p = *p, q = *q](double x) { return a * p(x) + b * q(x); };
    return r;
  };
  h.closed_laplace = lin(f.closed_laplace, g.closed_laplace);
  h.closed_fcos = lin(f.closed_fcos, g.closed_fcos);
  h.closed_fsin = lin(f.closed_fsin, g.closed_fsin);
  if (f.closed_laplace_complex && g.closed_laplace_complex) {
    h.closed_laplace_complex = [a, b, p = *f.closed_laplace_complex,
                                q = *g.closed_laplace_complex](cplx z) {
      return a * p(z) + b * q(z);
    };
  }
  if (f.closed_halffourier && g.closed_halffourier) {
    h.closed_halffourier = [a, b, p = *f.closed_halffourier, q = *g.closed_halffourier](double t) {
      return a * p(t) + b * q(t);
    };
  }
  return h;
}

}  // namespace quickinv
