#include "quickinv/quad.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "quickinv/errors.hpp"

namespace quickinv {

namespace {

// 21-point Kronrod extension of the 10-point Gauss rule on [-1, 1].
// Even indices (1, 3, ...) are the Gauss abscissae.
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Panel {
  double a = 0.0;
  double b = 0.0;
  cplx value{};
  double err = 0.0;
  double prop = 0.0;
  double resabs = 0.0;
};

Panel gauss_kronrod21(const SampleFn& f, double a, double b) {
  const double centr = 0.5 * (a + b);
  const double hlgth = 0.5 * (b - a);
  const double dhlgth = std::abs(hlgth);

  std::array<cplx, 21> fv{};
  std::array<double, 21> ev{};
  const Sample fc = f(centr);
  fv[10] = fc.value;
  ev[10] = fc.err;
  for (int j = 0; j < 10; ++j) {
    const double absc = hlgth * kXgk[j];
    const Sample lo = f(centr - absc);
    const Sample hi = f(centr + absc);
    fv[j] = lo.value;
    ev[j] = lo.err;
    fv[20 - j] = hi.value;
    ev[20 - j] = hi.err;
  }

  cplx resk = kWgk[10] * fv[10];
  cplx resg{};
  double resabs = kWgk[10] * std::abs(fv[10]);
  double prop = kWgk[10] * ev[10];
  for (int j = 0; j < 10; ++j) {
    const cplx fsum = fv[j] + fv[20 - j];
    resk += kWgk[j] * fsum;
    resabs += kWgk[j] * (std::abs(fv[j]) + std::abs(fv[20 - j]));
    prop += kWgk[j] * (ev[j] + ev[20 - j]);
    if (j % 2 == 1) resg += kWg[j / 2] * fsum;
  }
  const cplx reskh = 0.5 * resk;
  double resasc = kWgk[10] * std::abs(fv[10] - reskh);
  for (int j = 0; j < 10; ++j) {
    resasc += kWgk[j] * (std::abs(fv[j] - reskh) + std::abs(fv[20 - j] - reskh));
  }

  Panel p;
  p.a = a;
  p.b = b;
  p.value = resk * hlgth;
  resabs *= dhlgth;
  resasc *= dhlgth;
  double abserr = std::abs((resk - resg) * hlgth);
  if (resasc != 0.0 && abserr != 0.0) {
    abserr = resasc * std::min(1.0, std::pow(200.0 * abserr / resasc, 1.5));
  }
  if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) {
    abserr = std::max(50.0 * kEps * resabs, abserr);
  }
  // A non-finite sample poisons the panel; report it as unresolved.
  if (!std::isfinite(p.value.real()) || !std::isfinite(p.value.imag())) {
    abserr = std::numeric_limits<double>::infinity();
  }
  p.err = abserr;
  p.prop = prop * dhlgth;
  p.resabs = resabs;
  return p;
}

double tolerance_for(cplx value, double abs_floor, const QuadConfig& cfg) {
  return std::max(abs_floor, cfg.rel_tol * std::abs(value));
}

// Global adaptive bisection; abs_floor replaces cfg.abs_tol so that callers
// summing many pieces can relax the absolute target of small pieces.
QuadResult adaptive(const SampleFn& f, double a, double b, const QuadConfig& cfg,
                    double abs_floor) {
  QuadResult out;
  if (a == b) return out;

  std::vector<Panel> panels;
  panels.reserve(static_cast<std::size_t>(cfg.max_subdiv) + 1);
  panels.push_back(gauss_kronrod21(f, a, b));
  out.n_evals = 21;

  auto totals = [&](cplx& value, double& err) {
    value = {};
    err = 0.0;
    for (const auto& p : panels) {
      value += p.value;
      err += p.err;
    }
  };

  cplx value;
  double err;
  totals(value, err);
  auto roundoff_limited = [&] {
    double resabs = 0.0;
    for (const auto& p : panels) resabs += p.resabs;
    return err <= 100.0 * kEps * resabs;
  };
  for (int iter = 0; iter < cfg.max_subdiv; ++iter) {
    if (err <= tolerance_for(value, abs_floor, cfg) || roundoff_limited()) break;
    std::size_t worst = 0;
    for (std::size_t i = 1; i < panels.size(); ++i) {
      if (panels[i].err > panels[worst].err) worst = i;
    }
    const Panel w = panels[worst];
    const double mid = 0.5 * (w.a + w.b);
    if (!(mid > w.a && mid < w.b)) break;  // interval exhausted
    panels[worst] = gauss_kronrod21(f, w.a, mid);
    panels.push_back(gauss_kronrod21(f, mid, w.b));
    out.n_evals += 42;
    totals(value, err);
  }

  out.value = value;
  out.err_est = err;
  for (const auto& p : panels) {
    out.propagated_err += p.prop;
    out.abs_integral += p.resabs;
  }
  out.converged = std::isfinite(err) && err <= tolerance_for(value, abs_floor, cfg);
  out.err_est += out.propagated_err;
  return out;
}

void accumulate(QuadResult& into, const QuadResult& part) {
  into.value += part.value;
  into.err_est += part.err_est;
  into.propagated_err += part.propagated_err;
  into.n_evals += part.n_evals;
  into.abs_integral += part.abs_integral;
  into.converged = into.converged && part.converged;
  into.accel_engaged = into.accel_engaged || part.accel_engaged;
}

SampleFn lift(const ComplexFn& f) {
  return [&f](double x) { return Sample{f(x), 0.0}; };
}

}  // namespace

void QuadConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(trunc_safety > 0.0)) {
    throw InvalidConfig("tolerances and trunc_safety must be positive");
  }
  if (max_subdiv < 1 || max_halfperiods < 1 || accel_order < 1) {
    throw InvalidConfig("max_subdiv, max_halfperiods and accel_order must be >= 1");
  }
}

bool within_tolerance(cplx value, double err, const QuadConfig& cfg) {
  return err <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(value));
}

std::string_view to_string(OscKind kind) {
  switch (kind) {
    case OscKind::Sin: return "sin";
    case OscKind::Cos: return "cos";
    case OscKind::ExpPlus: return "exp+";
    case OscKind::ExpMinus: return "exp-";
  }
  return "?";
}

QuadResult integrate_interval(const SampleFn& f, double a, double b,
                              const QuadConfig& cfg) {
  return adaptive(f, a, b, cfg, cfg.abs_tol);
}

QuadResult integrate_interval(const ComplexFn& f, double a, double b,
                              const QuadConfig& cfg) {
  return integrate_interval(lift(f), a, b, cfg);
}

QuadResult integrate_decaying(const SampleFn& f, double decay_scale,
                              const QuadConfig& cfg) {
  if (!(decay_scale > 0.0) || !std::isfinite(decay_scale)) {
    throw DomainError("decay_scale must be positive and finite");
  }
  constexpr int kMaxDoublings = 8;

  double upper = cfg.trunc_safety * decay_scale;
  QuadResult total = adaptive(f, 0.0, upper, cfg, cfg.abs_tol);
  for (int i = 0; i < kMaxDoublings; ++i) {
    const double floor = std::max(cfg.abs_tol, 0.5 * cfg.rel_tol * std::abs(total.value));
    const QuadResult piece = adaptive(f, upper, 2.0 * upper, cfg, floor);
    accumulate(total, piece);
    upper *= 2.0;
    if (std::abs(piece.value) + piece.err_est <= floor) break;
  }

  // Remaining tail [upper, inf) with x = upper / u.
  const double floor = std::max(cfg.abs_tol, 0.5 * cfg.rel_tol * std::abs(total.value));
  const SampleFn mapped = [&f, upper](double u) {
    const double jac = upper / (u * u);
    const Sample s = f(upper / u);
    return Sample{s.value * jac, s.err * jac};
  };
  accumulate(total, adaptive(mapped, 0.0, 1.0, cfg, floor));
  return total;
}

QuadResult integrate_decaying(const ComplexFn& f, double decay_scale,
                              const QuadConfig& cfg) {
  return integrate_decaying(lift(f), decay_scale, cfg);
}

QuadResult integrate_oscillatory(const SampleFn& g, OscKind kind, double omega,
                                 const QuadConfig& cfg, double envelope_scale) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw InvalidFrequency("oscillatory quadrature needs a positive finite frequency");
  }
  if (!(envelope_scale > 0.0)) envelope_scale = 1.0;

  const double half = std::numbers::pi / omega;
  auto boundary = [&](int k) {
    if (k == 0) return 0.0;
    return kind == OscKind::Cos ? (k - 0.5) * half : k * half;
  };
  const SampleFn integrand = [&g, kind, omega](double t) {
    const Sample s = g(t);
    cplx w;
    switch (kind) {
      case OscKind::Sin: w = std::sin(omega * t); break;
      case OscKind::Cos: w = std::cos(omega * t); break;
      case OscKind::ExpPlus: w = std::polar(1.0, omega * t); break;
      case OscKind::ExpMinus: w = std::polar(1.0, -omega * t); break;
    }
    return Sample{s.value * w, s.err * std::abs(w)};
  };

  QuadResult quad;  // accumulated panel quadrature
  std::vector<cplx> partial;
  std::vector<cplx> terms;
  partial.reserve(static_cast<std::size_t>(cfg.max_halfperiods));
  double sum_scale = 0.0;

  cplx best_acc{};
  double best_acc_err = std::numeric_limits<double>::infinity();
  cplx prev_acc{};
  bool have_prev_acc = false;
  int stable_hits = 0;

  for (int k = 0; k < cfg.max_halfperiods; ++k) {
    const double a = boundary(k);
    const double b = boundary(k + 1);
    const double floor = std::max(cfg.abs_tol, 0.1 * cfg.rel_tol * sum_scale);

    QuadResult panel;
    if (b - a > 4.0 * envelope_scale) {
      double lo = a;
      double step = envelope_scale;
      while (lo < b) {
        const double hi = std::min(b, lo + step);
        accumulate(panel, adaptive(integrand, lo, hi, cfg, floor));
        lo = hi;
        step *= 2.0;
      }
    } else {
      panel = adaptive(integrand, a, b, cfg, floor);
    }
    accumulate(quad, panel);
    terms.push_back(panel.value);
    const cplx running = partial.empty() ? panel.value : partial.back() + panel.value;
    partial.push_back(running);
    sum_scale = std::max(sum_scale, std::abs(running));

    const std::size_t n = partial.size();
    const double direct_tol = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(running));
    if (n >= 3 && b >= envelope_scale &&
        std::abs(terms[n - 1]) + std::abs(terms[n - 2]) <= direct_tol) {
      QuadResult out = quad;
      out.value = running;
      out.converged = quad.converged;
      return out;
    }

    if (n >= 6) {
      const Acceleration acc = accelerate_alternating(partial, cfg.accel_order);
      double err = acc.err_est;
      if (have_prev_acc) err = std::max(err, std::abs(acc.limit - prev_acc));
      else err = std::max(err, std::abs(acc.limit - running));
      const double acc_tol = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(acc.limit));
      if (err <= best_acc_err) {
        best_acc = acc.limit;
        best_acc_err = err;
      }
      stable_hits = (err <= acc_tol) ? stable_hits + 1 : 0;
      prev_acc = acc.limit;
      have_prev_acc = true;
      if (stable_hits >= 2) {
        QuadResult out = quad;
        out.value = acc.limit;
        out.err_est = quad.err_est + err;
        out.accel_engaged = true;
        out.converged = quad.converged;
        return out;
      }
    }
  }

  QuadResult out = quad;
  out.converged = false;
  if (have_prev_acc) {
    out.value = best_acc;
    out.err_est = quad.err_est + best_acc_err;
    out.accel_engaged = true;
  } else {
    out.value = partial.empty() ? cplx{} : partial.back();
    out.err_est = std::numeric_limits<double>::infinity();
  }
  return out;
}

QuadResult integrate_oscillatory(const ComplexFn& g, OscKind kind, double omega,
                                 const QuadConfig& cfg, double envelope_scale) {
  return integrate_oscillatory(lift(g), kind, omega, cfg, envelope_scale);
}

Acceleration accelerate_alternating(std::span<const cplx> partial_sums, int order) {
  if (partial_sums.size() < 3) {
    throw InsufficientTerms("acceleration needs at least 3 partial sums");
  }
  if (order < 1) throw InvalidConfig("acceleration order must be >= 1");

  const std::size_t m =
      std::min(partial_sums.size(), static_cast<std::size_t>(2 * order + 1));
  const auto window = partial_sums.subspan(partial_sums.size() - m);

  std::vector<cplx> prev(m + 1, cplx{});  // column -1
  std::vector<cplx> cur(window.begin(), window.end());
  cplx best = cur[m - 1];
  cplx best_prev = cur[m - 2];

  for (std::size_t k = 1; k < m; ++k) {
    const std::size_t size = m - k;
    std::vector<cplx> next(size);
    bool degenerate = false;
    for (std::size_t i = 0; i < size; ++i) {
      const cplx d = cur[i + 1] - cur[i];
      const double scale = std::max(std::abs(cur[i]), std::abs(cur[i + 1]));
      if (d == cplx{} || std::abs(d) <= 4.0 * kEps * scale) {
        degenerate = true;
        break;
      }
      next[i] = prev[i + 1] + 1.0 / d;
    }
    if (degenerate) break;
    prev = std::move(cur);
    cur = std::move(next);
    if (k % 2 == 0) {
      const cplx last = cur[size - 1];
      best_prev = size >= 2 ? cur[size - 2] : best;
      best = last;
    }
  }
  return {best, std::abs(best - best_prev)};
}

}  // namespace quickinv
