#include "quickinv/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <functional>
#include <numbers>
#include <thread>

#include "quickinv/errors.hpp"

namespace quickinv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

struct Side {
  cplx value{};
  double err = 0.0;
  bool converged = true;
};

Side side(const QuadResult& r, cplx factor = 1.0) {
  return {factor * r.value, std::abs(factor) * r.err_est, r.converged};
}

struct PointEval {
  Side lhs, rhs;
  std::vector<double> context;
  std::string error;
};

bool iequals(std::string_view a, std::string_view b) {
  return std::ranges::equal(a, b, [](char x, char y) {
    return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
  });
}

enum class Rule { Standard, Sequence, Convergence, Bound };

Rule rule_for(IdentityId id) {
  switch (id) {
    case IdentityId::Prop1:
    case IdentityId::AdditionalTail: return Rule::Sequence;
    case IdentityId::Prop2: return Rule::Convergence;
    case IdentityId::Decay22: return Rule::Bound;
    default: return Rule::Standard;
  }
}

// Folds per-point outcomes: any fail wins, then any doubt.
Verdict fold(bool fail, bool pass) {
  if (fail) return Verdict::Fail;
  return pass ? Verdict::Pass : Verdict::Inconclusive;
}

bool all_converged(const IdentityReport& r) {
  return std::ranges::all_of(r.converged, [](bool c) { return c; });
}

Verdict standard_verdict(const IdentityReport& r) {
  bool fail = false;
  bool pass = true;
  for (std::size_t i = 0; i < r.grid.size(); ++i) {
    if (r.rel_resid[i] <= r.tol && r.converged[i]) continue;
    pass = false;
    if (r.rel_resid[i] > r.tol && r.abs_resid[i] > 10.0 * r.quad_error_budget[i]) fail = true;
  }
  return fold(fail, pass);
}

// |lhs| must decrease along the grid and end at or below tol.
Verdict sequence_verdict(const IdentityReport& r) {
  const std::size_t n = r.grid.size();
  if (n == 0) return Verdict::Pass;
  bool fail = false;
  bool pass = all_converged(r);
  for (std::size_t i = 1; i < n; ++i) {
    // A sequence that has reached exactly zero stays acceptable.
    const double rise = std::abs(r.lhs[i]) - std::abs(r.lhs[i - 1]);
    if (rise > 0.0 || (rise == 0.0 && r.lhs[i] != 0.0)) {
      pass = false;
      if (rise > 10.0 * (r.quad_error_budget[i] + r.quad_error_budget[i - 1])) fail = true;
    }
  }
  const double excess = std::abs(r.lhs[n - 1]) - r.tol;
  if (excess > 0.0) {
    pass = false;
    if (excess > 10.0 * r.quad_error_budget[n - 1]) fail = true;
  }
  return fold(fail, pass);
}

// Increments of |lhs| shrink at least 4x and the fitted decay exponent of
// the last window exceeds 1.
Verdict convergence_verdict(const IdentityReport& r) {
  const std::size_t n = r.grid.size();
  if (n == 0) return Verdict::Pass;
  bool fail = false;
  bool pass = all_converged(r);
  for (std::size_t i = 2; i < n; ++i) {
    const double d0 = std::abs(r.lhs[i - 1]) - std::abs(r.lhs[i - 2]);
    const double d1 = std::abs(r.lhs[i]) - std::abs(r.lhs[i - 1]);
    const double excess = d1 - 0.25 * d0;
    if (excess > 0.0) {
      pass = false;
      const double noise = r.quad_error_budget[i] + 2.0 * r.quad_error_budget[i - 1] +
                           r.quad_error_budget[i - 2];
      if (excess > 10.0 * noise) fail = true;
    }
  }
  if (std::ranges::all_of(r.lhs, [](cplx z) { return z == 0.0; })) return fold(fail, pass);
  const ContextColumn* alpha = r.find_context("alpha");
  const ContextColumn* alpha_err = r.find_context("alpha_err");
  if (alpha == nullptr || alpha_err == nullptr || alpha->values.size() != n) return Verdict::Inconclusive;
  const double a = alpha->values[n - 1];
  if (!(a > 1.0)) {
    pass = false;
    if (1.0 - a > 10.0 * alpha_err->values[n - 1]) fail = true;
  }
  return fold(fail, pass);
}

// lhs <= rhs (a real bound) at every point.
Verdict bound_verdict(const IdentityReport& r) {
  bool fail = false;
  bool pass = all_converged(r);
  for (std::size_t i = 0; i < r.grid.size(); ++i) {
    const double excess = r.lhs[i].real() - r.rhs[i].real();
    if (excess > 0.0) {
      pass = false;
      if (excess > 10.0 * r.quad_error_budget[i]) fail = true;
    }
  }
  return fold(fail, pass);
}

}  // namespace

const std::vector<IdentityId>& all_identities() {
  static const std::vector<IdentityId> ids = {
      IdentityId::Theorem1,   IdentityId::Lemma1,       IdentityId::Theorem2_1,
      IdentityId::Theorem2_2, IdentityId::Theorem3_1,   IdentityId::Theorem3_2,
      IdentityId::Theorem4,   IdentityId::Theorem5_1,   IdentityId::QuickInverse,
      IdentityId::Prop1,      IdentityId::Prop2,        IdentityId::Prop3,
      IdentityId::Decay22,    IdentityId::AdditionalTail,
  };
  return ids;
}

std::string_view to_string(IdentityId id) {
  switch (id) {
    case IdentityId::Theorem1: return "Theorem1";
    case IdentityId::Lemma1: return "Lemma1";
    case IdentityId::Theorem2_1: return "Theorem2_1";
    case IdentityId::Theorem2_2: return "Theorem2_2";
    case IdentityId::Theorem3_1: return "Theorem3_1";
    case IdentityId::Theorem3_2: return "Theorem3_2";
    case IdentityId::Theorem4: return "Theorem4";
    case IdentityId::Theorem5_1: return "Theorem5_1";
    case IdentityId::QuickInverse: return "QuickInverse";
    case IdentityId::Prop1: return "Prop1";
    case IdentityId::Prop2: return "Prop2";
    case IdentityId::Prop3: return "Prop3";
    case IdentityId::Decay22: return "Decay22";
    case IdentityId::AdditionalTail: return "AdditionalTail";
  }
  return "?";
}

std::optional<IdentityId> parse_identity(std::string_view name) {
  for (IdentityId id : all_identities()) {
    if (iequals(name, to_string(id))) return id;
  }
  return std::nullopt;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

std::optional<Verdict> parse_verdict(std::string_view name) {
  for (Verdict v : {Verdict::Pass, Verdict::Fail, Verdict::Inconclusive}) {
    if (name == to_string(v)) return v;
  }
  return std::nullopt;
}

const ContextColumn* IdentityReport::find_context(std::string_view name) const {
  for (const ContextColumn& c : context) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

Verdict recompute_verdict(const IdentityReport& r) {
  switch (rule_for(r.identity)) {
    case Rule::Standard: return standard_verdict(r);
    case Rule::Sequence: return sequence_verdict(r);
    case Rule::Convergence: return convergence_verdict(r);
    case Rule::Bound: return bound_verdict(r);
  }
  return Verdict::Inconclusive;
}

void VerifyConfig::validate() const {
  quad.validate();
  auto positive = [](const std::vector<double>& v, const char* what) {
    if (v.empty()) throw InvalidConfig(std::string(what) + " is empty");
    for (double x : v) {
      if (!(x > 0.0) || !std::isfinite(x)) throw InvalidConfig(std::string(what) + " needs positive points");
    }
  };
  positive(grid, "grid");
  positive(prop1_eps, "Prop 1 epsilon sequence");
  positive(prop2_radii, "Prop 2 radii");
  positive(tail_cutoffs, "tail cutoffs");
  if (!(tol > 0.0) || !(floor > 0.0) || !(prop1_tol > 0.0) || !(tail_tol > 0.0)) {
    throw InvalidConfig("verdict thresholds must be positive");
  }
  if (!(tail_x > 0.0)) throw InvalidConfig("tail point must be positive");
  if (decay_points < 2) throw InvalidConfig("decay check needs at least 2 points");
}

struct Verifier::Plan {
  IdentityReport head;  // identity, function, grid, constant, thresholds
  std::vector<std::string> context_names;
  std::vector<std::function<PointEval()>> points;
  // Runs on the raw report before residuals are formed (may set rhs).
  std::function<void(IdentityReport&, std::vector<double>& lhs_err, std::vector<double>& rhs_err)>
      finish;
};

Verifier::Verifier(const TestFunction& s, VerifyConfig cfg)
    : s_(s),
      cfg_(std::move(cfg)),
      chains_(Operators(s_, (cfg_.validate(), cfg_.quad))),
      quick_([ops = chains_.ops()](double y) { return ops.ls(y); }, 1.0, cfg_.quad, s_.decay_scale) {}

namespace {

PointEval guarded(const std::function<PointEval()>& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    PointEval p;
    p.lhs.converged = false;
    p.error = e.what();
    return p;
  }
}

void fit_constant(IdentityReport& r) {
  double bb = 0.0;
  double ll = 0.0;
  cplx bl{};
  for (std::size_t i = 0; i < r.grid.size(); ++i) {
    const cplx b = r.rhs[i] / r.paper_constant;
    bb += std::norm(b);
    ll += std::norm(r.lhs[i]);
    bl += std::conj(b) * r.lhs[i];
  }
  if (!(bb > 0.0)) {
    r.fitted_constant.reset();
    r.fit_residual = 0.0;
    return;
  }
  const cplx k = bl / bb;
  r.fitted_constant = k;
  double rr = 0.0;
  for (std::size_t i = 0; i < r.grid.size(); ++i) rr += std::norm(r.lhs[i] - k * r.rhs[i] / r.paper_constant);
  r.fit_residual = ll > 0.0 ? std::sqrt(rr / ll) : 0.0;
}

IdentityReport assemble(const Verifier::Plan& plan, std::vector<PointEval>&& evals);

}  // namespace

IdentityReport Verifier::check(IdentityId id) const {
  const Plan p = plan(id);
  std::vector<PointEval> evals;
  evals.reserve(p.points.size());
  for (const auto& fn : p.points) evals.push_back(guarded(fn));
  return assemble(p, std::move(evals));
}

IdentityReport Verifier::check_theorem1() const { return check(IdentityId::Theorem1); }
IdentityReport Verifier::check_lemma1() const { return check(IdentityId::Lemma1); }
IdentityReport Verifier::check_theorem2(int part) const {
  if (part != 1 && part != 2) throw InvalidConfig("theorem part must be 1 or 2");
  return check(part == 1 ? IdentityId::Theorem2_1 : IdentityId::Theorem2_2);
}
IdentityReport Verifier::check_theorem3(int part) const {
  if (part != 1 && part != 2) throw InvalidConfig("theorem part must be 1 or 2");
  return check(part == 1 ? IdentityId::Theorem3_1 : IdentityId::Theorem3_2);
}
IdentityReport Verifier::check_theorem4() const { return check(IdentityId::Theorem4); }
IdentityReport Verifier::check_theorem5_1() const { return check(IdentityId::Theorem5_1); }
IdentityReport Verifier::check_quick_inverse() const { return check(IdentityId::QuickInverse); }
IdentityReport Verifier::check_prop1() const { return check(IdentityId::Prop1); }
IdentityReport Verifier::check_prop2() const { return check(IdentityId::Prop2); }
IdentityReport Verifier::check_prop3() const { return check(IdentityId::Prop3); }
IdentityReport Verifier::check_decay22() const { return check(IdentityId::Decay22); }
IdentityReport Verifier::check_additional_tail() const { return check(IdentityId::AdditionalTail); }

Verifier::Plan Verifier::plan(IdentityId id) const {
  Plan p;
  p.head.identity = id;
  p.head.function_id = s_.id;
  p.head.tol = cfg_.tol;
  p.head.floor = cfg_.floor;
  const Operators& ops = chains_.ops();
  const Chains& ch = chains_;
  const double scale = s_.decay_scale;
  const QuadConfig& qc = cfg_.quad;

  auto over_grid = [&](cplx constant, auto fn) {
    p.head.grid = cfg_.grid;
    p.head.paper_constant = constant;
    for (double s : cfg_.grid) p.points.push_back([fn, s] { return fn(s); });
  };

  switch (id) {
    case IdentityId::Theorem1:
      over_grid(kTwoPi, [ch, ops](double s) {
        return PointEval{side(ch.theorem1_lhs(s)), side(ops.laplace(s), kTwoPi), {}, {}};
      });
      break;
    case IdentityId::Lemma1:
      p.context_names = {"sign"};
      for (Sign sign : {Sign::Plus, Sign::Minus}) {
        for (double x : cfg_.grid) {
          p.head.grid.push_back(x);
          p.points.push_back([ops, x, sign] {
            return PointEval{side(ops.k_direct(x, sign)), side(ops.k_alt(x, sign)), {sign_value(sign)}, {}};
          });
        }
      }
      break;
    case IdentityId::Theorem2_1:
      over_grid(kTwoPi, [ch, ops](double s) {
        return PointEval{side(ch.theorem2_lhs(1, s)), side(ops.k(cplx(0.0, -s), Sign::Plus), kTwoPi), {}, {}};
      });
      break;
    case IdentityId::Theorem2_2:
      over_grid(kTwoPi, [ch, ops](double s) {
        return PointEval{side(ch.theorem2_lhs(2, s)), side(ops.k(s, Sign::Plus), kTwoPi), {}, {}};
      });
      break;
    case IdentityId::Theorem3_1:
      over_grid(kTwoPi * kTwoPi, [ch, ops](double s) {
        return PointEval{side(ch.theorem3_lhs(1, s)),
                         side(ops.k(cplx(0.0, -s), Sign::Plus), kTwoPi * kTwoPi), {}, {}};
      });
      break;
    case IdentityId::Theorem3_2:
      over_grid(kTwoPi * kTwoPi, [ch, ops](double s) {
        return PointEval{side(ch.theorem3_lhs(2, s)), side(ops.k(s, Sign::Plus), kTwoPi * kTwoPi), {}, {}};
      });
      break;
    case IdentityId::Theorem4:
      over_grid(kTwoPi, [ch, ops](double x) {
        return PointEval{side(ch.f_minus_l_f_plus_k(x), 1.0 / kI), side(ops.k_direct(x, Sign::Plus), kTwoPi),
                         {}, {}};
      });
      break;
    case IdentityId::Theorem5_1:
      over_grid(2.0, [ch, ops](double s) {
        return PointEval{side(ops.double_laplace(s)), side(ch.theorem5_rhs(s)), {}, {}};
      });
      break;
    case IdentityId::QuickInverse: {
      p.context_names = {"stehfest_rel_error", "talbot_rel_error"};
      const TestFunction f = s_;
      over_grid(1.0, [q = quick_, f, ops](double s) {
        const double ref = f.s_eval(s);
        auto rel = [ref](double est) {
          const double d = std::abs(est - ref);
          return std::abs(ref) > kReferenceFloor ? d / std::abs(ref) : d;
        };
        std::function<double(double)> t;
        if (f.closed_laplace) {
          t = *f.closed_laplace;
        } else {
          t = [ops](double y) { return ops.laplace(y).value.real(); };
        }
        const double gs = rel(gaver_stehfest(t, s, 14));
        const double tb = f.closed_laplace_complex ? rel(talbot(*f.closed_laplace_complex, s, 32))
                                                   : std::numeric_limits<double>::quiet_NaN();
        return PointEval{side(q(s)), Side{cplx{ref}, 0.0, true}, {gs, tb}, {}};
      });
      break;
    }
    case IdentityId::Prop1:
      p.head.grid = cfg_.prop1_eps;
      p.head.tol = cfg_.prop1_tol;
      for (double eps : cfg_.prop1_eps) {
        p.points.push_back([ops, eps, qc, scale] {
          const QuadResult r = integrate_oscillatory([ops](double t) { return ops.z(t, Sign::Plus); },
                                                     OscKind::Sin, eps, qc, scale);
          return PointEval{side(r), {}, {}, {}};
        });
      }
      break;
    case IdentityId::Prop2: {
      p.head.grid = cfg_.prop2_radii;
      p.context_names = {"alpha", "alpha_err"};
      for (double radius : cfg_.prop2_radii) {
        p.points.push_back([ops, radius, qc] {
          auto both = [ops](double x) {
            const Sample a = ops.k_line(x);
            const Sample b = ops.k_line(-x);
            return Sample{cplx{std::abs(a.value) + std::abs(b.value)}, a.err + b.err};
          };
          const QuadResult r = integrate_interval(both, 0.0, radius, qc);
          // Least-squares slope of log g against log x on [R/2, R].
          constexpr int kFitPoints = 17;
          double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, worst = 0.0;
          for (int j = 0; j < kFitPoints; ++j) {
            const double x = 0.5 * radius * std::pow(2.0, static_cast<double>(j) / (kFitPoints - 1));
            const Sample g = both(x);
            const double lx = std::log(x);
            const double ly = std::log(g.value.real());
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            worst = std::max(worst, g.err / g.value.real());
          }
          const double slope = (kFitPoints * sxy - sx * sy) / (kFitPoints * sxx - sx * sx);
          // A relative sample error e moves log g by e; over a window of
          // log-width ln 2 that bounds the slope error by 2e / ln 2.
          const double slope_err = 2.0 * worst / std::numbers::ln2;
          return PointEval{side(r), {}, {-slope, slope_err}, {}};
        });
      }
      p.finish = [](IdentityReport& r, std::vector<double>& le, std::vector<double>& re) {
        const std::size_t n = r.lhs.size();
        for (std::size_t i = 0; i < n; ++i) {
          r.rhs[i] = r.lhs[n - 1];
          re[i] = le[n - 1];
        }
      };
      break;
    }
    case IdentityId::Prop3:
      // The alternative representation is recorded as a cross-check.
      p.context_names = {"sign", "alt_re", "alt_im", "alt_err"};
      for (Sign sign : {Sign::Plus, Sign::Minus}) {
        p.head.grid.push_back(0.0);
        p.points.push_back([ops, sign] {
          const QuadResult alt = ops.k_alt(0.0, sign);
          return PointEval{side(ops.k_direct(0.0, sign)),
                           {},
                           {sign_value(sign), alt.value.real(), alt.value.imag(), alt.err_est},
                           {}};
        });
      }
      break;
    case IdentityId::Decay22: {
      const int n = cfg_.decay_points;
      for (int i = 0; i < n; ++i) {
        const double t = 10.0 + 90.0 * i / (n - 1);
        p.head.grid.push_back(t);
        p.points.push_back([ops, t] {
          const QuadResult z = ops.half_fourier(t, Sign::Plus);
          return PointEval{Side{cplx{std::abs(z.value) * t * t}, z.err_est * t * t, z.converged}, {}, {}, {}};
        });
      }
      p.finish = [](IdentityReport& r, std::vector<double>& le, std::vector<double>& re) {
        for (std::size_t i = 0; i < r.lhs.size(); ++i) {
          r.rhs[i] = 10.0 * r.lhs[0];
          re[i] = 10.0 * le[0];
        }
      };
      break;
    }
    case IdentityId::AdditionalTail: {
      p.head.grid = cfg_.tail_cutoffs;
      p.head.tol = cfg_.tail_tol;
      const double x = cfg_.tail_x;
      const RealFn f = s_.s_eval;
      for (double cut : cfg_.tail_cutoffs) {
        p.points.push_back([f, x, cut, qc, scale] {
          // int_0^inf S(v) int_N^inf e^{(-i x - v) t} dt dv
          const cplx phase = std::exp(cplx(0.0, -x * cut));
          const QuadResult r = integrate_decaying(
              [&](double v) { return f(v) * std::exp(-v * cut) * phase / cplx(v, x); },
              scale / (1.0 + cut * scale), qc);
          return PointEval{side(r), {}, {}, {}};
        });
      }
      break;
    }
  }
  return p;
}

namespace {

IdentityReport assemble(const Verifier::Plan& plan, std::vector<PointEval>&& evals) {
  IdentityReport r = plan.head;
  const std::size_t n = evals.size();
  std::vector<double> le(n), re(n);
  r.lhs.resize(n);
  r.rhs.resize(n);
  r.converged.resize(n);
  for (const std::string& name : plan.context_names) r.context.push_back({name, {}});
  for (std::size_t i = 0; i < n; ++i) {
    const PointEval& e = evals[i];
    r.lhs[i] = e.lhs.value;
    r.rhs[i] = e.rhs.value;
    le[i] = e.lhs.err;
    re[i] = e.rhs.err;
    r.converged[i] = e.lhs.converged && e.rhs.converged && e.error.empty();
    for (std::size_t c = 0; c < r.context.size(); ++c) {
      r.context[c].values.push_back(c < e.context.size() ? e.context[c]
                                                         : std::numeric_limits<double>::quiet_NaN());
    }
    if (!e.error.empty()) {
      r.errors.push_back("point " + std::to_string(i) + ": " + e.error);
    }
  }
  if (plan.finish) plan.finish(r, le, re);
  r.abs_resid.resize(n);
  r.rel_resid.resize(n);
  r.quad_error_budget.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    r.abs_resid[i] = std::abs(r.lhs[i] - r.rhs[i]);
    r.rel_resid[i] = r.abs_resid[i] / std::max(std::abs(r.rhs[i]), r.floor);
    r.quad_error_budget[i] = le[i] + re[i];
  }
  fit_constant(r);
  r.verdict = recompute_verdict(r);
  return r;
}

}  // namespace

std::vector<IdentityReport> run_suite(const std::vector<IdentityId>& identities,
                                      const std::vector<TestFunction>& functions,
                                      const VerifyConfig& cfg, int workers) {
  cfg.validate();
  if (workers < 1) throw InvalidConfig("worker count must be >= 1");
  std::vector<IdentityId> ids = identities;
  std::ranges::sort(ids);
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::vector<const TestFunction*> fns;
  for (const TestFunction& f : functions) fns.push_back(&f);
  std::ranges::stable_sort(fns, {}, [](const TestFunction* f) { return f->id; });

  std::vector<Verifier> verifiers;
  verifiers.reserve(fns.size());
  for (const TestFunction* f : fns) verifiers.emplace_back(*f, cfg);

  std::vector<Verifier::Plan> plans;
  for (IdentityId id : ids) {
    for (const Verifier& v : verifiers) plans.push_back(v.plan(id));
  }
  struct Task {
    std::size_t plan, point;
  };
  std::vector<Task> tasks;
  std::vector<std::vector<PointEval>> evals(plans.size());
  for (std::size_t i = 0; i < plans.size(); ++i) {
    evals[i].resize(plans[i].points.size());
    for (std::size_t j = 0; j < plans[i].points.size(); ++j) tasks.push_back({i, j});
  }

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < tasks.size(); k = next++) {
      const Task& t = tasks[k];
      evals[t.plan][t.point] = guarded(plans[t.plan].points[t.point]);
    }
  };
  const int n_threads = static_cast<int>(std::min<std::size_t>(workers, std::max<std::size_t>(tasks.size(), 1)));
  if (n_threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(work);
  }

  std::vector<IdentityReport> out;
  out.reserve(plans.size());
  for (std::size_t i = 0; i < plans.size(); ++i) out.push_back(assemble(plans[i], std::move(evals[i])));
  return out;
}

}  // namespace quickinv
