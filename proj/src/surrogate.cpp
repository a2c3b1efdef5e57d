#include "quickinv/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <numbers>

#include "quickinv/errors.hpp"

namespace quickinv {

namespace {

constexpr int kInitialPieces = 8;
// Relative position of the off-node check point inside a piece.
constexpr double kCheckPosition = 0.3819660112501051;
// Below this width (in u) an endpoint mismatch no longer forces bisection;
// it is carried in the piece's error instead.
constexpr double kEndpointWidth = 1e-6;
// Relative offset of the endpoint check from the left end of a piece.
constexpr double kEndOffset = 1e-4;
// Sample errors are taken to vary smoothly, so the inherited error at a query
// point is this multiple of the larger error at the two bracketing nodes.
constexpr double kInheritedSafety = 2.0;

double clenshaw_arg(double u, double a, double b) {
  return std::clamp((2.0 * u - a - b) / (b - a), -1.0, 1.0);
}

cplx clenshaw(const std::vector<cplx>& c, double t) {
  cplx b1{};
  cplx b2{};
  for (std::size_t k = c.size(); k-- > 1;) {
    const cplx b0 = 2.0 * t * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + c[0];
}

}  // namespace

double Surrogate::weight(double x) const {
  if (opt_.weight_power == 0) return 1.0;
  return std::pow(1.0 + x / opt_.scale, opt_.weight_power);
}

Surrogate Surrogate::build(SampleFn f, const SurrogateOptions& opt) {
  if (!(opt.scale > 0.0) || !std::isfinite(opt.scale) || opt.degree < 4 ||
      !(opt.rel_tol > 0.0) || opt.weight_power < 0 || opt.budget < 1 ||
      !(opt.min_width > 0.0)) {
    throw InvalidConfig("invalid surrogate options");
  }
  Surrogate s;
  s.opt_ = opt;
  s.f_ = std::move(f);

  const int n = opt.degree;
  s.nodes_.resize(n);
  for (int j = 0; j < n; ++j) s.nodes_[j] = std::cos(std::numbers::pi * (j + 0.5) / n);
  const std::vector<double>& cos_nodes = s.nodes_;

  struct Candidate {
    Piece piece;
    double interp_err = 0.0;
    double end_err = 0.0;
    // Smallest weighted sample error over the nodes.
    double inner_min = std::numeric_limits<double>::infinity();
    double scale = 0.0;
  };

  auto sample = [&](double u, double& err) {
    if (++s.n_evals_ > opt.budget) {
      throw BudgetExceeded("surrogate construction exceeded its sample budget");
    }
    const double x = opt.scale * u / (1.0 - u);
    const Sample v = s.f_(x);
    err = v.err;
    return v.value * s.weight(x);
  };

  auto fit = [&](double a, double b) {
    Candidate c;
    c.piece.a = a;
    c.piece.b = b;
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::vector<cplx> h(n);
    c.piece.node_err.assign(n, 0.0);
    for (int j = 0; j < n; ++j) {
      const double u = mid + half * cos_nodes[j];
      h[j] = sample(u, c.piece.node_err[j]);
      c.inner_min = std::min(c.inner_min, c.piece.node_err[j] * s.weight(opt.scale * u / (1.0 - u)));
      c.scale = std::max(c.scale, std::abs(h[j]));
    }
    c.piece.coef.assign(n, cplx{});
    cplx mean{};
    for (int j = 0; j < n; ++j) mean += h[j];
    mean /= static_cast<double>(n);
    c.piece.coef[0] = mean;
    for (int k = 1; k < n; ++k) {
      cplx sum{};
      for (int j = 0; j < n; ++j) {
        sum += (h[j] - mean) * std::cos(std::numbers::pi * k * (j + 0.5) / n);
      }
      c.piece.coef[k] = sum * (2.0 / n);
    }
    double unused = 0.0;
    const double tail = std::abs(c.piece.coef[n - 1]) + std::abs(c.piece.coef[n - 2]);
    const double uc = a + kCheckPosition * (b - a);
    const cplx hc = sample(uc, unused);
    c.interp_err = std::max(2.0 * tail, std::abs(hc - clenshaw(c.piece.coef, clenshaw_arg(uc, a, b))));
    // Just inside the left end, outside the node span: exposes endpoint
    // singularities such as x log x at the origin. The end itself is avoided
    // because a transform may jump there (a symmetric value at 0 against
    // its right limit).
    const double ua = a + kEndOffset * (b - a);
    double ea = 0.0;
    const cplx ha = sample(ua, ea);
    c.end_err = std::max(0.0, std::abs(ha - clenshaw(c.piece.coef, clenshaw_arg(ua, a, b))) -
                                  ea * s.weight(opt.scale * ua / (1.0 - ua)));
    c.scale = std::max({c.scale, std::abs(hc), std::abs(ha)});
    return c;
  };

  std::deque<Candidate> queue;
  double global_scale = 0.0;
  for (int i = 0; i < kInitialPieces; ++i) {
    queue.push_back(fit(static_cast<double>(i) / kInitialPieces,
                        static_cast<double>(i + 1) / kInitialPieces));
    global_scale = std::max(global_scale, queue.back().scale);
  }

  std::vector<Piece> done;
  while (!queue.empty()) {
    Candidate c = std::move(queue.front());
    queue.pop_front();
    // Interpolation need not beat the noise already in the samples.
    const double target =
        std::max({opt.rel_tol * c.scale, 4.0 * c.inner_min,
                  16.0 * std::numeric_limits<double>::epsilon() * global_scale});
    const double width = c.piece.b - c.piece.a;
    c.piece.err = std::max(c.interp_err, c.end_err);
    if (c.interp_err <= target && (c.end_err <= target || width < kEndpointWidth)) {
      done.push_back(std::move(c.piece));
      continue;
    }
    const double mid = 0.5 * (c.piece.a + c.piece.b);
    if (0.5 * width < opt.min_width) {
      c.piece.direct = true;
      c.piece.coef.clear();
      c.piece.node_err.clear();
      done.push_back(std::move(c.piece));
      continue;
    }
    queue.push_back(fit(c.piece.a, mid));
    queue.push_back(fit(mid, c.piece.b));
  }
  std::sort(done.begin(), done.end(), [](const Piece& l, const Piece& r) { return l.a < r.a; });
  s.pieces_ = std::make_shared<const std::vector<Piece>>(std::move(done));
  return s;
}

Sample Surrogate::operator()(double x) const {
  if (!(x >= 0.0)) throw DomainError("surrogate argument must be nonnegative");
  if (!pieces_) throw EvaluationError("surrogate used before construction");
  const double u = std::isinf(x) ? 1.0 : x / (x + opt_.scale);
  const auto& ps = *pieces_;
  auto it = std::upper_bound(ps.begin(), ps.end(), u,
                             [](double v, const Piece& p) { return v < p.a; });
  const Piece& p = *std::prev(it);
  if (p.direct) return f_(x);
  const double w = weight(x);
  const double t = clenshaw_arg(u, p.a, p.b);
  const cplx h = clenshaw(p.coef, t);
  if (std::isinf(w)) return {cplx{}, 0.0};
  return {h / w, p.err / w + inherited(p, t)};
}

// Inherited sample error near t, from the nodes bracketing it.
double Surrogate::inherited(const Piece& p, double t) const {
  // Nodes run from +1 down to -1.
  const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t, std::greater<>());
  const std::size_t j = static_cast<std::size_t>(it - nodes_.begin());
  double e = 0.0;
  if (j < nodes_.size()) e = p.node_err[j];
  if (j > 0) e = std::max(e, p.node_err[j - 1]);
  return kInheritedSafety * e;
}

std::size_t Surrogate::n_pieces() const { return pieces_ ? pieces_->size() : 0; }

std::size_t Surrogate::n_direct() const {
  if (!pieces_) return 0;
  return static_cast<std::size_t>(
      std::count_if(pieces_->begin(), pieces_->end(), [](const Piece& p) { return p.direct; }));
}

Surrogate surrogate_build(const SampleFn& f, double decay_scale, std::int64_t budget) {
  SurrogateOptions opt;
  opt.scale = decay_scale;
  opt.budget = budget;
  return Surrogate::build(f, opt);
}

}  // namespace quickinv
