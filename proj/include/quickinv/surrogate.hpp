#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "quickinv/quad.hpp"

namespace quickinv {

struct SurrogateOptions {
  // Length scale L of the map u = x / (x + L) from [0, inf) onto [0, 1).
  double scale = 1.0;
  // The interpolated quantity is f(x) * (1 + x / L)^weight_power, so that a
  // function decaying like x^-weight_power stays bounded and smooth at u = 1.
  int weight_power = 0;
  // Chebyshev points (first kind) per piece.
  int degree = 20;
  double rel_tol = 1e-11;
  // Maximum number of evaluations of f during construction.
  std::int64_t budget = 200000;
  // Pieces narrower than this (in u) that still fail the test are evaluated
  // directly at query time.
  double min_width = 1e-12;
};

// Piecewise Chebyshev interpolant of a function on [0, inf), refined by
// bisection in the mapped variable. Immutable and cheap to copy once built.
class Surrogate {
 public:
  Surrogate() = default;

  // Throws BudgetExceeded when refinement needs more than opt.budget samples.
  static Surrogate build(SampleFn f, const SurrogateOptions& opt);

  // Value and absolute error bound (interpolation plus inherited sample
  // error). Throws DomainError for negative x.
  Sample operator()(double x) const;
  cplx value(double x) const { return (*this)(x).value; }

  std::int64_t n_evals() const { return n_evals_; }
  std::size_t n_pieces() const;
  std::size_t n_direct() const;
  const SurrogateOptions& options() const { return opt_; }

 private:
  struct Piece {
    double a = 0.0;
    double b = 0.0;
    std::vector<cplx> coef;
    // Interpolation error bound in the weighted variable.
    double err = 0.0;
    // Sample errors (unweighted) at the Chebyshev nodes.
    std::vector<double> node_err;
    bool direct = false;
  };

  double weight(double x) const;
  double inherited(const Piece& p, double t) const;

  SurrogateOptions opt_{};
  std::vector<double> nodes_;
  std::shared_ptr<const std::vector<Piece>> pieces_;
  SampleFn f_;
  std::int64_t n_evals_ = 0;
};

// Surrogate with default options at the given scale and sample budget.
Surrogate surrogate_build(const SampleFn& f, double decay_scale,
                          std::int64_t budget);

}  // namespace quickinv
