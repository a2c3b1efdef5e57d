#pragma once

#include <memory>

#include "quickinv/xform.hpp"

namespace quickinv {

// Operator compositions from the identities under test. Stage functions are
// surrogate-cached on [0, inf) on first use. Negative half-lines follow the
// K(-s) = -K-(s) rule for K-type stages and K(-ix) -> K(i|x|) for the
// Laplace image of F+ K.
//
// Stage names:
//   theorem1_inner(t) = F+[K(i.)](t),  K = L S
//   fk(u)             = F+ K (u)
//   gk(t)             = F- [K(-i.)](t) = F+ [K(i.)](t)
//   lgk(x)            = L gk (x), extended to x < 0 by -conj(lgk(|x|))
//   flgk(u)           = F+ lgk (u)
//   lfk(x)            = L fk (x), extended to x < 0 by 2 pi K(i|x|)
//   flfk(t)           = F- lfk (t)
class Chains {
 public:
  explicit Chains(Operators ops);

  const Operators& ops() const { return ops_; }

  Sample theorem1_inner(double t) const;
  Sample fk(double u) const;
  Sample gk(double t) const;
  Sample lgk_line(double x) const;
  Sample flgk(double u) const;
  Sample lfk_line(double x) const;
  Sample flfk(double t) const;

  // Direct (uncached) evaluations of the outermost stages at one point.
  QuadResult theorem1_lhs(double s) const;    // L F+ [K(i.)]
  QuadResult theorem2_lhs(int part, double s) const;  // L F+ K  |  L F- K(-i.)
  QuadResult theorem3_lhs(int part, double s) const;  // L F+ L F+ K(i.) | L F- L F+ K
  QuadResult f_minus_l_f_plus_k(double x) const;      // F- L F+ K at one point
  QuadResult f_minus_l_f_plus_k(double x, const QuadConfig& cfg) const;
  // 2 int_0^inf sin(s t) (Fc S)(t) dt
  QuadResult theorem5_rhs(double s) const;

 private:
  struct State;
  Operators ops_;
  std::shared_ptr<State> state_;
};

}  // namespace quickinv
