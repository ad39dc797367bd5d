#pragma once

#include "symclass/liealg.hpp"

namespace symclass::symmetry {

/// Complex-valued potential V(t, x); a plain expression, possibly opaque.
using Potential = Expr;

/// Classifying residual for Q = D(xi) + G(chi) + lam*M against V:
///   R = xi V_t + (xi_t x / 2 + chi) V_x + xi_t V
///       - xi_ttt x^2 / 8 - chi_tt x / 2 - (i/4) xi_tt - lam_t.
/// Q is a Lie symmetry of the equation with potential V iff R == 0.
inline Expr residual(const Potential& v, const lie::AlgebraElement& q) {
  Expr xi_t = diff(q.xi, Var::T);
  Expr xi_tt = diff(xi_t, Var::T);
  Expr xi_ttt = diff(xi_tt, Var::T);
  Expr chi_tt = diff(diff(q.chi, Var::T), Var::T);
  Expr lam_t = diff(q.lam, Var::T);
  Expr x = Expr::x();
  return q.xi * diff(v, Var::T) + (Expr::rational(1, 2) * xi_t * x + q.chi) * diff(v, Var::X) +
         xi_t * v - Expr::rational(1, 8) * xi_ttt * x * x -
         Expr::rational(1, 2) * chi_tt * x -
         Expr::rational(1, 4) * Expr::i() * xi_tt - lam_t;
}

inline ZeroDecision is_symmetry_detailed(const Potential& v, const lie::AlgebraElement& q) {
  return is_zero_detailed(residual(v, q));
}

inline bool is_symmetry(const Potential& v, const lie::AlgebraElement& q) {
  return is_symmetry_detailed(v, q).zero;
}

}  // namespace symclass::symmetry
