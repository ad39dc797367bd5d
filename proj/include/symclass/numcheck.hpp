#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "symclass/equiv.hpp"

namespace symclass::numcheck {

using CD = std::complex<double>;
using symmetry::Potential;

/// Space-time grid.  Periodic grids exclude the right spatial edge (the seam
/// x1 is identified with x0); Dirichlet grids include both edges.
struct Grid {
  double t0 = 0, t1 = 1, x0 = -10, x1 = 10;
  int nt = 64, nx = 64;
  enum class Boundary { Periodic, DirichletZero } boundary = Boundary::Periodic;

  Grid() = default;
  Grid(double t0_, double t1_, double x0_, double x1_, int nt_, int nx_,
       Boundary b = Boundary::Periodic)
      : t0(t0_), t1(t1_), x0(x0_), x1(x1_), nt(nt_), nx(nx_), boundary(b) {
    if (nt < 16 || nx < 16) throw std::invalid_argument("Grid: nt, nx >= 16 required");
    if (t1 <= t0 || x1 <= x0) throw std::invalid_argument("Grid: empty extent");
  }

  double dt() const { return (t1 - t0) / (nt - 1); }
  double dx() const {
    return boundary == Boundary::Periodic ? (x1 - x0) / nx : (x1 - x0) / (nx - 1);
  }
  double t_at(int j) const { return t0 + j * dt(); }
  double x_at(int k) const { return x0 + k * dx(); }
};

/// Complex field sampled on a grid, row-major [time][space].
struct FieldSample {
  Grid grid;
  std::vector<CD> values;  // size nt * nx

  CD at(int j, int k) const { return values[static_cast<size_t>(j) * grid.nx + k]; }
};

using Field = equiv::Field;

inline FieldSample sample_field(const Field& psi, const Grid& g) {
  FieldSample f;
  f.grid = g;
  f.values.resize(static_cast<size_t>(g.nt) * g.nx);
  for (int j = 0; j < g.nt; ++j)
    for (int k = 0; k < g.nx; ++k)
      f.values[static_cast<size_t>(j) * g.nx + k] = psi(g.t_at(j), g.x_at(k));
  return f;
}

namespace detail {

inline void check_finite(const FieldSample& f) {
  for (const CD& v : f.values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::domain_error("field sample contains non-finite values");
}

template <class Fn>
void parallel_rows(int j_lo, int j_hi, Fn&& fn) {
  unsigned hw = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  if (j_hi - j_lo < 32 || hw == 1) {
    for (int j = j_lo; j < j_hi; ++j) fn(j);
    return;
  }
  std::vector<std::thread> pool;
  int span = (j_hi - j_lo + static_cast<int>(hw) - 1) / static_cast<int>(hw);
  for (unsigned w = 0; w < hw; ++w) {
    int lo = j_lo + static_cast<int>(w) * span;
    int hi = std::min(j_hi, lo + span);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (int j = lo; j < hi; ++j) fn(j);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace detail

/// Max-abs residual of i psi_t + psi_xx + |psi|^2 psi + V psi over interior
/// nodes, with a 4th-order stencil in x and a 2nd-order stencil in t.
/// The potential is supplied as a callable; see the Expr overload below.
inline double pde_residual(const FieldSample& f, const std::function<CD(double, double)>& v) {
  detail::check_finite(f);
  const Grid& g = f.grid;
  const double dt = g.dt(), dx = g.dx();
  const bool periodic = g.boundary == Grid::Boundary::Periodic;
  const int k_lo = periodic ? 0 : 2;
  const int k_hi = periodic ? g.nx : g.nx - 2;
  std::vector<double> row_max(static_cast<size_t>(g.nt), 0.0);
  detail::parallel_rows(1, g.nt - 1, [&](int j) {
    double local = 0;
    const double t = g.t_at(j);
    for (int k = k_lo; k < k_hi; ++k) {
      auto wrap = [&](int kk) {
        if (periodic) return (kk % g.nx + g.nx) % g.nx;
        return kk;
      };
      CD um2 = f.at(j, wrap(k - 2)), um1 = f.at(j, wrap(k - 1));
      CD u0 = f.at(j, k);
      CD up1 = f.at(j, wrap(k + 1)), up2 = f.at(j, wrap(k + 2));
      CD psi_xx = (-um2 + 16.0 * um1 - 30.0 * u0 + 16.0 * up1 - up2) / (12.0 * dx * dx);
      CD psi_t = (f.at(j + 1, k) - f.at(j - 1, k)) / (2.0 * dt);
      CD val = CD(0, 1) * psi_t + psi_xx + std::norm(u0) * u0 + v(t, g.x_at(k)) * u0;
      local = std::max(local, std::abs(val));
    }
    row_max[j] = local;
  });
  return *std::max_element(row_max.begin(), row_max.end());
}

inline std::function<CD(double, double)> potential_field(const Potential& v) {
  return [v](double t, double x) { return eval_d(v, {t, 0}, {x, 0}); };
}

inline double pde_residual(const FieldSample& f, const Potential& v) {
  return pde_residual(f, potential_field(v));
}

inline double pde_residual(const Field& psi, const Potential& v, const Grid& g) {
  return pde_residual(sample_field(psi, g), v);
}

// -- named seed solutions -----------------------------------------------------

/// Bright soliton of the focusing cubic equation with V = 0:
/// psi = sqrt(2) a sech(a x) e^{i a^2 t}.
inline Field soliton(double a) {
  return [a](double t, double x) {
    return std::sqrt(2.0) * a / std::cosh(a * x) * std::exp(CD(0, a * a * t));
  };
}

/// Plane wave psi = a e^{i(kx + (a^2 - k^2) t)}; periodic when k is a
/// multiple of 2 pi / L.
inline Field plane_wave(double a, double k) {
  return [a, k](double t, double x) { return a * std::exp(CD(0, k * x + (a * a - k * k) * t)); };
}

// -- split-step solver ---------------------------------------------------------

namespace detail {

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

/// In-place iterative radix-2 FFT; inverse divides by n.
inline void fft(std::vector<CD>& a, bool inverse) {
  const size_t n = a.size();
  for (size_t j = 1, k = 0; j < n; ++j) {
    size_t bit = n >> 1;
    for (; k & bit; bit >>= 1) k ^= bit;
    k ^= bit;
    if (j < k) std::swap(a[j], a[k]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    double ang = 2 * M_PI / static_cast<double>(len) * (inverse ? 1 : -1);
    CD wl(std::cos(ang), std::sin(ang));
    for (size_t j = 0; j < n; j += len) {
      CD w(1);
      for (size_t k = 0; k < len / 2; ++k) {
        CD u = a[j + k], v = a[j + k + len / 2] * w;
        a[j + k] = u + v;
        a[j + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse)
    for (auto& z : a) z /= static_cast<double>(n);
}

/// Pointwise-exact flow of i psi_t + |psi|^2 psi + V psi = 0 over a step s:
/// |psi|^2 decays as e^{-2 Im(V) s}; the phase integrates in closed form.
inline CD nonlinear_step(CD psi, CD v, double s) {
  double rho0 = std::norm(psi);
  double b = v.imag();
  double integral_rho;
  if (std::abs(b) < 1e-14) {
    integral_rho = rho0 * s;
  } else {
    integral_rho = rho0 * (1.0 - std::exp(-2.0 * b * s)) / (2.0 * b);
  }
  return psi * std::exp(CD(0, 1) * (v * s + CD(integral_rho, 0)));
}

}  // namespace detail

/// Strang-split evolution: half nonlinear+potential step (pointwise exact),
/// full spectral linear step, half nonlinear+potential step.  Requires a
/// periodic grid with power-of-two nx and dt <= safety * dx^2 / pi.
/// Mass is conserved to round-off for real potentials.
inline FieldSample solve_split_step(const Potential& v, const std::vector<CD>& psi0,
                                    const Grid& g, double safety = 1.0) {
  if (g.boundary != Grid::Boundary::Periodic)
    throw std::invalid_argument("solve_split_step: periodic boundary required");
  if (!detail::is_power_of_two(g.nx))
    throw std::invalid_argument("solve_split_step: nx must be a power of two");
  if (psi0.size() != static_cast<size_t>(g.nx))
    throw std::invalid_argument("solve_split_step: psi0 size mismatch");
  const double dt = g.dt(), dx = g.dx();
  if (dt > safety * dx * dx / M_PI)
    throw std::invalid_argument("solve_split_step: time step exceeds the stability bound "
                                "dt <= safety * dx^2 / pi");

  // spectral multipliers exp(-i k^2 dt)
  const double L = g.x1 - g.x0;
  std::vector<CD> lin(static_cast<size_t>(g.nx));
  for (int m = 0; m < g.nx; ++m) {
    int mm = m < g.nx / 2 ? m : m - g.nx;
    double k = 2 * M_PI * mm / L;
    lin[m] = std::exp(CD(0, -k * k * dt));
  }

  // potential samples and time dependence
  std::vector<std::string> params;
  collect_params(v, params);
  if (!params.empty()) throw EvalError(EvalError::Kind::UnboundParam, "unbound parameter");
  bool v_static = !depends_on(v, Var::T);
  std::vector<CD> vrow(static_cast<size_t>(g.nx));
  auto fill_vrow = [&](double t) {
    for (int k = 0; k < g.nx; ++k) vrow[k] = eval_d(v, {t, 0}, {g.x_at(k), 0});
  };
  if (v_static) fill_vrow(g.t0);

  FieldSample out;
  out.grid = g;
  out.values.resize(static_cast<size_t>(g.nt) * g.nx);
  std::vector<CD> cur = psi0;
  std::copy(cur.begin(), cur.end(), out.values.begin());
  for (int j = 0; j + 1 < g.nt; ++j) {
    double t = g.t_at(j);
    if (!v_static) fill_vrow(t + dt / 4);
    for (int k = 0; k < g.nx; ++k) cur[k] = detail::nonlinear_step(cur[k], vrow[k], dt / 2);
    detail::fft(cur, false);
    for (int k = 0; k < g.nx; ++k) cur[k] *= lin[k];
    detail::fft(cur, true);
    if (!v_static) fill_vrow(t + 3 * dt / 4);
    for (int k = 0; k < g.nx; ++k) cur[k] = detail::nonlinear_step(cur[k], vrow[k], dt / 2);
    std::copy(cur.begin(), cur.end(), out.values.begin() + static_cast<size_t>(j + 1) * g.nx);
  }
  detail::check_finite(out);
  return out;
}

inline double mass(const FieldSample& f, int j) {
  double m = 0;
  for (int k = 0; k < f.grid.nx; ++k) m += std::norm(f.at(j, k));
  return m * f.grid.dx();
}

/// Residual of a sampled field against precomputed potential samples on the
/// same grid.
inline double pde_residual(const FieldSample& f, const FieldSample& vfield) {
  return pde_residual(f, [&vfield](double t, double x) {
    const Grid& g = vfield.grid;
    int j = static_cast<int>(std::lround((t - g.t0) / g.dt()));
    int k = static_cast<int>(std::lround((x - g.x0) / g.dx()));
    return vfield.at(j, k);
  });
}

/// Sample a transformed potential, computing the time-dependent pieces once
/// per row.
inline FieldSample sample_transformed_potential(const equiv::TransformedPotential& tv,
                                                const Grid& g) {
  FieldSample out;
  out.grid = g;
  out.values.resize(static_cast<size_t>(g.nt) * g.nx);
  for (int j = 0; j < g.nt; ++j) {
    CD t_old = tv.t_inv.eval_at<CD>(CD(g.t_at(j), 0));
    EvalPoint<CD> pt;
    pt.t = t_old;
    CD tt = eval(tv.t_deriv, pt);
    CD sq = std::sqrt(tt);
    CD Xv = eval(tv.x_shift, pt);
    CD a = eval(tv.a_ratio, pt);
    CD at = eval(tv.a_ratio_t, pt);
    CD xt = eval(tv.x_shift_t, pt);
    CD xtt = eval(tv.x_shift_tt, pt);
    CD psit = eval(tv.psi_t, pt);
    CD w = CD(double(tv.eps), 0) * xt / sq;
    CD wt = CD(double(tv.eps), 0) * (xtt - 0.5 * xt * a) / sq;
    for (int k = 0; k < g.nx; ++k) {
      CD x_old = (CD(g.x_at(k), 0) - Xv) / (CD(double(tv.eps), 0) * sq);
      pt.x = x_old;
      CD inner = eval(tv.v_ref, pt) + 0.125 * at * x_old * x_old + 0.5 * wt * x_old +
                 CD(0, 0.25) * a -
                 (0.25 * a * x_old + 0.5 * w) * (0.25 * a * x_old + 0.5 * w) + psit;
      out.values[static_cast<size_t>(j) * g.nx + k] = inner / tt;
    }
  }
  return out;
}

/// Residual of the transported solution against the transported potential,
/// evaluated on a grid in the new variables.
inline double transported_residual(const Field& seed, const Potential& v_src,
                                   const equiv::EquivTransform& g, const Grid& new_grid) {
  auto val = equiv::validate(g);
  if (!val.ok) throw std::invalid_argument("transported_residual: invalid transform");
  Field mapped = equiv::apply_to_solution(seed, g);
  equiv::TransformedPotential tv = equiv::apply_to_potential(v_src, g);
  FieldSample vf = sample_transformed_potential(tv, new_grid);
  return pde_residual(sample_field(mapped, new_grid), vf);
}

}  // namespace symclass::numcheck
