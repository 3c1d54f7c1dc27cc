#include "rns/heatkernel.hpp"

#include <algorithm>
#include <cmath>

namespace rns {

double ConductivityField::value(double x, double t) const {
  double f = profile ? profile(x, t) : mean;
  for (const auto& j : jumps)
    if (x > j.position) f += j.size;
  return f;
}

ArrayXd ConductivityField::sample(const GridSpec& grid, double t) const {
  ArrayXd f(grid.cells);
  for (int i = 0; i < grid.cells; ++i) f[i] = value(grid.x(i), t);
  return f;
}

ConductivityField constant_conductivity(double c) {
  ConductivityField f;
  f.mean = c;
  return f;
}

ConductivityReport check_conductivity(const ConductivityField& f,
                                      const GridSpec& grid, double t0, double t1,
                                      double delta_star) {
  ConductivityReport rep;
  rep.inf_f = 1e300;
  const int nt = 9;
  for (int k = 0; k <= nt; ++k) {
    const double t = t0 + (t1 - t0) * k / nt;
    const ArrayXd fc = f.sample(grid, t);
    rep.inf_f = std::min(rep.inf_f, fc.minCoeff());
    const auto nr = bv_norm(fc, grid.dx(), -grid.half_width, f.jumps, grid.boundary);
    rep.bv = std::max(rep.bv, nr.bv_continuous_part + nr.bv_jump_part);
    rep.l1_dev = std::max(rep.l1_dev, l1_norm(fc - f.mean, grid.dx()));
  }
  rep.small = rep.bv <= delta_star && rep.l1_dev <= delta_star;
  return rep;
}

namespace {

// Tridiagonal solve (Thomas); b is the diagonal, a sub-, c super-diagonal.
void solve_tridiag(std::vector<double>& a, std::vector<double>& b,
                   std::vector<double>& c, ArrayXd& d) {
  const int n = static_cast<int>(d.size());
  for (int i = 1; i < n; ++i) {
    const double m = a[i] / b[i - 1];
    b[i] -= m * c[i - 1];
    d[i] -= m * d[i - 1];
  }
  d[n - 1] /= b[n - 1];
  for (int i = n - 2; i >= 0; --i) d[i] = (d[i] - c[i] * d[i + 1]) / b[i];
}

}  // namespace

void implicit_diffusion_step(ArrayXd& w, const ArrayXd& coef_cells, double dt,
                             double dx, Boundary bc, const ArrayXd* src) {
  const int n = static_cast<int>(w.size());
  const double r = dt / (dx * dx);
  auto harmonic = [&](int i, int j) {
    const double fi = coef_cells[i], fj = coef_cells[j];
    return 2.0 * fi * fj / (fi + fj);
  };
  ArrayXd rhs = w;
  if (src) rhs += dt * (*src);

  std::vector<double> sub(n, 0.0), diag(n, 1.0), sup(n, 0.0);
  std::vector<double> face(n, 0.0);  // face i between cells i and i+1 (wrap at n-1)
  for (int i = 0; i + 1 < n; ++i) face[i] = harmonic(i, i + 1);
  if (bc == Boundary::Periodic) face[n - 1] = harmonic(n - 1, 0);

  for (int i = 0; i < n; ++i) {
    const double fl = (i > 0) ? face[i - 1] : (bc == Boundary::Periodic ? face[n - 1] : 0.0);
    const double fr = (i + 1 < n) ? face[i] : (bc == Boundary::Periodic ? face[n - 1] : 0.0);
    diag[i] = 1.0 + r * (fl + fr);
    if (i > 0) sub[i] = -r * fl;
    if (i + 1 < n) sup[i] = -r * fr;
  }

  if (bc != Boundary::Periodic) {
    solve_tridiag(sub, diag, sup, rhs);
    w = rhs;
    return;
  }

  // Cyclic system via Sherman-Morrison with the wrap entries -r*face[n-1].
  const double corner = -r * face[n - 1];
  std::vector<double> b2 = diag;
  const double gamma = -b2[0];
  b2[0] -= gamma;
  b2[n - 1] -= corner * corner / gamma;
  ArrayXd u = ArrayXd::Zero(n);
  u[0] = gamma;
  u[n - 1] = corner;
  auto a1 = sub;
  auto c1 = sup;
  auto b1 = b2;
  solve_tridiag(a1, b1, c1, rhs);  // y
  a1 = sub;
  c1 = sup;
  b1 = b2;
  solve_tridiag(a1, b1, c1, u);  // q
  const double vy = rhs[0] + (corner / gamma) * rhs[n - 1];
  const double vq = u[0] + (corner / gamma) * u[n - 1];
  const double factor = vy / (1.0 + vq);
  w = rhs - factor * u;
}

KernelSolution solve_kernel(const ConductivityField& f, double y, double t0,
                            double t1, const GridSpec& grid) {
  grid.validate();
  if (!(t1 > t0)) throw Error("solve_kernel: need t1 > t0");
  const double dx = grid.dx();
  const double horizon = t1 - t0;
  if (std::sqrt(f.mean * horizon) < 8.0 * dx)
    throw UnderResolved("solve_kernel: grid must resolve sqrt(mean*(t1-t0)) by 8 cells");

  KernelSolution sol;
  sol.grid = grid;
  sol.y = y;
  sol.t0 = t0;
  sol.t1 = t1;
  sol.dx = dx;
  sol.coef_jumps = f.jumps;

  const double cap = dx * dx / (2.0 * f.mean);
  sol.steps = std::max(2, static_cast<int>(std::ceil(horizon / cap)));
  sol.dt = horizon / sol.steps;

  ArrayXd H = ArrayXd::Zero(grid.cells);
  const int iy = std::clamp(
      static_cast<int>(std::floor((y + grid.half_width) / dx)), 0, grid.cells - 1);
  H[iy] = 1.0 / dx;

  for (int m = 0; m < sol.steps; ++m) {
    const double t_new = t0 + (m + 1) * sol.dt;
    const ArrayXd coef = f.sample(grid, t_new);
    if (coef.minCoeff() <= 0.0)
      throw SingularConductivity("solve_kernel: conductivity must stay positive");
    implicit_diffusion_step(H, coef, sol.dt, dx, grid.boundary);
  }
  sol.H = H;
  return sol;
}

ArrayXd kernel_derivative(const KernelSolution& sol) {
  return derivative(sol.H, sol.dx, -sol.grid.half_width, sol.coef_jumps,
                    sol.grid.boundary);
}

double gaussian_envelope_fit(const KernelSolution& sol, double t_sharp) {
  const double tau = sol.t1 - sol.t0;
  if (tau > t_sharp) throw Error("gaussian_envelope_fit: horizon exceeds t_sharp");
  // Values this far below the peak are solver tail noise, not kernel content;
  // comparing them against the doubly-exponentially small envelope would let
  // round-off drive the fit.
  const double floor = 1e-14 * sol.H.maxCoeff();
  auto fits = [&](double c) {
    for (int i = 0; i < sol.grid.cells; ++i) {
      if (sol.H[i] <= floor) continue;
      const double r = sol.grid.x(i) - sol.y;
      const double env = c * std::exp(-r * r / (c * tau)) / std::sqrt(tau);
      if (sol.H[i] > env) return false;
    }
    return true;
  };
  double lo = 1.0, hi = 1.0;
  if (!fits(1.0)) {
    hi = 2.0;
    while (!fits(hi)) {
      hi *= 2.0;
      if (hi > 1e4) throw NoEnvelope("gaussian_envelope_fit: no envelope below 1e4");
    }
    lo = hi / 2.0;
  }
  while (hi - lo > 0.01) {
    const double mid = 0.5 * (lo + hi);
    (fits(mid) ? hi : lo) = mid;
  }
  return hi;
}

KernelComparison kernel_compare(const ConductivityField& fa,
                                const ConductivityField& fb, double y,
                                double t0, double t1, const GridSpec& grid) {
  const auto sa = solve_kernel(fa, y, t0, t1, grid);
  const auto sb = solve_kernel(fb, y, t0, t1, grid);
  KernelComparison cmp;
  cmp.sup_diff = (sa.H - sb.H).abs().maxCoeff();
  for (double t : {t0, 0.5 * (t0 + t1), t1})
    cmp.coef_diff = std::max(
        cmp.coef_diff, (fa.sample(grid, t) - fb.sample(grid, t)).abs().maxCoeff());
  cmp.ratio = cmp.coef_diff > 0.0
                  ? cmp.sup_diff * std::sqrt(t1 - t0) / cmp.coef_diff
                  : 0.0;
  return cmp;
}

double CutoffFunction::operator()(double s) const {
  if (s <= 1.0) return 1.0;
  if (s >= 2.0) return 0.0;
  const double u = s - 1.0;
  return 1.0 - u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

double CutoffFunction::derivative(double s) const {
  if (s <= 1.0 || s >= 2.0) return 0.0;
  const double u = s - 1.0;
  return -30.0 * u * u * (1.0 - u) * (1.0 - u);
}

ArrayXd blend_effective_kernel(const ArrayXd& h_slice, const ArrayXd& g_slice,
                               const CutoffFunction& cutoff, double nu0,
                               double t, double tau) {
  if (h_slice.size() != g_slice.size())
    throw GridMismatch("blend_effective_kernel: slices on different grids");
  if (!(nu0 > 0.0)) throw Error("blend_effective_kernel: nu0 must be positive");
  const double w = cutoff((t - tau) / nu0);
  return w * h_slice + (1.0 - w) * g_slice;
}

}  // namespace rns
