#pragma once

#include <functional>
#include <vector>

#include "rns/errors.hpp"
#include "rns/params.hpp"

namespace rns {

// BV-in-x, time-dependent conductivity: a continuous profile (which includes
// the mean) plus Heaviside jumps at time-invariant positions.
struct ConductivityField {
  double mean = 1.0;
  std::function<double(double x, double t)> profile;  // defaults to mean
  std::vector<JumpSpec> jumps;
  // Optional handle bounding |f_t(., t)|; advisory only.
  std::function<double(double t)> time_derivative_bound;

  double value(double x, double t) const;
  ArrayXd sample(const GridSpec& grid, double t) const;
};

ConductivityField constant_conductivity(double c);

// Advisory check of the smallness hypotheses on f: reports the deviation
// norms and whether they sit below delta_star. Never throws.
struct ConductivityReport {
  double bv = 0.0;      // sup_t ||f(.,t)||_BV variation part + jumps
  double l1_dev = 0.0;  // sup_t ||f(.,t) - mean||_L1
  double inf_f = 0.0;
  bool small = false;
};
ConductivityReport check_conductivity(const ConductivityField& f,
                                      const GridSpec& grid, double t0, double t1,
                                      double delta_star);

// One implicit-Euler step of w_t = (coef w_x)_x + src with cell-sampled
// coefficient; interface conductivities are harmonic means, which keeps the
// flux continuous across coefficient jumps. Conservative: preserves the
// discrete mass of w exactly (periodic) or up to boundary flux (pad ends are
// zero-flux). The source, if given, is added explicitly.
void implicit_diffusion_step(ArrayXd& w, const ArrayXd& coef_cells, double dt,
                             double dx, Boundary bc,
                             const ArrayXd* src = nullptr);

struct KernelSolution {
  GridSpec grid;
  double y = 0.0;
  double t0 = 0.0;
  double t1 = 0.0;
  ArrayXd H;
  double dx = 0.0;
  double dt = 0.0;
  int steps = 0;
  std::vector<JumpSpec> coef_jumps;
};

// Fundamental solution of w_t = (f w_x)_x with delta data at y, realized as
// unit mass in the cell containing y and advanced by implicit Euler with the
// step capped at dx^2 / (2 mean f).
KernelSolution solve_kernel(const ConductivityField& f, double y, double t0,
                            double t1, const GridSpec& grid);

// Spatial derivative of H: centered away from conductivity jumps, one-sided
// at the jump faces.
ArrayXd kernel_derivative(const KernelSolution& sol);

// Smallest C >= 1 (bisection, resolution 0.01) with
//   H(x) <= C exp(-(x-y)^2 / (C (t1-t0))) / sqrt(t1-t0) on the grid.
double gaussian_envelope_fit(const KernelSolution& sol, double t_sharp = 0.25);

struct KernelComparison {
  double sup_diff = 0.0;   // sup_x |H^a - H^b| at t1
  double coef_diff = 0.0;  // sup |f^a - f^b| over the horizon
  double ratio = 0.0;      // sup_diff * sqrt(t1-t0) / coef_diff
};
KernelComparison kernel_compare(const ConductivityField& fa,
                                const ConductivityField& fb, double y,
                                double t0, double t1, const GridSpec& grid);

// Smooth monotone cutoff: 1 on (0,1], 0 on [2,inf), quintic ramp between,
// |X'| <= 15/8.
struct CutoffFunction {
  double nu0 = 1.0;

  double operator()(double s) const;
  double derivative(double s) const;
};

// Pointwise convex blend X((t-tau)/nu0) * H + (1 - X) * G of a short-time
// kernel slice and a long-time Green's-function slice on a shared grid.
ArrayXd blend_effective_kernel(const ArrayXd& h_slice, const ArrayXd& g_slice,
                               const CutoffFunction& cutoff, double nu0,
                               double t, double tau);

}  // namespace rns
