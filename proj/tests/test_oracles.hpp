#pragma once

// Test-only oracles, independent of the implementation paths they check.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "rns/spectral.hpp"

namespace rns::oracles {

// Adaptive step-doubling RK4 integration of d/dt G = E(eta) G, G(0) = I,
// with error-per-unit-time control; records G at the requested times.
inline std::vector<Matrix4cd> ode_greens(double eta, const SystemMatrices& sm,
                                         const std::vector<double>& ts,
                                         double tol_per_time = 1e-11) {
  const Matrix4cd E = symbol(eta, sm);
  Matrix4cd g = Matrix4cd::Identity();
  std::vector<Matrix4cd> out;
  double t = 0.0;
  const double enorm = E.cwiseAbs().maxCoeff() + 1e-30;
  double h = std::min(0.1 / enorm, ts.back() > 0 ? ts.back() : 1.0);
  size_t next = 0;
  auto rk4 = [&](const Matrix4cd& y, double dt) {
    const Matrix4cd k1 = E * y;
    const Matrix4cd k2 = E * (y + 0.5 * dt * k1);
    const Matrix4cd k3 = E * (y + 0.5 * dt * k2);
    const Matrix4cd k4 = E * (y + dt * k3);
    return (y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).eval();
  };
  while (next < ts.size()) {
    if (t >= ts[next] - 1e-15) {
      out.push_back(g);
      ++next;
      continue;
    }
    const double step = std::min(h, ts[next] - t);
    const Matrix4cd big = rk4(g, step);
    const Matrix4cd half = rk4(rk4(g, 0.5 * step), 0.5 * step);
    const double err = (big - half).cwiseAbs().maxCoeff() / 15.0;
    if (err > tol_per_time * step && step > 1e-14) {
      h = 0.5 * step;
      continue;
    }
    g = half + (half - big) / 15.0;
    t += step;
    if (err < tol_per_time * step / 64.0) h = step * 2.0;
  }
  return out;
}

}  // namespace rns::oracles
