#pragma once

#include <Eigen/Core>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "rns/errors.hpp"
#include "rns/norms.hpp"

namespace rns {

// Thermodynamic and transport constants of the gamma-law reacting mixture:
// p = a*theta/v, e = c_v*theta, E = e + u^2/2 + q*z.
struct GasParameters {
  double a = 0.4;        // pressure constant
  double c_v = 1.0;      // specific heat at constant volume
  double mu = 1.0;       // bulk viscosity
  double nu = 2.0;       // heat conductivity
  double diff = 10.0 / 7.0;  // reactant diffusivity D
  double rate_k = 1.0;   // reaction rate coefficient K
  double heat_q = 0.5;   // heat difference q between reactant and product

  double c_p() const { return c_v + a; }
  double gamma() const { return c_p() / c_v; }
  double prandtl() const { return mu * c_p() / nu; }
  double lewis() const { return nu / (c_p() * diff); }  // at v = 1

  // Pr < 1, Le*gamma > 1 and Pr*Le < 1, i.e. the high-frequency ordering of
  // the viscous/thermal/reactant diffusion scales holds.
  bool well_ordered() const {
    return prandtl() < 1.0 && nu / (c_v * diff) > 1.0 && mu / diff < 1.0;
  }
  void validate() const;
};

GasParameters default_parameters();

// Background constant state (v, u, E, z) with the derived pressure partials
// used throughout the frequency-domain analysis.
struct LinearizationPoint {
  double v_bar = 1.0;
  double u_bar = 0.0;
  double E_bar = 1.0;
  double z_bar = 0.0;

  double theta_bar = 1.0;
  double p = 0.0;        // a*theta/v
  double p_v = 0.0;      // -p/v
  double p_e = 0.0;      // a/(c_v v)
  double theta_e = 0.0;  // 1/c_v
  double sound_speed = 0.0;  // sqrt(p*p_e - p_v)
};

LinearizationPoint linearize(const GasParameters& params, double v_bar,
                             double u_bar, double E_bar, double z_bar);

inline LinearizationPoint equilibrium_point(const GasParameters& params) {
  return linearize(params, 1.0, 0.0, params.c_v, 0.0);
}

// Reaction rate function phi(theta) >= 0, Lipschitz on [0, theta_max].
struct ReactionRate {
  enum class Kind { ClippedArrhenius, IgnitionRamp, Constant };
  Kind kind = Kind::ClippedArrhenius;
  double activation = 2.0;    // A in exp(-A/max(theta, floor))
  double theta_floor = 0.1;
  double theta_ignition = 1.0;  // ramp start
  double ramp_width = 0.5;      // ramp length w
  double constant_value = 1.0;
  double theta_max = 10.0;

  double operator()(double theta) const;
  double lipschitz_bound() const;
};

struct GridSpec {
  double half_width = 8.0;  // domain [-L, L]
  int cells = 512;
  Boundary boundary = Boundary::Periodic;

  double dx() const { return 2.0 * half_width / cells; }
  double x(int i) const { return -half_width + (i + 0.5) * dx(); }
  ArrayXd x_array() const {
    ArrayXd xs(cells);
    for (int i = 0; i < cells; ++i) xs[i] = x(i);
    return xs;
  }
  void validate() const;
};

// Grid samples of the physical fields (v, u, theta, z) at one time.
struct FieldState {
  double time = 0.0;
  ArrayXd v, u, theta, z;
  std::vector<JumpSpec> v_jumps;

  void validate() const;  // v > 0, theta > 0, z >= -1e-12
};

struct InitialData {
  GridSpec grid;
  ArrayXd v0, u0, theta0, z0;
  std::vector<JumpSpec> v_jumps;

  double delta_hat = 0.0;   // full smallness sum, = 2 at exact equilibrium
  double delta_pert = 0.0;  // perturbation-only part, = 0 at equilibrium

  FieldState initial_state() const;
};

// The initial-data smallness sum
//   ||v0-1||_L1 + ||v0||_BV + ||u0||_L1 + ||u0||_BV
//   + ||theta0-1||_L1 + ||theta0||_BV + ||z0||_L1 + ||z0||_BV.
// Constant equilibrium contributes exactly 2 through the sup-norm parts of
// ||v0||_BV and ||theta0||_BV.
double smallness_measure(const InitialData& data);

// Same sum evaluated on the perturbations (v0-1, u0, theta0-1, z0); exactly
// positively homogeneous in the perturbation amplitude.
double smallness_perturbation(const InitialData& data);

// Fills delta_hat/delta_pert.
void measure_smallness(InitialData& data);

}  // namespace rns
