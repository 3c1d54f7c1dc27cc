#include "rns/params.hpp"

#include <algorithm>
#include <cmath>

namespace rns {

void GasParameters::validate() const {
  if (!(mu > 0.0) || !(nu > 0.0) || !(diff > 0.0))
    throw Error("transport coefficients mu, nu, D must be positive");
  if (!(c_v > 0.0) || !(a > 0.0)) throw Error("a and c_v must be positive");
  if (!(gamma() > 1.0)) throw Error("gamma must exceed 1");
  if (rate_k < 0.0 || heat_q < 0.0) throw Error("K and q must be nonnegative");
}

GasParameters default_parameters() {
  GasParameters p;  // defaults satisfy Pr = 0.7 < 1, nu/(c_v D) = 1.4 > 1, mu/D = 0.7 < 1
  p.validate();
  return p;
}

LinearizationPoint linearize(const GasParameters& params, double v_bar,
                             double u_bar, double E_bar, double z_bar) {
  if (!(v_bar > 0.0)) throw NonpositiveVolume("linearize: v_bar must be positive");
  const double e = E_bar - 0.5 * u_bar * u_bar - params.heat_q * z_bar;
  if (!(e > 0.0))
    throw NonpositiveInternalEnergy("linearize: internal energy must be positive");
  LinearizationPoint lp;
  lp.v_bar = v_bar;
  lp.u_bar = u_bar;
  lp.E_bar = E_bar;
  lp.z_bar = z_bar;
  lp.theta_bar = e / params.c_v;
  lp.p = params.a * lp.theta_bar / v_bar;
  lp.p_v = -lp.p / v_bar;
  lp.p_e = params.a / (params.c_v * v_bar);
  lp.theta_e = 1.0 / params.c_v;
  const double c2 = lp.p * lp.p_e - lp.p_v;
  if (!(c2 > 0.0)) throw Error("linearize: p*p_e - p_v must be positive");
  lp.sound_speed = std::sqrt(c2);
  return lp;
}

double ReactionRate::operator()(double theta) const {
  switch (kind) {
    case Kind::ClippedArrhenius:
      return std::exp(-activation / std::max(theta, theta_floor));
    case Kind::IgnitionRamp:
      return std::clamp((theta - theta_ignition) / ramp_width, 0.0, 1.0);
    case Kind::Constant:
      return constant_value;
  }
  return 0.0;
}

double ReactionRate::lipschitz_bound() const {
  switch (kind) {
    case Kind::ClippedArrhenius: {
      // |phi'| = exp(-A/theta) * A/theta^2 on [theta_floor, theta_max],
      // zero below the floor; scan for the maximum.
      double best = 0.0;
      const int n = 4096;
      for (int i = 0; i <= n; ++i) {
        const double th = theta_floor + (theta_max - theta_floor) * i / n;
        best = std::max(best, std::exp(-activation / th) * activation / (th * th));
      }
      return best;
    }
    case Kind::IgnitionRamp:
      return 1.0 / ramp_width;
    case Kind::Constant:
      return 0.0;
  }
  return 0.0;
}

void GridSpec::validate() const {
  if (cells < 16 || cells % 2 != 0) throw Error("grid: cells must be even and >= 16");
  if (!(half_width > 0.0)) throw Error("grid: half_width must be positive");
}

void FieldState::validate() const {
  if (v.size() == 0) throw Error("field state: empty arrays");
  if (v.minCoeff() <= 0.0) throw NonpositiveVolume("field state: v must stay positive");
  if (theta.minCoeff() <= 0.0) throw Error("field state: theta must stay positive");
  if (z.minCoeff() < -1e-12) throw Error("field state: z below -1e-12");
}

FieldState InitialData::initial_state() const {
  FieldState s;
  s.time = 0.0;
  s.v = v0;
  s.u = u0;
  s.theta = theta0;
  s.z = z0;
  s.v_jumps = v_jumps;
  return s;
}

double smallness_measure(const InitialData& data) {
  const double dx = data.grid.dx();
  const double xl = -data.grid.half_width;
  const auto bc = data.grid.boundary;
  const ArrayXd ones = ArrayXd::Ones(data.grid.cells);
  double s = 0.0;
  s += l1_norm(data.v0 - 1.0, dx) + bv_norm(data.v0, dx, xl, data.v_jumps, bc).bv_total;
  s += l1_norm(data.u0, dx) + bv_norm(data.u0, dx, xl, {}, bc).bv_total;
  s += l1_norm(data.theta0 - 1.0, dx) + bv_norm(data.theta0, dx, xl, {}, bc).bv_total;
  s += l1_norm(data.z0, dx) + bv_norm(data.z0, dx, xl, {}, bc).bv_total;
  return s;
}

double smallness_perturbation(const InitialData& data) {
  const double dx = data.grid.dx();
  const double xl = -data.grid.half_width;
  const auto bc = data.grid.boundary;
  double s = 0.0;
  s += l1_norm(data.v0 - 1.0, dx) +
       bv_norm(data.v0 - 1.0, dx, xl, data.v_jumps, bc).bv_total;
  s += l1_norm(data.u0, dx) + bv_norm(data.u0, dx, xl, {}, bc).bv_total;
  s += l1_norm(data.theta0 - 1.0, dx) +
       bv_norm(data.theta0 - 1.0, dx, xl, {}, bc).bv_total;
  s += l1_norm(data.z0, dx) + bv_norm(data.z0, dx, xl, {}, bc).bv_total;
  return s;
}

void measure_smallness(InitialData& data) {
  data.delta_hat = smallness_measure(data);
  data.delta_pert = smallness_perturbation(data);
}

}  // namespace rns
