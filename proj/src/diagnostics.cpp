#include "rns/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace rns {

double script_G(const FieldState& state, const GridSpec& grid) {
  const int n = grid.cells;
  if (state.v.size() != n || state.u.size() != n || state.theta.size() != n ||
      state.z.size() != n)
    throw MissingDerivatives("script_G: state arrays missing or on the wrong grid");
  const double dx = grid.dx();
  const double xl = -grid.half_width;
  const auto bc = grid.boundary;
  const double t = state.time;
  const double wt = std::sqrt(1.0 + t);
  const double st = std::sqrt(std::max(t, 0.0));

  const ArrayXd dv = state.v - 1.0;
  const ArrayXd dth = state.theta - 1.0;
  const ArrayXd ux = derivative(state.u, dx, xl, {}, bc);
  const ArrayXd thx = derivative(state.theta, dx, xl, {}, bc);
  const ArrayXd zx = derivative(state.z, dx, xl, {}, bc);

  double g = 0.0;
  g += wt * (linf_norm(dv) + linf_norm(state.u) + linf_norm(dth) + linf_norm(state.z));
  g += l1_norm(dv, dx) + l1_norm(state.u, dx) + l1_norm(dth, dx) + l1_norm(state.z, dx);
  g += bv_norm(dv, dx, xl, state.v_jumps, bc).bv_total;
  g += bv_norm(state.u, dx, xl, {}, bc).bv_total;
  g += bv_norm(dth, dx, xl, {}, bc).bv_total;
  g += bv_norm(state.z, dx, xl, {}, bc).bv_total;
  g += st * (linf_norm(ux) + linf_norm(thx) + linf_norm(zx));
  return g;
}

MassLedger mass_ledger(const Trajectory& traj, double nu0) {
  MassLedger led;
  led.times = traj.times;
  led.mass = traj.mass;
  led.burn_rate = traj.burn_rate;
  led.cumulative = traj.cumulative_burn;
  if (traj.mass.empty()) return led;
  const double m0 = traj.mass.front();
  for (size_t k = 0; k < traj.mass.size(); ++k) {
    led.balance_defect = std::max(
        led.balance_defect, std::abs(traj.mass[k] + traj.cumulative_burn[k] - m0));
    const double tau = traj.times[k];
    if (tau >= nu0) {
      led.sup_weighted_burn =
          std::max(led.sup_weighted_burn, (1.0 + tau) * traj.burn_rate[k]);
      if (k > 0 && traj.times[k - 1] >= nu0)
        led.max_increase =
            std::max(led.max_increase, traj.burn_rate[k] - traj.burn_rate[k - 1]);
    }
  }
  return led;
}

DecayFit decay_fit(const std::vector<double>& times,
                   const std::vector<double>& values) {
  std::vector<double> lt, lv;
  for (size_t i = 0; i < times.size(); ++i)
    if (times[i] > 0.0 && values[i] > 0.0) {
      lt.push_back(std::log(times[i]));
      lv.push_back(std::log(values[i]));
    }
  DecayFit fit;
  fit.samples = static_cast<int>(lt.size());
  if (fit.samples < 8)
    throw InsufficientSpan("decay_fit: need at least 8 positive samples");
  const auto [lo, hi] = std::minmax_element(lt.begin(), lt.end());
  fit.t_lo = std::exp(*lo);
  fit.t_hi = std::exp(*hi);
  if (*hi - *lo < std::log(10.0) - 1e-12)
    throw InsufficientSpan("decay_fit: samples must span a decade");

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = fit.samples;
  for (int i = 0; i < n; ++i) {
    sx += lt[i];
    sy += lv[i];
    sxx += lt[i] * lt[i];
    sxy += lt[i] * lv[i];
  }
  const double denom = n * sxx - sx * sx;
  fit.exponent = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.exponent * sx) / n;
  double ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = lv[i] - (fit.intercept + fit.exponent * lt[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

StabilityReport stability_probe(const InitialData& data_a,
                                const InitialData& data_b, double t_end,
                                const GasParameters& params,
                                const ReactionRate& rate, int snapshots) {
  if (data_a.delta_pert > 0.05 || data_b.delta_pert > 0.05)
    throw Error("stability_probe: both data must have perturbation <= 0.05");
  const double dx = data_a.grid.dx();
  const double xl = -data_a.grid.half_width;
  const auto bc = data_a.grid.boundary;

  StabilityReport rep;
  const ArrayXd dv0 = data_a.v0 - data_b.v0;
  const ArrayXd du0 = data_a.u0 - data_b.u0;
  const ArrayXd dth0 = data_a.theta0 - data_b.theta0;
  const ArrayXd dz0 = data_a.z0 - data_b.z0;
  rep.denominator = l1_norm(dv0, dx) + linf_norm(dv0) +
                    bv_norm(dv0, dx, xl, data_a.v_jumps, bc).bv_total +
                    linf_norm(du0) + l1_norm(du0, dx) + linf_norm(dth0) +
                    l1_norm(dth0, dx) + linf_norm(dz0) + l1_norm(dz0, dx);
  if (rep.denominator == 0.0) {
    rep.identical = true;
    return rep;
  }

  const auto ta = reference_solve(data_a, params, rate, t_end, snapshots);
  const auto tb = reference_solve(data_b, params, rate, t_end, snapshots);
  const size_t m = std::min(ta.states.size(), tb.states.size());
  for (size_t k = 0; k < m; ++k) {
    const auto& a = ta.states[k];
    const auto& b = tb.states[k];
    const double dist = l1_norm(a.v - b.v, dx) + l1_norm(a.u - b.u, dx) +
                        l1_norm(a.theta - b.theta, dx) + l1_norm(a.z - b.z, dx);
    rep.times.push_back(ta.times[k]);
    rep.distance.push_back(dist);
    rep.ratios.push_back(dist / rep.denominator);
    rep.max_ratio = std::max(rep.max_ratio, rep.ratios.back());
  }
  return rep;
}

}  // namespace rns
