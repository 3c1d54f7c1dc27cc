#pragma once

#include <vector>

#include "rns/params.hpp"
#include "rns/solver.hpp"

namespace rns {

// Stopping-time functional: the 15-term aggregate
//   sqrt(1+t) (||v-1||_inf + ||u||_inf + ||theta-1||_inf + ||z||_inf)
//   + the four L1 norms + the four BV norms
//   + sqrt(t) (||u_x||_inf + ||theta_x||_inf + ||z_x||_inf).
double script_G(const FieldState& state, const GridSpec& grid);

struct MassLedger {
  std::vector<double> times;
  std::vector<double> mass;
  std::vector<double> burn_rate;
  std::vector<double> cumulative;
  double balance_defect = 0.0;     // max |mass + cumulative - mass(0)|
  double sup_weighted_burn = 0.0;  // sup_{tau >= nu0} (1+tau) M(tau)
  double max_increase = 0.0;       // max burn-rate increase past nu0
};

MassLedger mass_ledger(const Trajectory& traj, double nu0 = 0.1);

struct DecayFit {
  double t_lo = 0.0;
  double t_hi = 0.0;
  double exponent = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
  int samples = 0;
};

// Least-squares slope of log(value) against log(t); needs >= 8 samples
// spanning at least one decade.
DecayFit decay_fit(const std::vector<double>& times,
                   const std::vector<double>& values);

struct StabilityReport {
  std::vector<double> times;
  std::vector<double> distance;   // summed L1 distance of the four fields
  double denominator = 0.0;       // initial combined distance (L1/Linf/BV mix)
  std::vector<double> ratios;
  double max_ratio = 0.0;
  bool identical = false;
};

// Runs the reference solver on both data sets and reports the ratio of the
// evolved L1 distance to the theorem-style initial distance.
StabilityReport stability_probe(const InitialData& data_a,
                                const InitialData& data_b, double t_end,
                                const GasParameters& params,
                                const ReactionRate& rate, int snapshots = 17);

}  // namespace rns
