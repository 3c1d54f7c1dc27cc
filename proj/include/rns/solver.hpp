#pragma once

#include <vector>

#include "rns/errors.hpp"
#include "rns/heatkernel.hpp"
#include "rns/params.hpp"

namespace rns {

// Time series of total-field states with the exact discrete reactant ledger
// carried along (cumulative burn accumulated step by step by the producing
// solver, so mass(t) + cumulative(t) = mass(0) holds to solver precision).
struct Trajectory {
  GridSpec grid;
  std::vector<double> times;
  std::vector<FieldState> states;
  std::vector<double> mass;        // dx * sum z
  std::vector<double> burn_rate;   // dx * sum K phi(theta) z
  std::vector<double> cumulative_burn;
  std::vector<JumpSpec> v_jumps;

  const FieldState& back() const { return states.back(); }
  int index_at(double t) const;  // nearest snapshot index
};

// One Picard iterate: perturbation fields on the solver time mesh.
struct Iterate {
  std::vector<ArrayXd> V, U, Th, Z;
};

struct IterateSequence {
  std::vector<double> times;       // geometric mesh tau_k = t_sharp 2^-k, refined
  std::vector<Iterate> iterates;   // iterate n = 1, 2, ...
};

struct ContractionReport {
  std::vector<double> F_values;  // F[Delta^n] for consecutive differences
  std::vector<double> ratios;    // F_{n+1} / F_n (reported when F_n > 1e-14)
  double max_ratio = 0.0;
  double predicted_bound = 0.0;  // sqrt(t#)|log t#| + delta, the C2 = 1 scale
  int iterations = 0;
  bool converged = false;
};

// Geometric time mesh covering (0, t_sharp]: tau_k = t_sharp 2^-k for
// k = 0..levels, each dyadic interval subdivided uniformly.
std::vector<double> picard_mesh(double t_sharp, int levels = 20, int subdiv = 8);

// Base step: constant-coefficient solves for (U1, Theta1, Z1) with
// coefficients (mu, nu/c_v, D) and V1 = v0* + int U1_x.
Iterate base_step(const InitialData& data, const GasParameters& params,
                  const std::vector<double>& mesh);

// One Picard update: linear parabolic solves with coefficients frozen from
// the previous iterate and sources N1 (pressure gradient), N2 (compression
// work, viscous heating, reaction heat), N3 (reaction sink).
Iterate picard_step(const Iterate& prev, const InitialData& data,
                    const GasParameters& params, const ReactionRate& rate,
                    const std::vector<double>& mesh);

// The 15-component contraction functional of an iterate difference,
// evaluated as sup over the geometric mesh points.
double contraction_functional(const Iterate& a, const Iterate& b,
                              const InitialData& data,
                              const std::vector<double>& mesh, double t_sharp);

struct PicardResult {
  Trajectory trajectory;
  ContractionReport report;
  IterateSequence sequence;
};

PicardResult run_picard(const InitialData& data, const GasParameters& params,
                        const ReactionRate& rate, double t_sharp,
                        double tol = 1e-10, int n_max = 12, int mesh_subdiv = 8);

// Conservative method-of-lines reference solver for the full nonlinear system
// in the conserved variables (v, u, E, z): implicit diffusion, explicit
// acoustics at CFL <= 0.35, pointwise-implicit reaction. Exact discrete
// conservation of v, u, E and of the reactant ledger on periodic domains.
Trajectory reference_solve(const InitialData& data, const GasParameters& params,
                           const ReactionRate& rate, double t_end,
                           int snapshots = 33, double cfl = 0.35);

// Restart the Picard solver from the trajectory's terminal state and stitch.
// Throws SmallnessLost when the stopping-time functional at the seam is >=
// delta_threshold.
Trajectory continue_solution(const Trajectory& traj, double t_next,
                             const GasParameters& params,
                             const ReactionRate& rate, double delta_threshold,
                             double tol = 1e-10, int n_max = 12);

// Face fluxes mu u_x / v - p, nu theta_x / (c_v v), D z_x / v^2 evaluated on
// the two faces adjacent to the seeded jump cell.
struct FluxJumps {
  double u_flux = 0.0;
  double theta_flux = 0.0;
  double z_flux = 0.0;
  double v_jump = 0.0;
  double u_flux_scale = 1.0;
};

FluxJumps flux_continuity_check(const FieldState& state, const GridSpec& grid,
                                const GasParameters& params);

}  // namespace rns
