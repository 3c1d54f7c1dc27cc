#include "rns/solver.hpp"

#include <algorithm>
#include <cmath>

#include "rns/diagnostics.hpp"

namespace rns {

int Trajectory::index_at(double t) const {
  int best = 0;
  double gap = 1e300;
  for (size_t i = 0; i < times.size(); ++i) {
    const double g = std::abs(times[i] - t);
    if (g < gap) {
      gap = g;
      best = static_cast<int>(i);
    }
  }
  return best;
}

std::vector<double> picard_mesh(double t_sharp, int levels, int subdiv) {
  if (!(t_sharp > 0.0 && t_sharp < 1.0))
    throw Error("picard_mesh: t_sharp must lie in (0, 1)");
  std::vector<double> mesh{0.0};
  const double tau_min = t_sharp * std::pow(0.5, levels);
  for (int s = 1; s <= subdiv; ++s) mesh.push_back(tau_min * s / subdiv);
  for (int k = levels - 1; k >= 0; --k) {
    const double lo = t_sharp * std::pow(0.5, k + 1);
    const double hi = t_sharp * std::pow(0.5, k);
    for (int s = 1; s <= subdiv; ++s) mesh.push_back(lo + (hi - lo) * s / subdiv);
  }
  return mesh;
}

namespace {

ArrayXd centered_dx(const ArrayXd& f, double dx) {
  const int n = static_cast<int>(f.size());
  ArrayXd d(n);
  for (int i = 0; i < n; ++i)
    d[i] = (f[(i + 1) % n] - f[(i + n - 1) % n]) / (2.0 * dx);
  return d;
}

}  // namespace

Iterate base_step(const InitialData& data, const GasParameters& params,
                  const std::vector<double>& mesh) {
  const int n = data.grid.cells;
  const double dx = data.grid.dx();
  const int m = static_cast<int>(mesh.size());
  Iterate it;
  it.V.assign(m, data.v0 - 1.0);
  it.U.assign(m, data.u0);
  it.Th.assign(m, data.theta0 - 1.0);
  it.Z.assign(m, data.z0);

  const ArrayXd cmu = ArrayXd::Constant(n, params.mu);
  const ArrayXd cth = ArrayXd::Constant(n, params.nu / params.c_v);
  const ArrayXd cz = ArrayXd::Constant(n, params.diff);
  ArrayXd U = data.u0, Th = data.theta0 - 1.0, Z = data.z0, V = data.v0 - 1.0;
  for (int k = 1; k < m; ++k) {
    const double dt = mesh[k] - mesh[k - 1];
    implicit_diffusion_step(U, cmu, dt, dx, data.grid.boundary);
    implicit_diffusion_step(Th, cth, dt, dx, data.grid.boundary);
    implicit_diffusion_step(Z, cz, dt, dx, data.grid.boundary);
    V += dt * centered_dx(U, dx);
    it.U[k] = U;
    it.Th[k] = Th;
    it.Z[k] = Z;
    it.V[k] = V;
  }
  return it;
}

Iterate picard_step(const Iterate& prev, const InitialData& data,
                    const GasParameters& params, const ReactionRate& rate,
                    const std::vector<double>& mesh) {
  const int n = data.grid.cells;
  const double dx = data.grid.dx();
  const int m = static_cast<int>(mesh.size());
  const double a = params.a, cv = params.c_v, mu = params.mu, nu = params.nu;
  const double D = params.diff, K = params.rate_k, q = params.heat_q;

  for (const auto& V : prev.V)
    if ((1.0 + V).minCoeff() <= 0.0)
      throw VacuumApproached("picard_step: previous iterate reaches vacuum");

  Iterate it;
  it.V.assign(m, data.v0 - 1.0);
  it.U.assign(m, data.u0);
  it.Th.assign(m, data.theta0 - 1.0);
  it.Z.assign(m, data.z0);

  ArrayXd U = data.u0, Th = data.theta0 - 1.0, Z = data.z0, V = data.v0 - 1.0;
  for (int k = 1; k < m; ++k) {
    const double dt = mesh[k] - mesh[k - 1];
    const ArrayXd vtot_new = 1.0 + prev.V[k];
    const ArrayXd coef_u = mu / vtot_new;
    const ArrayXd coef_th = nu / (cv * vtot_new);
    const ArrayXd coef_z = D / (vtot_new * vtot_new);

    // Sources frozen at the old time level from the previous iterate.
    const ArrayXd vtot = 1.0 + prev.V[k - 1];
    const ArrayXd thtot = 1.0 + prev.Th[k - 1];
    const ArrayXd p = a * thtot / vtot;
    ArrayXd n1(n);  // -(p_{i+1/2} - p_{i-1/2})/dx with face averages
    for (int i = 0; i < n; ++i) {
      const double pr = 0.5 * (p[i] + p[(i + 1) % n]);
      const double pl = 0.5 * (p[i] + p[(i + n - 1) % n]);
      n1[i] = -(pr - pl) / dx;
    }
    const ArrayXd ux = centered_dx(prev.U[k - 1], dx);
    ArrayXd phi(n);
    for (int i = 0; i < n; ++i) phi[i] = rate(thtot[i]);
    const ArrayXd react = K * phi * prev.Z[k - 1];
    const ArrayXd n2 = -p / cv * ux + mu / (cv * vtot) * ux * ux + q / cv * react;
    const ArrayXd n3 = -react;

    implicit_diffusion_step(U, coef_u, dt, dx, data.grid.boundary, &n1);
    implicit_diffusion_step(Th, coef_th, dt, dx, data.grid.boundary, &n2);
    implicit_diffusion_step(Z, coef_z, dt, dx, data.grid.boundary, &n3);
    V += dt * centered_dx(U, dx);
    if ((1.0 + V).minCoeff() < 0.1)
      throw VacuumApproached("picard_step: 1 + V fell below 0.1");
    it.U[k] = U;
    it.Th[k] = Th;
    it.Z[k] = Z;
    it.V[k] = V;
  }
  return it;
}

double contraction_functional(const Iterate& a, const Iterate& b,
                              const InitialData& data,
                              const std::vector<double>& mesh, double t_sharp) {
  const double dx = data.grid.dx();
  const double xl = -data.grid.half_width;
  const auto bc = data.grid.boundary;
  // Components accumulated as sup over the geometric points tau_k.
  double c[15] = {0.0};
  for (size_t idx = 0; idx < mesh.size(); ++idx) {
    const double tau = mesh[idx];
    if (tau <= 0.0) continue;
    // restrict the sup to (approximately) dyadic points to keep the cost flat
    const double ratio = t_sharp / tau;
    const double lg = std::log2(ratio);
    if (std::abs(lg - std::round(lg)) > 1e-9 && idx + 1 != mesh.size()) continue;
    const double wlog = std::abs(std::log(tau));
    const double sq = std::sqrt(tau);

    const ArrayXd dV = a.V[idx] - b.V[idx];
    const ArrayXd dU = a.U[idx] - b.U[idx];
    const ArrayXd dTh = a.Th[idx] - b.Th[idx];
    const ArrayXd dZ = a.Z[idx] - b.Z[idx];
    const ArrayXd dUx = centered_dx(dU, dx);
    const ArrayXd dThx = centered_dx(dTh, dx);
    const ArrayXd dZx = centered_dx(dZ, dx);

    c[0] = std::max(c[0], linf_norm(dV));
    c[1] = std::max(c[1], l1_norm(dV, dx));
    c[2] = std::max(c[2], bv_norm(dV, dx, xl, data.v_jumps, bc).bv_total);
    c[3] = std::max(c[3], linf_norm(dU));
    c[4] = std::max(c[4], l1_norm(dU, dx));
    c[5] = std::max(c[5], sq / wlog * linf_norm(dUx));
    c[6] = std::max(c[6], l1_norm(dUx, dx) / wlog);
    c[7] = std::max(c[7], linf_norm(dTh) / wlog);
    c[8] = std::max(c[8], l1_norm(dTh, dx));
    c[9] = std::max(c[9], sq / wlog * linf_norm(dThx));
    c[10] = std::max(c[10], l1_norm(dThx, dx) / wlog);
    c[11] = std::max(c[11], linf_norm(dZ));
    c[12] = std::max(c[12], l1_norm(dZ, dx));
    c[13] = std::max(c[13], sq / wlog * linf_norm(dZx));
    c[14] = std::max(c[14], l1_norm(dZx, dx) / wlog);
  }
  double sum = 0.0;
  for (double v : c) sum += v;
  return sum;
}

namespace {

Trajectory trajectory_from_iterate(const Iterate& it, const InitialData& data,
                                   const GasParameters& params,
                                   const ReactionRate& rate,
                                   const std::vector<double>& mesh) {
  Trajectory traj;
  traj.grid = data.grid;
  traj.times = mesh;
  traj.v_jumps = data.v_jumps;
  const double dx = data.grid.dx();
  double cumulative = 0.0;
  for (size_t k = 0; k < mesh.size(); ++k) {
    FieldState s;
    s.time = mesh[k];
    s.v = 1.0 + it.V[k];
    s.u = it.U[k];
    s.theta = 1.0 + it.Th[k];
    s.z = it.Z[k];
    s.v_jumps = data.v_jumps;
    double burn = 0.0;
    for (int i = 0; i < data.grid.cells; ++i)
      burn += params.rate_k * rate(s.theta[i]) * s.z[i];
    burn *= dx;
    if (k > 0) {
      // trapezoid on the stored mesh; the reference solver keeps the exact
      // per-step ledger instead
      cumulative += 0.5 * (mesh[k] - mesh[k - 1]) * (burn + traj.burn_rate.back());
    }
    traj.mass.push_back(dx * s.z.sum());
    traj.burn_rate.push_back(burn);
    traj.cumulative_burn.push_back(cumulative);
    traj.states.push_back(std::move(s));
  }
  return traj;
}

}  // namespace

PicardResult run_picard(const InitialData& data, const GasParameters& params,
                        const ReactionRate& rate, double t_sharp, double tol,
                        int n_max, int mesh_subdiv) {
  PicardResult res;
  res.sequence.times = picard_mesh(t_sharp, 20, mesh_subdiv);
  const auto& mesh = res.sequence.times;

  res.sequence.iterates.push_back(base_step(data, params, mesh));
  Iterate zero;
  const int m = static_cast<int>(mesh.size());
  zero.V.assign(m, ArrayXd::Zero(data.grid.cells));
  zero.U = zero.V;
  zero.Th = zero.V;
  zero.Z = zero.V;

  auto& rep = res.report;
  rep.predicted_bound =
      std::sqrt(t_sharp) * std::abs(std::log(t_sharp)) + data.delta_pert;
  double prevF =
      contraction_functional(res.sequence.iterates.back(), zero, data, mesh, t_sharp);
  rep.F_values.push_back(prevF);

  int bad_streak = 0;
  for (int n = 1; n <= n_max; ++n) {
    const auto& prev = res.sequence.iterates.back();
    Iterate next = picard_step(prev, data, params, rate, mesh);
    const double F = contraction_functional(next, prev, data, mesh, t_sharp);
    rep.F_values.push_back(F);
    rep.iterations = n;
    if (prevF > 1e-14) {
      const double rho = F / prevF;
      rep.ratios.push_back(rho);
      rep.max_ratio = std::max(rep.max_ratio, rho);
      bad_streak = (rho >= 1.0) ? bad_streak + 1 : 0;
      if (bad_streak >= 2)
        throw NoContraction("run_picard: contraction ratio >= 1 twice in a row");
    }
    res.sequence.iterates.push_back(std::move(next));
    prevF = F;
    if (F < tol) {
      rep.converged = true;
      break;
    }
  }
  res.trajectory = trajectory_from_iterate(res.sequence.iterates.back(), data,
                                           params, rate, mesh);
  return res;
}

namespace {

struct RefState {
  ArrayXd v, u, E, z;
};

double harmonic(double x, double y) { return 2.0 * x * y / (x + y); }

}  // namespace

Trajectory reference_solve(const InitialData& data, const GasParameters& params,
                           const ReactionRate& rate, double t_end, int snapshots,
                           double cfl) {
  data.grid.validate();
  const int n = data.grid.cells;
  const double dx = data.grid.dx();
  const double a = params.a, cv = params.c_v, mu = params.mu, nu = params.nu;
  const double D = params.diff, K = params.rate_k, q = params.heat_q;

  RefState s;
  s.v = data.v0;
  s.u = data.u0;
  s.E = cv * data.theta0 + 0.5 * data.u0 * data.u0 + q * data.z0;
  s.z = data.z0;

  Trajectory traj;
  traj.grid = data.grid;
  traj.v_jumps = data.v_jumps;

  std::vector<double> snap_times;
  for (int k = 0; k <= std::max(1, snapshots - 1); ++k)
    snap_times.push_back(t_end * k / std::max(1, snapshots - 1));

  double t = 0.0, cumulative = 0.0;
  size_t next_snap = 0;
  ArrayXd theta = data.theta0;

  auto record = [&](double burn_rate_now) {
    FieldState fs;
    fs.time = t;
    fs.v = s.v;
    fs.u = s.u;
    fs.theta = theta;
    fs.z = s.z;
    fs.v_jumps = data.v_jumps;
    traj.times.push_back(t);
    traj.mass.push_back(dx * s.z.sum());
    traj.burn_rate.push_back(burn_rate_now);
    traj.cumulative_burn.push_back(cumulative);
    traj.states.push_back(std::move(fs));
  };

  {
    double br = 0.0;
    for (int i = 0; i < n; ++i) br += K * rate(theta[i]) * s.z[i];
    record(dx * br);
    next_snap = 1;
  }

  const int max_steps = 80'000'000;
  for (int step = 0; step < max_steps && t < t_end - 1e-14; ++step) {
    // acoustic CFL with the local sound speed sqrt(p p_e - p_v) in Lagrangian
    // sound units ~ sqrt(a theta (1 + a/cv)) / v
    double cmax = 1e-12;
    for (int i = 0; i < n; ++i) {
      const double cs =
          std::sqrt(a * theta[i] * (1.0 + a / cv)) / s.v[i];
      cmax = std::max(cmax, cs + std::abs(s.u[i]));
    }
    double dt = cfl * dx / cmax;
    dt = std::min(dt, t_end - t);
    if (next_snap < snap_times.size())
      dt = std::min(dt, snap_times[next_snap] - t + 1e-15);
    if (dt < 1e-12) throw StepSizeUnderflow("reference_solve: dt underflow");

    // momentum: implicit viscosity, explicit pressure gradient
    ArrayXd p(n);
    for (int i = 0; i < n; ++i) p[i] = a * theta[i] / s.v[i];
    ArrayXd coef_u(n), src_u(n);
    for (int i = 0; i < n; ++i) coef_u[i] = mu / s.v[i];
    for (int i = 0; i < n; ++i) {
      const double pr = 0.5 * (p[i] + p[(i + 1) % n]);
      const double pl = 0.5 * (p[i] + p[(i + n - 1) % n]);
      src_u[i] = -(pr - pl) / dx;
    }
    ArrayXd u_new = s.u;
    implicit_diffusion_step(u_new, coef_u, dt, dx, data.grid.boundary, &src_u);

    // volume from the updated velocity (conservative face averages)
    ArrayXd v_new = s.v;
    for (int i = 0; i < n; ++i) {
      const double ur = 0.5 * (u_new[i] + u_new[(i + 1) % n]);
      const double ul = 0.5 * (u_new[i] + u_new[(i + n - 1) % n]);
      v_new[i] += dt * (ur - ul) / dx;
    }
    if (v_new.minCoeff() <= 0.0)
      throw Error("reference_solve: specific volume reached zero");

    // total energy: implicit heat conduction in E, everything else as
    // explicit conservative face fluxes
    ArrayXd coef_E(n);
    for (int i = 0; i < n; ++i) coef_E[i] = nu / (cv * v_new[i]);
    ArrayXd src_E(n);
    const ArrayXd half_u2 = 0.5 * u_new * u_new;
    for (int i = 0; i < n; ++i) {
      const int ip = (i + 1) % n, im = (i + n - 1) % n;
      auto face_flux = [&](int l, int r) {
        const double vf = harmonic(v_new[l], v_new[r]);
        const double uf = 0.5 * (u_new[l] + u_new[r]);
        const double pf = 0.5 * (p[l] + p[r]);
        const double dudx = (u_new[r] - u_new[l]) / dx;
        const double dzdx = (s.z[r] - s.z[l]) / dx;
        const double du2dx = (half_u2[r] - half_u2[l]) / dx;
        double flux = -pf * uf;                        // -(p u)
        flux += mu / vf * uf * dudx;                   // mu u u_x / v
        flux += q * D / (vf * vf) * dzdx;              // q D z_x / v^2
        flux -= nu / (cv * vf) * (du2dx + q * dzdx);   // explicit part of nu theta_x / v
        return flux;
      };
      src_E[i] = (face_flux(i, ip) - face_flux(im, i)) / dx;
    }
    ArrayXd E_new = s.E;
    implicit_diffusion_step(E_new, coef_E, dt, dx, data.grid.boundary, &src_E);

    // reactant: implicit diffusion then pointwise-implicit reaction
    ArrayXd coef_z(n);
    for (int i = 0; i < n; ++i) coef_z[i] = D / (v_new[i] * v_new[i]);
    ArrayXd z_new = s.z;
    implicit_diffusion_step(z_new, coef_z, dt, dx, data.grid.boundary);
    ArrayXd theta_eval =
        (E_new - 0.5 * u_new * u_new - q * s.z).max(1e-8) / cv;
    double burn = 0.0, burn_rate_now = 0.0;
    for (int i = 0; i < n; ++i) {
      const double kphi = K * rate(theta_eval[i]);
      z_new[i] = z_new[i] / (1.0 + dt * kphi);
      burn += dt * kphi * z_new[i];
      burn_rate_now += kphi * z_new[i];
    }
    cumulative += dx * burn;

    s.v = v_new;
    s.u = u_new;
    s.E = E_new;
    s.z = z_new;
    theta = (s.E - 0.5 * s.u * s.u - q * s.z) / cv;
    if (theta.minCoeff() <= 0.0)
      throw Error("reference_solve: temperature reached zero");
    t += dt;

    if (next_snap < snap_times.size() && t >= snap_times[next_snap] - 1e-12) {
      record(dx * burn_rate_now);
      ++next_snap;
    }
  }
  if (t < t_end - 1e-10)
    throw StepSizeUnderflow("reference_solve: step budget exhausted");
  return traj;
}

Trajectory continue_solution(const Trajectory& traj, double t_next,
                             const GasParameters& params,
                             const ReactionRate& rate, double delta_threshold,
                             double tol, int n_max) {
  if (traj.states.empty()) throw Error("continue_solution: empty trajectory");
  const FieldState& seam = traj.back();
  const double g = script_G(seam, traj.grid);
  if (g >= delta_threshold)
    throw SmallnessLost("continue_solution: stopping-time functional too large at the seam");
  if (t_next <= 0.0) return traj;

  InitialData data;
  data.grid = traj.grid;
  data.v0 = seam.v;
  data.u0 = seam.u;
  data.theta0 = seam.theta;
  data.z0 = seam.z.max(0.0);
  data.v_jumps = traj.v_jumps;
  measure_smallness(data);

  const auto res = run_picard(data, params, rate, t_next, tol, n_max);
  Trajectory out = traj;
  const double t0 = seam.time;
  const double burn0 = out.cumulative_burn.back();
  for (size_t k = 1; k < res.trajectory.times.size(); ++k) {
    out.times.push_back(t0 + res.trajectory.times[k]);
    FieldState s = res.trajectory.states[k];
    s.time = t0 + res.trajectory.times[k];
    out.states.push_back(std::move(s));
    out.mass.push_back(res.trajectory.mass[k]);
    out.burn_rate.push_back(res.trajectory.burn_rate[k]);
    out.cumulative_burn.push_back(burn0 + res.trajectory.cumulative_burn[k]);
  }
  return out;
}

FluxJumps flux_continuity_check(const FieldState& state, const GridSpec& grid,
                                const GasParameters& params) {
  FluxJumps out;
  const int n = grid.cells;
  const double dx = grid.dx();
  if (state.v_jumps.empty()) {
    // no seeded jump: report the worst adjacent-face flux increment
    out.v_jump = 0.0;
  }
  ArrayXd p(n);
  for (int i = 0; i < n; ++i) p[i] = params.a * state.theta[i] / state.v[i];
  auto face = [&](int i, auto&& f) {  // face between cells i and i+1 (mod n)
    const int l = (i + n) % n, r = (i + 1 + n) % n;
    return f(l, r);
  };
  auto flux_u = [&](int l, int r) {
    const double vf = harmonic(state.v[l], state.v[r]);
    return params.mu * (state.u[r] - state.u[l]) / dx / vf -
           0.5 * (p[l] + p[r]);
  };
  auto flux_th = [&](int l, int r) {
    const double vf = harmonic(state.v[l], state.v[r]);
    return params.nu / (params.c_v * vf) * (state.theta[r] - state.theta[l]) / dx;
  };
  auto flux_z = [&](int l, int r) {
    const double vf = harmonic(state.v[l], state.v[r]);
    return params.diff / (vf * vf) * (state.z[r] - state.z[l]) / dx;
  };

  int iface = n / 2 - 1;
  if (!state.v_jumps.empty())
    iface = face_index(state.v_jumps.front().position, dx, -grid.half_width, n);
  out.v_jump = std::abs(state.v[(iface + 1) % n] - state.v[iface]);
  out.u_flux = std::abs(face(iface + 1, flux_u) - face(iface - 1, flux_u));
  out.theta_flux = std::abs(face(iface + 1, flux_th) - face(iface - 1, flux_th));
  out.z_flux = std::abs(face(iface + 1, flux_z) - face(iface - 1, flux_z));
  double scale = 0.0;
  for (int i = 0; i < n - 1; ++i) scale = std::max(scale, std::abs(flux_u(i, i + 1)));
  out.u_flux_scale = std::max(scale, 1e-30);
  return out;
}

}  // namespace rns
