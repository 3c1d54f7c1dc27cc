#include <doctest.h>

#include <cmath>

#include "rns/diagnostics.hpp"

using namespace rns;

namespace {

FieldState make_state(const GridSpec& g, double t, double amp) {
  FieldState s;
  s.time = t;
  const int n = g.cells;
  s.v = ArrayXd::Ones(n);
  s.u = ArrayXd::Zero(n);
  s.theta = ArrayXd::Ones(n);
  s.z = ArrayXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    const double x = g.x(i);
    const double b = std::exp(-x * x);
    s.v[i] += amp * b;
    s.u[i] += amp * b * x;
    s.theta[i] += 0.5 * amp * b;
    s.z[i] += 0.25 * amp * b;
  }
  return s;
}

InitialData small_data(int cells = 256, double target_pert = 0.03) {
  InitialData d;
  d.grid.half_width = 8.0;
  d.grid.cells = cells;
  const auto s = make_state(d.grid, 0.0, 0.01);
  d.v0 = s.v;
  d.u0 = s.u;
  d.theta0 = s.theta;
  d.z0 = s.z;
  measure_smallness(d);
  const double sc = target_pert / d.delta_pert;
  d.v0 = 1.0 + sc * (d.v0 - 1.0);
  d.u0 *= sc;
  d.theta0 = 1.0 + sc * (d.theta0 - 1.0);
  d.z0 *= sc;
  measure_smallness(d);
  return d;
}

}  // namespace

TEST_SUITE_BEGIN("diagnostics");

TEST_CASE("script_G vanishes at equilibrium and scales linearly") {
  GridSpec g;
  g.half_width = 8.0;
  g.cells = 256;
  const auto eq = make_state(g, 0.7, 0.0);
  CHECK(script_G(eq, g) == 0.0);

  const auto s1 = make_state(g, 0.7, 0.005);
  const auto s2 = make_state(g, 0.7, 0.010);
  CHECK(script_G(s2, g) == doctest::Approx(2.0 * script_G(s1, g)).epsilon(1e-12));

  SUBCASE("monotone under pointwise domination") {
    CHECK(script_G(s1, g) < script_G(s2, g));
  }
  SUBCASE("missing arrays raise") {
    FieldState empty;
    empty.time = 0.1;
    CHECK_THROWS_AS(script_G(empty, g), MissingDerivatives);
  }
}

TEST_CASE("script_G stays below 20 delta on a small run, regression-pinned") {
  auto d = small_data();
  const double target = 0.02;
  const double scale = target / d.delta_pert;
  d.v0 = 1.0 + scale * (d.v0 - 1.0);
  d.u0 *= scale;
  d.theta0 = 1.0 + scale * (d.theta0 - 1.0);
  d.z0 *= scale;
  measure_smallness(d);
  const auto traj =
      reference_solve(d, default_parameters(), ReactionRate{}, 0.5, 11);
  double sup = 0.0;
  for (const auto& s : traj.states) sup = std::max(sup, script_G(s, traj.grid));
  CHECK(sup < 20.0 * d.delta_pert);
}

TEST_CASE("mass ledger: constant phi = 0 freezes the reactant mass") {
  auto d = small_data();
  ReactionRate none;
  none.kind = ReactionRate::Kind::Constant;
  none.constant_value = 0.0;
  const auto traj = reference_solve(d, default_parameters(), none, 0.5, 9);
  const auto led = mass_ledger(traj);
  CHECK(led.balance_defect < 1e-12);
  for (double b : led.burn_rate) CHECK(b == 0.0);
  for (double m : led.mass) CHECK(m == doctest::Approx(led.mass.front()).epsilon(1e-12));
}

TEST_CASE("mass ledger on a burning run: balance, monotone burn, weighted sup") {
  auto d = small_data();
  ReactionRate ramp;
  ramp.kind = ReactionRate::Kind::IgnitionRamp;
  ramp.theta_ignition = 0.9;
  ramp.ramp_width = 0.5;
  const auto traj = reference_solve(d, default_parameters(), ramp, 8.0, 33);
  const auto led = mass_ledger(traj, 0.1);
  CHECK(led.balance_defect < 1e-8);
  CHECK(led.max_increase <= 1e-10);
  CHECK(led.sup_weighted_burn > 0.0);
  CHECK(std::isfinite(led.sup_weighted_burn));
  for (double b : led.burn_rate) CHECK(b >= 0.0);
}

TEST_CASE("decay fit recovers synthetic power laws exactly") {
  std::vector<double> ts, vs;
  for (int k = 0; k < 12; ++k) {
    const double t = std::pow(10.0, 0.3 * k);  // three decades
    ts.push_back(t);
    vs.push_back(3.7 / std::sqrt(t));
  }
  const auto fit = decay_fit(ts, vs);
  CHECK(fit.exponent == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(fit.residual < 1e-12);

  SUBCASE("constant series has zero slope") {
    std::vector<double> cs(vs.size(), 2.0);
    CHECK(decay_fit(ts, cs).exponent == doctest::Approx(0.0));
  }
  SUBCASE("insufficient span raises") {
    std::vector<double> tt{1, 2, 3, 4, 5, 6, 7, 8}, vv(8, 1.0);
    CHECK_THROWS_AS(decay_fit(tt, vv), InsufficientSpan);
  }
}

TEST_CASE("stability probe") {
  const auto params = default_parameters();
  ReactionRate rate;
  auto a = small_data();

  SUBCASE("identical data reports exact zero") {
    const auto rep = stability_probe(a, a, 0.1, params, rate);
    CHECK(rep.identical);
  }
  SUBCASE("ratio at t = 0 is at most 1") {
    auto b = a;
    for (int i = 0; i < b.grid.cells; ++i)
      b.u0[i] += 1e-3 * std::exp(-b.grid.x(i) * b.grid.x(i));
    measure_smallness(b);
    const auto rep = stability_probe(a, b, 0.1, params, rate, 5);
    REQUIRE(!rep.ratios.empty());
    CHECK(rep.ratios.front() <= 1.0 + 1e-12);
    CHECK(rep.max_ratio < 50.0);
  }
  SUBCASE("amplitude-scaled pairs share the fitted constant within factor 2") {
    auto make_pair = [&](double eps) {
      auto b = a;
      for (int i = 0; i < b.grid.cells; ++i) {
        const double x = b.grid.x(i);
        b.u0[i] += eps * std::exp(-x * x);
        b.theta0[i] += 0.5 * eps * std::exp(-x * x) * x;
      }
      measure_smallness(b);
      return stability_probe(a, b, 0.1, params, rate, 5).max_ratio;
    };
    const double r2 = make_pair(2e-3);
    const double r3 = make_pair(3e-3);
    CHECK(r2 / r3 < 2.0);
    CHECK(r3 / r2 < 2.0);
  }
}

TEST_SUITE_END();
