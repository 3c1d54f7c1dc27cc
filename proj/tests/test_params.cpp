#include <doctest.h>

#include <cmath>

#include "rns/params.hpp"

using namespace rns;

TEST_SUITE_BEGIN("params");

TEST_CASE("default parameters satisfy the ordering hypotheses") {
  const auto p = default_parameters();
  CHECK(p.prandtl() == doctest::Approx(0.7));          // 1 * 1.4 / 2
  CHECK(p.nu / (p.c_v * p.diff) == doctest::Approx(1.4));
  CHECK(p.gamma() == doctest::Approx(1.4));
  CHECK(p.gamma() > 1.0);
  CHECK(p.mu / p.diff < 1.0);
  CHECK(p.well_ordered());
}

TEST_CASE("well_ordered is equivalent to the three inequalities") {
  GasParameters p = default_parameters();
  p.mu = 1.6;  // Pr = 1.6*1.4/2 > 1
  CHECK_FALSE(p.well_ordered());
  p = default_parameters();
  p.diff = 2.5;  // nu/(c_v D) < 1
  CHECK_FALSE(p.well_ordered());
}

TEST_CASE("linearize at equilibrium reproduces the closed-form partials") {
  const auto params = default_parameters();
  const auto lp = equilibrium_point(params);
  CHECK(lp.theta_bar == doctest::Approx(1.0));
  CHECK(lp.p == doctest::Approx(0.4));
  CHECK(lp.p_v == doctest::Approx(-0.4));
  CHECK(lp.p_e == doctest::Approx(0.4));
  CHECK(lp.theta_e == doctest::Approx(1.0));
  CHECK(lp.sound_speed == doctest::Approx(std::sqrt(0.4 * 0.4 + 0.4)).epsilon(1e-12));
  CHECK(lp.sound_speed == doctest::Approx(0.74833).epsilon(1e-4));
}

TEST_CASE("linearize: theta_bar = E/c_v when u = z = 0") {
  GasParameters params = default_parameters();
  params.c_v = 1.7;
  const auto lp = linearize(params, 1.0, 0.0, 2.3, 0.0);
  CHECK(lp.theta_bar == doctest::Approx(2.3 / 1.7));
}

TEST_CASE("linearize rejects bad states") {
  const auto params = default_parameters();
  CHECK_THROWS_AS(linearize(params, -1.0, 0.0, 1.0, 0.0), NonpositiveVolume);
  CHECK_THROWS_AS(linearize(params, 1.0, 3.0, 1.0, 0.0), NonpositiveInternalEnergy);
}

TEST_CASE("linearize keeps p_v < 0 and a real sound speed for a, c_v > 0") {
  for (double a : {0.1, 0.4, 1.0, 2.5})
    for (double cv : {0.5, 1.0, 3.0}) {
      GasParameters p = default_parameters();
      p.a = a;
      p.c_v = cv;
      const auto lp = equilibrium_point(p);
      CHECK(lp.p_v < 0.0);
      CHECK(lp.p * lp.p_e - lp.p_v > 0.0);
    }
}

TEST_CASE("reaction rates are nonnegative and Lipschitz on the range") {
  ReactionRate arr;  // clipped Arrhenius
  const double L = arr.lipschitz_bound();
  CHECK(L > 0.0);
  double prev = arr(0.0);
  for (double th = 0.0; th <= 10.0; th += 1e-3) {
    const double val = arr(th);
    CHECK(val >= 0.0);
    CHECK(std::abs(val - prev) <= L * 1e-3 * (1.0 + 1e-6) + 1e-14);
    prev = val;
  }
  ReactionRate ramp;
  ramp.kind = ReactionRate::Kind::IgnitionRamp;
  ramp.ramp_width = 0.25;
  CHECK(ramp.lipschitz_bound() == doctest::Approx(4.0));
  CHECK(ramp(0.5) == 0.0);
  CHECK(ramp(2.0) == 1.0);
}

namespace {

InitialData equilibrium_data(int n = 256, double L = 4.0) {
  InitialData d;
  d.grid.half_width = L;
  d.grid.cells = n;
  d.v0 = ArrayXd::Ones(n);
  d.u0 = ArrayXd::Zero(n);
  d.theta0 = ArrayXd::Ones(n);
  d.z0 = ArrayXd::Zero(n);
  return d;
}

}  // namespace

TEST_CASE("smallness measure at exact equilibrium is 2") {
  auto d = equilibrium_data();
  measure_smallness(d);
  CHECK(d.delta_hat == doctest::Approx(2.0));
  CHECK(d.delta_pert == doctest::Approx(0.0));
}

TEST_CASE("smallness measure of a gaussian bump, quadrature-pinned") {
  auto d = equilibrium_data(4096, 8.0);
  for (int i = 0; i < 4096; ++i) {
    const double x = d.grid.x(i);
    d.v0[i] += 0.01 * std::exp(-x * x);
  }
  measure_smallness(d);
  // oracle: trapezoid quadrature of 0.01 exp(-x^2): L1 = 0.01 sqrt(pi),
  // variation = 2 * 0.01, sup contributes 1.01 to ||v0||_BV
  const double expected = 0.01 * std::sqrt(M_PI) + (1.01 + 0.02) + 1.0;
  CHECK(d.delta_hat == doctest::Approx(expected).epsilon(1e-6));
  // frozen value of the discrete quadrature oracle on this grid
  CHECK(d.delta_hat == doctest::Approx(2.0477244240683556).epsilon(1e-12));
}

TEST_CASE("perturbation part is exactly homogeneous in the amplitude") {
  auto d1 = equilibrium_data(512, 6.0);
  auto d2 = d1;
  for (int i = 0; i < 512; ++i) {
    const double x = d1.grid.x(i);
    const double bump = std::exp(-2.0 * x * x);
    d1.v0[i] += 0.004 * bump;
    d1.u0[i] += 0.002 * bump * x;
    d2.v0[i] += 0.008 * bump;
    d2.u0[i] += 0.004 * bump * x;
  }
  measure_smallness(d1);
  measure_smallness(d2);
  CHECK(std::abs(d2.delta_pert - 2.0 * d1.delta_pert) < 1e-10);
  CHECK(std::abs((d2.delta_hat - 2.0) - 2.0 * (d1.delta_hat - 2.0)) < 1e-10);
}

TEST_CASE("smallness is subadditive over pointwise sums of perturbations") {
  auto da = equilibrium_data(512, 6.0);
  auto db = da;
  auto dsum = da;
  for (int i = 0; i < 512; ++i) {
    const double x = da.grid.x(i);
    const double b1 = 0.01 * std::exp(-x * x);
    const double b2 = 0.02 * std::exp(-(x - 1.0) * (x - 1.0)) * std::sin(x);
    da.u0[i] += b1;
    db.u0[i] += b2;
    dsum.u0[i] += b1 + b2;
  }
  measure_smallness(da);
  measure_smallness(db);
  measure_smallness(dsum);
  CHECK(dsum.delta_pert <= da.delta_pert + db.delta_pert + 1e-12);
}

TEST_CASE("grid and field-state validation") {
  GridSpec g;
  g.cells = 15;
  CHECK_THROWS_AS(g.validate(), Error);
  g.cells = 64;
  g.half_width = -1.0;
  CHECK_THROWS_AS(g.validate(), Error);

  FieldState s;
  s.v = ArrayXd::Ones(8);
  s.u = ArrayXd::Zero(8);
  s.theta = ArrayXd::Ones(8);
  s.z = ArrayXd::Zero(8);
  CHECK_NOTHROW(s.validate());
  s.z[3] = -1e-6;
  CHECK_THROWS_AS(s.validate(), Error);
  s.z[3] = 0.0;
  s.v[0] = -0.1;
  CHECK_THROWS_AS(s.validate(), NonpositiveVolume);
}

TEST_SUITE_END();
