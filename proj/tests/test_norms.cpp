#include <doctest.h>

#include <cmath>

#include "rns/norms.hpp"

using namespace rns;

TEST_SUITE_BEGIN("norms");

TEST_CASE("constant field: zero variation, sup-norm carries the BV norm") {
  const ArrayXd f = ArrayXd::Constant(64, 3.5);
  const auto r = bv_norm(f, 0.1, -3.2);
  CHECK(r.bv_continuous_part == doctest::Approx(0.0));
  CHECK(r.bv_jump_part == doctest::Approx(0.0));
  CHECK(r.bv_total == doctest::Approx(3.5));
  CHECK(r.linf == doctest::Approx(3.5));
}

TEST_CASE("heaviside: the listed jump carries the variation") {
  const int n = 128;
  const double L = 2.0, dx = 2.0 * L / n;
  ArrayXd f(n);
  const double h = 0.7;
  for (int i = 0; i < n; ++i) f[i] = (-L + (i + 0.5) * dx) > 0.0 ? h : 0.0;
  const auto r = bv_norm(f, dx, -L, {{0.0, h}}, Boundary::AbsorbingPad);
  CHECK(r.bv_jump_part == doctest::Approx(h));
  CHECK(r.bv_continuous_part == doctest::Approx(0.0));
  CHECK(r.bv_total == doctest::Approx(h + h));  // sup + jump
}

TEST_CASE("sine over one period has variation 4A") {
  const int n = 2048;
  const double L = 1.0, dx = 2.0 * L / n;
  const double A = 0.3;
  ArrayXd f(n);
  for (int i = 0; i < n; ++i) f[i] = A * std::sin(M_PI * (-L + (i + 0.5) * dx));
  const auto r = bv_norm(f, dx, -L, {}, Boundary::Periodic);
  CHECK(r.bv_continuous_part == doctest::Approx(4.0 * A).epsilon(0.01));
}

TEST_CASE("monotone field: variation equals the endpoint difference") {
  const int n = 200;
  ArrayXd f(n);
  for (int i = 0; i < n; ++i) f[i] = std::tanh(0.05 * i);
  const auto r = bv_norm(f, 0.01, 0.0, {}, Boundary::AbsorbingPad);
  CHECK(r.bv_continuous_part == doctest::Approx(f[n - 1] - f[0]));
  CHECK(r.bv_total == doctest::Approx(std::abs(f[n - 1] - f[0]) + r.linf));
}

TEST_CASE("derivative: centered interior, exact for linear fields") {
  const int n = 64;
  const double dx = 0.25;
  ArrayXd f(n);
  for (int i = 0; i < n; ++i) f[i] = 2.0 + 3.0 * i * dx;
  const ArrayXd d = derivative(f, dx, 0.0, {}, Boundary::AbsorbingPad);
  for (int i = 0; i < n; ++i) CHECK(d[i] == doctest::Approx(3.0));
}

TEST_CASE("derivative skips listed jump faces one-sidedly") {
  const int n = 64;
  const double L = 1.0, dx = 2.0 * L / n;
  ArrayXd f(n);
  for (int i = 0; i < n; ++i) {
    const double x = -L + (i + 0.5) * dx;
    f[i] = 0.1 * x + (x > 0.0 ? 1.0 : 0.0);
  }
  const ArrayXd d = derivative(f, dx, -L, {{0.0, 1.0}}, Boundary::AbsorbingPad);
  for (int i = 0; i < n; ++i) CHECK(std::abs(d[i] - 0.1) < 1e-9);
}

TEST_SUITE_END();
