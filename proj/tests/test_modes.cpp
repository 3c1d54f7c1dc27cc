#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "rns/spectral.hpp"

using namespace rns;

namespace {

SystemMatrices default_system() {
  const auto params = default_parameters();
  return assemble_linearization(equilibrium_point(params), params);
}

SystemMatrices generic_system() {
  GasParameters p;
  p.nu = 2.2;
  p.diff = 1.2;
  REQUIRE(p.well_ordered());
  return assemble_linearization(equilibrium_point(p), p);
}

double max_abs(const Matrix4cd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE_BEGIN("modes");

TEST_CASE("adjugate identity adj(A) A = det(A) I") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    Matrix4cd a;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) a(i, j) = Complex(unif(rng), unif(rng));
    const Matrix4cd lhs = adjugate4<Complex>(a) * a;
    const Complex det = a.determinant();
    CHECK(max_abs(lhs - det * Matrix4cd::Identity()) < 1e-13);

    Matrix3cd b;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) b(i, j) = Complex(unif(rng), unif(rng));
    const Matrix3cd lhs3 = adjugate3<Complex>(b) * b;
    CHECK((lhs3 - b.determinant() * Matrix3cd::Identity()).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("mode-sum completeness and projector identities") {
  const auto sm = default_system();
  for (double eta : {0.2, 1.0, 3.0, 9.0, 55.0}) {
    const auto es = eigenvalues_at(eta, sm);
    const auto ms = mode_matrices(es, sm);
    REQUIRE_FALSE(ms.degenerate);
    Matrix4cd sum = Matrix4cd::Zero();
    for (const auto& m : ms.m_hat) sum += m;
    CHECK(max_abs(sum - Matrix4cd::Identity()) < 1e-9);

    double min_sep = 1e300;
    for (int j = 0; j < 4; ++j)
      for (int k = j + 1; k < 4; ++k)
        min_sep = std::min(min_sep, std::abs(es.lambdas[j] - es.lambdas[k]));
    if (min_sep >= 1e-4) {
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) {
          const Matrix4cd prod = ms.m_hat[j] * ms.m_hat[k];
          if (j == k)
            CHECK(max_abs(prod - ms.m_hat[j]) < 1e-8);
          else
            CHECK(max_abs(prod) < 1e-8);
        }
    }
  }
}

TEST_CASE("projector idempotency at eta = 3 against the eigendecomposition") {
  const auto sm = default_system();
  const auto es = eigenvalues_at(3.0, sm);
  const auto ms = mode_matrices(es, sm);
  REQUIRE_FALSE(ms.degenerate);
  CHECK(max_abs(ms.m_hat[0] * ms.m_hat[0] - ms.m_hat[0]) < 1e-8);
  // eigendecomposition oracle
  Eigen::ComplexEigenSolver<Matrix4cd> eig(symbol(3.0, sm));
  int idx = 0;
  double best = 1e300;
  for (int i = 0; i < 4; ++i) {
    const double d = std::abs(eig.eigenvalues()[i] - es.lambdas[0]);
    if (d < best) {
      best = d;
      idx = i;
    }
  }
  const Matrix4cd V = eig.eigenvectors();
  const Matrix4cd Vi = V.inverse();
  const Matrix4cd proj = V.col(idx) * Vi.row(idx);
  CHECK(max_abs(proj - ms.m_hat[0]) < 1e-9);
}

TEST_CASE("degenerate small-eta spectrum at the defaults is flagged") {
  const auto sm = default_system();
  const auto es = eigenvalues_at(0.01, sm);
  const auto ms = mode_matrices(es, sm);
  CHECK(ms.degenerate);  // alpha1 = nu / c_p = D makes lambda1 ~ lambda4
}

TEST_CASE("reactant projector is the constant matrix (q, 1) in column 4") {
  const auto sm = default_system();
  const double q = sm.params.heat_q;
  for (double eta : {0.05, 0.7, 5.0, 80.0}) {
    const Matrix4cd m4 = reactant_mode_matrix(eta, sm);
    Matrix4cd expect = Matrix4cd::Zero();
    expect(2, 3) = q;
    expect(3, 3) = 1.0;
    CHECK(max_abs(m4 - expect) == 0.0);
    // and the adjugate-based projector agrees
    const auto es = eigenvalues_at(eta, sm);
    const auto ms = mode_matrices(es, sm);
    if (!ms.degenerate) CHECK(max_abs(ms.m_hat[3] - expect) < 1e-9);
  }
}

TEST_CASE("hyperbolic mode rows/columns: zero fourth row, slaved fourth column") {
  const auto sm = default_system();
  const double q = sm.params.heat_q;
  for (double eta : {0.3, 2.0, 25.0}) {
    const auto ms = mode_matrices(eigenvalues_at(eta, sm), sm);
    REQUIRE_FALSE(ms.degenerate);
    for (int j = 0; j < 3; ++j) {
      for (int c = 0; c < 4; ++c) CHECK(std::abs(ms.m_hat[j](3, c)) < 1e-10);
      for (int r = 0; r < 4; ++r)
        CHECK(std::abs(ms.m_hat[j](r, 3) + q * ms.m_hat[j](r, 2)) < 1e-10);
    }
  }
}

TEST_CASE("singular mode matrices: leading orders and M34 residual decay") {
  const auto params = default_parameters();
  const auto lp = equilibrium_point(params);
  const auto sel = choose_K(lp, params);

  const auto series1 = singular_mode_series(1, lp, params);
  Matrix4d diag1 = Matrix4d::Zero();
  diag1(0, 0) = 1.0;
  CHECK((series1[0] - diag1).cwiseAbs().maxCoeff() == 0.0);

  // assembled matrices approach the series with residual O(eta^-5)
  for (int j : {1, 2}) {
    const auto S = singular_mode_series(j, lp, params);
    auto residual = [&](double eta) {
      const auto modes = singular_mode_matrices(eta, lp, params, sel.K);
      Matrix4cd approx = Matrix4cd::Zero();
      const Complex iu(0.0, 1.0);
      for (int k = 0; k < 5; ++k)
        approx += std::pow(iu, k % 2) * std::pow(eta, -k) * S[k].cast<Complex>();
      return max_abs(modes.m_star[j - 1] - approx);
    };
    const double c50 = residual(50.0) * std::pow(50.0, 5);
    const double c100 = residual(100.0) * std::pow(100.0, 5);
    const double c200 = residual(200.0) * std::pow(200.0, 5);
    CHECK(c100 < 3.0 * c50 + 1e-12);
    CHECK(c200 < 3.0 * c50 + 1e-12);
    CHECK(c50 < 3.0 * std::max(c100, 1e-12) + 1.0);
  }

  // |M2*(eta) - M2*,0| * eta stays bounded over [20, 200]
  const auto S2 = singular_mode_series(2, lp, params);
  double bound = 0.0;
  for (double eta = 20.0; eta <= 200.0; eta *= 1.4) {
    const auto modes = singular_mode_matrices(eta, lp, params, sel.K);
    bound = std::max(bound,
                     max_abs(modes.m_star[1] - S2[0].cast<Complex>()) * eta);
  }
  CHECK(bound < 10.0);

  // raw 4x4 adjugate form: column-4 slaving residual decays at rate >= 1/eta
  // (measured ~eta^-10; probe below the eta ~ 32 round-off floor)
  for (int j = 0; j < 3; ++j) {
    auto m34 = [&](double eta) {
      const auto modes = singular_mode_matrices(eta, lp, params, sel.K);
      double worst = 0.0;
      for (int k = 0; k < 3; ++k)
        worst = std::max(worst, std::abs(modes.m_star_raw[j](k, 3) +
                                         params.heat_q * modes.m_star_raw[j](k, 2)));
      return worst;
    };
    const double r8 = m34(8.0), r16 = m34(16.0);
    CHECK(r16 <= 0.62 * r8 + 1e-14);
  }
}

TEST_CASE("long-wave data: wave speeds, diffusion signs, tabulated entries") {
  const auto params = default_parameters();
  const auto lp = equilibrium_point(params);
  const auto lw = longwave_matrices(lp, params);
  CHECK(lw.betas[0] == 0.0);
  CHECK(lw.betas[1] == doctest::Approx(-lp.sound_speed).epsilon(1e-14));
  CHECK(lw.betas[2] == doctest::Approx(lp.sound_speed).epsilon(1e-14));
  for (double a : lw.alphas) CHECK(a > 0.0);
  CHECK(lw.M0[0](0, 0) == doctest::Approx(0.16 / 0.56).epsilon(1e-13));
}

TEST_CASE("long-wave matrices match the small-eta projector limits") {
  // generic well-ordered parameters: at the defaults alpha1 = D exactly and
  // the thermal/reactant branches coalesce as eta -> 0
  const auto sm = generic_system();
  const auto lw = longwave_matrices(sm.lp, sm.params);
  const double q = sm.params.heat_q;

  auto modes_at = [&](double eta) {
    const auto ms = mode_matrices(eigenvalues_at(eta, sm), sm);
    REQUIRE_FALSE(ms.degenerate);
    return ms;
  };
  const double eta0 = 2e-3;
  const auto mA = modes_at(eta0), mB = modes_at(eta0 / 2), mC = modes_at(eta0 / 4);
  for (int j = 0; j < 3; ++j) {
    // limit and first order by 3-point Richardson in eta
    const Matrix4cd lim =
        (mA.m_hat[j] - 6.0 * mB.m_hat[j] + 8.0 * mC.m_hat[j]) / 3.0;
    double err0 = 0.0, err_slave = 0.0;
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 3; ++c)
        err0 = std::max(err0, std::abs(lim(r, c) - lw.M0[j](r, c)));
      err_slave = std::max(err_slave, std::abs(lim(r, 3) + q * lim(r, 2)));
    }
    CHECK(err0 < 1e-6);
    CHECK(err_slave < 1e-6);
    // O(eta) convergence rate toward M0 on the first three columns
    auto dist = [&](const ModeSet& ms) {
      double d = 0.0;
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 3; ++c)
          d = std::max(d, std::abs(ms.m_hat[j](r, c) - lw.M0[j](r, c)));
      return d;
    };
    CHECK(dist(mB) < 0.65 * dist(mA) + 1e-12);
    // first-order term matches i eta M1
    const Matrix4cd d1 = (mA.m_hat[j] - lim) / Complex(0.0, eta0);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 3; ++c)
        CHECK(std::abs(d1(r, c) - lw.M1[j](r, c)) < 2e-2);
  }
}

TEST_SUITE_END();
