#include "rns/spectral.hpp"

#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rns {

namespace {

constexpr Complex kI{0.0, 1.0};

// ---- truncated power series in w = 1/eta^2, order 12 ----------------------

constexpr int kOrd = 12;

struct Series {
  std::array<double, kOrd> c{};
};

Series smul(const Series& x, const Series& y) {
  Series z;
  for (int i = 0; i < kOrd; ++i)
    for (int j = 0; j + i < kOrd; ++j) z.c[i + j] += x.c[i] * y.c[j];
  return z;
}

Series sdiv(const Series& x, const Series& y) {
  Series z;
  const double inv0 = 1.0 / y.c[0];
  for (int i = 0; i < kOrd; ++i) {
    double acc = x.c[i];
    for (int j = 1; j <= i; ++j) acc -= z.c[i - j] * y.c[j];
    z.c[i] = acc * inv0;
  }
  return z;
}

Series sadd(const Series& x, const Series& y) {
  Series z;
  for (int i = 0; i < kOrd; ++i) z.c[i] = x.c[i] + y.c[i];
  return z;
}

Series sscale(double a, const Series& x) {
  Series z;
  for (int i = 0; i < kOrd; ++i) z.c[i] = a * x.c[i];
  return z;
}

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Laurent branches of the characteristic cubic: lambda = m(w)/w with
// w = eta^-2 and P(m, w) = m^3 + S2 m^2 + (T2 + T1 w) m + U2 w = 0, solved by
// w-adic Newton from the leading roots {0, -mu/v, -nu theta_e / v}. Returns
// per branch the coefficients (lead, b, L2, L4, ..., L(2*(kOrd-2))).
std::array<Series, 3> laurent_branches(const LinearizationPoint& lp,
                                       const GasParameters& params) {
  const double v = lp.v_bar;
  const double S2 = params.mu / v + params.nu * lp.theta_e / v;
  const double T2 = (params.mu / v) * (params.nu * lp.theta_e / v);
  const double T1 = lp.p * lp.p_e - lp.p_v;
  const double U2 = -lp.p_v * params.nu * lp.theta_e / v;
  auto F = [&](const Series& m) {
    Series lin;
    lin.c[0] = T2;
    lin.c[1] = T1;
    Series cst;
    cst.c[1] = U2;
    return sadd(sadd(smul(smul(m, m), m), sscale(S2, smul(m, m))),
                sadd(smul(lin, m), cst));
  };
  auto Fm = [&](const Series& m) {
    Series lin;
    lin.c[0] = T2;
    lin.c[1] = T1;
    return sadd(sadd(sscale(3.0, smul(m, m)), sscale(2.0 * S2, m)), lin);
  };
  const double leads[3] = {0.0, -params.mu / v, -params.nu * lp.theta_e / v};
  std::array<Series, 3> out;
  for (int j = 0; j < 3; ++j) {
    Series m;
    m.c[0] = leads[j];
    for (int it = 0; it < 16; ++it) {
      const Series upd = sdiv(F(m), Fm(m));
      for (int k = 0; k < kOrd; ++k) m.c[k] -= upd.c[k];
    }
    out[j] = m;
  }
  return out;
}

// Conversion of Laurent coefficients L_{2m} (eta^-2m basis) to the
// (1+eta^2)^-k basis: A_k = sum_m binom(k-1, k-m) L_{2m}.
double basis_coeff(const Series& m, int k) {
  double a = 0.0;
  for (int mm = 1; mm <= k && mm + 1 < kOrd; ++mm)
    a += binom(k - 1, k - mm) * m.c[mm + 1];
  return a;
}

}  // namespace

SystemMatrices assemble_linearization(const LinearizationPoint& lp,
                                      const GasParameters& params) {
  SystemMatrices sm;
  sm.lp = lp;
  sm.params = params;
  const double v = lp.v_bar, u = lp.u_bar;
  const double p = lp.p, pv = lp.p_v, pe = lp.p_e;
  const double q = params.heat_q, mu = params.mu, nu = params.nu;
  const double cv = params.c_v, D = params.diff;

  Matrix4d& F = sm.fprime;
  F << 0.0, -1.0, 0.0, 0.0,                      //
      pv, -pe * u, pe, -q * pe,                  //
      pv * u, p - pe * u * u, pe * u, -q * pe * u,  //
      0.0, 0.0, 0.0, 0.0;

  Matrix4d& B = sm.bmat;
  B.setZero();
  B(1, 1) = mu / v;
  B(2, 1) = (mu / v - nu / (cv * v)) * u;
  B(2, 2) = nu / (cv * v);
  B(2, 3) = -q * nu / (cv * v) + q * D / (v * v);
  B(3, 3) = D / (v * v);
  return sm;
}

Matrix4cd symbol(double eta, const SystemMatrices& sm) {
  return -kI * eta * sm.fprime.cast<Complex>() -
         (eta * eta) * sm.bmat.cast<Complex>();
}

std::array<double, 4> cubic_factor(double eta, const SystemMatrices& sm) {
  const double s2 = sm.alpha_visc() + sm.alpha_therm();
  const double t2 = sm.alpha_visc() * sm.alpha_therm();
  const double t1 = sm.lp.p * sm.lp.p_e - sm.lp.p_v;
  const double u2 = -sm.lp.p_v * sm.alpha_therm() * sm.lp.v_bar;
  const double e2 = eta * eta, e4 = e2 * e2;
  return {u2 * e4, t2 * e4 + t1 * e2, s2 * e2, 1.0};
}

std::array<double, 5> characteristic_poly(double eta, const SystemMatrices& sm) {
  // Faddeev-LeVerrier on E(eta); coefficients of det(lambda I - E) are real.
  const Matrix4cd E = symbol(eta, sm);
  Matrix4cd M = E;
  std::array<Complex, 5> c{};
  c[4] = 1.0;
  Complex a = -M.trace();
  c[3] = a;
  M = E * (M + a * Matrix4cd::Identity());
  a = -M.trace() / 2.0;
  c[2] = a;
  M = E * (M + a * Matrix4cd::Identity());
  a = -M.trace() / 3.0;
  c[1] = a;
  M = E * (M + a * Matrix4cd::Identity());
  a = -M.trace() / 4.0;
  c[0] = a;
  std::array<double, 5> out{};
  for (int k = 0; k < 5; ++k) out[k] = c[k].real();
  return out;
}

double residual_scale(const std::array<double, 5>& c, Complex lambda) {
  const double al = std::abs(lambda);
  double s = 0.0, pw = 1.0;
  for (int k = 0; k < 5; ++k) {
    s += std::abs(c[k]) * pw;
    pw *= al;
  }
  return std::max(s, 1e-300);
}

namespace {

// Roots of the monic cubic factor via a balanced companion matrix plus Newton
// polish on the unscaled polynomial.
std::array<Complex, 3> cubic_roots(double eta, const SystemMatrices& sm) {
  const auto c = cubic_factor(eta, sm);
  if (eta == 0.0) return {0.0, 0.0, 0.0};
  const double kappa = 1.0 + eta * eta;
  const double a2 = c[2] / kappa, a1 = c[1] / (kappa * kappa),
               a0 = c[0] / (kappa * kappa * kappa);
  Eigen::Matrix3d comp = Eigen::Matrix3d::Zero();
  comp(0, 2) = -a0;
  comp(1, 2) = -a1;
  comp(2, 2) = -a2;
  comp(1, 0) = 1.0;
  comp(2, 1) = 1.0;
  Eigen::EigenSolver<Eigen::Matrix3d> es(comp, false);
  std::array<Complex, 3> r{};
  for (int j = 0; j < 3; ++j) {
    Complex lam = es.eigenvalues()[j] * kappa;
    for (int it = 0; it < 4; ++it) {
      const Complex p = ((lam + c[2]) * lam + c[1]) * lam + c[0];
      const Complex dp = (3.0 * lam + 2.0 * c[2]) * lam + c[1];
      if (std::abs(dp) == 0.0) break;
      lam -= p / dp;
    }
    r[j] = lam;
  }
  return r;
}

}  // namespace

EigenSet eigenvalues_at(double eta, const SystemMatrices& sm) {
  EigenSet out;
  out.eta = eta;
  const double lam4 = -sm.alpha_react() * eta * eta;
  out.lambdas[3] = lam4;
  auto r = cubic_roots(eta, sm);

  const double kappa = 1.0 + eta * eta;
  const double im_tol = 1e-11 * kappa;
  std::vector<Complex> reals, pair;
  for (auto& lam : r) {
    if (std::abs(lam.imag()) <= im_tol)
      reals.push_back(Complex(lam.real(), 0.0));
    else
      pair.push_back(lam);
  }
  if (pair.size() == 2 && reals.size() == 1) {
    out.lambdas[0] = reals[0];
    out.lambdas[1] = pair[0].imag() < 0 ? pair[0] : pair[1];
    out.lambdas[2] = pair[0].imag() < 0 ? pair[1] : pair[0];
  } else {
    std::array<Complex, 3> rr{r[0], r[1], r[2]};
    std::sort(rr.begin(), rr.end(),
              [](Complex a, Complex b) { return a.real() > b.real(); });
    out.lambdas[0] = rr[0];
    out.lambdas[1] = rr[1];
    out.lambdas[2] = rr[2];
  }

  const auto quart = characteristic_poly(eta, sm);
  const auto cub = cubic_factor(eta, sm);
  for (int j = 0; j < 3; ++j) {
    const Complex lam = out.lambdas[j];
    const Complex res = (lam - lam4) * polyval(cub.data(), 3, lam);
    if (std::abs(res) > 1e-8 * residual_scale(quart, lam))
      throw RootResidualTooLarge("eigenvalues_at: cubic root residual too large");
  }
  return out;
}

BranchTrack branch_track(const std::vector<double>& etas, const SystemMatrices& sm) {
  BranchTrack track;
  if (etas.empty()) return track;
  for (size_t i = 1; i < etas.size(); ++i)
    if (!(etas[i] > etas[i - 1]))
      throw Error("branch_track: eta grid must be strictly increasing");
  track.sets.reserve(etas.size());
  for (double e : etas) track.sets.push_back(eigenvalues_at(e, sm));

  // Audit adjacent samples by minimal-distance assignment over the three
  // cubic branches; intervals where the best and runner-up matchings are
  // within 10% contain a branch exchange and are flagged.
  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                  {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  auto n_real = [](const std::array<Complex, 4>& l) {
    int n = 0;
    for (int j = 0; j < 3; ++j)
      if (l[j].imag() == 0.0) ++n;
    return n;
  };
  for (size_t i = 1; i < track.sets.size(); ++i) {
    const auto& a = track.sets[i - 1].lambdas;
    const auto& b = track.sets[i].lambdas;
    double best = 1e300, second = 1e300;
    for (const auto& p : perms) {
      double cost = 0.0;
      for (int j = 0; j < 3; ++j) cost += std::abs(a[j] - b[p[j]]);
      if (cost < best) {
        second = best;
        best = cost;
      } else {
        second = std::min(second, cost);
      }
    }
    const double scale = 1.0 + std::abs(b[2]);
    // A conjugate pair collapsing onto (or emerging from) the real axis ties
    // the two candidate matchings exactly; that is a branch exchange, not a
    // resolvable assignment, and is reported as an ambiguous interval.
    const bool exchange = n_real(a) != n_real(b);
    if (second - best <= 1e-12 * scale && !exchange)
      throw AmbiguousBranch("branch_track: matching between adjacent samples is not unique");
    if (second < 1.1 * best || exchange)
      track.ambiguous_intervals.push_back(static_cast<int>(i - 1));
  }
  return track;
}

double spectral_gap_scan(double r, double R, const SystemMatrices& sm, int samples) {
  if (!(0.0 < r && r < R)) throw Error("spectral_gap_scan: need 0 < r < R");
  double worst = -1e300;
  for (int i = 0; i < samples; ++i) {
    const double eta =
        r * std::pow(R / r, samples == 1 ? 0.0 : double(i) / (samples - 1));
    const auto es = eigenvalues_at(eta, sm);
    for (const auto& lam : es.lambdas) worst = std::max(worst, lam.real());
  }
  if (worst >= 0.0) throw GapViolation("spectral_gap_scan: eigenvalue with nonnegative real part");
  return -worst;
}

ModeSet mode_matrices(const EigenSet& es, const SystemMatrices& sm) {
  ModeSet ms;
  ms.eta = es.eta;
  double scale = 0.0, min_sep = 1e300;
  for (int j = 0; j < 4; ++j) scale = std::max(scale, std::abs(es.lambdas[j]));
  for (int j = 0; j < 4; ++j)
    for (int k = j + 1; k < 4; ++k)
      min_sep = std::min(min_sep, std::abs(es.lambdas[j] - es.lambdas[k]));
  if (scale == 0.0 || min_sep < 1e-4 * scale) {
    ms.degenerate = true;
    return ms;
  }
  const Matrix4cd E = symbol(es.eta, sm);
  for (int j = 0; j < 4; ++j) {
    const Matrix4cd S = es.lambdas[j] * Matrix4cd::Identity() - E;
    Complex den = 1.0;
    for (int k = 0; k < 4; ++k)
      if (k != j) den *= es.lambdas[j] - es.lambdas[k];
    ms.m_hat[j] = adjugate4<Complex>(S) / den;
  }
  return ms;
}

GreensFrequencySlice greens_fourier(double eta, double t, const SystemMatrices& sm) {
  GreensFrequencySlice slice;
  slice.eta = eta;
  slice.t = t;
  if (t < 0.0) throw Error("greens_fourier: t must be nonnegative");
  if (t == 0.0) return slice;
  if (std::abs(eta) < 1e-3) {
    slice.ghat = (t * symbol(eta, sm)).exp();
    return slice;
  }
  const auto es = eigenvalues_at(eta, sm);
  const auto ms = mode_matrices(es, sm);
  if (ms.degenerate) {
    slice.ghat = (t * symbol(eta, sm)).exp();
    return slice;
  }
  Matrix4cd g = Matrix4cd::Zero();
  for (int j = 0; j < 4; ++j) g += std::exp(es.lambdas[j] * t) * ms.m_hat[j];
  slice.ghat = g;
  return slice;
}

HighFreqCoeffs highfreq_coeffs(const LinearizationPoint& lp,
                               const GasParameters& params) {
  HighFreqCoeffs hc;
  hc.alpha2 = params.mu / lp.v_bar;
  hc.alpha3 = params.nu * lp.theta_e / lp.v_bar;
  hc.alpha4 = params.diff / (lp.v_bar * lp.v_bar);
  const auto branches = laurent_branches(lp, params);
  for (int j = 0; j < 3; ++j) {
    hc.A[j] = {basis_coeff(branches[j], 1), basis_coeff(branches[j], 2),
               basis_coeff(branches[j], 3)};
    const double b = branches[j].c[1];
    if (j == 0)
      hc.beta1 = b;
    else if (j == 1)
      hc.beta2 = b;
    else
      hc.beta3 = b;
  }
  return hc;
}

ApproxEigenSet approx_eigenvalues(double eta, const LinearizationPoint& lp,
                                  const GasParameters& params,
                                  const std::array<double, 3>& K) {
  ApproxEigenSet out;
  out.eta = eta;
  out.coeffs = highfreq_coeffs(lp, params);
  out.K = K;
  const double w = 1.0 / (1.0 + eta * eta);
  const auto& hc = out.coeffs;
  auto tail = [&](int j) {
    return ((hc.A[j][2] * w + hc.A[j][1]) * w + hc.A[j][0]) * w - K[j] * w * w * w * w;
  };
  out.lambdas_star[0] = hc.beta1 + tail(0);
  out.lambdas_star[1] = -hc.alpha2 * eta * eta + hc.beta2 + tail(1);
  out.lambdas_star[2] = -hc.alpha3 * eta * eta + hc.beta3 + tail(2);
  out.lambdas_star[3] = -hc.alpha4 * eta * eta;
  return out;
}

namespace {

// Compensated Horner (Ogita-Rump-Oishi): evaluates a real polynomial as if in
// twice the working precision.
double comp_horner(const double* c, int deg, double x) {
  double s = c[deg];
  double comp = 0.0;
  for (int k = deg - 1; k >= 0; --k) {
    const double p = s * x;
    const double pe = std::fma(s, x, -p);
    const double t = p + c[k];
    const double z = t - p;
    const double se = (p - (t - z)) + (c[k] - z);
    s = t;
    comp = comp * x + (pe + se);
  }
  return s + comp;
}

}  // namespace

double approx_gap(double eta, int j, const SystemMatrices& sm,
                  const std::array<double, 3>& K) {
  const double w = 1.0 / (1.0 + eta * eta);
  if (std::abs(eta) <= 25.0) {
    // Root route: one Newton correction of the cubic at lambda_j*, with the
    // polynomial evaluated in compensated arithmetic. Beyond eta ~ 25 the
    // rounding of lambda_j* itself (eps * eta^2) exceeds the O(eta^-8) gap.
    const auto ap = approx_eigenvalues(eta, sm.lp, sm.params, K);
    const double lam_star = ap.lambdas_star[j];
    const auto c = cubic_factor(eta, sm);
    const double p = comp_horner(c.data(), 3, lam_star);
    const double dp = (3.0 * lam_star + 2.0 * c[2]) * lam_star + c[1];
    return p / dp;
  }
  // Series route: lambda_j and lambda_j* share the basis coefficients through
  // w^3, so the gap is -K_j w^4 minus the carried tail of the true branch.
  // Cross-validated against the root route on the overlap band in the tests.
  const auto branches = laurent_branches(sm.lp, sm.params);
  double gap = -K[j] * w * w * w * w;
  double wk = w * w * w * w;
  for (int k = 4; k + 1 < kOrd; ++k) {
    gap -= basis_coeff(branches[j], k) * wk;
    wk *= w;
  }
  return gap;
}

KSelection choose_K(const LinearizationPoint& lp, const GasParameters& params,
                    double k_max, double probe_min, double probe_max) {
  if (!params.well_ordered())
    throw Error("choose_K: parameters must be well ordered");
  const auto hc = highfreq_coeffs(lp, params);
  const int n = 400;
  std::vector<double> w(n), r1(n), r2(n), r3(n), r4(n);
  for (int i = 0; i < n; ++i) {
    const double eta = probe_min * std::pow(probe_max / probe_min, double(i) / (n - 1));
    const double e2 = eta * eta;
    const double wi = 1.0 / (1.0 + e2);
    auto tail = [&](int j) {
      return ((hc.A[j][2] * wi + hc.A[j][1]) * wi + hc.A[j][0]) * wi;
    };
    w[i] = wi * wi * wi * wi;
    r1[i] = hc.beta1 + tail(0);
    r2[i] = -hc.alpha2 * e2 + hc.beta2 + tail(1);
    r3[i] = -hc.alpha3 * e2 + hc.beta3 + tail(2);
    r4[i] = -hc.alpha4 * e2;
  }
  auto max_ratio = [&](auto&& f) {
    double m = -1e300;
    for (int i = 0; i < n; ++i) m = std::max(m, f(i));
    return m;
  };
  const double g1 = max_ratio([&](int i) { return r1[i] / w[i]; });
  const double g12 = max_ratio([&](int i) { return (r2[i] - r1[i]) / w[i]; });
  const double h2 = -max_ratio([&](int i) { return -(r2[i] - r4[i]) / w[i]; });
  const double g34 = max_ratio([&](int i) { return (r3[i] - r4[i]) / w[i]; });

  auto up = [](double x) {  // smallest 0.5-multiple strictly above x
    double m = 0.5 * std::floor(2.0 * x) + 0.5;
    while (m <= x) m += 0.5;
    return std::max(m, 0.0);
  };
  const double K1 = std::max(0.0, up(g1));
  const double K2 = std::max(K1 + 0.5, up(K1 + g12));
  const double K3 = std::max(K2 + 0.5, up(g34));
  if (K2 >= h2 || K1 > k_max || K2 > k_max || K3 > k_max)
    throw NoFeasibleK("choose_K: no feasible triple within the search budget");

  KSelection sel;
  sel.K = {K1, K2, K3};
  sel.probe_min = probe_min;
  sel.probe_max = probe_max;
  double worst = -1e300, min_gap = 1e300;
  for (int i = 0; i < n; ++i) {
    const double l1 = r1[i] - K1 * w[i];
    const double l2 = r2[i] - K2 * w[i];
    const double l3 = r3[i] - K3 * w[i];
    const double l4 = r4[i];
    if (!(0.0 > l1 && l1 > l2 && l2 > l4 && l4 > l3))
      throw NoFeasibleK("choose_K: ordering violated on the probe grid");
    worst = std::max({worst, l1, l2, l3, l4});
    min_gap = std::min({min_gap, l1 - l2, l2 - l4, l4 - l3, -l1});
  }
  sel.sigma0_star = -worst;
  sel.sigma1_star = min_gap;
  return sel;
}

Matrix4cd reactant_mode_matrix(double eta, const SystemMatrices& sm) {
  // (E - lambda4) annihilates (0, 0, q, 1) for every eta and u_bar, so the
  // reactant projector is the constant rank-one matrix v4 e4^T.
  (void)eta;
  Matrix4cd m = Matrix4cd::Zero();
  m(2, 3) = sm.params.heat_q;
  m(3, 3) = 1.0;
  return m;
}

namespace {

Eigen::Matrix3cd symbol3(double eta, const SystemMatrices& sm) {
  return -kI * eta * sm.fprime.topLeftCorner<3, 3>().cast<Complex>() -
         (eta * eta) * sm.bmat.topLeftCorner<3, 3>().cast<Complex>();
}

}  // namespace

SingularModes singular_mode_matrices(double eta, const LinearizationPoint& lp,
                                     const GasParameters& params,
                                     const std::array<double, 3>& K) {
  SingularModes out;
  out.eta = eta;
  const auto sm = assemble_linearization(lp, params);
  const auto ap = approx_eigenvalues(eta, lp, params, K);
  out.m4 = reactant_mode_matrix(eta, sm);

  const Matrix4cd E4 = symbol(eta, sm);
  const Matrix3cd E3 = symbol3(eta, sm);
  for (int j = 0; j < 3; ++j) {
    const double lam = ap.lambdas_star[j];
    // raw 4x4 adjugate form
    Complex den4 = 1.0;
    for (int k = 0; k < 4; ++k)
      if (k != j) den4 *= ap.lambdas_star[j] - ap.lambdas_star[k];
    out.m_star_raw[j] =
        adjugate4<Complex>(lam * Matrix4cd::Identity() - E4) / den4;
    // assembled form: non-reactive 3x3 block + slaved fourth column
    Complex den3 = 1.0;
    for (int k = 0; k < 3; ++k)
      if (k != j) den3 *= ap.lambdas_star[j] - ap.lambdas_star[k];
    const Matrix3cd m3 =
        adjugate3<Complex>(lam * Matrix3cd::Identity() - E3) / den3;
    Matrix4cd m = Matrix4cd::Zero();
    m.topLeftCorner<3, 3>() = m3;
    m.col(3).head<3>() = -params.heat_q * m3.col(2);
    out.m_star[j] = m;
  }
  return out;
}

Matrix4cd ghat_star(double eta, double t, const SystemMatrices& sm,
                    const std::array<double, 3>& K) {
  const auto modes = singular_mode_matrices(eta, sm.lp, sm.params, K);
  const auto ap = approx_eigenvalues(eta, sm.lp, sm.params, K);
  Matrix4cd g = std::exp(ap.lambdas_star[3] * t) * modes.m4;
  for (int j = 0; j < 3; ++j)
    g += std::exp(ap.lambdas_star[j] * t) * modes.m_star[j];
  return g;
}

Matrix4cd ghat_dagger(double eta, double t, const SystemMatrices& sm,
                      const std::array<double, 3>& K) {
  return greens_fourier(eta, t, sm).ghat - ghat_star(eta, t, sm, K);
}

LongWaveData longwave_matrices(const LinearizationPoint& lp,
                               const GasParameters& params) {
  LongWaveData lw;
  const double v = lp.v_bar, u = lp.u_bar;
  const double p = lp.p, pv = lp.p_v, pe = lp.p_e, te = lp.theta_e;
  const double mu = params.mu, nu = params.nu, q = params.heat_q;
  (void)q;
  const double d = p * pe - pv;
  const double s = std::sqrt(d);
  lw.alphas = {-nu * te * pv / (v * d),
               (nu * p * te * pe + mu * p * pe - mu * pv) / (2.0 * v * d),
               (nu * p * te * pe + mu * p * pe - mu * pv) / (2.0 * v * d)};
  lw.betas = {0.0, -s, s};

  Matrix4d M10 = Matrix4d::Zero();
  M10(0, 0) = p * pe / d;
  M10(0, 1) = -u * pe / d;
  M10(0, 2) = pe / d;
  M10(2, 0) = -p * pv / d;
  M10(2, 1) = u * pv / d;
  M10(2, 2) = -pv / d;

  Matrix4d M20 = Matrix4d::Zero();
  M20(0, 0) = -pv / (2.0 * d);
  M20(0, 1) = (u * pe - s) / (2.0 * d);
  M20(0, 2) = -pe / (2.0 * d);
  M20(1, 0) = pv / (2.0 * s);
  M20(1, 1) = 0.5 - u * pe / (2.0 * s);
  M20(1, 2) = pe / (2.0 * s);
  M20(2, 0) = (p + u * s) * pv / (2.0 * d);
  M20(2, 1) = (-pe * s * u * u - pv * u + p * s) / (2.0 * d);
  M20(2, 2) = pe * (p + u * s) / (2.0 * d);

  Matrix4d M30 = Matrix4d::Zero();
  M30(0, 0) = -pv / (2.0 * d);
  M30(0, 1) = (u * pe + s) / (2.0 * d);
  M30(0, 2) = -pe / (2.0 * d);
  M30(1, 0) = -pv / (2.0 * s);
  M30(1, 1) = 0.5 * (u * pe / s + 1.0);
  M30(1, 2) = -pe / (2.0 * s);
  M30(2, 0) = (p - u * s) * pv / (2.0 * d);
  M30(2, 1) = -(-pe * s * u * u + pv * u + p * s) / (2.0 * d);
  M30(2, 2) = pe * (p - u * s) / (2.0 * d);
  lw.M0 = {M10, M20, M30};

  const double d2 = d * d;
  const double d52 = d2 * s;

  Matrix4d M11 = Matrix4d::Zero();
  M11(0, 1) = p * nu * pe * te / (v * d2);
  M11(1, 0) = -p * nu * pe * pv * te / (v * d2);
  M11(1, 1) = u * nu * pe * pv * te / (v * d2);
  M11(1, 2) = -nu * pe * pv * te / (v * d2);
  M11(2, 0) = -p * u * nu * pe * pv * te / (v * d2);
  M11(2, 1) = -nu * (p - u * u * pe) * pv * te / (v * d2);
  M11(2, 2) = -u * nu * pe * pv * te / (v * d2);

  Matrix4d M21 = Matrix4d::Zero();
  M21(0, 0) = pv * (mu * pv - p * pe * (mu + 3.0 * nu * te)) / (4.0 * v * d52);
  M21(1, 0) = p * nu * pe * pv * te / (2.0 * v * d2);
  M21(2, 0) = p * pv *
              (pe * (p * mu + nu * (p + 2.0 * u * s) * te) - pv * (mu - 2.0 * nu * te)) /
              (4.0 * v * d52);
  M21(0, 1) = pe *
              (-2.0 * p * nu * s * te - u * pv * (mu - 2.0 * nu * te) +
               p * u * pe * (mu + nu * te)) /
              (4.0 * v * d52);
  M21(1, 1) = -(pe * (p * s * mu + (2.0 * u * nu * pv - p * nu * s) * te) -
                mu * s * pv) /
              (4.0 * v * d2);
  M21(2, 1) = -(2.0 * p * p * u * (mu - nu * te) * pe * pe +
                u * pv * (nu * (5.0 * p + 2.0 * u * s) * te - 3.0 * p * mu) * pe +
                pv * (u * mu * pv - 2.0 * p * nu * s * te)) /
              (4.0 * v * d52);
  M21(0, 2) = -pe * (p * pe * (mu + nu * te) - pv * (mu - 2.0 * nu * te)) /
              (4.0 * v * d52);
  M21(1, 2) = nu * pe * pv * te / (2.0 * v * d2);
  M21(2, 2) = pe *
              (pe * (mu - nu * te) * p * p +
               pv * (2.0 * nu * (2.0 * p + u * s) * te - p * mu)) /
              (4.0 * v * d52);

  Matrix4d M31 = Matrix4d::Zero();
  M31(0, 0) = pv * (p * pe * (mu + 3.0 * nu * te) - mu * pv) / (4.0 * v * d52);
  M31(1, 0) = p * nu * pe * pv * te / (2.0 * v * d2);
  M31(2, 0) = pv *
              (p * pv * (mu - 2.0 * nu * te) -
               p * pe * (p * mu + nu * (p - 2.0 * u * s) * te)) /
              (4.0 * v * d52);
  M31(0, 1) = -pe *
              (2.0 * p * nu * s * te - u * pv * (mu - 2.0 * nu * te) +
               p * u * pe * (mu + nu * te)) /
              (4.0 * v * d52);
  M31(1, 1) = (pe * (p * mu * s - nu * (s * p + 2.0 * u * pv) * te) - mu * s * pv) /
              (4.0 * v * d2);
  M31(2, 1) = (2.0 * p * p * u * (mu - nu * te) * pe * pe +
               u * pv * (nu * (5.0 * p - 2.0 * u * s) * te - 3.0 * p * mu) * pe +
               pv * (u * mu * pv + 2.0 * p * nu * s * te)) /
              (4.0 * v * d52);
  M31(0, 2) = pe * (p * pe * (mu + nu * te) - pv * (mu - 2.0 * nu * te)) /
              (4.0 * v * d52);
  M31(1, 2) = nu * pe * pv * te / (2.0 * v * d2);
  M31(2, 2) = pe *
              (pe * (nu * te - mu) * p * p +
               pv * (p * mu + (2.0 * u * nu * s - 4.0 * p * nu) * te)) /
              (4.0 * v * d52);
  lw.M1 = {M11, M21, M31};
  return lw;
}

std::array<Matrix4d, 5> singular_mode_series(int j, const LinearizationPoint& lp,
                                             const GasParameters& params) {
  const double v = lp.v_bar, u = lp.u_bar;
  const double p = lp.p, pv = lp.p_v, pe = lp.p_e, te = lp.theta_e;
  const double mu = params.mu, nu = params.nu, q = params.heat_q;
  std::array<Matrix4d, 5> S{};
  for (auto& m : S) m.setZero();

  if (j == 1) {
    S[0](0, 0) = 1.0;

    S[1](0, 1) = v / mu;
    S[1](1, 0) = -v * pv / mu;
    S[1](2, 0) = -u * v * pv / mu;

    S[2](0, 0) = -v * v * pv / (mu * mu);
    S[2](0, 1) = -u * v * v * pe / (nu * mu * te);
    S[2](0, 2) = v * v * pe / (nu * mu * te);
    S[2](0, 3) = -q * v * v * pe / (nu * mu * te);
    S[2](1, 1) = v * v * pv / (mu * mu);
    S[2](2, 0) = -p * v * v * pv / (nu * mu * te);
    S[2](2, 1) = u * v * v * pv / (mu * mu);

    const double v3 = v * v * v;
    S[3](0, 1) = -v3 * (p * mu * pe + 2.0 * nu * pv * te) / (nu * mu * mu * mu * te);
    S[3](1, 0) = v3 * pv * (p * mu * pe + 2.0 * nu * pv * te) / (nu * mu * mu * mu * te);
    S[3](1, 1) = u * v3 * pe * pv / (nu * mu * mu * te);
    S[3](1, 2) = -v3 * pe * pv / (nu * mu * mu * te);
    S[3](1, 3) = q * v3 * pe * pv / (nu * mu * mu * te);
    S[3](2, 0) = u * v3 * pv * (p * mu * pe + 2.0 * nu * pv * te) / (nu * mu * mu * mu * te);
    S[3](2, 1) = -v3 * (p * pv - u * u * pe * pv) / (nu * mu * mu * te);
    S[3](2, 2) = -u * v3 * pe * pv / (nu * mu * mu * te);
    S[3](2, 3) = q * u * v3 * pe * pv / (nu * mu * mu * te);

    const double v4 = v3 * v;
    const double mu2 = mu * mu, mu3 = mu2 * mu, mu4 = mu3 * mu;
    const double nt = nu * te;
    S[4](0, 0) = v4 * (p * pe * pv * mu2 + 2.0 * p * nt * pe * pv * mu + 3.0 * nt * nt * pv * pv) /
                 (nt * nt * mu4);
    S[4](0, 1) = u * v4 * pe * (p * mu * pe + mu * pv + 2.0 * nt * pv) / (nt * nt * mu3);
    S[4](1, 1) = -v4 * pv * (2.0 * p * mu * pe + 3.0 * nt * pv) / (nt * mu4);
    S[4](2, 0) = p * v4 * pv * (p * mu * pe + mu * pv + 2.0 * nt * pv) / (nt * nt * mu3);
    S[4](2, 1) = v4 * (p * u * pe * pv * mu2 - 2.0 * p * u * nt * pe * pv * mu -
                       3.0 * u * nt * nt * pv * pv) /
                 (nt * nt * mu4);
    S[4](0, 2) = -v4 * pe * (p * mu * pe + mu * pv + 2.0 * nt * pv) / (nt * nt * mu3);
    S[4](0, 3) = q * v4 * pe * (p * mu * pe + mu * pv + 2.0 * nt * pv) / (nt * nt * mu3);
    S[4](2, 2) = -p * v4 * pe * pv / (nt * nt * mu2);
    S[4](2, 3) = q * p * v4 * pe * pv / (nt * nt * mu2);
    return S;
  }

  if (j == 2) {
    const double mnt = mu - nu * te;
    S[0](1, 1) = 1.0;
    S[0](2, 1) = u;

    S[1](0, 1) = -v / mu;
    S[1](1, 0) = v * pv / mu;
    S[1](1, 1) = -u * v * pe / mnt;
    S[1](1, 2) = v * pe / mnt;
    S[1](1, 3) = -q * v * pe / mnt;
    S[1](2, 0) = u * v * pv / mu;
    S[1](2, 1) = v * (p - u * u * pe) / mnt;
    S[1](2, 2) = u * v * pe / mnt;
    S[1](2, 3) = -q * u * v * pe / mnt;

    const double v2 = v * v;
    S[2](0, 0) = v2 * pv / (mu * mu);
    S[2](0, 1) = -u * v2 * pe / (mu * mnt);
    S[2](0, 2) = v2 * pe / (mu * mnt);
    S[2](0, 3) = -q * v2 * pe / (mu * mnt);
    S[2](1, 1) = v2 * (p * mu * mu * pe - pv * mnt * mnt) / (mu * mu * mnt * mnt);
    S[2](2, 0) = -p * v2 * pv / (mu * mnt);
    S[2](2, 1) = u * v2 * (2.0 * p * mu * mu * pe - pv * mnt * mnt) / (mu * mu * mnt * mnt);
    S[2](2, 2) = -p * v2 * pe / (mnt * mnt);
    S[2](2, 3) = q * p * v2 * pe / (mnt * mnt);

    const double v3 = v2 * v;
    const double g = 2.0 * pv + p * mu * pe * (nu * te - 2.0 * mu) / (mnt * mnt);
    const double h =
        2.0 * p * mu * mu * pe - pv * (2.0 * mu * mu - 3.0 * nu * te * mu + nu * nu * te * te);
    S[3](0, 1) = v3 * g / (mu * mu * mu);
    S[3](1, 0) = -v3 * pv * g / (mu * mu * mu);
    S[3](1, 1) = -u * v3 * pe * h / (mu * mu * mnt * mnt * mnt);
    S[3](1, 2) = v3 * pe * h / (mu * mu * mnt * mnt * mnt);
    S[3](1, 3) = -q * v3 * pe * h / (mu * mu * mnt * mnt * mnt);
    S[3](2, 0) = -u * v3 * pv * (2.0 * pv * mnt * mnt + p * mu * pe * (nu * te - 2.0 * mu)) /
                 (mu * mu * mu * mnt * mnt);
    S[3](2, 1) = v3 * (p - u * u * pe) * h / (mu * mu * mnt * mnt * mnt);
    S[3](2, 2) = u * v3 * pe * h / (mu * mu * mnt * mnt * mnt);
    S[3](2, 3) = -q * u * v3 * pe * h / (mu * mu * mnt * mnt * mnt);

    const double v4 = v3 * v;
    const double mu2 = mu * mu, mu3 = mu2 * mu, mu4 = mu3 * mu;
    const double nt = nu * te;
    const double mnt3 = mnt * mnt * mnt, mnt4 = mnt3 * mnt;
    const double r = p * mu * pe * (3.0 * mu - nt) + pv * (-3.0 * mu2 + 5.0 * nt * mu - 2.0 * nt * nt);
    S[4](0, 0) = v4 * pv * (p * mu * pe * (3.0 * mu - 2.0 * nt) / (mnt * mnt) - 3.0 * pv) / mu4;
    S[4](2, 0) = -p * v4 * pv * r / (mu3 * mnt3);
    S[4](0, 1) = -u * v4 * pe * r / (mu3 * mnt3);
    S[4](1, 1) = v4 *
                 (3.0 * p * p * pe * pe * mu4 +
                  2.0 * p * pe * pv * (-3.0 * mu3 + 6.0 * nt * mu2 - 4.0 * nt * nt * mu + nt * nt * nt) * mu +
                  3.0 * pv * pv * mnt4) /
                 (mu4 * mnt4);
    S[4](2, 1) = u * v4 *
                 (6.0 * p * p * pe * pe * mu4 +
                  p * pe * pv * (-9.0 * mu3 + 16.0 * nt * mu2 - 9.0 * nt * nt * mu + 2.0 * nt * nt * nt) * mu +
                  3.0 * pv * pv * mnt4) /
                 (mu4 * mnt4);
    S[4](0, 2) = v4 * pe * r / (mu3 * mnt3);
    S[4](0, 3) = -q * v4 * pe * r / (mu3 * mnt3);
    S[4](2, 2) = p * v4 * pe * (pv * (3.0 * mu2 - 4.0 * nt * mu + nt * nt) - 3.0 * p * mu2 * pe) /
                 (mu2 * mnt4);
    S[4](2, 3) = -q * p * v4 * pe *
                 (pv * (3.0 * mu2 - 4.0 * nt * mu + nt * nt) - 3.0 * p * mu2 * pe) / (mu2 * mnt4);
    return S;
  }

  // j == 3: leading order from mode-sum completeness; higher orders not carried.
  S[0](2, 1) = -u;
  S[0](2, 2) = 1.0;
  S[0](2, 3) = -q;
  return S;
}

namespace {

// Inverse transform of per-frequency samples onto the node grid
// x_i = -L + i dx:  G(x_i) = (1/(2L)) sum_k f(eta_k) e^{i eta_k x_i},
// eta_k = pi ktilde / L in FFT order.
struct FourierInverter {
  int n;
  double L;
  Eigen::FFT<double> fft;

  std::vector<double> etas() const {
    std::vector<double> e(n);
    for (int k = 0; k < n; ++k) {
      const int kt = (k <= n / 2) ? k : k - n;
      e[k] = M_PI * kt / L;
    }
    return e;
  }

  // in: samples at etas() order; out: real values and max imaginary residue.
  std::pair<ArrayXd, double> invert(std::vector<Complex>& in) {
    for (int k = 0; k < n; ++k)
      if (k % 2 == 1) in[k] = -in[k];  // phase shift to x = -L + i dx
    std::vector<Complex> out(n);
    fft.inv(out, in);
    ArrayXd re(n);
    double imag_res = 0.0;
    const double scale = n / (2.0 * L);
    for (int i = 0; i < n; ++i) {
      re[i] = scale * out[i].real();
      imag_res = std::max(imag_res, std::abs(scale * out[i].imag()));
    }
    return {re, imag_res};
  }
};

}  // namespace

GreensPhysicalSlice greens_physical(double t, const GridSpec& grid,
                                    const SystemMatrices& sm) {
  if (!(t > 0.0)) throw Error("greens_physical: t must be positive");
  grid.validate();
  const double dx = grid.dx();
  const double alpha_min =
      std::min({sm.alpha_visc(), sm.alpha_therm(), sm.alpha_react()});
  if (dx > std::sqrt(alpha_min * t) / 4.0)
    throw UnderResolved("greens_physical: dx must resolve sqrt(alpha_min t)/4");

  const auto hc = highfreq_coeffs(sm.lp, sm.params);
  GreensPhysicalSlice slice;
  slice.t = t;
  slice.delta_coeff = std::exp(hc.beta1 * t);
  slice.gauss_alpha = {hc.alpha2, hc.alpha3, hc.alpha4};
  slice.gauss_beta = {hc.beta2, hc.beta3, 0.0};

  const int n = grid.cells;
  FourierInverter inv{n, grid.half_width, {}};
  const auto etas = inv.etas();
  std::vector<Matrix4cd> ghats(n);
  for (int k = 0; k < n; ++k) {
    // conjugate symmetry: Ghat(-eta) = conj(Ghat(eta))
    if (etas[k] < 0.0) continue;
    ghats[k] = greens_fourier(etas[k], t, sm).ghat;
    ghats[k](0, 0) -= slice.delta_coeff;
  }
  for (int k = 0; k < n; ++k)
    if (etas[k] < 0.0) ghats[k] = ghats[n - k].conjugate();
  ghats[n / 2] = ghats[n / 2].real().cast<Complex>();  // unpaired Nyquist mode

  slice.xs.resize(n);
  for (int i = 0; i < n; ++i) slice.xs[i] = -grid.half_width + i * dx;
  slice.values.assign(n, Matrix4d::Zero());
  std::vector<Complex> line(n);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      for (int k = 0; k < n; ++k) line[k] = ghats[k](r, c);
      auto [re, resid] = inv.invert(line);
      slice.max_imag_residue = std::max(slice.max_imag_residue, resid);
      for (int i = 0; i < n; ++i) slice.values[i](r, c) = re[i];
    }
  return slice;
}

SplitSlices split_singular_regular(double t, const GridSpec& grid,
                                   const SystemMatrices& sm,
                                   const std::array<double, 3>& K) {
  if (!(t > 0.0)) throw Error("split_singular_regular: t must be positive");
  grid.validate();
  const auto hc = highfreq_coeffs(sm.lp, sm.params);
  const int n = grid.cells;
  FourierInverter inv{n, grid.half_width, {}};
  const auto etas = inv.etas();

  SplitSlices out;
  for (auto* s : {&out.singular, &out.regular}) {
    s->t = t;
    s->xs.resize(n);
    for (int i = 0; i < n; ++i) s->xs[i] = -grid.half_width + i * grid.dx();
    s->values.assign(n, Matrix4d::Zero());
  }
  out.singular.delta_coeff = std::exp(hc.beta1 * t);
  out.singular.gauss_alpha = {hc.alpha2, hc.alpha3, hc.alpha4};
  out.singular.gauss_beta = {hc.beta2, hc.beta3, 0.0};

  std::vector<Matrix4cd> star(n), dagger(n);
  for (int k = 0; k < n; ++k) {
    if (etas[k] < 0.0) continue;
    const Matrix4cd gs = ghat_star(etas[k], t, sm, K);
    dagger[k] = greens_fourier(etas[k], t, sm).ghat - gs;
    star[k] = gs;
    star[k](0, 0) -= out.singular.delta_coeff;
  }
  for (int k = 0; k < n; ++k)
    if (etas[k] < 0.0) {
      star[k] = star[n - k].conjugate();
      dagger[k] = dagger[n - k].conjugate();
    }
  star[n / 2] = star[n / 2].real().cast<Complex>();
  dagger[n / 2] = dagger[n / 2].real().cast<Complex>();

  std::vector<Complex> line(n);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      for (int k = 0; k < n; ++k) line[k] = star[k](r, c);
      auto [re_s, res_s] = inv.invert(line);
      out.singular.max_imag_residue = std::max(out.singular.max_imag_residue, res_s);
      for (int k = 0; k < n; ++k) line[k] = dagger[k](r, c);
      auto [re_d, res_d] = inv.invert(line);
      out.regular.max_imag_residue = std::max(out.regular.max_imag_residue, res_d);
      for (int i = 0; i < n; ++i) {
        out.singular.values[i](r, c) = re_s[i];
        out.regular.values[i](r, c) = re_d[i];
      }
    }
  return out;
}

}  // namespace rns
