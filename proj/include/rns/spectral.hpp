#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <vector>

#include "rns/errors.hpp"
#include "rns/params.hpp"

namespace rns {

using Complex = std::complex<double>;
using Eigen::Matrix3cd;
using Eigen::Matrix4cd;
using Eigen::Matrix4d;

// Coefficient matrices of the linearized balance law
//   U_t + F'(Ubar) U_x = B(Ubar) U_xx,  U = (v, u, E, z).
struct SystemMatrices {
  Matrix4d fprime = Matrix4d::Zero();
  Matrix4d bmat = Matrix4d::Zero();
  LinearizationPoint lp;
  GasParameters params;

  // Diffusion scales mu/v, nu*theta_e/v, D/v^2 read off the diagonal of B.
  double alpha_visc() const { return bmat(1, 1); }
  double alpha_therm() const { return bmat(2, 2); }
  double alpha_react() const { return bmat(3, 3); }
};

SystemMatrices assemble_linearization(const LinearizationPoint& lp,
                                      const GasParameters& params);

// Frequency-domain generator E(eta) = -i eta F' - eta^2 B, so that
// d/dt Ghat = E Ghat, Ghat(0) = I.
Matrix4cd symbol(double eta, const SystemMatrices& sm);

// Coefficients c[0..4] of det(lambda I + i eta F' + eta^2 B) with c[4] = 1.
// Real for real eta; factors exactly as (lambda + eta^2 D/v^2) * cubic.
std::array<double, 5> characteristic_poly(double eta, const SystemMatrices& sm);

// Coefficients c[0..3] (monic, c[3] = 1) of the non-reactive cubic factor.
std::array<double, 4> cubic_factor(double eta, const SystemMatrices& sm);

template <typename Scalar, typename Coef>
Scalar polyval(const Coef* c, int degree, Scalar x) {
  Scalar acc = Scalar(c[degree]);
  for (int k = degree - 1; k >= 0; --k) acc = acc * x + Scalar(c[k]);
  return acc;
}

// Residual scale sum_k |c_k| |lambda|^k used for relative root residuals.
double residual_scale(const std::array<double, 5>& c, Complex lambda);

// Adjugate (transposed cofactor matrix) computed entrywise; adj(A) A = det(A) I.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> adjugate3(const Eigen::Matrix<Scalar, 3, 3>& m) {
  Eigen::Matrix<Scalar, 3, 3> a;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const int r0 = (j + 1) % 3, r1 = (j + 2) % 3;
      const int c0 = (i + 1) % 3, c1 = (i + 2) % 3;
      a(i, j) = m(r0, c0) * m(r1, c1) - m(r0, c1) * m(r1, c0);
    }
  return a;
}

template <typename Scalar>
Eigen::Matrix<Scalar, 4, 4> adjugate4(const Eigen::Matrix<Scalar, 4, 4>& m) {
  Eigen::Matrix<Scalar, 4, 4> a;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      Eigen::Matrix<Scalar, 3, 3> minor;
      int rr = 0;
      for (int r = 0; r < 4; ++r) {
        if (r == j) continue;
        int cc = 0;
        for (int c = 0; c < 4; ++c) {
          if (c == i) continue;
          minor(rr, cc++) = m(r, c);
        }
        ++rr;
      }
      const Scalar det3 = minor(0, 0) * (minor(1, 1) * minor(2, 2) - minor(1, 2) * minor(2, 1)) -
                          minor(0, 1) * (minor(1, 0) * minor(2, 2) - minor(1, 2) * minor(2, 0)) +
                          minor(0, 2) * (minor(1, 0) * minor(2, 1) - minor(1, 1) * minor(2, 0));
      a(i, j) = (((i + j) % 2) ? Scalar(-1) : Scalar(1)) * det3;
    }
  return a;
}

// Eigenvalue quadruple at one frequency. lambdas[3] is pinned to the exact
// reactant root -D eta^2 / v^2. The first three follow the regime labeling:
// with a conjugate acoustic pair present, lambda2 has Im < 0 and lambda3
// Im > 0 while lambda1 is the real root; once the pair has merged onto the
// real axis the labels are by descending real part (lambda1 bounded,
// lambda2 ~ -mu eta^2/v, lambda3 ~ -nu theta_e eta^2/v).
struct EigenSet {
  double eta = 0.0;
  std::array<Complex, 4> lambdas{};
  bool label4_exact = true;
};

EigenSet eigenvalues_at(double eta, const SystemMatrices& sm);

struct BranchTrack {
  std::vector<EigenSet> sets;
  // Indices of grid intervals where two candidate matchings were within 10%
  // of each other (branch exchange neighborhood).
  std::vector<int> ambiguous_intervals;
};

BranchTrack branch_track(const std::vector<double>& etas, const SystemMatrices& sm);

// Uniform spectral gap: -max over sampled real eta in [r, R] and j of
// Re(lambda_j). Throws GapViolation if the maximum real part is >= 0.
double spectral_gap_scan(double r, double R, const SystemMatrices& sm,
                         int samples = 400);

// Spectral projectors M_j = adj(lambda_j I + i eta F' + eta^2 B) /
// prod_{k != j}(lambda_j - lambda_k). Marked degenerate (and left unset) when
// the minimal eigenvalue separation falls below 1e-4 * max_j |lambda_j|.
struct ModeSet {
  double eta = 0.0;
  std::array<Matrix4cd, 4> m_hat{};
  bool degenerate = false;
};

ModeSet mode_matrices(const EigenSet& es, const SystemMatrices& sm);

struct GreensFrequencySlice {
  double eta = 0.0;
  double t = 0.0;
  Matrix4cd ghat = Matrix4cd::Identity();
};

// Mode-sum sum_j exp(lambda_j t) M_j; falls back to the dense matrix
// exponential of t E(eta) when |eta| < 1e-3 or the spectrum is degenerate.
GreensFrequencySlice greens_fourier(double eta, double t, const SystemMatrices& sm);

// High-frequency expansion data: lambda_1 ~ beta1 + sum_k A[0][k-1] w^k,
// lambda_{2,3} ~ -alpha_{2,3} eta^2 + beta_{2,3} + sum_k A[j][k-1] w^k with
// w = 1/(1 + eta^2); alpha4 = D/v^2. Derived by series inversion of the
// characteristic cubic, exact to the order carried.
struct HighFreqCoeffs {
  double beta1 = 0.0;
  double alpha2 = 0.0, beta2 = 0.0;
  double alpha3 = 0.0, beta3 = 0.0;
  double alpha4 = 0.0;
  // A[j][k]: branch j+1, power k+1 of w.
  std::array<std::array<double, 3>, 3> A{};
};

HighFreqCoeffs highfreq_coeffs(const LinearizationPoint& lp,
                               const GasParameters& params);

struct ApproxEigenSet {
  double eta = 0.0;
  std::array<double, 4> lambdas_star{};
  HighFreqCoeffs coeffs;
  std::array<double, 3> K{};
};

ApproxEigenSet approx_eigenvalues(double eta, const LinearizationPoint& lp,
                                  const GasParameters& params,
                                  const std::array<double, 3>& K);

// Signed distance lambda_j*(eta) - lambda_j(eta) for j = 0, 1, 2 in the
// all-real high-frequency regime, measured as one Newton correction of the
// cubic factor at lambda_j* with compensated (twice-working-precision)
// polynomial evaluation. Plain double evaluation cannot resolve the
// O(|eta|^-8) gap against roots of size eta^2 once eta is large.
double approx_gap(double eta, int j, const SystemMatrices& sm,
                  const std::array<double, 3>& K);

struct KSelection {
  std::array<double, 3> K{};
  double sigma0_star = 0.0;  // -max Re(lambda_j*) over the probe grid
  double sigma1_star = 0.0;  // min pairwise real-part gap over the probe grid
  double probe_min = 1.0;
  double probe_max = 100.0;
};

// Smallest K1 < K2 < K3 on a 0.5-step grid such that on the real probe grid
// all four Re(lambda_j*) < 0 with 0 > Re l1* > Re l2* > Re l4* > Re l3*.
KSelection choose_K(const LinearizationPoint& lp, const GasParameters& params,
                    double k_max = 100.0, double probe_min = 1.0,
                    double probe_max = 100.0);

// Reactant mode projector; equals the constant matrix with q at (2,3) and 1
// at (3,3) (0-based) whenever u_bar = 0, for every eta.
Matrix4cd reactant_mode_matrix(double eta, const SystemMatrices& sm);

// Approximate mode matrices at lambda_j*. The raw form evaluates the 4x4
// adjugate formula directly. The assembled form evaluates the adjugate of the
// non-reactive 3x3 subsystem and extends it by the column slaving
// (M)_{k4} = -q (M)_{k3}, zero fourth row, which removes the spurious
// reactant-direction component that the raw form picks up away from the
// high-frequency regime.
struct SingularModes {
  double eta = 0.0;
  std::array<Matrix4cd, 3> m_star{};      // assembled (slaved column) form
  std::array<Matrix4cd, 3> m_star_raw{};  // raw 4x4 adjugate form
  Matrix4cd m4 = Matrix4cd::Zero();       // exact reactant projector
};

SingularModes singular_mode_matrices(double eta, const LinearizationPoint& lp,
                                     const GasParameters& params,
                                     const std::array<double, 3>& K);

// Appendix-style series M*_j(eta) = S[0] + i S[1]/eta + S[2]/eta^2 +
// i S[3]/eta^3 + S[4]/eta^4 + O(eta^-5), real matrices; j = 1, 2 carry all
// five orders, j = 3 only the leading one.
std::array<Matrix4d, 5> singular_mode_series(int j, const LinearizationPoint& lp,
                                             const GasParameters& params);

// Fourier-domain singular part sum_{j<=3} e^{lambda_j* t} M_j* + e^{lambda4 t} M4
// and regular remainder Ghat - Ghat*.
Matrix4cd ghat_star(double eta, double t, const SystemMatrices& sm,
                    const std::array<double, 3>& K);
Matrix4cd ghat_dagger(double eta, double t, const SystemMatrices& sm,
                      const std::array<double, 3>& K);

// Long-wave (eta -> 0) data: diffusion coefficients alpha_j, wave speeds
// beta_j (0, -c_s, +c_s) and the limit matrices M0, M1 of the hyperbolic
// mode projectors (columns 1..3; the tabulated fourth column is zero, the
// true limit carries col4 = -q col3).
struct LongWaveData {
  std::array<double, 3> alphas{};
  std::array<double, 3> betas{};
  std::array<Matrix4d, 3> M0{};
  std::array<Matrix4d, 3> M1{};
};

LongWaveData longwave_matrices(const LinearizationPoint& lp,
                               const GasParameters& params);

// Physical-space slice on the node grid x_i = -L + i dx. The delta-type
// content e^{v p_v t / mu} delta(x) E_11 is subtracted analytically before
// inversion and reported via delta_coeff.
struct GreensPhysicalSlice {
  double t = 0.0;
  ArrayXd xs;
  std::vector<Matrix4d> values;
  double delta_coeff = 0.0;            // weight of delta(x) at entry (0,0)
  std::array<double, 3> gauss_alpha{};  // alpha_j* of the singular Gaussians
  std::array<double, 3> gauss_beta{};   // beta_j* exponential weights
  double max_imag_residue = 0.0;
};

GreensPhysicalSlice greens_physical(double t, const GridSpec& grid,
                                    const SystemMatrices& sm);

struct SplitSlices {
  GreensPhysicalSlice singular;
  GreensPhysicalSlice regular;
};

SplitSlices split_singular_regular(double t, const GridSpec& grid,
                                   const SystemMatrices& sm,
                                   const std::array<double, 3>& K);

}  // namespace rns
