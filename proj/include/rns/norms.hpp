#pragma once

#include <Eigen/Core>
#include <vector>

namespace rns {

using Eigen::ArrayXd;

// Seeded discontinuity of a piecewise field: location and signed height.
struct JumpSpec {
  double position = 0.0;
  double size = 0.0;
};

// Norm bundle for one scalar field. The BV norm follows the convention
//   ||w||_BV = ||w||_inf + Tot.Var.(w)
// and total variation splits into the listed-jump part and the remaining
// (continuous) cell-increment part.
struct NormReport {
  double l1 = 0.0;
  double linf = 0.0;
  double bv_total = 0.0;
  double bv_jump_part = 0.0;
  double bv_continuous_part = 0.0;
};

enum class Boundary { Periodic, AbsorbingPad };

double l1_norm(const ArrayXd& f, double dx);
double linf_norm(const ArrayXd& f);

// Discrete total variation: sum of |f_{i+1} - f_i| over cell faces (plus the
// wrap face when periodic). Faces nearest to listed jump positions are
// accounted in bv_jump_part; everything else in bv_continuous_part.
NormReport bv_norm(const ArrayXd& f, double dx, double x_left,
                   const std::vector<JumpSpec>& jumps = {},
                   Boundary bc = Boundary::Periodic);

// Centered first derivative, one-sided at listed jump faces and at the ends
// of a non-periodic grid.
ArrayXd derivative(const ArrayXd& f, double dx, double x_left,
                   const std::vector<JumpSpec>& jumps = {},
                   Boundary bc = Boundary::Periodic);

// Index of the face closest to position x (face i sits between cells i, i+1).
int face_index(double x, double dx, double x_left, int n);

}  // namespace rns
