#include "rns/norms.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace rns {

double l1_norm(const ArrayXd& f, double dx) { return dx * f.abs().sum(); }

double linf_norm(const ArrayXd& f) {
  return f.size() ? f.abs().maxCoeff() : 0.0;
}

int face_index(double x, double dx, double x_left, int n) {
  // Face i sits at x_left + (i+1)*dx, between cells i and i+1.
  int i = static_cast<int>(std::lround((x - x_left) / dx)) - 1;
  return std::clamp(i, 0, n - 2);
}

NormReport bv_norm(const ArrayXd& f, double dx, double x_left,
                   const std::vector<JumpSpec>& jumps, Boundary bc) {
  NormReport r;
  const int n = static_cast<int>(f.size());
  r.l1 = l1_norm(f, dx);
  r.linf = linf_norm(f);
  if (n < 2) {
    r.bv_total = r.linf;
    return r;
  }
  std::set<int> jump_faces;
  for (const auto& j : jumps) jump_faces.insert(face_index(j.position, dx, x_left, n));

  double cont = 0.0, jump = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    const double inc = std::abs(f[i + 1] - f[i]);
    if (jump_faces.count(i))
      jump += inc;
    else
      cont += inc;
  }
  if (bc == Boundary::Periodic) cont += std::abs(f[0] - f[n - 1]);
  r.bv_jump_part = jump;
  r.bv_continuous_part = cont;
  r.bv_total = r.linf + jump + cont;
  return r;
}

ArrayXd derivative(const ArrayXd& f, double dx, double x_left,
                   const std::vector<JumpSpec>& jumps, Boundary bc) {
  const int n = static_cast<int>(f.size());
  ArrayXd d(n);
  if (n < 2) return ArrayXd::Zero(n);
  std::set<int> jump_faces;
  for (const auto& j : jumps) jump_faces.insert(face_index(j.position, dx, x_left, n));
  auto fm = [&](int i) { return f[(i + n) % n]; };

  for (int i = 0; i < n; ++i) {
    const bool left_is_jump = jump_faces.count(i - 1) > 0;
    const bool right_is_jump = jump_faces.count(i) > 0;
    const bool at_left_end = (bc != Boundary::Periodic) && i == 0;
    const bool at_right_end = (bc != Boundary::Periodic) && i == n - 1;
    if ((left_is_jump || at_left_end) && !(right_is_jump || at_right_end)) {
      d[i] = (fm(i + 1) - f[i]) / dx;
    } else if ((right_is_jump || at_right_end) && !(left_is_jump || at_left_end)) {
      d[i] = (f[i] - fm(i - 1)) / dx;
    } else if ((left_is_jump || at_left_end) && (right_is_jump || at_right_end)) {
      d[i] = 0.0;  // isolated cell between two jumps
    } else {
      d[i] = (fm(i + 1) - fm(i - 1)) / (2.0 * dx);
    }
  }
  return d;
}

}  // namespace rns
