#include "polykde/geometry.hpp"

#include <cmath>

namespace polykde {

Matrix complement_basis(const Vector& mu) {
  const Eigen::Index p = mu.size();
  const int d = static_cast<int>(p) - 1;
  if (d < 1) return Matrix(p, 0);
  // Householder H = I - 2 vv'/(v'v) maps sign*e_1 to mu; its columns 2..p are
  // an orthonormal basis of mu's complement. The sign choice keeps v away
  // from cancellation when mu is close to -e_1.
  const double sign = mu[0] >= 0.0 ? 1.0 : -1.0;
  Vector v = mu;
  v[0] += sign;
  const double vtv = v.squaredNorm();
  Matrix basis(p, d);
  for (int c = 0; c < d; ++c) {
    Vector col = -2.0 * v[c + 1] / vtv * v;
    col[c + 1] += 1.0;
    // H maps e_1 to -sign*mu; flipping columns keeps orientation irrelevant
    // but keeps B'B = I and BB' = I - mu mu' exact either way.
    basis.col(c) = col;
  }
  return basis;
}

Vector tangent_normal_compose(const Vector& mu, double t, const Vector& xi, const Matrix& basis) {
  const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
  Vector y = t * mu + s * (basis * xi);
  return y;
}

Vector sample_uniform_sphere(int d, RngStream& rng) {
  Vector x(d + 1);
  double norm2;
  do {
    for (int i = 0; i <= d; ++i) x[i] = rng.normal();
    norm2 = x.squaredNorm();
  } while (norm2 < 1e-24);
  return x / std::sqrt(norm2);
}

}  // namespace polykde
