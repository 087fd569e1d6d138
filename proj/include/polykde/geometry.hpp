#pragma once

#include <Eigen/Dense>

#include "polykde/rng.hpp"
#include "polykde/types.hpp"

namespace polykde {

// Semi-orthonormal (d+1) x d basis of the orthogonal complement of mu,
// built from the sign-safe Householder reflection mapping e_1 to mu:
// B'B = I_d and BB' = I_{d+1} - mu mu'.
Matrix complement_basis(const Vector& mu);

// y = t*mu + sqrt(1-t^2) * B * xi, a unit vector with y'mu = t.
Vector tangent_normal_compose(const Vector& mu, double t, const Vector& xi, const Matrix& basis);

// Uniform draw on S^d (a unit vector in R^{d+1}).
Vector sample_uniform_sphere(int d, RngStream& rng);

}  // namespace polykde
