#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "polykde/geometry.hpp"
#include "polykde/rng.hpp"
#include "polykde/types.hpp"

using namespace polykde;

TEST_CASE("Dims bookkeeping") {
  Dims dims({1, 3, 2});
  CHECK(dims.r() == 3);
  CHECK(dims.d_tilde() == 6);
  CHECK(dims.ambient() == 9);
  CHECK(dims.offset(0) == 0);
  CHECK(dims.offset(1) == 2);
  CHECK(dims.offset(2) == 6);
  CHECK_THROWS_AS(Dims({2, 0}), DimensionMismatch);
  CHECK_THROWS_AS(Dims({}), DimensionMismatch);
}

TEST_CASE("validate_and_normalize accepts unit rows unchanged") {
  Matrix raw(1, 4);
  raw << 1, 0, 0, 1;
  const PolySample s = validate_and_normalize(raw, Dims({1, 1}));
  CHECK(s.points()(0, 0) == 1.0);
  CHECK(s.points()(0, 3) == 1.0);
}

TEST_CASE("validate_and_normalize rescales with force") {
  Matrix raw(1, 8);
  raw << 2, 0, 0, 0, 0, 1, 0, 0;
  const PolySample s = validate_and_normalize(raw, Dims({3, 3}), true);
  CHECK(s.points()(0, 0) == doctest::Approx(1.0));
  CHECK(s.points()(0, 5) == doctest::Approx(1.0));
  // Not force: the first block norm 2 is too far from 1.
  CHECK_THROWS(validate_and_normalize(raw, Dims({3, 3}), false));
}

TEST_CASE("validate_and_normalize rejects zero blocks") {
  Matrix raw(1, 2);
  raw << 0, 0;
  CHECK_THROWS_AS(validate_and_normalize(raw, Dims({1}), true), ZeroBlock);
}

TEST_CASE("validate_and_normalize is idempotent") {
  RngStream rng(7);
  Matrix raw(5, 5);
  for (Eigen::Index i = 0; i < raw.rows(); ++i)
    for (Eigen::Index j = 0; j < raw.cols(); ++j) raw(i, j) = rng.normal();
  const Dims dims({2, 1});
  const PolySample once = validate_and_normalize(raw, dims, true);
  const PolySample twice = validate_and_normalize(once.points(), dims, false);
  CHECK((once.points() - twice.points()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("complement_basis identities") {
  RngStream rng(13);
  for (int d : {1, 2, 3, 5, 9}) {
    for (int rep = 0; rep < 50; ++rep) {
      const Vector mu = sample_uniform_sphere(d, rng);
      const Matrix B = complement_basis(mu);
      const Matrix eye_d = Matrix::Identity(d, d);
      const Matrix proj = Matrix::Identity(d + 1, d + 1) - mu * mu.transpose();
      CHECK((B.transpose() * B - eye_d).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((B * B.transpose() - proj).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((B.transpose() * mu).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  // Axis case on S^2.
  Vector e1 = Vector::Zero(3);
  e1[0] = 1.0;
  const Matrix B = complement_basis(e1);
  CHECK((B.transpose() * e1).cwiseAbs().maxCoeff() < 1e-15);
  // 2-D orthogonal complement of (1,1)/sqrt(2) is +-(1,-1)/sqrt(2).
  Vector diag2(2);
  diag2 << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const Matrix B2 = complement_basis(diag2);
  REQUIRE(B2.cols() == 1);
  CHECK(std::abs(std::abs(B2(0, 0)) - 1.0 / std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(B2(0, 0) + B2(1, 0)) < 1e-14);
}

TEST_CASE("tangent_normal_compose poles and inner products") {
  RngStream rng(29);
  Vector mu = sample_uniform_sphere(2, rng);
  Matrix B = complement_basis(mu);
  Vector xi = sample_uniform_sphere(1, rng);
  CHECK((tangent_normal_compose(mu, 1.0, xi, B) - mu).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((tangent_normal_compose(mu, -1.0, xi, B) + mu).cwiseAbs().maxCoeff() < 1e-15);

  // Equator with xi = e_1 lands on the first tangent column.
  Vector e1 = Vector::Zero(3);
  e1[0] = 1.0;
  Matrix Be = complement_basis(e1);
  Vector xi2(2);
  xi2 << 1.0, 0.0;
  CHECK((tangent_normal_compose(e1, 0.0, xi2, Be) - Be.col(0)).cwiseAbs().maxCoeff() < 1e-15);

  for (int rep = 0; rep < 10000; ++rep) {
    const int d = 1 + static_cast<int>(rng.below(4));
    mu = sample_uniform_sphere(d, rng);
    B = complement_basis(mu);
    xi = sample_uniform_sphere(d - 1, rng);
    const double t = rng.uniform(-1.0, 1.0);
    const Vector y = tangent_normal_compose(mu, t, xi, B);
    CHECK(std::abs(y.norm() - 1.0) < 1e-12);
    CHECK(std::abs(y.dot(mu) - t) < 1e-12);
  }
}

TEST_CASE("sample_uniform_sphere") {
  RngStream rng(41);
  // S^0 is +-1 with equal probability.
  int pos = 0;
  for (int i = 0; i < 2000; ++i) {
    const Vector v = sample_uniform_sphere(0, rng);
    CHECK(std::abs(std::abs(v[0]) - 1.0) < 1e-15);
    if (v[0] > 0) ++pos;
  }
  CHECK(pos > 850);
  CHECK(pos < 1150);

  Vector mean = Vector::Zero(3);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const Vector v = sample_uniform_sphere(2, rng);
    CHECK(std::abs(v.norm() - 1.0) < 1e-12);
    mean += v;
  }
  CHECK((mean / n).norm() < 0.02);
}
