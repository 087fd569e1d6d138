#pragma once

#include <Eigen/Dense>
#include <numeric>
#include <optional>
#include <vector>

#include "polykde/errors.hpp"

namespace polykde {

// Observations are rows; row-major keeps each point contiguous.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Dimension vector d = (d1,...,dr) of the polysphere S^{d1} x ... x S^{dr}.
class Dims {
 public:
  explicit Dims(std::vector<int> d) : d_(std::move(d)) {
    if (d_.empty()) throw DimensionMismatch("Dims: need r >= 1 spheres");
    offsets_.reserve(d_.size() + 1);
    offsets_.push_back(0);
    for (int dj : d_) {
      if (dj < 1) throw DimensionMismatch("Dims: every d_j must be >= 1");
      d_tilde_ += dj;
      offsets_.push_back(offsets_.back() + dj + 1);
    }
  }

  int r() const { return static_cast<int>(d_.size()); }
  int d(int j) const { return d_[static_cast<std::size_t>(j)]; }
  const std::vector<int>& d() const { return d_; }
  int d_tilde() const { return d_tilde_; }
  int ambient() const { return offsets_.back(); }
  // Start column of block j; block j spans d_j + 1 columns.
  int offset(int j) const { return offsets_[static_cast<std::size_t>(j)]; }
  int block_size(int j) const { return d_[static_cast<std::size_t>(j)] + 1; }

  bool operator==(const Dims& o) const { return d_ == o.d_; }

 private:
  std::vector<int> d_;
  std::vector<int> offsets_;
  int d_tilde_ = 0;
};

// Strictly positive bandwidth vector, one entry per sphere.
class Bandwidths {
 public:
  explicit Bandwidths(Vector h) : h_(std::move(h)) {
    if (h_.size() == 0) throw DimensionMismatch("Bandwidths: empty");
    for (Eigen::Index j = 0; j < h_.size(); ++j)
      if (!(h_[j] > 0.0)) throw DimensionMismatch("Bandwidths: h_j must be > 0");
  }
  static Bandwidths common(double h, int r) { return Bandwidths(Vector::Constant(r, h)); }

  int r() const { return static_cast<int>(h_.size()); }
  double operator[](int j) const { return h_[j]; }
  const Vector& vec() const { return h_; }

  // rho(h) = prod_j h_j^{d_j}, in log form.
  double log_rho(const Dims& dims) const {
    double s = 0.0;
    for (int j = 0; j < dims.r(); ++j) s += dims.d(j) * std::log(h_[j]);
    return s;
  }

 private:
  Vector h_;
};

// One point on the polysphere: r concatenated unit vectors.
struct PolyPoint {
  Vector coords;
  Eigen::VectorBlock<const Vector> block(const Dims& dims, int j) const {
    return coords.segment(dims.offset(j), dims.block_size(j));
  }
};

// n validated points sharing one Dims, with optional class labels.
class PolySample {
 public:
  PolySample(Matrix points, Dims dims, std::optional<std::vector<int>> labels = std::nullopt)
      : points_(std::move(points)), dims_(std::move(dims)), labels_(std::move(labels)) {
    if (points_.cols() != dims_.ambient())
      throw DimensionMismatch("PolySample: column count does not match dims.ambient");
    if (labels_ && static_cast<Eigen::Index>(labels_->size()) != points_.rows())
      throw DimensionMismatch("PolySample: label count does not match n");
  }

  Eigen::Index n() const { return points_.rows(); }
  const Dims& dims() const { return dims_; }
  const Matrix& points() const { return points_; }
  const std::optional<std::vector<int>>& labels() const { return labels_; }

  PolyPoint point(Eigen::Index i) const { return PolyPoint{points_.row(i).transpose()}; }

  Eigen::Block<const Matrix> block(int j) const {
    return points_.block(0, dims_.offset(j), points_.rows(), dims_.block_size(j));
  }

 private:
  Matrix points_;
  Dims dims_;
  std::optional<std::vector<int>> labels_;
};

// Renormalizes every block row-wise to unit norm. Rejects blocks whose norm
// deviates from 1 by more than 1e-6 unless `force`; norms below 1e-12 are
// always rejected.
PolySample validate_and_normalize(const Matrix& raw, const Dims& dims, bool force = false,
                                  std::optional<std::vector<int>> labels = std::nullopt);

}  // namespace polykde
