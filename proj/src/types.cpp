#include "polykde/types.hpp"

#include <cmath>
#include <sstream>

namespace polykde {

PolySample validate_and_normalize(const Matrix& raw, const Dims& dims, bool force,
                                  std::optional<std::vector<int>> labels) {
  if (raw.cols() != dims.ambient()) {
    std::ostringstream msg;
    msg << "validate_and_normalize: rows have " << raw.cols() << " columns, dims need "
        << dims.ambient();
    throw DimensionMismatch(msg.str());
  }
  Matrix out = raw;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (int j = 0; j < dims.r(); ++j) {
      auto block = out.row(i).segment(dims.offset(j), dims.block_size(j));
      const double norm = block.norm();
      if (norm < 1e-12) {
        std::ostringstream msg;
        msg << "validate_and_normalize: row " << i << ", block " << j << " has norm " << norm;
        throw ZeroBlock(msg.str());
      }
      if (!force && std::abs(norm - 1.0) > 1e-6) {
        std::ostringstream msg;
        msg << "validate_and_normalize: row " << i << ", block " << j << " has norm " << norm
            << " (more than 1e-6 away from 1; pass force to renormalize)";
        throw ZeroBlock(msg.str());
      }
      block /= norm;
    }
  }
  return PolySample(std::move(out), dims, std::move(labels));
}

}  // namespace polykde
