#pragma once

#include <stdexcept>
#include <string>

namespace polykde {

struct DimensionMismatch : std::runtime_error {
  explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct ZeroBlock : std::runtime_error {
  explicit ZeroBlock(const std::string& what) : std::runtime_error(what) {}
};

struct RhoOutOfRange : std::runtime_error {
  explicit RhoOutOfRange(const std::string& what) : std::runtime_error(what) {}
};

struct QuadratureFailure : std::runtime_error {
  explicit QuadratureFailure(const std::string& what) : std::runtime_error(what) {}
};

struct SampleTooSmall : std::runtime_error {
  explicit SampleTooSmall(const std::string& what) : std::runtime_error(what) {}
};

struct UnsupportedLaw : std::runtime_error {
  explicit UnsupportedLaw(const std::string& what) : std::runtime_error(what) {}
};

struct UnsupportedKernel : std::runtime_error {
  explicit UnsupportedKernel(const std::string& what) : std::runtime_error(what) {}
};

struct EnvelopeViolation : std::runtime_error {
  explicit EnvelopeViolation(const std::string& what) : std::runtime_error(what) {}
};

struct ClassTooSmall : std::runtime_error {
  explicit ClassTooSmall(const std::string& what) : std::runtime_error(what) {}
};

struct SingularScatter : std::runtime_error {
  explicit SingularScatter(const std::string& what) : std::runtime_error(what) {}
};

struct KNotTwo : std::runtime_error {
  explicit KNotTwo(const std::string& what) : std::runtime_error(what) {}
};

struct NotSPD : std::runtime_error {
  explicit NotSPD(const std::string& what) : std::runtime_error(what) {}
};

struct AllNegInfinity : std::runtime_error {
  explicit AllNegInfinity(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace polykde
