#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace gapcert {

using Real = double;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Eigen::Index;

// Fixed comparison tolerances used throughout the library.
inline constexpr Real kEqTol = 1e-10;    // equality comparisons
inline constexpr Real kIneqTol = 1e-9;   // inequality slack
inline constexpr Real kMassTol = 1e-12;  // probability-mass bookkeeping

// Default enumeration caps (overridable per call).
inline constexpr std::size_t kJointCap = 4096;    // full joint tables
inline constexpr std::size_t kProductCap = 256;   // product-space transport
inline constexpr std::size_t kBlockLpCap = 32;    // exact jump-rate constants

struct InvalidInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SizeLimit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedModel : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InternalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace gapcert
