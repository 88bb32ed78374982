#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace olrnn {

using Scalar = double;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Gradients and parameters share one vocabulary: named group -> dense tensor.
// Vectors (biases) are stored as n x 1 matrices so every group is rank-2
// in memory; serialization keeps the declared rank.
using GradMap = std::map<std::string, Matrix, std::less<>>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShapeError : Error {
  using Error::Error;
};

struct ParamError : Error {
  using Error::Error;
};

struct FormatError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct UndefinedCosineError : Error {
  using Error::Error;
};

// Non-finite value produced by a numeric kernel; step < 0 means "unknown".
struct NumericError : Error {
  explicit NumericError(const std::string& what, long step_index = -1)
      : Error(what), step(step_index) {}
  long step;
};

}  // namespace olrnn
