#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace mlsl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Raised for bad user input (malformed files, out-of-range config values,
// violated preconditions). The CLI maps it to exit code 1; other runtime
// errors map to exit code 2.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mlsl
