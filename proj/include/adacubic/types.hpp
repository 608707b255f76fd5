#pragma once

#include <Eigen/Core>

namespace adacubic {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace adacubic
