#pragma once

#include <Eigen/Dense>

namespace kkharm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace kkharm
