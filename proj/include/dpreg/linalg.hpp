#pragma once

#include <Eigen/Dense>

namespace dpreg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace dpreg
