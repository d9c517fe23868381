#pragma once

#include <Eigen/Dense>

namespace popgame {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace popgame
