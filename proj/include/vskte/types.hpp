#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace vskte {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RoundId = std::size_t;
using IndexList = std::vector<RoundId>;

}  // namespace vskte
