#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace specgap {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Point = Eigen::Vector3d;  // points live in R^n, n <= 3; unused axes are zero

using Index = Eigen::Index;

}  // namespace specgap
