#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <vector>

namespace waveclust {

// Rows are observations (signals), columns are time points or wavelet
// coefficients. Row-major: signals are long and almost every kernel (difference
// operator, transforms, row prox) walks along rows.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

using Labels = std::vector<int>;

}  // namespace waveclust
