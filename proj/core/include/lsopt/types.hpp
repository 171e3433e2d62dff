#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace lsopt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

} // namespace lsopt
