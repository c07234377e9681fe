#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace granusim {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using SparseVec = Eigen::SparseVector<Scalar>;

template <typename Scalar>
using SparseRowMatrix = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;

using DenseVector = Vector<double>;
using DenseMatrix = Matrix<double>;
using SparseVector = SparseVec<double>;

}  // namespace granusim
