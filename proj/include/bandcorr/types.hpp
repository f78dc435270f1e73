#ifndef BANDCORR_TYPES_HPP
#define BANDCORR_TYPES_HPP

#include <complex>

#include <Eigen/Dense>

namespace bandcorr {

using Real = double;
using Complex = std::complex<Real>;
using Index = Eigen::Index;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXr = DenseMatrix<Real>;
using MatrixXc = DenseMatrix<Complex>;
using VectorXr = DenseVector<Real>;
using VectorXc = DenseVector<Complex>;

}  // namespace bandcorr

#endif
