// types.hpp — fixed-size matrix aliases shared across the library
#pragma once

#include <Eigen/Dense>
#include <complex>

namespace qnet {

using cplx = std::complex<double>;

inline constexpr int kDim = 8;  // three qubits, |n1 n2 n3>, index = 4*n1 + 2*n2 + n3

using Mat8  = Eigen::Matrix<cplx, kDim, kDim>;
using Mat8r = Eigen::Matrix<double, kDim, kDim>;
using Vec8  = Eigen::Matrix<cplx, kDim, 1>;
using Vec8r = Eigen::Matrix<double, kDim, 1>;

using Mat2r = Eigen::Matrix<double, 2, 2>;

}  // namespace qnet
