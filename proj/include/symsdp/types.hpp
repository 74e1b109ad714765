#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

namespace symsdp {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

using Index = std::uint32_t;

} // namespace symsdp
