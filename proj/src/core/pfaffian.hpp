#pragma once

#include <complex>

#include <Eigen/Dense>

namespace fredlab::pfaffian {

// Parlett-Reid elimination with partial pivoting; A must be antisymmetric.
std::complex<double> pfaffian(Eigen::MatrixXcd a);

// max |A + A^T|
double antisymmetry_residual(const Eigen::MatrixXcd& a);

}  // namespace fredlab::pfaffian
