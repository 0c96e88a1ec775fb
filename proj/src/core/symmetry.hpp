#pragma once

#include <cstdint>

#include "core/lattice.hpp"

namespace fredlab::symmetry {

using lattice::LatticeGeometry;
using lattice::Matrix;

// Anti-unitary psi -> C conj(psi) with C block diagonal over sites.
struct TimeReversal {
  Matrix site_block;

  int n_internal() const { return static_cast<int>(site_block.rows()); }
  void validate() const;
  Matrix full(const LatticeGeometry& g) const;
  // C conj(A) C^dagger, i.e. Theta A Theta^-1
  Matrix conjugate(const Matrix& a) const;
  // C A^T conj(C); equals Theta A^* Theta as a linear map
  Matrix transpose_twist(const Matrix& a) const;
  // C conj(v)
  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;
};

TimeReversal standard_tr(int n_internal);
TimeReversal standard_tr(const LatticeGeometry& g);

double commutes_with_tr(const Matrix& a, const TimeReversal& theta);
double theta_odd_residual(const Matrix& f, const TimeReversal& theta);

inline constexpr double kThetaOddTolerance = 1e-8;

// M = C^dagger F, antisymmetric when F is Theta-odd
Matrix antisymmetric_rep(const Matrix& f, const TimeReversal& theta, double tolerance = kThetaOddTolerance);

// C M with M random complex antisymmetric (iid upper triangle); C = standard_tr(dimension)
Matrix random_theta_odd(int dimension, std::uint64_t seed);
// C M with M = W (sum_k s_k J) W^T in Youla form and `zero_blocks` of the s_k set to 0
Matrix random_theta_odd_deficient(int dimension, std::uint64_t seed, int zero_blocks);
// antisymmetric M of the given even rank
Matrix random_antisymmetric_rank(int dimension, int rank, std::uint64_t seed);

int numerical_rank(const Matrix& a, double threshold = 1e-8);

}  // namespace fredlab::symmetry
