#include "core/symmetry.hpp"

#include <sstream>

#include "core/linalg.hpp"
#include "core/rng.hpp"

namespace fredlab::symmetry {

using lattice::Index;

void TimeReversal::validate() const {
  const Index n = site_block.rows();
  if (n == 0 || site_block.cols() != n) fail(ErrorCode::invalid_argument, "time reversal block must be square");
  if (n % 2 != 0) fail(ErrorCode::configuration, "time reversal with Theta^2 = -1 needs an even internal dimension");
  const Matrix id = Matrix::Identity(n, n);
  if ((site_block * site_block.adjoint() - id).cwiseAbs().maxCoeff() > 1e-12)
    fail(ErrorCode::invalid_argument, "time reversal block is not unitary");
  if ((site_block * site_block.conjugate() + id).cwiseAbs().maxCoeff() > 1e-12)
    fail(ErrorCode::invalid_argument, "time reversal block does not square to -1");
}

Matrix TimeReversal::full(const LatticeGeometry& g) const {
  if (g.n_internal != n_internal()) fail(ErrorCode::geometry_mismatch, "time reversal block size != n_internal");
  const int n = n_internal();
  Matrix c = Matrix::Zero(g.dim(), g.dim());
  for (int s = 0; s < g.sites(); ++s) c.block(static_cast<Index>(s) * n, static_cast<Index>(s) * n, n, n) = site_block;
  return c;
}

namespace {

void require_blocks(const Matrix& a, int n) {
  if (a.rows() != a.cols() || a.rows() % n != 0)
    fail(ErrorCode::geometry_mismatch, "operator dimension is not a multiple of the time reversal block");
}

}  // namespace

Matrix TimeReversal::conjugate(const Matrix& a) const {
  const int n = n_internal();
  require_blocks(a, n);
  const Index sites = a.rows() / n;
  const Matrix cd = site_block.adjoint();
  Matrix out(a.rows(), a.cols());
  for (Index j = 0; j < sites; ++j)
    for (Index i = 0; i < sites; ++i)
      out.block(i * n, j * n, n, n) = site_block * a.block(i * n, j * n, n, n).conjugate() * cd;
  return out;
}

Matrix TimeReversal::transpose_twist(const Matrix& a) const {
  const int n = n_internal();
  require_blocks(a, n);
  const Index sites = a.rows() / n;
  const Matrix cc = site_block.conjugate();
  Matrix out(a.rows(), a.cols());
  for (Index j = 0; j < sites; ++j)
    for (Index i = 0; i < sites; ++i)
      out.block(i * n, j * n, n, n) = site_block * a.block(j * n, i * n, n, n).transpose() * cc;
  return out;
}

Eigen::VectorXcd TimeReversal::apply(const Eigen::VectorXcd& v) const {
  const int n = n_internal();
  if (v.size() % n != 0) fail(ErrorCode::geometry_mismatch, "vector length is not a multiple of the block size");
  Eigen::VectorXcd out(v.size());
  for (Index s = 0; s < v.size() / n; ++s) out.segment(s * n, n) = site_block * v.segment(s * n, n).conjugate();
  return out;
}

TimeReversal standard_tr(int n_internal) {
  if (n_internal <= 0 || n_internal % 2 != 0)
    fail(ErrorCode::configuration, "standard_tr needs an even internal dimension, got " + std::to_string(n_internal));
  const int h = n_internal / 2;
  TimeReversal t;
  t.site_block = Matrix::Zero(n_internal, n_internal);
  t.site_block.topRightCorner(h, h) = Matrix::Identity(h, h);
  t.site_block.bottomLeftCorner(h, h) = -Matrix::Identity(h, h);
  return t;
}

TimeReversal standard_tr(const LatticeGeometry& g) { return standard_tr(g.n_internal); }

double commutes_with_tr(const Matrix& a, const TimeReversal& theta) {
  return (a - theta.conjugate(a)).cwiseAbs().maxCoeff();
}

double theta_odd_residual(const Matrix& f, const TimeReversal& theta) {
  return (f + theta.transpose_twist(f)).cwiseAbs().maxCoeff();
}

Matrix antisymmetric_rep(const Matrix& f, const TimeReversal& theta, double tolerance) {
  const double scale = std::max(1.0, linalg::singular_values(f).maxCoeff());
  const double res = theta_odd_residual(f, theta);
  if (res > tolerance * scale) {
    std::ostringstream os;
    os << "antisymmetric_rep: Theta-odd residual " << res << " exceeds tolerance";
    fail(ErrorCode::numerical_integrity, os.str());
  }
  const int n = theta.n_internal();
  require_blocks(f, n);
  const Matrix cd = theta.site_block.adjoint();
  Matrix m(f.rows(), f.cols());
  for (Index s = 0; s < f.rows() / n; ++s) m.middleRows(s * n, n) = cd * f.middleRows(s * n, n);
  return m;
}

Matrix random_theta_odd(int dimension, std::uint64_t seed) {
  const TimeReversal c = standard_tr(dimension);
  Random rng(seed);
  Matrix m = Matrix::Zero(dimension, dimension);
  for (int j = 0; j < dimension; ++j)
    for (int i = 0; i < j; ++i) {
      m(i, j) = rng.complex_normal();
      m(j, i) = -m(i, j);
    }
  return c.site_block * m;
}

Matrix random_antisymmetric_rank(int dimension, int rank, std::uint64_t seed) {
  if (dimension % 2 != 0 || rank % 2 != 0 || rank > dimension)
    fail(ErrorCode::invalid_argument, "antisymmetric rank must be even and at most the even dimension");
  Random rng(seed);
  const Matrix w = rng.unitary(dimension);
  Matrix core = Matrix::Zero(dimension, dimension);
  for (int k = 0; k < rank / 2; ++k) {
    const double s = rng.uniform(0.2, 1.0);
    core(2 * k, 2 * k + 1) = s;
    core(2 * k + 1, 2 * k) = -s;
  }
  return w * core * w.transpose();
}

Matrix random_theta_odd_deficient(int dimension, std::uint64_t seed, int zero_blocks) {
  if (dimension % 2 != 0) fail(ErrorCode::invalid_argument, "random_theta_odd needs an even dimension");
  const int blocks = dimension / 2;
  if (zero_blocks < 0 || zero_blocks > blocks) fail(ErrorCode::invalid_argument, "too many zeroed Youla blocks");
  Random rng(seed);
  std::vector<int> order(static_cast<size_t>(blocks));
  for (int k = 0; k < blocks; ++k) order[static_cast<size_t>(k)] = k;
  for (int k = blocks - 1; k > 0; --k) std::swap(order[static_cast<size_t>(k)], order[rng.below(k + 1)]);
  const Matrix w = rng.unitary(dimension);
  Matrix core = Matrix::Zero(dimension, dimension);
  for (int k = 0; k < blocks; ++k) {
    const double s = rng.uniform(0.1, 2.0);
    core(2 * k, 2 * k + 1) = s;
    core(2 * k + 1, 2 * k) = -s;
  }
  for (int k = 0; k < zero_blocks; ++k) {
    const int b = order[static_cast<size_t>(k)];
    core(2 * b, 2 * b + 1) = 0.0;
    core(2 * b + 1, 2 * b) = 0.0;
  }
  return standard_tr(dimension).site_block * (w * core * w.transpose());
}

int numerical_rank(const Matrix& a, double threshold) {
  const Eigen::VectorXd s = linalg::singular_values(a);
  int r = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > threshold) ++r;
  return r;
}

}  // namespace fredlab::symmetry
