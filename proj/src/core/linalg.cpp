#include "core/linalg.hpp"

#include <complex>
#include <string>
#include <vector>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "core/error.hpp"

namespace fredlab::linalg {

namespace {

void check_info(lapack_int info, const char* routine) {
  if (info != 0) fail(ErrorCode::numerical_integrity, std::string(routine) + " failed, info=" + std::to_string(info));
}

}  // namespace

HermitianEigen eigh(const Eigen::MatrixXcd& a) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  HermitianEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  if (n == 0) return out;
  Eigen::MatrixXcd work = a;
  std::vector<lapack_int> support(2 * static_cast<size_t>(n));
  lapack_int found = 0;
  const lapack_int info =
      LAPACKE_zheevr(LAPACK_COL_MAJOR, 'V', 'A', 'L', n, work.data(), n, 0.0, 0.0, 0, 0, LAPACKE_dlamch('S'), &found,
                     out.values.data(), out.vectors.data(), n, support.data());
  check_info(info, "zheevr");
  if (found != n) fail(ErrorCode::numerical_integrity, "zheevr returned an incomplete spectrum");
  return out;
}

Eigen::VectorXd eigvalsh(const Eigen::MatrixXcd& a) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  Eigen::VectorXd w(n);
  if (n == 0) return w;
  Eigen::MatrixXcd work = a;
  check_info(LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', n, work.data(), n, w.data()), "zheevd");
  return w;
}

Svd svd(const Eigen::MatrixXcd& a) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  if (a.cols() != a.rows()) fail(ErrorCode::invalid_argument, "svd expects a square matrix");
  Svd out;
  out.values.resize(n);
  out.u.resize(n, n);
  out.v.resize(n, n);
  if (n == 0) return out;
  Eigen::MatrixXcd work = a;
  Eigen::VectorXd s(n);
  Eigen::MatrixXcd u(n, n), vt(n, n);
  check_info(LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'A', n, n, work.data(), n, s.data(), u.data(), n, vt.data(), n),
             "zgesdd");
  for (lapack_int j = 0; j < n; ++j) {
    const lapack_int src = n - 1 - j;
    out.values(j) = s(src);
    out.u.col(j) = u.col(src);
    out.v.col(j) = vt.row(src).adjoint();
  }
  return out;
}

Eigen::VectorXd singular_values(const Eigen::MatrixXcd& a) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  if (a.cols() != a.rows()) fail(ErrorCode::invalid_argument, "singular_values expects a square matrix");
  Eigen::VectorXd s(n);
  if (n == 0) return s;
  Eigen::MatrixXcd work = a;
  check_info(LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', n, n, work.data(), n, s.data(), nullptr, 1, nullptr, 1), "zgesdd");
  return s.reverse().eval();
}

}  // namespace fredlab::linalg
