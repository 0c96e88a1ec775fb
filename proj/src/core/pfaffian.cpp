#include "core/pfaffian.hpp"

#include "core/error.hpp"

namespace fredlab::pfaffian {

double antisymmetry_residual(const Eigen::MatrixXcd& a) {
  if (a.size() == 0) return 0.0;
  return (a + a.transpose()).cwiseAbs().maxCoeff();
}

std::complex<double> pfaffian(Eigen::MatrixXcd a) {
  if (a.rows() != a.cols()) fail(ErrorCode::invalid_argument, "pfaffian: matrix is not square");
  const double scale = std::max(1.0, a.size() ? a.cwiseAbs().maxCoeff() : 0.0);
  if (antisymmetry_residual(a) > 1e-10 * scale) fail(ErrorCode::invalid_argument, "pfaffian: matrix is not antisymmetric");
  const Eigen::Index n = a.rows();
  if (n % 2 == 1) return 0.0;
  std::complex<double> pf = 1.0;
  for (Eigen::Index k = 0; k + 1 < n; k += 2) {
    Eigen::Index kp;
    a.col(k).tail(n - k - 1).cwiseAbs().maxCoeff(&kp);
    kp += k + 1;
    if (kp != k + 1) {
      a.row(k + 1).swap(a.row(kp));
      a.col(k + 1).swap(a.col(kp));
      pf = -pf;
    }
    if (a(k + 1, k) == 0.0) return 0.0;
    pf *= a(k, k + 1);
    const Eigen::Index rest = n - k - 2;
    if (rest > 0) {
      const Eigen::VectorXcd tau = a.row(k).tail(rest).transpose() / a(k, k + 1);
      const Eigen::VectorXcd col = a.col(k + 1).tail(rest);
      a.bottomRightCorner(rest, rest) += tau * col.transpose() - col * tau.transpose();
    }
  }
  return pf;
}

}  // namespace fredlab::pfaffian
