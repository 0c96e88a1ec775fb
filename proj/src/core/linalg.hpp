#pragma once

#include <Eigen/Dense>

namespace fredlab::linalg {

struct HermitianEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXcd vectors;  // columns
};

// singular values ascending; columns of u and v reordered to match
struct Svd {
  Eigen::VectorXd values;
  Eigen::MatrixXcd u;
  Eigen::MatrixXcd v;
};

HermitianEigen eigh(const Eigen::MatrixXcd& a);
Eigen::VectorXd eigvalsh(const Eigen::MatrixXcd& a);
Svd svd(const Eigen::MatrixXcd& a);
Eigen::VectorXd singular_values(const Eigen::MatrixXcd& a);

}  // namespace fredlab::linalg
