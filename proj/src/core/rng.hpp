#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

#include <Eigen/Dense>

namespace fredlab {

inline constexpr const char* kDisorderRng = "splitmix64-site-hash-v1";
inline constexpr const char* kSampleRng = "mt19937_64-bits53-v1";

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline double unit_interval(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

// uniform [0,1) value attached to a lattice site for a given seed
inline double site_uniform(std::uint64_t seed, int x1, int x2) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(x1)));
  h = splitmix64(h ^ (static_cast<std::uint64_t>(static_cast<std::int64_t>(x2)) << 1));
  return unit_interval(h);
}

// Portable sampling on top of mt19937_64: the distributions are implemented here so
// that streams do not depend on the standard library vendor.
class Random {
 public:
  explicit Random(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return unit_interval(engine_()); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::complex<double> complex_normal() { return {normal() * M_SQRT1_2, normal() * M_SQRT1_2}; }

  Eigen::MatrixXcd gaussian(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
      for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = complex_normal();
    return m;
  }

  Eigen::MatrixXcd unitary(Eigen::Index n) {
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(gaussian(n, n));
    Eigen::MatrixXcd q = qr.householderQ();
    const Eigen::MatrixXcd r = qr.matrixQR();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double a = std::abs(r(i, i));
      if (a > 0.0) q.col(i) *= r(i, i) / a;
    }
    return q;
  }

  Eigen::MatrixXcd hermitian(Eigen::Index n) {
    const Eigen::MatrixXcd g = gaussian(n, n);
    return 0.5 * (g + g.adjoint());
  }

  // U diag(s) V* with `kernel` exact zeros and the other singular values uniform in [sigma_min, 1]
  Eigen::MatrixXcd planted_contraction(Eigen::Index n, Eigen::Index kernel, double sigma_min) {
    const Eigen::MatrixXcd u = unitary(n);
    const Eigen::MatrixXcd v = unitary(n);
    Eigen::VectorXd s(n);
    for (Eigen::Index i = 0; i < n; ++i) s(i) = i < kernel ? 0.0 : uniform(sigma_min, 1.0);
    return u * s.asDiagonal() * v.adjoint();
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace fredlab
