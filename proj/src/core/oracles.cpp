#include "core/oracles.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "core/pfaffian.hpp"
#include "core/rng.hpp"
#include "core/symmetry.hpp"

namespace fredlab::oracles {

using lattice::cplx;
using lattice::Index;

namespace {

constexpr double kPi = std::numbers::pi;

struct Bands {
  Eigen::VectorXd values;
  Matrix vectors;
};

Bands bands(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  return {es.eigenvalues(), es.eigenvectors()};
}

// lower half of the spectrum; fails if that does not sit below 0
Matrix occupied(const Matrix& h, double* min_gap = nullptr) {
  const Bands b = bands(h);
  const Index n_occ = h.rows() / 2;
  const double lo = b.values(n_occ - 1), hi = b.values(n_occ);
  if (!(lo < 0.0 && hi > 0.0) || std::min(-lo, hi) < 1e-8)
    fail(ErrorCode::gap_violation, "oracle: Bloch Hamiltonian is gapless at the Fermi level");
  if (min_gap) *min_gap = std::min(*min_gap, std::min(-lo, hi));
  return b.vectors.leftCols(n_occ);
}

// unitary part of the overlap: V (polar factor of V^dagger prev)
Matrix transport(const Matrix& v, const Matrix& prev) {
  const Matrix m = v.adjoint() * prev;
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return v * (svd.matrixU() * svd.matrixV().adjoint());
}

double unwrap_step(double prev, double next) {
  double d = next - prev;
  d -= 2.0 * kPi * std::round(d / (2.0 * kPi));
  return prev + d;
}

}  // namespace

void BlochGrid::validate() const {
  if (n_k < 32) fail(ErrorCode::configuration, "BlochGrid: n_k must be at least 32");
}

Matrix bloch_hamiltonian(const ModelSpec& model, double k1, double k2) {
  const models::Hoppings hop = models::hoppings(model);
  const cplx e1 = std::exp(cplx(0.0, -k1)), e2 = std::exp(cplx(0.0, -k2));
  Matrix h = hop.onsite + e1 * hop.t1 + std::conj(e1) * hop.t1.adjoint() + e2 * hop.t2 +
             std::conj(e2) * hop.t2.adjoint();
  return 0.5 * (h + h.adjoint());
}

Matrix bloch_hamiltonian(const ModelSpec& model, const DisorderSpec& disorder, double k1, double k2) {
  if (disorder.amplitude != 0.0) fail(ErrorCode::configuration, "bloch_hamiltonian: model is disordered");
  return bloch_hamiltonian(model, k1, k2);
}

double bloch_half_gap(const ModelSpec& model, int n_k) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_k; ++i)
    for (int j = 0; j < n_k; ++j) {
      const double k1 = -kPi + 2.0 * kPi * i / n_k, k2 = -kPi + 2.0 * kPi * j / n_k;
      const Eigen::VectorXd ev = bands(bloch_hamiltonian(model, k1, k2)).values;
      best = std::min(best, ev.cwiseAbs().minCoeff());
    }
  return best;
}

ChernResult chern_berry_detail(const BlochGrid& grid) {
  grid.validate();
  const int n = grid.n_k;
  std::vector<Matrix> frames(static_cast<size_t>(n) * n);
  ChernResult out;
  out.min_gap = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      frames[static_cast<size_t>(j) * n + i] =
          occupied(bloch_hamiltonian(grid.model, -kPi + 2.0 * kPi * i / n, -kPi + 2.0 * kPi * j / n), &out.min_gap);
  auto at = [&](int i, int j) -> const Matrix& {
    return frames[static_cast<size_t>((j + n) % n) * n + static_cast<size_t>((i + n) % n)];
  };
  auto link = [](const Matrix& a, const Matrix& b) {
    const cplx d = (a.adjoint() * b).determinant();
    return d / std::abs(d);
  };
  double total = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const cplx plaquette = link(at(i, j), at(i + 1, j)) * link(at(i + 1, j), at(i + 1, j + 1)) *
                             std::conj(link(at(i, j + 1), at(i + 1, j + 1))) * std::conj(link(at(i, j), at(i, j + 1)));
      total += std::arg(plaquette);
    }
  out.raw = total / (2.0 * kPi);
  out.value = std::lround(out.raw);
  out.quantization_residual = std::abs(out.raw - static_cast<double>(out.value));
  if (out.quantization_residual > 1e-6)
    fail(ErrorCode::numerical_integrity, "chern_berry: curvature sum is not an integer");
  return out;
}

long chern_berry(const ModelSpec& model, int n_k) { return chern_berry_detail(BlochGrid{n_k, model}).value; }

// Fu-Kane product over the four TRIM. On each line k2 in {0, pi} the occupied frame is
// parallel transported along k1 from -pi and made periodic by spreading the holonomy
// log over the line. The branch of the holonomy log is fixed by continuing arg det of the
// holonomy in k2 from the principal branch at k2 = 0, which mimics a gauge that is smooth
// on the half torus. sqrt(det w) is continued along k1 from 0 to pi on each line.
Z2PfaffianResult z2_pfaffian_trim_detail(const ModelSpec& model, const PfaffianOptions& options) {
  if (!model.time_reversal_invariant()) fail(ErrorCode::configuration, "z2_pfaffian_trim needs a TRI model");
  if (options.n_k1 < 8 || options.n_k1 % 2 != 0 || options.n_k2 < 4)
    fail(ErrorCode::configuration, "z2_pfaffian_trim: n_k1 must be even and >= 8, n_k2 >= 4");
  const symmetry::TimeReversal theta = symmetry::standard_tr(model.n_internal());
  std::optional<Random> rng;
  if (options.gauge_seed) rng.emplace(*options.gauge_seed);
  auto frame = [&](double k1, double k2) {
    Matrix f = occupied(bloch_hamiltonian(model, k1, k2));
    if (rng) f = f * rng->unitary(f.cols());
    return f;
  };

  // reference frames at k1 = -pi along k2 in [0, pi]
  const int m2 = options.n_k2;
  std::vector<Matrix> start(static_cast<size_t>(m2) + 1);
  start[0] = frame(-kPi, 0.0);
  for (int j = 1; j <= m2; ++j) start[j] = transport(frame(-kPi, kPi * j / m2), start[j - 1]);

  const int n1 = options.n_k1;
  auto line = [&](double k2, const Matrix& first, Matrix* holonomy) {
    std::vector<Matrix> f(static_cast<size_t>(n1) + 1);
    f[0] = first;
    for (int i = 1; i <= n1; ++i) f[i] = transport(frame(-kPi + 2.0 * kPi * i / n1, k2), f[i - 1]);
    *holonomy = first.adjoint() * f[n1];
    return f;
  };

  // continued total holonomy phase
  double total_phase = 0.0;
  std::vector<double> continued(static_cast<size_t>(m2) + 1);
  for (int j = 0; j <= m2; ++j) {
    Matrix hol;
    line(kPi * j / m2, start[j], &hol);
    const double a = std::arg(hol.determinant());
    total_phase = j == 0 ? a : unwrap_step(total_phase, a);
    continued[j] = total_phase;
  }

  Z2PfaffianResult out;
  out.min_pfaffian = std::numeric_limits<double>::infinity();
  double product = 1.0;
  for (int l = 0; l < 2; ++l) {
    const double k2 = l == 0 ? 0.0 : kPi;
    Matrix hol;
    std::vector<Matrix> f = line(k2, start[l == 0 ? 0 : m2], &hol);
    Eigen::ComplexEigenSolver<Matrix> es(hol);
    const Matrix x = es.eigenvectors();
    Eigen::VectorXd phases(hol.rows());
    for (Index q = 0; q < hol.rows(); ++q) phases(q) = std::arg(es.eigenvalues()(q));
    phases(0) += 2.0 * kPi * std::round((continued[l == 0 ? 0 : m2] - phases.sum()) / (2.0 * kPi));
    const Matrix x_inv = x.inverse();
    for (int i = 0; i <= n1; ++i) {
      const double s = static_cast<double>(i) / n1;
      Eigen::VectorXcd d(phases.size());
      for (Index q = 0; q < phases.size(); ++q) d(q) = std::exp(cplx(0.0, -phases(q) * s));
      f[i] = f[i] * (x * d.asDiagonal() * x_inv);
    }
    // w(k) = Phi(-k)^dagger C conj(Phi(k)) for k = 0 .. pi, i.e. grid index n1/2 .. n1
    const int half = n1 / 2;
    double arg_det = 0.0;
    for (int i = half; i <= n1; ++i) {
      const Matrix w = f[n1 - i].adjoint() * theta.site_block * f[i].conjugate();
      const cplx det = w.determinant();
      arg_det = i == half ? std::arg(det) : unwrap_step(arg_det, std::arg(det));
      if (i == half || i == n1) {
        const cplx pf = pfaffian::pfaffian(0.5 * (w - w.transpose()));
        out.min_pfaffian = std::min(out.min_pfaffian, std::abs(pf));
        if (std::abs(pf) < 1e-8)
          fail(ErrorCode::ambiguous, "z2_pfaffian_trim: Pfaffian magnitude below 1e-8, perturb the grid");
        const cplx root = std::sqrt(std::abs(det)) * std::exp(cplx(0.0, 0.5 * arg_det));
        const cplx delta = pf / root;
        if (std::abs(delta.imag()) > 1e-6 || std::abs(std::abs(delta.real()) - 1.0) > 1e-6)
          fail(ErrorCode::numerical_integrity, "z2_pfaffian_trim: Pf/sqrt(det) is not a sign");
        out.delta[i == half ? 0 : 1][l] = delta.real() > 0 ? 1.0 : -1.0;
        product *= out.delta[i == half ? 0 : 1][l];
      }
    }
  }
  out.value = product > 0 ? 0 : 1;
  return out;
}

int z2_pfaffian_trim(const ModelSpec& model, const PfaffianOptions& options) {
  return z2_pfaffian_trim_detail(model, options).value;
}

Matrix cylinder_hamiltonian(const ModelSpec& model, int width, double k1) {
  if (width < 2) fail(ErrorCode::configuration, "cylinder width must be at least 2");
  const models::Hoppings hop = models::hoppings(model);
  const Index n = model.n_internal();
  const cplx e1 = std::exp(cplx(0.0, -k1));
  const Matrix onsite = hop.onsite + e1 * hop.t1 + std::conj(e1) * hop.t1.adjoint();
  Matrix h = Matrix::Zero(width * n, width * n);
  for (Index y = 0; y < width; ++y) {
    h.block(y * n, y * n, n, n) = onsite;
    if (y + 1 < width) {
      h.block((y + 1) * n, y * n, n, n) = hop.t2;
      h.block(y * n, (y + 1) * n, n, n) = hop.t2.adjoint();
    }
  }
  return 0.5 * (h + h.adjoint());
}

SpectralFlowResult edge_spectral_flow_detail(const ModelSpec& model, int width, const SpectralFlowOptions& options) {
  if (!model.time_reversal_invariant()) fail(ErrorCode::configuration, "edge_spectral_flow needs a TRI model");
  if (options.n_k < 8) fail(ErrorCode::configuration, "edge_spectral_flow: n_k must be at least 8");
  SpectralFlowResult out;
  out.mu = options.mu ? *options.mu : 0.25 * bloch_half_gap(model);
  const Index n = model.n_internal();
  const Index half_rows = width / 2;
  auto lower_weight = [&](const Eigen::VectorXcd& v) { return v.head(half_rows * n).squaredNorm(); };

  Bands prev = bands(cylinder_hamiltonian(model, width, 0.0));
  auto below = [&](const Bands& b) { return static_cast<Index>((b.values.array() < out.mu).count()); };
  for (int i = 1; i <= options.n_k; ++i) {
    const double k = kPi * i / options.n_k;
    const Bands cur = bands(cylinder_hamiltonian(model, width, k));
    const Index c0 = below(prev), c1 = below(cur);
    for (Index j = std::min(c0, c1); j < std::max(c0, c1); ++j) {
      // band j crosses mu inside (k_prev, k]; attribute it where it is closer to mu
      const bool use_cur = std::abs(cur.values(j) - out.mu) < std::abs(prev.values(j) - out.mu);
      const double w = use_cur ? lower_weight(cur.vectors.col(j)) : lower_weight(prev.vectors.col(j));
      if (w >= 0.4 && w <= 0.6) {
        std::ostringstream os;
        os << "edge_spectral_flow: ambiguous edge attribution (lower weight " << w << ") near k1=" << k;
        fail(ErrorCode::ambiguous, os.str());
      }
      if (w > 0.5) {
        ++out.lower_edge_crossings;
        out.crossing_k.push_back(k);
      } else {
        ++out.upper_edge_crossings;
      }
    }
    prev = cur;
  }
  out.value = out.lower_edge_crossings % 2;
  return out;
}

int edge_spectral_flow(const ModelSpec& model, int width, const SpectralFlowOptions& options) {
  return edge_spectral_flow_detail(model, width, options).value;
}

KernelCount brute_force_kernel(const Matrix& a, double tau) {
  if (!(tau > 0.0)) fail(ErrorCode::configuration, "brute_force_kernel: tau must be positive");
  KernelCount out;
  if (a.size() == 0) return out;
  const Eigen::VectorXd s = Eigen::JacobiSVD<Matrix>(a).singularValues();
  // square matrices: min(rows, cols) singular values; extra columns are kernel
  out.value = static_cast<int>((s.array() < tau).count() + std::max<Index>(0, a.cols() - a.rows()));
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) >= 0.5 * tau && s(i) <= 2.0 * tau) {
      std::ostringstream os;
      os << "singular value " << s(i) << " within [tau/2, 2 tau]";
      out.warnings.push_back(os.str());
    }
  return out;
}

}  // namespace fredlab::oracles
