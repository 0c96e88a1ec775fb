#include "core/indices.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace fredlab::indices {

using lattice::cplx;
using lattice::Index;

const char* to_string(IndexStatus s) {
  switch (s) {
    case IndexStatus::converged: return "converged";
    case IndexStatus::not_converged: return "not-converged";
    case IndexStatus::ambiguous: return "ambiguous";
  }
  return "?";
}

LatticeOperator project_compress(const LatticeOperator& q, const LatticeOperator& a) {
  lattice::require_same_geometry(q, a, "project_compress");
  const Matrix& qm = q.matrix();
  if ((qm * qm - qm).cwiseAbs().maxCoeff() > 1e-10)
    fail(ErrorCode::invalid_argument, "project_compress: Q is not a projection");
  const Index n = q.dim();
  return a.with_matrix(qm * a.matrix() * qm + (Matrix::Identity(n, n) - qm));
}

namespace {

// Lambda_1 X Lambda_1 + (1 - Lambda_1)
Matrix compress_lambda1(const LatticeGeometry& g, const Matrix& x) {
  const Eigen::VectorXd lam = lattice::step_diagonal(g, 1);
  Matrix out = x;
  for (Index c = 0; c < out.cols(); ++c)
    for (Index r = 0; r < out.rows(); ++r) out(r, c) *= lam(r) * lam(c);
  for (Index i = 0; i < out.rows(); ++i)
    if (lam(i) == 0.0) out(i, i) = 1.0;
  return out;
}

Matrix exp_from_eig(const spectral::EigenDecomposition& e, const std::function<cplx(double)>& f) {
  Eigen::VectorXcd fv(e.eigenvalues.size());
  for (Index i = 0; i < fv.size(); ++i) fv(i) = f(e.eigenvalues(i));
  return (e.eigenvectors * fv.asDiagonal()) * e.eigenvectors.adjoint();
}

cplx winding_phase(double x) { return std::polar(1.0, -2.0 * std::numbers::pi * x); }

}  // namespace

LatticeOperator winding_op(const LatticeGeometry& g, const spectral::EigenDecomposition& e) {
  return LatticeOperator(g, compress_lambda1(g, exp_from_eig(e, winding_phase)));
}

LatticeOperator winding_op(const LatticeOperator& a) {
  if (!a.hermitian()) fail(ErrorCode::not_hermitian, "winding_op expects a Hermitian generator");
  return winding_op(a.geometry(), spectral::eig_hermitian(a));
}

LatticeOperator flux_route_unitary(const LatticeGeometry& g) {
  return LatticeOperator::diagonal(g, lattice::flux_phase_diagonal(g).conjugate());
}

LatticeOperator bulk_flux_operator(const LatticeOperator& p, const LatticeOperator& u) {
  lattice::require_same_geometry(p, u, "bulk_flux_operator");
  const Index n = p.dim();
  const Matrix& pm = p.matrix();
  return p.with_matrix(pm * u.matrix() * pm + (Matrix::Identity(n, n) - pm));
}

LatticeOperator bulk_corner_operator(const LatticeOperator& p) {
  const Eigen::VectorXd lam2 = lattice::step_diagonal(p.geometry(), 2);
  const Matrix plp = p.matrix() * lam2.asDiagonal() * p.matrix();
  return winding_op(LatticeOperator::hermitian_from(p.geometry(), plp));
}

Region default_bulk_region(const LatticeGeometry& g, double fraction) { return Region::flux_disk(g, fraction); }

IndexResult fedosov_from_svd(const linalg::Svd& svd, const Eigen::VectorXd* weights, const FedosovOptions& options) {
  if (options.n_start < 1 || options.n_max < options.n_start)
    fail(ErrorCode::configuration, "Fedosov schedule needs 1 <= n_start <= n_max");
  const Index n = svd.values.size();
  Eigen::VectorXd delta(n);  // <v|chi|v> - <u|chi|u>
  if (weights) {
    for (Index j = 0; j < n; ++j)
      delta(j) = svd.v.col(j).cwiseAbs2().dot(*weights) - svd.u.col(j).cwiseAbs2().dot(*weights);
  } else {
    delta.setZero();
  }
  Eigen::VectorXd defect(n);
  for (Index j = 0; j < n; ++j) defect(j) = 1.0 - svd.values(j) * svd.values(j);

  IndexResult r;
  r.method = "fedosov";
  r.kind = IndexKind::integer;
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (long power = options.n_start; power <= options.n_max; power *= 2) {
    double raw = 0.0;
    for (Index j = 0; j < n; ++j)
      if (delta(j) != 0.0) raw += std::pow(defect(j), static_cast<double>(power)) * delta(j);
    r.history.emplace_back(static_cast<int>(power), raw);
    r.raw = raw;
    r.n_used = static_cast<int>(power);
    r.value = std::lround(raw);
    r.distance_to_integer = std::abs(raw - static_cast<double>(r.value));
    if (!std::isnan(prev) && r.distance_to_integer <= options.tol && std::abs(raw - prev) <= options.step_tol) {
      r.status = IndexStatus::converged;
      return r;
    }
    prev = raw;
  }
  r.status = IndexStatus::not_converged;
  return r;
}

IndexResult fredholm_index_fedosov(const LatticeOperator& a, const FedosovOptions& options) {
  if (!options.region || options.region->kind == Region::Kind::everywhere) {
    linalg::Svd svd;
    svd.values = linalg::singular_values(a.matrix());
    return fedosov_from_svd(svd, nullptr, options);
  }
  const Eigen::VectorXd w = options.region->weights(a.geometry());
  return fedosov_from_svd(linalg::svd(a.matrix()), &w, options);
}

namespace {

cplx kubo_trace(const LatticeOperator& p, const std::optional<Region>& region) {
  const LatticeGeometry& g = p.geometry();
  const Matrix d1 = lattice::nc_derivative_matrix(g, 1, p.matrix());
  const Matrix d2 = lattice::nc_derivative_matrix(g, 2, p.matrix());
  const Matrix comm = d1 * d2 - d2 * d1;
  const Eigen::VectorXd w = region ? region->weights(g) : Eigen::VectorXd::Ones(g.dim());
  cplx t = 0.0;
  const Matrix& pm = p.matrix();
  for (Index i = 0; i < pm.rows(); ++i) {
    if (w(i) == 0.0) continue;
    t += w(i) * (pm.row(i).transpose().cwiseProduct(comm.col(i))).sum();
  }
  return cplx(0.0, -2.0 * std::numbers::pi) * t;
}

}  // namespace

double chern_kubo(const LatticeOperator& p, const std::optional<Region>& region) {
  return kubo_trace(p, region).real();
}

IndexResult chern_kubo_index(const LatticeOperator& p, const std::optional<Region>& region, double tol) {
  const cplx c = kubo_trace(p, region);
  IndexResult r;
  r.method = "kubo";
  r.kind = IndexKind::integer;
  r.raw = c.real();
  r.imaginary_residue = c.imag();
  r.value = std::lround(c.real());
  r.distance_to_integer = std::abs(c.real() - static_cast<double>(r.value));
  r.history.emplace_back(0, c.real());
  r.status = r.distance_to_integer <= tol ? IndexStatus::converged : IndexStatus::not_converged;
  if (std::abs(c.imag()) > 1e-6) {
    std::ostringstream os;
    os << "kubo trace imaginary residue " << c.imag();
    r.warnings.push_back(os.str());
  }
  return r;
}

IndexResult kernel_dim_trace_limit(const Matrix& a, const TraceLimitOptions& options) {
  std::vector<int> schedule = options.schedule;
  if (schedule.empty())
    for (int n = 1; n <= 4096; n *= 2) schedule.push_back(n);
  const Eigen::VectorXd s = linalg::singular_values(a);
  if (s.size() && s.maxCoeff() > 1.0 + 1e-10)
    fail(ErrorCode::invalid_argument, "kernel_dim_trace_limit needs a contraction (norm <= 1 + 1e-10)");
  Eigen::VectorXd defect(s.size());
  for (Index j = 0; j < s.size(); ++j) defect(j) = std::max(0.0, 1.0 - s(j) * s(j));

  IndexResult r;
  r.method = "trace-limit";
  r.kind = IndexKind::integer;
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (const int n : schedule) {
    double t = 0.0;
    for (Index j = 0; j < defect.size(); ++j) t += std::pow(defect(j), static_cast<double>(n));
    if (!std::isnan(prev) && t > prev + 1e-9 * std::max(1.0, prev))
      fail(ErrorCode::numerical_integrity, "trace-limit sequence increased");
    r.history.emplace_back(n, t);
    r.raw = t;
    r.n_used = n;
    r.value = std::lround(t);
    r.distance_to_integer = std::abs(t - static_cast<double>(r.value));
    if (!std::isnan(prev) && std::abs(t - prev) <= options.tol && r.distance_to_integer <= options.integer_tol) {
      r.status = IndexStatus::converged;
      return r;
    }
    prev = t;
  }
  r.status = IndexStatus::not_converged;
  return r;
}

SingularSpectrum near_kernel_from_svd(const linalg::Svd& svd, const KernelPolicy& policy) {
  SingularSpectrum out;
  out.values = svd.values;
  const Index n = svd.values.size();
  const auto& s = svd.values;
  constexpr double inf = std::numeric_limits<double>::infinity();
  constexpr double tiny = std::numeric_limits<double>::min();
  int k = 0;
  if (policy.kind == KernelPolicy::Kind::absolute) {
    while (k < n && s(k) < policy.tau) ++k;
    out.threshold = policy.tau;
    const double above = k < n ? s(k) : inf;
    const double below = k > 0 ? std::max(s(k - 1), policy.tau) : policy.tau;
    out.gap_ratio = above / below;
  } else {
    int m = 0;
    while (m < n && s(m) < policy.below) ++m;
    if (m == 0) {
      out.threshold = policy.below;
      out.gap_ratio = inf;
    } else {
      double best = -1.0;
      for (int j = 1; j <= m; ++j) {
        const double above = j < n ? s(j) : policy.below;
        const double ratio = above / std::max(s(j - 1), tiny);
        if (ratio > best) {
          best = ratio;
          k = j;
        }
      }
      out.gap_ratio = best;
      const double above = k < n ? s(k) : policy.below;
      out.threshold = std::sqrt(std::max(s(k - 1), tiny) * above);
    }
  }
  out.cluster_size = k;
  out.ambiguous = out.gap_ratio < policy.min_gap_ratio;
  out.fredholm_gap = out.ambiguous ? (n ? s(0) : 0.0) : (k < n ? s(k) : 0.0);
  if (svd.v.cols() == n && svd.u.cols() == n) {
    out.vectors = svd.v.leftCols(k);
    out.left_vectors = svd.u.leftCols(k);
  }
  return out;
}

SingularSpectrum near_kernel_modes(const Matrix& a, const KernelPolicy& policy) {
  return near_kernel_from_svd(linalg::svd(a), policy);
}

IndexResult z2_count_from_spectrum(const SingularSpectrum& s, const Eigen::VectorXd& weights) {
  if (s.ambiguous) {
    std::ostringstream os;
    os << "near-kernel cluster not separated (gap ratio " << s.gap_ratio << ")";
    fail(ErrorCode::ambiguous, os.str());
  }
  IndexResult r;
  r.method = "z2-localized-count";
  r.kind = IndexKind::z2;
  r.status = IndexStatus::converged;
  r.n_used = s.cluster_size;
  if (s.cluster_size == 0) return r;
  if (s.vectors.cols() != s.cluster_size) fail(ErrorCode::invalid_argument, "cluster vectors missing");
  const Matrix mass = s.vectors.adjoint() * weights.asDiagonal() * s.vectors;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (mass + mass.adjoint()), Eigen::EigenvaluesOnly);
  long count = 0;
  double worst = 0.0;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double m = es.eigenvalues()(i);
    r.history.emplace_back(static_cast<int>(i), m);
    r.raw += m;
    if (m >= kAmbiguousLow && m <= kAmbiguousHigh) {
      std::ostringstream os;
      os << "kernel mode with localized mass " << m << " in [0.4, 0.6]";
      fail(ErrorCode::ambiguous, os.str());
    }
    if (m > 0.5) ++count;
    worst = std::max(worst, std::min(m, 1.0 - m));
  }
  r.value = count % 2;
  r.distance_to_integer = worst;
  return r;
}

IndexResult z2_localized_count(const LatticeOperator& a, const Region& region, const KernelPolicy& policy) {
  return z2_count_from_spectrum(near_kernel_modes(a.matrix(), policy), region.weights(a.geometry()));
}

namespace {

void require_window_in_gap(const spectral::SwitchFunction& g, const spectral::GapReport& bulk_gap) {
  if (bulk_gap.contains_zero || !(g.a() > bulk_gap.gap_lower && g.b() < bulk_gap.gap_upper)) {
    std::ostringstream os;
    os << "switch window (" << g.a() << "," << g.b() << ") not inside the bulk gap (" << bulk_gap.gap_lower << ","
       << bulk_gap.gap_upper << ")";
    fail(ErrorCode::gap_violation, os.str());
  }
}

}  // namespace

LatticeOperator edge_operator(const LatticeOperator& h_hat, const spectral::EigenDecomposition& e,
                              const spectral::SwitchFunction& g, const spectral::GapReport& bulk_gap) {
  require_window_in_gap(g, bulk_gap);
  const Matrix ex = exp_from_eig(e, [&g](double x) { return winding_phase(g.value(x)); });
  return LatticeOperator(h_hat.geometry(), compress_lambda1(h_hat.geometry(), ex));
}

LatticeOperator edge_operator(const LatticeOperator& h_hat, const spectral::SwitchFunction& g,
                              const spectral::GapReport& bulk_gap) {
  return edge_operator(h_hat, spectral::eig_hermitian(h_hat), g, bulk_gap);
}

lattice::LocalityFit edge_diagnostic(const LatticeOperator& h_hat, const spectral::EigenDecomposition& e,
                                     const spectral::SwitchFunction& g) {
  const Matrix d = exp_from_eig(e, [&g](double x) { return winding_phase(g.value(x)) - 1.0; });
  return lattice::decay_fit(LatticeOperator(h_hat.geometry(), d), lattice::DecayModel::loc2_exponential, 2);
}

IndexResult edge_chern(const LatticeOperator& f_hat, std::optional<Region> region, FedosovOptions options) {
  options.region = region ? *region : Region::lower_half(f_hat.geometry());
  IndexResult r = fredholm_index_fedosov(f_hat, options);
  r.method = "edge-chern";
  return r;
}

IndexResult edge_z2(const LatticeOperator& f_hat, std::optional<Region> region, const KernelPolicy& policy) {
  IndexResult r = z2_localized_count(f_hat, region ? *region : Region::lower_half(f_hat.geometry()), policy);
  r.method = "edge-z2";
  return r;
}

std::vector<FermiScanRecord> fermi_scan(const LatticeOperator& h, const std::vector<double>& mu_grid,
                                        const FermiScanOptions& options) {
  const spectral::EigenDecomposition e = spectral::eig_hermitian(h);
  const LatticeGeometry& g = h.geometry();
  const double lo = e.eigenvalues.minCoeff() - 1.0, hi = e.eigenvalues.maxCoeff() + 1.0;
  const LatticeOperator u = flux_route_unitary(g);
  const Region region = options.region ? *options.region : default_bulk_region(g);
  const Eigen::VectorXd w = region.weights(g);
  std::vector<FermiScanRecord> out;
  for (const double mu : mu_grid) {
    FermiScanRecord rec;
    rec.mu = mu;
    if (mu < lo || mu > hi) fail(ErrorCode::configuration, "fermi_scan: mu outside [min spectrum - 1, max + 1]");
    rec.gap = spectral::spectral_gap(e.eigenvalues, mu);
    bool hit = false;
    for (Index i = 0; i < e.eigenvalues.size(); ++i) hit = hit || std::abs(e.eigenvalues(i) - mu) <= 1e-9;
    if (hit) {
      rec.on_eigenvalue = true;
      rec.note = "mu on an eigenvalue";
      out.push_back(rec);
      continue;
    }
    const LatticeOperator p = spectral::fermi_projection(g, e, mu);
    const LatticeOperator f = bulk_flux_operator(p, u);
    const linalg::Svd svd = linalg::svd(f.matrix());
    const SingularSpectrum spec = near_kernel_from_svd(svd, options.policy);
    rec.sigma_min = svd.values.size() ? svd.values(0) : 0.0;
    rec.fredholm_gap = spec.fredholm_gap;
    rec.cluster_size = spec.cluster_size;
    if (options.z2) {
      try {
        rec.index = z2_count_from_spectrum(spec, w);
      } catch (const Error& err) {
        rec.note = err.what();
      }
    } else {
      rec.index = fedosov_from_svd(svd, &w, options.fedosov);
    }
    if (rec.gap.contains_zero && rec.note.empty()) rec.note = "mu inside the spectrum at the gap resolution";
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace fredlab::indices
