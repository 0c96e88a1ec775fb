#include "core/homotopy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <set>
#include <sstream>

#include "core/linalg.hpp"
#include "core/parallel.hpp"

namespace fredlab::homotopy {

using lattice::Index;
using lattice::LatticeGeometry;
using lattice::Matrix;

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::index_constant: return "index-constant";
    case Verdict::violation: return "violation";
    case Verdict::withheld: return "withheld";
  }
  return "?";
}

std::vector<double> default_samples(int n) {
  if (n < 2) fail(ErrorCode::configuration, "a path needs at least two samples");
  std::vector<double> t(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) t[static_cast<size_t>(i)] = static_cast<double>(i) / (n - 1);
  return t;
}

namespace {

Matrix mask_lambda2(const LatticeGeometry& g, const Matrix& x) {
  const Eigen::VectorXd lam = lattice::step_diagonal(g, 2);
  Matrix out = x;
  for (Index c = 0; c < out.cols(); ++c)
    for (Index r = 0; r < out.rows(); ++r) out(r, c) *= lam(r) * lam(c);
  return out;
}

spectral::EigenDecomposition gapped_eig(const LatticeOperator& h, const spectral::SwitchFunction& g) {
  spectral::EigenDecomposition e = spectral::eig_hermitian(h);
  const spectral::GapReport gap = spectral::spectral_gap(e.eigenvalues);
  if (gap.contains_zero || !(g.a() > gap.gap_lower && g.b() < gap.gap_upper))
    fail(ErrorCode::gap_violation, "homotopy path: switch window not inside the spectral gap of H");
  return e;
}

Matrix g_of(const LatticeOperator& h, const spectral::EigenDecomposition& e, const spectral::SwitchFunction& g) {
  return spectral::apply_function_eig(h.geometry(), e, [&g](double x) { return g.value(x); }).matrix();
}

std::function<LatticeOperator(double)> blend(const LatticeGeometry& geom, Matrix at0, Matrix at1) {
  auto a0 = std::make_shared<const Matrix>(std::move(at0));
  auto a1 = std::make_shared<const Matrix>(std::move(at1));
  return [geom, a0, a1](double t) {
    if (t == 0.0) return LatticeOperator::hermitian_from(geom, *a0);
    if (t == 1.0) return LatticeOperator::hermitian_from(geom, *a1);
    return LatticeOperator::hermitian_from(geom, (1.0 - t) * *a0 + t * *a1);
  };
}

}  // namespace

HomotopyPath path_corner_flatten(const LatticeOperator& h, const spectral::SwitchFunction& g) {
  const auto e = gapped_eig(h, g);
  const Matrix gh = g_of(h, e, g);
  const Eigen::VectorXd lam2 = lattice::step_diagonal(h.geometry(), 2);
  Matrix glg = gh * lam2.asDiagonal() * gh;
  Matrix lgl = mask_lambda2(h.geometry(), gh);
  HomotopyPath p;
  p.label = "corner-flatten";
  p.generator = blend(h.geometry(), std::move(glg), std::move(lgl));
  p.samples = default_samples();
  return p;
}

HomotopyPath path_truncate_flatten(const LatticeOperator& h, const spectral::SwitchFunction& g) {
  const auto e = gapped_eig(h, g);
  const Matrix gh = g_of(h, e, g);
  const LatticeOperator cut = LatticeOperator::hermitian_from(h.geometry(), mask_lambda2(h.geometry(), h.matrix()));
  const Matrix gcut = g_of(cut, spectral::eig_hermitian(cut), g);
  Matrix lgl = mask_lambda2(h.geometry(), gh);
  Matrix lql = mask_lambda2(h.geometry(), gcut);
  HomotopyPath p;
  p.label = "truncate-flatten";
  p.supporting_fit = lattice::decay_fit(LatticeOperator(h.geometry(), lql - lgl), lattice::DecayModel::loc2_exponential, 2);
  p.generator = blend(h.geometry(), std::move(lgl), std::move(lql));
  p.samples = default_samples();
  return p;
}

HomotopyPath path_boundary_conditions(const LatticeOperator& h, const LatticeOperator& h_hat,
                                      const spectral::SwitchFunction& g) {
  const LatticeGeometry& strip = h_hat.geometry();
  lattice::require_compatible(strip, h.geometry());
  const LatticeOperator dirichlet = lattice::restrict_half_space(h, strip);
  if (!h_hat.hermitian()) fail(ErrorCode::not_hermitian, "path_boundary_conditions: H_hat is not self-adjoint");
  const LatticeOperator diff = dirichlet - h_hat;
  if (diff.max_abs() > 0.0) {
    const LocalityFit fit = lattice::decay_fit(diff, lattice::DecayModel::loc2_exponential, 2);
    if (!fit.success()) fail(ErrorCode::geometry_mismatch, "path_boundary_conditions: H_hat is not compatible with H");
  }
  Matrix g_hat = g_of(h_hat, spectral::eig_hermitian(h_hat), g);
  Matrix g_dir = g_of(dirichlet, spectral::eig_hermitian(dirichlet), g);
  HomotopyPath p;
  p.label = "boundary-conditions";
  const LatticeOperator gdiff(strip, g_dir - g_hat);
  if (gdiff.max_abs() > 1e-13)
    p.supporting_fit = lattice::decay_fit(gdiff, lattice::DecayModel::loc2_exponential, 2);
  p.generator = blend(strip, std::move(g_hat), std::move(g_dir));
  p.samples = default_samples();
  return p;
}

PhysicalPath path_physical(const LatticeOperator& h0, const LatticeOperator& h1) {
  lattice::require_same_geometry(h0, h1, "path_physical");
  if (!h0.hermitian() || !h1.hermitian()) fail(ErrorCode::not_hermitian, "path_physical needs Hermitian endpoints");
  auto a0 = std::make_shared<const Matrix>(h0.matrix());
  auto a1 = std::make_shared<const Matrix>(h1.matrix());
  PhysicalPath p;
  p.label = "physical-linear";
  const LatticeGeometry geom = h0.geometry();
  p.hamiltonian = [geom, a0, a1](double t) {
    return LatticeOperator::hermitian_from(geom, (1.0 - t) * *a0 + t * *a1);
  };
  p.samples = default_samples();
  return p;
}

TransportReport transport(const PhysicalPath& path, long value_at_start, double min_gap_width, int workers) {
  TransportReport rep;
  rep.t = path.samples;
  rep.gaps.resize(path.samples.size());
  parallel_for(path.samples.size(), workers, [&](std::size_t i) {
    const LatticeOperator h = path.hamiltonian(path.samples[i]);
    rep.gaps[i] = spectral::spectral_gap(linalg::eigvalsh(h.matrix()));
  });
  rep.min_gap_width = std::numeric_limits<double>::infinity();
  rep.refused = false;
  for (size_t i = 0; i < rep.gaps.size(); ++i) {
    const auto& gap = rep.gaps[i];
    rep.min_gap_width = std::min(rep.min_gap_width, gap.contains_zero ? 0.0 : gap.width());
    if ((gap.contains_zero || gap.width() < min_gap_width) && !rep.refused) {
      rep.refused = true;
      std::ostringstream os;
      os << "spectral gap closes near t=" << rep.t[i] << " (width " << (gap.contains_zero ? 0.0 : gap.width()) << ")";
      rep.reason = os.str();
    }
  }
  if (!rep.refused) rep.value = value_at_start;
  return rep;
}

namespace {

SampleRecord evaluate_sample(const HomotopyPath& path, double t, const IndexMethod& method,
                             const Thresholds& thresholds) {
  SampleRecord rec;
  rec.t = t;
  const LatticeOperator a = path.generator(t);
  const LatticeGeometry& g = a.geometry();
  const spectral::EigenDecomposition e = spectral::eig_hermitian(a);
  const LatticeOperator w = indices::winding_op(g, e);
  const linalg::Svd svd = linalg::svd(w.matrix());
  const indices::SingularSpectrum spec = indices::near_kernel_from_svd(svd, method.policy);
  rec.fredholm_gap = spec.fredholm_gap;
  rec.cluster_size = spec.cluster_size;
  const Matrix defect = a.matrix() * a.matrix() - a.matrix();
  rec.loc2_fit = lattice::decay_fit(LatticeOperator(g, defect), lattice::DecayModel::loc2_exponential, 2);
  if (thresholds.theta) rec.theta_odd_residual = symmetry::theta_odd_residual(w.matrix(), *thresholds.theta);
  const Eigen::VectorXd weights = method.region.weights(g);
  try {
    if (method.kind == IndexMethod::Kind::fedosov) {
      rec.index = indices::fedosov_from_svd(svd, &weights, method.fedosov);
    } else {
      rec.index = indices::z2_count_from_spectrum(spec, weights);
    }
  } catch (const Error& err) {
    if (err.code() != ErrorCode::ambiguous) throw;
    rec.note = err.what();
    rec.flagged = true;
    indices::IndexResult amb;
    amb.method = method.kind == IndexMethod::Kind::fedosov ? "fedosov" : "z2-localized-count";
    amb.status = indices::IndexStatus::ambiguous;
    rec.index = amb;
  }
  if (rec.index && !rec.index->converged()) rec.flagged = true;
  if (rec.fredholm_gap < thresholds.fredholm_gap) {
    rec.flagged = true;
    if (rec.note.empty()) rec.note = "fredholm gap below threshold";
  }
  if (!rec.loc2_fit.success() && rec.loc2_fit.status != lattice::FitStatus::numerically_zero) {
    rec.flagged = true;
    if (rec.note.empty()) rec.note = "loc2 fit failed";
  }
  return rec;
}

}  // namespace

HomotopyReport monitor(const HomotopyPath& path, const IndexMethod& method, const Thresholds& thresholds) {
  if (path.samples.empty()) fail(ErrorCode::configuration, "monitor: path without samples");
  std::vector<double> ts = path.samples;
  std::sort(ts.begin(), ts.end());
  std::vector<SampleRecord> recs(ts.size());
  parallel_for(ts.size(), thresholds.workers,
               [&](std::size_t i) { recs[i] = evaluate_sample(path, ts[i], method, thresholds); });

  for (int round = 0; round < thresholds.max_refinements; ++round) {
    std::set<double> extra;
    for (size_t i = 0; i < recs.size(); ++i) {
      if (recs[i].fredholm_gap >= 2.0 * thresholds.fredholm_gap) continue;
      if (i > 0) extra.insert(0.5 * (recs[i - 1].t + recs[i].t));
      if (i + 1 < recs.size()) extra.insert(0.5 * (recs[i].t + recs[i + 1].t));
    }
    for (const auto& r : recs) extra.erase(r.t);
    if (extra.empty()) break;
    const std::vector<double> add(extra.begin(), extra.end());
    std::vector<SampleRecord> more(add.size());
    parallel_for(add.size(), thresholds.workers,
                 [&](std::size_t i) { more[i] = evaluate_sample(path, add[i], method, thresholds); });
    for (auto& r : more) recs.push_back(std::move(r));
    std::sort(recs.begin(), recs.end(), [](const SampleRecord& a, const SampleRecord& b) { return a.t < b.t; });
  }

  HomotopyReport rep;
  rep.label = path.label;
  rep.supporting_fit = path.supporting_fit;
  rep.gaps_ok = true;
  rep.loc2_ok = true;
  rep.min_fredholm_gap = std::numeric_limits<double>::infinity();
  bool violation = false, ambiguous = false;
  const auto& first = recs.front();
  const bool have_ref = first.index && first.index->converged();
  if (have_ref) rep.reference_value = first.index->kind == indices::IndexKind::z2 ? first.index->z2() : first.index->value;
  for (const auto& r : recs) {
    rep.min_fredholm_gap = std::min(rep.min_fredholm_gap, r.fredholm_gap);
    if (r.fredholm_gap < thresholds.fredholm_gap) rep.gaps_ok = false;
    if (!r.loc2_fit.success() && r.loc2_fit.status != lattice::FitStatus::numerically_zero) rep.loc2_ok = false;
    if (r.flagged) ++rep.flagged;
    if (!r.index) continue;
    if (r.index->status == indices::IndexStatus::ambiguous) ambiguous = true;
    if (have_ref && r.index->converged()) {
      const long v = r.index->kind == indices::IndexKind::z2 ? r.index->z2() : r.index->value;
      if (v != rep.reference_value) violation = true;
    }
  }
  if (violation)
    rep.verdict = Verdict::violation;
  else if (ambiguous || !have_ref)
    rep.verdict = Verdict::withheld;
  else
    rep.verdict = Verdict::index_constant;
  rep.samples = std::move(recs);
  return rep;
}

}  // namespace fredlab::homotopy
