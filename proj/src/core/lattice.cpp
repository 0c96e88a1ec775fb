#include "core/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace fredlab::lattice {

namespace {

constexpr double kHermitianTol = 1e-12;

double hermitian_residual(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace

LatticeGeometry LatticeGeometry::square(int side, int n_internal, bool periodic) {
  return rectangle(side, side, n_internal, periodic);
}

LatticeGeometry LatticeGeometry::rectangle(int length1, int length2, int n_internal, bool periodic) {
  LatticeGeometry g;
  g.kind = GeometryKind::bulk;
  g.x1 = {-length1 / 2, length1 - 1 - length1 / 2};
  g.x2 = {-length2 / 2, length2 - 1 - length2 / 2};
  g.n_internal = n_internal;
  g.periodic = {periodic, periodic};
  g.validate();
  return g;
}

LatticeGeometry LatticeGeometry::strip(int length, int width, int n_internal, bool periodic_x1) {
  LatticeGeometry g;
  g.kind = GeometryKind::half_space;
  g.x1 = {-length / 2, length - 1 - length / 2};
  g.x2 = {0, width - 1};
  g.n_internal = n_internal;
  g.periodic = {periodic_x1, false};
  g.validate();
  return g;
}

LatticeGeometry LatticeGeometry::matching_bulk(const LatticeGeometry& strip) {
  if (strip.kind != GeometryKind::half_space) fail(ErrorCode::geometry_mismatch, "matching_bulk: expected a half-space geometry");
  LatticeGeometry g = strip;
  g.kind = GeometryKind::bulk;
  g.x2 = {-strip.x2.size(), strip.x2.size() - 1};
  g.periodic = {strip.periodic[0], false};
  g.validate();
  return g;
}

void LatticeGeometry::validate() const {
  if (n_internal < 1) fail(ErrorCode::configuration, "n_internal must be positive");
  if (x1.size() < 1 || x2.size() < 1) fail(ErrorCode::configuration, "empty coordinate range");
  if (kind == GeometryKind::bulk) {
    if (!(x1.lo < 0 && 0 < x1.hi && x2.lo < 0 && 0 < x2.hi))
      fail(ErrorCode::configuration, "bulk geometry must contain (0,0) strictly inside: " + describe());
  } else {
    if (x2.lo != 0) fail(ErrorCode::configuration, "half-space x2 range must start at 0: " + describe());
    if (periodic[1]) fail(ErrorCode::configuration, "half-space geometry cannot be periodic in x2");
  }
  for (int axis = 1; axis <= 2; ++axis)
    if (periodic[axis - 1] && range(axis).size() < 3)
      fail(ErrorCode::configuration, "periodic axis needs at least 3 sites");
}

const Interval& LatticeGeometry::range(int axis) const {
  if (axis == 1) return x1;
  if (axis == 2) return x2;
  fail(ErrorCode::invalid_argument, "axis must be 1 or 2");
}

std::string LatticeGeometry::describe() const {
  std::ostringstream os;
  os << (kind == GeometryKind::bulk ? "bulk" : "half-space") << " x1=[" << x1.lo << "," << x1.hi << "]"
     << (periodic[0] ? "p" : "") << " x2=[" << x2.lo << "," << x2.hi << "]" << (periodic[1] ? "p" : "")
     << " N=" << n_internal;
  return os.str();
}

Index site_index(const LatticeGeometry& g, int x1, int x2, int s) {
  if (!g.x1.contains(x1) || !g.x2.contains(x2) || s < 0 || s >= g.n_internal) {
    std::ostringstream os;
    os << "site (" << x1 << "," << x2 << "," << s << ") outside " << g.describe();
    fail(ErrorCode::range, os.str());
  }
  const Index site = static_cast<Index>(x2 - g.x2.lo) * g.x1.size() + (x1 - g.x1.lo);
  return site * g.n_internal + s;
}

Site site_at(const LatticeGeometry& g, Index site_number) {
  const int n1 = g.x1.size();
  return {g.x1.lo + static_cast<int>(site_number % n1), g.x2.lo + static_cast<int>(site_number / n1)};
}

LatticeOperator::LatticeOperator(LatticeGeometry geometry, Matrix matrix)
    : geometry_(std::move(geometry)), matrix_(std::move(matrix)) {
  geometry_.validate();
  if (matrix_.rows() != geometry_.dim() || matrix_.cols() != geometry_.dim())
    fail(ErrorCode::geometry_mismatch, "matrix dimension does not match " + geometry_.describe());
  hermitian_ = hermitian_residual(matrix_) <= kHermitianTol;
}

LatticeOperator LatticeOperator::hermitian_from(LatticeGeometry geometry, Matrix matrix) {
  const double scale = std::max(1.0, matrix.size() ? matrix.cwiseAbs().maxCoeff() : 0.0);
  const double res = hermitian_residual(matrix);
  if (res > 1e-8 * scale) {
    std::ostringstream os;
    os << "expected a Hermitian matrix, residual " << res;
    fail(ErrorCode::not_hermitian, os.str());
  }
  Matrix sym = 0.5 * (matrix + matrix.adjoint());
  return LatticeOperator(std::move(geometry), std::move(sym));
}

LatticeOperator LatticeOperator::identity(const LatticeGeometry& geometry) {
  return LatticeOperator(geometry, Matrix::Identity(geometry.dim(), geometry.dim()));
}

LatticeOperator LatticeOperator::zero(const LatticeGeometry& geometry) {
  return LatticeOperator(geometry, Matrix::Zero(geometry.dim(), geometry.dim()));
}

LatticeOperator LatticeOperator::diagonal(const LatticeGeometry& geometry, const Eigen::VectorXcd& d) {
  return LatticeOperator(geometry, d.asDiagonal().toDenseMatrix());
}

double LatticeOperator::max_abs() const { return matrix_.size() ? matrix_.cwiseAbs().maxCoeff() : 0.0; }

Matrix LatticeOperator::block(Site row, Site col) const {
  const int n = geometry_.n_internal;
  return matrix_.block(site_index(geometry_, row.x1, row.x2, 0), site_index(geometry_, col.x1, col.x2, 0), n, n);
}

LatticeOperator LatticeOperator::adjoint() const { return LatticeOperator(geometry_, matrix_.adjoint()); }

void require_same_geometry(const LatticeOperator& a, const LatticeOperator& b, const char* where) {
  if (!(a.geometry() == b.geometry()))
    fail(ErrorCode::geometry_mismatch, std::string(where) + ": geometry mismatch (" + a.geometry().describe() +
                                           " vs " + b.geometry().describe() + ")");
}

LatticeOperator operator*(const LatticeOperator& a, const LatticeOperator& b) {
  require_same_geometry(a, b, "product");
  return a.with_matrix(a.matrix() * b.matrix());
}

LatticeOperator operator+(const LatticeOperator& a, const LatticeOperator& b) {
  require_same_geometry(a, b, "sum");
  return a.with_matrix(a.matrix() + b.matrix());
}

LatticeOperator operator-(const LatticeOperator& a, const LatticeOperator& b) {
  require_same_geometry(a, b, "difference");
  return a.with_matrix(a.matrix() - b.matrix());
}

LatticeOperator operator*(cplx c, const LatticeOperator& a) { return a.with_matrix(c * a.matrix()); }

double max_norm_diff(const LatticeOperator& a, const LatticeOperator& b) {
  require_same_geometry(a, b, "max_norm_diff");
  return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

FaultInjection& faults() {
  thread_local FaultInjection f;
  return f;
}

double heaviside(int x) {
  const bool on = x >= 0;
  return (on != faults().flip_step_convention) ? 1.0 : 0.0;
}

Eigen::VectorXd position_diagonal(const LatticeGeometry& g, int axis) {
  g.range(axis);
  Eigen::VectorXd d(g.dim());
  for (Index i = 0; i < g.dim(); ++i) {
    const Site s = site_at(g, i / g.n_internal);
    d(i) = axis == 1 ? s.x1 : s.x2;
  }
  return d;
}

Eigen::VectorXd step_diagonal(const LatticeGeometry& g, int axis) {
  Eigen::VectorXd d = position_diagonal(g, axis);
  for (Index i = 0; i < d.size(); ++i) d(i) = heaviside(static_cast<int>(d(i)));
  return d;
}

Eigen::VectorXcd flux_phase_diagonal(const LatticeGeometry& g) {
  if (g.kind != GeometryKind::bulk) fail(ErrorCode::configuration, "flux_phase needs a bulk geometry");
  Eigen::VectorXcd d(g.dim());
  const double sign = faults().flip_flux_sign ? -1.0 : 1.0;
  for (int site = 0; site < g.sites(); ++site) {
    const Site s = site_at(g, site);
    const double re = s.x1 + g.origin_offset[0];
    const double im = s.x2 + g.origin_offset[1];
    if (re == 0.0 && im == 0.0)
      fail(ErrorCode::configuration, "origin_offset places the flux branch point on a lattice site");
    const cplx phase = std::polar(1.0, sign * std::atan2(im, re));
    for (int k = 0; k < g.n_internal; ++k) d(static_cast<Index>(site) * g.n_internal + k) = phase;
  }
  return d;
}

LatticeOperator position_multiplier(const LatticeGeometry& g, int axis, const std::function<cplx(int)>& f) {
  const Eigen::VectorXd x = position_diagonal(g, axis);
  Eigen::VectorXcd d(x.size());
  for (Index i = 0; i < x.size(); ++i) d(i) = f(static_cast<int>(x(i)));
  return LatticeOperator::diagonal(g, d);
}

LatticeOperator step_function(const LatticeGeometry& g, int axis) {
  return LatticeOperator::diagonal(g, step_diagonal(g, axis).cast<cplx>());
}

LatticeOperator position_operator(const LatticeGeometry& g, int axis) {
  return LatticeOperator::diagonal(g, position_diagonal(g, axis).cast<cplx>());
}

LatticeOperator flux_phase(const LatticeGeometry& g) { return LatticeOperator::diagonal(g, flux_phase_diagonal(g)); }

Matrix nc_derivative_matrix(const LatticeGeometry& g, int axis, const Matrix& a) {
  const Eigen::VectorXd lam = step_diagonal(g, axis);
  Matrix out(a.rows(), a.cols());
  const cplx mi(0.0, -1.0);
  for (Index c = 0; c < a.cols(); ++c)
    for (Index r = 0; r < a.rows(); ++r) out(r, c) = mi * (lam(r) - lam(c)) * a(r, c);
  return out;
}

LatticeOperator nc_derivative(int axis, const LatticeOperator& a) {
  return a.with_matrix(nc_derivative_matrix(a.geometry(), axis, a.matrix()));
}

void require_compatible(const LatticeGeometry& half, const LatticeGeometry& bulk) {
  const bool ok = half.kind == GeometryKind::half_space && bulk.kind == GeometryKind::bulk && half.x1 == bulk.x1 &&
                  half.n_internal == bulk.n_internal && half.periodic[0] == bulk.periodic[0] &&
                  bulk.x2.contains(0) && bulk.x2.contains(half.x2.hi);
  if (!ok)
    fail(ErrorCode::geometry_mismatch, "incompatible half-space/bulk ranges: " + half.describe() + " vs " +
                                           bulk.describe());
}

std::vector<Index> injection_map(const LatticeGeometry& half, const LatticeGeometry& bulk) {
  require_compatible(half, bulk);
  std::vector<Index> map(static_cast<size_t>(half.dim()));
  for (int x2 = half.x2.lo; x2 <= half.x2.hi; ++x2)
    for (int x1 = half.x1.lo; x1 <= half.x1.hi; ++x1)
      for (int s = 0; s < half.n_internal; ++s)
        map[static_cast<size_t>(site_index(half, x1, x2, s))] = site_index(bulk, x1, x2, s);
  return map;
}

Matrix injection(const LatticeGeometry& half, const LatticeGeometry& bulk) {
  const auto map = injection_map(half, bulk);
  Matrix iota = Matrix::Zero(bulk.dim(), half.dim());
  for (size_t j = 0; j < map.size(); ++j) iota(map[j], static_cast<Index>(j)) = 1.0;
  return iota;
}

LatticeOperator embed_half_space(const LatticeOperator& half_op, const LatticeGeometry& bulk,
                                 std::optional<cplx> filler) {
  const auto map = injection_map(half_op.geometry(), bulk);
  Matrix out = Matrix::Zero(bulk.dim(), bulk.dim());
  const Index n = half_op.dim();
  for (Index c = 0; c < n; ++c)
    for (Index r = 0; r < n; ++r) out(map[r], map[c]) = half_op.matrix()(r, c);
  if (filler) {
    std::vector<bool> in_image(static_cast<size_t>(bulk.dim()), false);
    for (Index b : map) in_image[static_cast<size_t>(b)] = true;
    for (Index i = 0; i < bulk.dim(); ++i)
      if (!in_image[static_cast<size_t>(i)]) out(i, i) = *filler;
  }
  return LatticeOperator(bulk, std::move(out));
}

LatticeOperator restrict_half_space(const LatticeOperator& a, const LatticeGeometry& half) {
  const auto map = injection_map(half, a.geometry());
  const Index n = half.dim();
  Matrix out(n, n);
  for (Index c = 0; c < n; ++c)
    for (Index r = 0; r < n; ++r) out(r, c) = a.matrix()(map[r], map[c]);
  return LatticeOperator(half, std::move(out));
}

Region Region::disk(double cx, double cy, double radius) {
  Region r;
  r.kind = Kind::disk;
  r.cx = cx;
  r.cy = cy;
  r.radius = radius;
  return r;
}

Region Region::box(double cx, double cy, double hw1, double hw2) {
  Region r;
  r.kind = Kind::box;
  r.cx = cx;
  r.cy = cy;
  r.half_width1 = hw1;
  r.half_width2 = hw2;
  return r;
}

Region Region::x2_below(double bound) {
  Region r;
  r.kind = Kind::x2_below;
  r.x2_bound = bound;
  return r;
}

Region Region::flux_disk(const LatticeGeometry& g, double fraction) {
  const double side = std::min(g.x1.size(), g.x2.size());
  return disk(-g.origin_offset[0], -g.origin_offset[1], fraction * side);
}

Region Region::flux_box(const LatticeGeometry& g, double fraction) {
  return box(-g.origin_offset[0], -g.origin_offset[1], fraction * g.x1.size(), fraction * g.x2.size());
}

Region Region::lower_half(const LatticeGeometry& strip) { return x2_below(strip.x2.lo + strip.x2.size() / 2.0); }

bool Region::contains(const Site& s) const {
  switch (kind) {
    case Kind::everywhere: return true;
    case Kind::disk: {
      const double dx = s.x1 - cx;
      const double dy = s.x2 - cy;
      return dx * dx + dy * dy <= radius * radius;
    }
    case Kind::box: return std::abs(s.x1 - cx) <= half_width1 && std::abs(s.x2 - cy) <= half_width2;
    case Kind::x2_below: return s.x2 < x2_bound;
  }
  return false;
}

Eigen::VectorXd Region::weights(const LatticeGeometry& g) const {
  Eigen::VectorXd w(g.dim());
  for (int site = 0; site < g.sites(); ++site) {
    const double v = contains(site_at(g, site)) ? 1.0 : 0.0;
    for (int k = 0; k < g.n_internal; ++k) w(static_cast<Index>(site) * g.n_internal + k) = v;
  }
  return w;
}

std::string Region::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::everywhere: os << "all"; break;
    case Kind::disk: os << "disk(" << cx << "," << cy << ";r=" << radius << ")"; break;
    case Kind::box: os << "box(" << cx << "," << cy << ";" << half_width1 << "x" << half_width2 << ")"; break;
    case Kind::x2_below: os << "x2<" << x2_bound; break;
  }
  return os.str();
}

const char* to_string(DecayModel m) {
  switch (m) {
    case DecayModel::exponential: return "exponential";
    case DecayModel::polynomial: return "polynomial";
    case DecayModel::loc2_exponential: return "loc2-exponential";
    case DecayModel::loc2_polynomial: return "loc2-polynomial";
  }
  return "?";
}

const char* to_string(FitStatus s) {
  switch (s) {
    case FitStatus::ok: return "ok";
    case FitStatus::numerically_zero: return "numerically-zero";
    case FitStatus::fit_failed: return "fit-failed";
  }
  return "?";
}

double confinement_distance(const LatticeGeometry& g, int axis, int x) {
  const Interval& r = g.range(axis);
  double d = std::min(std::abs(x - (r.lo - 0.5)), std::abs(x - (r.hi + 0.5)));
  if (g.kind == GeometryKind::bulk) d = std::min(d, std::abs(x + 0.5));
  return d - 0.5;
}

double site_distance(const LatticeGeometry& g, const Site& a, const Site& b) {
  double d[2];
  for (int axis = 1; axis <= 2; ++axis) {
    int diff = std::abs(axis == 1 ? a.x1 - b.x1 : a.x2 - b.x2);
    const int n = g.range(axis).size();
    if (g.periodic[axis - 1]) diff = std::min(diff, n - diff);
    d[axis - 1] = diff;
  }
  return std::hypot(d[0], d[1]);
}

double block_trace_norm(const Matrix& m, Index row, Index col, int n) {
  if (n == 1) return std::abs(m(row, col));
  if (n == 2) {
    const cplx a = m(row, col), b = m(row, col + 1), c = m(row + 1, col), d = m(row + 1, col + 1);
    const double fro2 = std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d);
    return std::sqrt(std::max(0.0, fro2 + 2.0 * std::abs(a * d - b * c)));
  }
  const Matrix blk = m.block(row, col, n, n);
  Eigen::SelfAdjointEigenSolver<Matrix> es(blk.adjoint() * blk, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Index i = 0; i < n; ++i) s += std::sqrt(std::max(0.0, es.eigenvalues()(i)));
  return s;
}

LocalityFit decay_fit(const LatticeOperator& a, DecayModel model, std::optional<int> confinement_direction,
                      const DecayFitOptions& options) {
  const LatticeGeometry& g = a.geometry();
  const bool loc2 = model == DecayModel::loc2_exponential || model == DecayModel::loc2_polynomial;
  const bool poly = model == DecayModel::polynomial || model == DecayModel::loc2_polynomial;
  if (loc2 && !confinement_direction) confinement_direction = 2;
  if (confinement_direction && *confinement_direction != 1 && *confinement_direction != 2)
    fail(ErrorCode::invalid_argument, "confinement direction must be 1 or 2");

  LocalityFit fit;
  fit.model = model;
  fit.confinement_direction = loc2 ? confinement_direction : std::nullopt;

  std::vector<int> kept;
  for (int site = 0; site < g.sites(); ++site) {
    const Site s = site_at(g, site);
    bool keep = true;
    for (int axis = 1; axis <= 2 && keep; ++axis) {
      if (g.periodic[axis - 1]) continue;
      if (loc2 && axis == *confinement_direction) continue;
      const Interval& r = g.range(axis);
      const int x = axis == 1 ? s.x1 : s.x2;
      if (x - r.lo < options.margin || r.hi - x < options.margin) keep = false;
    }
    if (keep) kept.push_back(site);
  }
  if (kept.empty()) {
    fit.status = FitStatus::fit_failed;
    return fit;
  }

  // per-bin envelope: largest block norm in each unit distance bin
  struct Bin {
    double r = 0.0;
    double value = -1.0;
  };
  std::map<int, Bin> bins;
  const int n = g.n_internal;
  const Matrix& m = a.matrix();
  std::vector<Site> sites;
  sites.reserve(kept.size());
  for (int site : kept) sites.push_back(site_at(g, site));
  for (size_t i = 0; i < kept.size(); ++i) {
    const double conf = loc2 ? confinement_distance(g, *confinement_direction,
                                                    *confinement_direction == 1 ? sites[i].x1 : sites[i].x2)
                             : 0.0;
    for (size_t j = 0; j < kept.size(); ++j) {
      const double r = site_distance(g, sites[i], sites[j]) + conf;
      const double v = block_trace_norm(m, static_cast<Index>(kept[i]) * n, static_cast<Index>(kept[j]) * n, n);
      Bin& b = bins[static_cast<int>(std::floor(r + 1e-9))];
      if (v > b.value) {
        b.value = v;
        b.r = r;
      }
    }
  }

  std::vector<double> xs, ys;
  int last_nonzero = -1;
  for (const auto& [key, b] : bins)
    if (b.value >= options.floor) last_nonzero = key;
  if (last_nonzero < 0) {
    fit.status = FitStatus::numerically_zero;
    return fit;
  }
  bool tail_added = false;
  for (const auto& [key, b] : bins) {
    double value = b.value;
    if (value < options.floor) {
      if (key < last_nonzero || tail_added) continue;
      value = options.floor;
      tail_added = true;
    }
    xs.push_back(poly ? std::log1p(b.r) : b.r);
    ys.push_back(std::log(value));
  }
  fit.points = static_cast<int>(xs.size());
  if (xs.size() < 2) {
    fit.status = FitStatus::fit_failed;
    return fit;
  }
  const double k = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double den = k * sxx - sx * sx;
  if (den <= 0.0) {
    fit.status = FitStatus::fit_failed;
    return fit;
  }
  const double slope = (k * sxy - sx * sy) / den;
  const double intercept = (sy - slope * sx) / k;
  fit.rate = -slope;
  fit.prefactor = std::exp(intercept);
  for (size_t i = 0; i < xs.size(); ++i)
    fit.max_residual = std::max(fit.max_residual, std::abs(ys[i] - (intercept + slope * xs[i])));
  fit.status = fit.rate > 0.0 && std::isfinite(fit.rate) ? FitStatus::ok : FitStatus::fit_failed;
  return fit;
}

}  // namespace fredlab::lattice
