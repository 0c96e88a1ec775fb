#include "core/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "core/linalg.hpp"

namespace fredlab::spectral {

using lattice::Index;

EigenDecomposition eig_hermitian(const LatticeOperator& a) {
  if (!a.hermitian()) fail(ErrorCode::not_hermitian, "eig_hermitian: operator is not Hermitian");
  auto e = linalg::eigh(a.matrix());
  return {std::move(e.values), std::move(e.vectors)};
}

std::pair<double, double> eig_residuals(const Matrix& a, const EigenDecomposition& e) {
  const Matrix av = a * e.eigenvectors - e.eigenvectors * e.eigenvalues.asDiagonal();
  const Matrix vv = e.eigenvectors.adjoint() * e.eigenvectors - Matrix::Identity(a.rows(), a.cols());
  return {av.cwiseAbs().maxCoeff(), vv.cwiseAbs().maxCoeff()};
}

GapReport spectral_gap(const Eigen::VectorXd& eigenvalues, double around, double resolution) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  GapReport r{-inf, inf, false};
  bool hit = false;
  for (Index i = 0; i < eigenvalues.size(); ++i) {
    const double l = eigenvalues(i);
    if (std::abs(l - around) <= 1e-9) hit = true;
    if (l < around) r.gap_lower = std::max(r.gap_lower, l);
    if (l > around) r.gap_upper = std::min(r.gap_upper, l);
  }
  if (hit) {
    r.gap_lower = std::nextafter(around, -inf);
    r.gap_upper = std::nextafter(around, inf);
  }
  r.contains_zero = hit || (r.gap_upper - r.gap_lower) < resolution;
  return r;
}

GapReport spectral_gap(const LatticeOperator& h, double around, double resolution) {
  if (!h.hermitian()) fail(ErrorCode::not_hermitian, "spectral_gap: operator is not Hermitian");
  return spectral_gap(linalg::eigvalsh(h.matrix()), around, resolution);
}

LatticeOperator fermi_projection(const LatticeGeometry& g, const EigenDecomposition& e, double mu) {
  Index k = 0;
  for (Index i = 0; i < e.eigenvalues.size(); ++i) {
    if (std::abs(e.eigenvalues(i) - mu) <= 1e-9) {
      std::ostringstream os;
      os << "fermi_projection: mu=" << mu << " lies on the eigenvalue " << e.eigenvalues(i);
      fail(ErrorCode::gap_violation, os.str());
    }
    if (e.eigenvalues(i) < mu) ++k;
  }
  const Matrix occ = e.eigenvectors.leftCols(k);
  return LatticeOperator::hermitian_from(g, occ * occ.adjoint());
}

LatticeOperator fermi_projection(const LatticeOperator& h, double mu) {
  return fermi_projection(h.geometry(), eig_hermitian(h), mu);
}

Jet::Jet(int order, double value) : order_(order) {
  if (order < 0 || order > kMaxOrder) fail(ErrorCode::invalid_argument, "jet order out of range");
  c_[0] = value;
}

Jet Jet::variable(double x, int order) {
  Jet j(order, x);
  if (order >= 1) j.c_[1] = 1.0;
  return j;
}

double Jet::derivative(int k) const {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return c_[k] * f;
}

Jet Jet::operator+(const Jet& o) const {
  Jet r(std::min(order_, o.order_));
  for (int k = 0; k <= r.order_; ++k) r.c_[k] = c_[k] + o.c_[k];
  return r;
}

Jet Jet::operator-(const Jet& o) const {
  Jet r(std::min(order_, o.order_));
  for (int k = 0; k <= r.order_; ++k) r.c_[k] = c_[k] - o.c_[k];
  return r;
}

Jet Jet::operator*(const Jet& o) const {
  Jet r(std::min(order_, o.order_));
  for (int k = 0; k <= r.order_; ++k) {
    double s = 0.0;
    for (int i = 0; i <= k; ++i) s += c_[i] * o.c_[k - i];
    r.c_[k] = s;
  }
  return r;
}

Jet Jet::operator*(double s) const {
  Jet r(order_);
  for (int k = 0; k <= order_; ++k) r.c_[k] = c_[k] * s;
  return r;
}

Jet Jet::reciprocal() const {
  Jet r(order_);
  r.c_[0] = 1.0 / c_[0];
  for (int k = 1; k <= order_; ++k) {
    double s = 0.0;
    for (int i = 1; i <= k; ++i) s += c_[i] * r.c_[k - i];
    r.c_[k] = -s * r.c_[0];
  }
  return r;
}

Jet Jet::exp() const {
  Jet r(order_);
  r.c_[0] = std::exp(c_[0]);
  for (int k = 1; k <= order_; ++k) {
    double s = 0.0;
    for (int i = 1; i <= k; ++i) s += i * c_[i] * r.c_[k - i];
    r.c_[k] = s / k;
  }
  return r;
}

SwitchFunction::SwitchFunction(double a, double b) : a_(a), b_(b), norm_(0.0) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
    fail(ErrorCode::invalid_argument, "switch function needs finite a < b");
  using boost::math::quadrature::gauss_kronrod;
  norm_ = gauss_kronrod<double, 61>::integrate([this](double t) { return bump(t); }, a_, b_, 15, 1e-15);
}

SwitchFunction SwitchFunction::from_gap(const GapReport& gap, double fraction) {
  if (gap.contains_zero || !std::isfinite(gap.gap_lower) || !std::isfinite(gap.gap_upper))
    fail(ErrorCode::gap_violation, "switch function needs an open, finite spectral gap");
  if (!(fraction > 0.0 && fraction < 1.0)) fail(ErrorCode::configuration, "g window fraction must lie in (0,1)");
  const double c = 0.5 * (gap.gap_lower + gap.gap_upper);
  const double half = 0.5 * fraction * gap.width();
  return SwitchFunction(c - half, c + half);
}

double SwitchFunction::bump(double t) const {
  if (t <= a_ || t >= b_) return 0.0;
  return std::exp(-1.0 / ((t - a_) * (b_ - t)));
}

Jet SwitchFunction::bump_jet(double t, int order) const {
  if (t <= a_ || t >= b_) return Jet(order);
  const Jet x = Jet::variable(t, order);
  const Jet q = (x - Jet(order, a_)) * (Jet(order, b_) - x);
  const Jet inv = q.reciprocal();
  if (inv.coeff(0) > 700.0) return Jet(order);
  return (inv * -1.0).exp();
}

double SwitchFunction::value(double e) const {
  if (e <= a_) return 1.0;
  if (e >= b_) return 0.0;
  using boost::math::quadrature::gauss_kronrod;
  auto f = [this](double t) { return bump(t); };
  if (e <= 0.5 * (a_ + b_)) return 1.0 - gauss_kronrod<double, 61>::integrate(f, a_, e, 15, 1e-15) / norm_;
  return gauss_kronrod<double, 61>::integrate(f, e, b_, 15, 1e-15) / norm_;
}

Jet SwitchFunction::jet(double e, int order) const {
  Jet r(order, value(e));
  if (order == 0 || e <= a_ || e >= b_) return r;
  const Jet phi = bump_jet(e, order - 1);
  for (int k = 1; k <= order; ++k) r.coeff(k) = -phi.coeff(k - 1) / (norm_ * k);
  return r;
}

TruncatedSwitch::TruncatedSwitch(SwitchFunction g, double e1, double e0) : g_(std::move(g)), rise_(e1, e0) {
  if (!(e0 < g_.a())) fail(ErrorCode::invalid_argument, "cutoff must sit below the switch window");
}

double TruncatedSwitch::value(double e) const { return g_.value(e) * (1.0 - rise_.value(e)); }

Jet TruncatedSwitch::jet(double e, int order) const { return g_.jet(e, order) * (Jet(order, 1.0) - rise_.jet(e, order)); }

std::vector<double> TruncatedSwitch::breakpoints() const { return {rise_.a(), rise_.b(), g_.a(), g_.b()}; }

LatticeOperator apply_function_eig(const LatticeGeometry& g, const EigenDecomposition& e,
                                   const std::function<double(double)>& f) {
  Eigen::VectorXd fv(e.eigenvalues.size());
  for (Index i = 0; i < fv.size(); ++i) fv(i) = f(e.eigenvalues(i));
  const Matrix scaled = e.eigenvectors * fv.asDiagonal();
  return LatticeOperator::hermitian_from(g, scaled * e.eigenvectors.adjoint());
}

LatticeOperator apply_function_eig(const LatticeOperator& h, const std::function<double(double)>& f) {
  return apply_function_eig(h.geometry(), eig_hermitian(h), f);
}

LatticeOperator apply_function_eig_complex(const LatticeGeometry& g, const EigenDecomposition& e,
                                           const std::function<cplx(double)>& f) {
  Eigen::VectorXcd fv(e.eigenvalues.size());
  for (Index i = 0; i < fv.size(); ++i) fv(i) = f(e.eigenvalues(i));
  const Matrix scaled = e.eigenvectors * fv.asDiagonal();
  return LatticeOperator(g, scaled * e.eigenvectors.adjoint());
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int n) {
  if (n < 1) fail(ErrorCode::invalid_argument, "gauss_legendre needs n >= 1");
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double beta = k / std::sqrt(4.0 * k * k - 1.0);
    j(k, k - 1) = beta;
    j(k - 1, k) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  Eigen::VectorXd w(n);
  for (int k = 0; k < n; ++k) w(k) = 2.0 * es.eigenvectors()(0, k) * es.eigenvectors()(0, k);
  return {es.eigenvalues(), w};
}

TruncatedSwitch hs_switch(const LatticeOperator& h, const SwitchFunction& g) {
  const Matrix& m = h.matrix();
  double lower = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < m.rows(); ++i) {
    double radius = 0.0;
    for (Index j = 0; j < m.cols(); ++j)
      if (j != i) radius += std::abs(m(i, j));
    lower = std::min(lower, m(i, i).real() - radius);
  }
  const double e0 = std::min(lower, g.a()) - 0.5;
  return TruncatedSwitch(g, e0 - 1.0, e0);
}

namespace {

// acc(i,j), i <= j, += coef * (T - z)^{-1}(i,j) for the real symmetric tridiagonal T
void accumulate_tridiagonal_resolvent(const Eigen::VectorXd& diag, const Eigen::VectorXd& sub, cplx z, cplx coef,
                                      Matrix& acc, Eigen::VectorXcd& fwd, Eigen::VectorXcd& bwd,
                                      Eigen::VectorXcd& ratio) {
  const Index n = diag.size();
  fwd(0) = diag(0) - z;
  for (Index i = 1; i < n; ++i) fwd(i) = (diag(i) - z) - sub(i - 1) * sub(i - 1) / fwd(i - 1);
  bwd(n - 1) = diag(n - 1) - z;
  for (Index i = n - 2; i >= 0; --i) bwd(i) = (diag(i) - z) - sub(i) * sub(i) / bwd(i + 1);
  for (Index i = 0; i + 1 < n; ++i) ratio(i) = -sub(i) / fwd(i);
  for (Index j = 0; j < n; ++j) {
    cplx val = 1.0 / (fwd(j) + bwd(j) - (diag(j) - z));
    cplx* col = acc.data() + j * n;
    col[j] += coef * val;
    for (Index i = j - 1; i >= 0; --i) {
      val *= ratio(i);
      col[i] += coef * val;
    }
  }
}

}  // namespace

HsResult apply_function_hs(const LatticeOperator& h, const SmoothFunction& f, const HsQuadrature& q) {
  if (!h.hermitian()) fail(ErrorCode::not_hermitian, "apply_function_hs: operator is not Hermitian");
  if (!f.compact()) fail(ErrorCode::invalid_argument, "apply_function_hs needs a compactly supported function");
  if (q.extension_order < 0 || q.extension_order + 1 > Jet::kMaxOrder)
    fail(ErrorCode::configuration, "extension order out of range");
  if (q.nodes_x < 1 || q.nodes_y < 1) fail(ErrorCode::configuration, "quadrature needs at least one node per panel");
  const int m_order = q.extension_order;
  const Index n = h.dim();

  double delta = q.delta;
  if (delta <= 0.0) {
    const GapReport gap = spectral_gap(h);
    delta = std::isfinite(gap.width()) && gap.width() > 0.0 ? 0.5 * gap.width() : 1.0;
  }

  Eigen::Tridiagonalization<Matrix> tri(h.matrix());
  const Matrix qmat = tri.matrixQ();
  const Eigen::VectorXd diag = tri.diagonal();
  const Eigen::VectorXd sub = tri.subDiagonal();

  const auto [gx, gwx] = gauss_legendre(q.nodes_x);
  const auto [gy, gwy] = gauss_legendre(q.nodes_y);
  const SwitchFunction chi(0.5, 1.0);

  struct YNode {
    double y, w, chi, dchi;
  };
  std::vector<YNode> ynodes;
  const double ypanels[3] = {0.0, 0.5 * delta, delta};
  for (int p = 0; p < 2; ++p) {
    const double lo = ypanels[p], hi = ypanels[p + 1];
    for (int k = 0; k < q.nodes_y; ++k) {
      const double y = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gy(k);
      const Jet cj = chi.jet(y / delta, 1);
      ynodes.push_back({y, 0.5 * (hi - lo) * gwy(k), cj.coeff(0), cj.coeff(1)});
    }
  }

  double inv_fact_m = 1.0;
  for (int i = 2; i <= m_order; ++i) inv_fact_m /= i;

  Matrix acc = Matrix::Zero(n, n);
  Eigen::VectorXcd fwd(n), bwd(n), ratio(n);
  long used = 0;
  const std::vector<double> bp = f.breakpoints();
  for (size_t p = 0; p + 1 < bp.size(); ++p) {
    const double lo = bp[p], hi = bp[p + 1];
    if (!(hi > lo)) continue;
    for (int k = 0; k < q.nodes_x; ++k) {
      const double x = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gx(k);
      const double wx = 0.5 * (hi - lo) * gwx(k);
      const Jet fj = f.jet(x, m_order + 1);
      bool nonzero = false;
      for (int i = 0; i <= m_order + 1; ++i) nonzero = nonzero || fj.coeff(i) != 0.0;
      if (!nonzero) continue;
      for (const YNode& yn : ynodes) {
        const cplx iy(0.0, yn.y);
        // sum_m f^(m) (iy)^m / m! equals sum_m coeff_m (iy)^m
        cplx series = 0.0, pw = 1.0;
        for (int i = 0; i <= m_order; ++i) {
          series += fj.coeff(i) * pw;
          pw *= iy;
        }
        const cplx top = fj.derivative(m_order + 1) * std::pow(iy, m_order) * inv_fact_m;
        const cplx dbar = 0.5 * (top * yn.chi + cplx(0.0, 1.0 / delta) * yn.dchi * series);
        const cplx coef = dbar * wx * yn.w;
        if (coef == 0.0) continue;
        accumulate_tridiagonal_resolvent(diag, sub, cplx(x, yn.y), coef, acc, fwd, bwd, ratio);
        ++used;
      }
    }
  }
  for (Index j = 0; j < n; ++j)
    for (Index i = j + 1; i < n; ++i) acc(i, j) = acc(j, i);
  const Matrix tpart = (acc + acc.adjoint()) / std::numbers::pi;
  HsResult out{LatticeOperator::hermitian_from(h.geometry(), qmat * tpart * qmat.adjoint()), used, std::nullopt,
               false};
  if (q.tolerance) {
    const LatticeOperator ref = apply_function_eig(h, [&f](double e) { return f.value(e); });
    out.residual_vs_eig = lattice::max_norm_diff(out.value, ref);
    out.diverged = *out.residual_vs_eig > *q.tolerance;
  }
  return out;
}

Matrix resolvent(const LatticeOperator& h, cplx z) {
  const Matrix shifted = h.matrix() - z * Matrix::Identity(h.dim(), h.dim());
  return shifted.partialPivLu().inverse();
}

CombesThomasReport combes_thomas_check(const LatticeOperator& h, const std::vector<cplx>& z_list) {
  if (!h.hermitian()) fail(ErrorCode::not_hermitian, "combes_thomas_check: operator is not Hermitian");
  const Eigen::VectorXd ev = linalg::eigvalsh(h.matrix());
  CombesThomasReport rep;
  rep.all_fits_ok = true;
  rep.rate_constant = std::numeric_limits<double>::infinity();
  for (const cplx z : z_list) {
    double dist = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < ev.size(); ++i) dist = std::min(dist, std::abs(ev(i) - z));
    if (dist <= 1e-9 || z.imag() == 0.0) fail(ErrorCode::gap_violation, "combes_thomas_check: z lies on the spectrum");
    const LatticeOperator r(h.geometry(), resolvent(h, z));
    const lattice::LocalityFit fit = lattice::decay_fit(r, lattice::DecayModel::exponential);
    rep.z.push_back(z);
    rep.fits.push_back(fit);
    rep.all_fits_ok = rep.all_fits_ok && fit.success();
    const double im = std::abs(z.imag());
    rep.rate_constant = std::min(rep.rate_constant, fit.rate / im);
    rep.prefactor_bound = std::max(rep.prefactor_bound, fit.prefactor * im);
  }
  return rep;
}

}  // namespace fredlab::spectral
