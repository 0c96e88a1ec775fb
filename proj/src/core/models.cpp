#include "core/models.hpp"

#include <cmath>

#include "core/rng.hpp"

namespace fredlab::models {

using lattice::cplx;
using lattice::Index;
using lattice::Site;

namespace {

Matrix pauli(int k) {
  Matrix s = Matrix::Zero(2, 2);
  switch (k) {
    case 0: s << 1, 0, 0, 1; break;
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case 3: s << 1, 0, 0, -1; break;
  }
  return s;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix block_diag(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

}  // namespace

const char* to_string(Family f) {
  switch (f) {
    case Family::qwz: return "qwz";
    case Family::bhz: return "bhz";
    case Family::atomic_trivial: return "atomic-trivial";
  }
  return "?";
}

Family family_from_string(const std::string& s) {
  if (s == "qwz") return Family::qwz;
  if (s == "bhz") return Family::bhz;
  if (s == "atomic-trivial" || s == "atomic") return Family::atomic_trivial;
  fail(ErrorCode::configuration, "unknown model family '" + s + "'");
}

int ModelSpec::n_internal() const { return family == Family::qwz ? 2 : 4; }

double DisorderSpec::at(int x1, int x2) const {
  if (amplitude == 0.0) return 0.0;
  return amplitude * (2.0 * site_uniform(seed, x1, x2) - 1.0);
}

Hoppings hoppings(const ModelSpec& model) {
  const cplx i(0.0, 1.0);
  const Matrix t1 = 0.5 * (pauli(3) + i * pauli(1));
  const Matrix t2 = 0.5 * (pauli(3) + i * pauli(2));
  Hoppings h;
  switch (model.family) {
    case Family::qwz:
      h.onsite = model.mass * pauli(3);
      h.t1 = t1;
      h.t2 = t2;
      break;
    case Family::bhz: {
      const Matrix up = model.mass * pauli(3);
      h.onsite = block_diag(up, up.conjugate()) + model.inter_block * kron(pauli(2), pauli(2));
      h.t1 = block_diag(t1, t1.conjugate());
      h.t2 = block_diag(t2, t2.conjugate());
      break;
    }
    case Family::atomic_trivial:
      h.onsite = kron(pauli(0), pauli(3));
      h.t1 = Matrix::Zero(4, 4);
      h.t2 = Matrix::Zero(4, 4);
      break;
  }
  return h;
}

LatticeOperator build_on(const ModelSpec& model, const DisorderSpec& disorder, const LatticeGeometry& g) {
  const int n = model.n_internal();
  if (g.n_internal != n)
    fail(ErrorCode::geometry_mismatch, std::string("model ") + to_string(model.family) + " needs n_internal=" +
                                           std::to_string(n));
  if (disorder.amplitude < 0.0) fail(ErrorCode::configuration, "disorder amplitude must be non-negative");
  const Hoppings hop = hoppings(model);
  const Matrix id = Matrix::Identity(n, n);
  Matrix h = Matrix::Zero(g.dim(), g.dim());
  for (int x2 = g.x2.lo; x2 <= g.x2.hi; ++x2)
    for (int x1 = g.x1.lo; x1 <= g.x1.hi; ++x1) {
      const Index here = lattice::site_index(g, x1, x2, 0);
      h.block(here, here, n, n) += hop.onsite + disorder.at(x1, x2) * id;
      for (int axis = 1; axis <= 2; ++axis) {
        int y1 = x1 + (axis == 1), y2 = x2 + (axis == 2);
        const lattice::Interval& r = g.range(axis);
        int& y = axis == 1 ? y1 : y2;
        if (y > r.hi) {
          if (!g.periodic[axis - 1]) continue;
          y = r.lo;
        }
        const Index there = lattice::site_index(g, y1, y2, 0);
        const Matrix& t = axis == 1 ? hop.t1 : hop.t2;
        h.block(there, here, n, n) += t;
        h.block(here, there, n, n) += t.adjoint();
      }
    }
  return LatticeOperator::hermitian_from(g, std::move(h));
}

LatticeOperator build_bulk(const ModelSpec& model, const DisorderSpec& disorder, const LatticeGeometry& g) {
  if (g.kind != lattice::GeometryKind::bulk) fail(ErrorCode::configuration, "build_bulk needs a bulk geometry");
  return build_on(model, disorder, g);
}

LatticeOperator boundary_perturbation(const ModelSpec& model, const LatticeGeometry& strip, double amplitude,
                                      int depth) {
  if (strip.kind != lattice::GeometryKind::half_space)
    fail(ErrorCode::configuration, "boundary perturbation lives on a half-space geometry");
  if (depth < 1) fail(ErrorCode::configuration, "boundary perturbation depth must be at least 1");
  ModelSpec unit = model;
  unit.mass = 1.0;
  unit.inter_block = 0.0;
  const Hoppings hop = hoppings(unit);
  const int n = model.n_internal();
  Matrix v = Matrix::Zero(strip.dim(), strip.dim());
  for (int x2 = 0; x2 < std::min(depth, strip.x2.size()); ++x2)
    for (int x1 = strip.x1.lo; x1 <= strip.x1.hi; ++x1) {
      const Index here = lattice::site_index(strip, x1, x2, 0);
      v.block(here, here, n, n) += amplitude * hop.onsite;
      int y1 = x1 + 1;
      if (y1 > strip.x1.hi) {
        if (!strip.periodic[0]) continue;
        y1 = strip.x1.lo;
      }
      const Index there = lattice::site_index(strip, y1, x2, 0);
      v.block(there, here, n, n) += 0.5 * amplitude * hop.t1;
      v.block(here, there, n, n) += 0.5 * amplitude * hop.t1.adjoint();
    }
  return LatticeOperator::hermitian_from(strip, std::move(v));
}

void validate_perturbation(const BoundaryCondition& bc, const LatticeGeometry& strip) {
  if (bc.kind == BoundaryCondition::Kind::dirichlet) return;
  if (!bc.perturbation) fail(ErrorCode::configuration, "loc2-perturbation boundary condition without an operator");
  const LatticeOperator& v = *bc.perturbation;
  if (!(v.geometry() == strip)) fail(ErrorCode::geometry_mismatch, "boundary perturbation geometry != strip");
  if (!v.hermitian()) fail(ErrorCode::not_hermitian, "boundary perturbation is not self-adjoint");
  const int n = strip.n_internal;
  for (int a = 0; a < strip.sites(); ++a)
    for (int b = 0; b < strip.sites(); ++b) {
      const double norm = v.matrix().block(static_cast<Index>(a) * n, static_cast<Index>(b) * n, n, n).cwiseAbs().maxCoeff();
      if (norm == 0.0) continue;
      const Site sa = lattice::site_at(strip, a), sb = lattice::site_at(strip, b);
      if (sa.x2 >= bc.depth || sb.x2 >= bc.depth || lattice::site_distance(strip, sa, sb) > bc.range + 1e-12)
        fail(ErrorCode::configuration, "boundary perturbation violates its declared depth/range support");
    }
}

LatticeOperator build_edge(const ModelSpec& model, const DisorderSpec& disorder, const LatticeGeometry& strip,
                           const BoundaryCondition& bc) {
  if (strip.kind != lattice::GeometryKind::half_space)
    fail(ErrorCode::configuration, "build_edge needs a half-space geometry");
  validate_perturbation(bc, strip);
  const LatticeGeometry bulk = LatticeGeometry::matching_bulk(strip);
  LatticeOperator h = lattice::restrict_half_space(build_bulk(model, disorder, bulk), strip);
  if (bc.kind == BoundaryCondition::Kind::loc2_perturbation) h = h + *bc.perturbation;
  return LatticeOperator::hermitian_from(strip, h.matrix());
}

std::pair<LatticeOperator, symmetry::TimeReversal> doubled_model(const LatticeOperator& h,
                                                                  const symmetry::TimeReversal& theta) {
  if (!h.hermitian()) fail(ErrorCode::not_hermitian, "doubled_model needs a Hermitian operator");
  const int n = h.geometry().n_internal;
  if (theta.n_internal() != n) fail(ErrorCode::geometry_mismatch, "doubled_model: time reversal block size mismatch");
  const Matrix twin = theta.conjugate(h.matrix());
  LatticeGeometry g2 = h.geometry();
  g2.n_internal = 2 * n;
  const int sites = h.geometry().sites();
  Matrix out = Matrix::Zero(g2.dim(), g2.dim());
  for (Index j = 0; j < sites; ++j)
    for (Index i = 0; i < sites; ++i) {
      out.block(2 * n * i, 2 * n * j, n, n) = h.matrix().block(n * i, n * j, n, n);
      out.block(2 * n * i + n, 2 * n * j + n, n, n) = twin.block(n * i, n * j, n, n);
    }
  symmetry::TimeReversal t2;
  t2.site_block = Matrix::Zero(2 * n, 2 * n);
  t2.site_block.topRightCorner(n, n) = theta.site_block;
  t2.site_block.bottomLeftCorner(n, n) = theta.site_block;
  return {LatticeOperator::hermitian_from(g2, std::move(out)), std::move(t2)};
}

}  // namespace fredlab::models
