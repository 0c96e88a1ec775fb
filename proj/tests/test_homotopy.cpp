#include <doctest.h>

#include "core/homotopy.hpp"
#include "core/indices.hpp"
#include "core/models.hpp"
#include "core/oracles.hpp"
#include "core/spectral.hpp"

using namespace fredlab;
using namespace fredlab::homotopy;
using lattice::LatticeGeometry;
using lattice::Matrix;

namespace {

models::ModelSpec make(models::Family f, double mass) {
  models::ModelSpec m;
  m.family = f;
  m.mass = mass;
  return m;
}

double max_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

Matrix lambda2_mask(const LatticeGeometry& g, const Matrix& x) {
  const Eigen::VectorXd lam = lattice::step_diagonal(g, 2);
  return lam.asDiagonal() * x * lam.asDiagonal();
}

IndexMethod fedosov_box(const LatticeGeometry& g) {
  IndexMethod m;
  m.region = lattice::Region::flux_box(g, 0.25);
  return m;
}

}  // namespace

TEST_CASE("default samples") {
  const auto t = default_samples();
  REQUIRE(t.size() == 21);
  CHECK(t.front() == 0.0);
  CHECK(t.back() == 1.0);
  CHECK_THROWS(default_samples(1));
}

TEST_CASE("corner and truncation path endpoints") {
  const LatticeGeometry g = LatticeGeometry::square(8, 2);
  const LatticeOperator h = models::build_bulk(make(models::Family::qwz, -1.0), {}, g);
  const spectral::SwitchFunction sw = spectral::SwitchFunction::from_gap(spectral::spectral_gap(h));
  const LatticeOperator p = spectral::fermi_projection(h);
  const Eigen::VectorXd lam = lattice::step_diagonal(g, 2);

  const HomotopyPath c = path_corner_flatten(h, sw);
  CHECK(max_diff(c.generator(0.0).matrix(), p.matrix() * lam.asDiagonal() * p.matrix()) < 1e-12);
  CHECK(max_diff(indices::winding_op(c.generator(0.0)).matrix(), indices::bulk_corner_operator(p).matrix()) < 1e-10);
  CHECK(max_diff(c.generator(1.0).matrix(), lambda2_mask(g, p.matrix())) < 1e-12);
  for (double t : {0.25, 0.5}) CHECK(c.generator(t).hermitian());

  const HomotopyPath tr = path_truncate_flatten(h, sw);
  CHECK(max_diff(tr.generator(0.0).matrix(), lambda2_mask(g, p.matrix())) < 1e-12);
  REQUIRE(tr.supporting_fit);
  CHECK(tr.supporting_fit->success());
}

TEST_CASE("diagonal Hamiltonian: truncation does not change the half-space block") {
  const LatticeGeometry g = LatticeGeometry::square(6, 4);
  const LatticeOperator h = models::build_bulk(make(models::Family::atomic_trivial, 1.0), {}, g);
  const spectral::SwitchFunction sw = spectral::SwitchFunction::from_gap(spectral::spectral_gap(h));
  const HomotopyPath tr = path_truncate_flatten(h, sw);
  CHECK(max_diff(tr.generator(0.0).matrix(), tr.generator(1.0).matrix()) < 1e-14);
}

TEST_CASE("Dirichlet boundary path is constant") {
  const models::ModelSpec m = make(models::Family::qwz, -1.0);
  const LatticeGeometry strip = LatticeGeometry::strip(8, 4, 2);
  const LatticeOperator h = models::build_bulk(m, {}, LatticeGeometry::matching_bulk(strip));
  const LatticeOperator h_hat = models::build_edge(m, {}, strip);
  const spectral::GapReport gap = spectral::spectral_gap(models::build_bulk(m, {}, LatticeGeometry::square(8, 2)));
  const HomotopyPath p = path_boundary_conditions(h, h_hat, spectral::SwitchFunction::from_gap(gap));
  CHECK(max_diff(p.generator(0.0).matrix(), p.generator(1.0).matrix()) == 0.0);
  CHECK_FALSE(p.supporting_fit);
}

TEST_CASE("monitor: constant path") {
  const LatticeGeometry g = LatticeGeometry::square(6, 4);
  const LatticeOperator h = models::build_bulk(make(models::Family::atomic_trivial, 1.0), {}, g);
  const LatticeOperator p = spectral::fermi_projection(h);
  HomotopyPath path;
  path.label = "constant";
  path.generator = [p](double) { return p; };
  path.samples = {0.0, 0.5, 1.0};
  const HomotopyReport r = monitor(path, fedosov_box(g));
  CHECK(r.verdict == Verdict::index_constant);
  CHECK(r.reference_value == 0);
  CHECK(r.flagged == 0);
  CHECK(r.gaps_ok);
}

TEST_CASE("monitor: corner path on QWZ keeps the index") {
  const models::ModelSpec m = make(models::Family::qwz, -1.0);
  const LatticeGeometry g = LatticeGeometry::rectangle(32, 12, 2);
  const LatticeOperator h = models::build_bulk(m, {}, g);
  HomotopyPath path = path_corner_flatten(h, spectral::SwitchFunction::from_gap(spectral::spectral_gap(h)));
  path.samples = {0.0, 0.5, 1.0};
  const HomotopyReport r = monitor(path, fedosov_box(g));
  CHECK(r.verdict == Verdict::index_constant);
  CHECK(r.reference_value == oracles::chern_berry(m));
  CHECK(r.min_fredholm_gap >= 0.1);
  CHECK(r.loc2_ok);
  CHECK(r.flagged == 0);
}

TEST_CASE("monitor: a path through a gapless point does not pass silently") {
  const LatticeGeometry g = LatticeGeometry::rectangle(24, 8, 2);
  const spectral::SwitchFunction sw = spectral::SwitchFunction::from_gap(
      spectral::spectral_gap(models::build_bulk(make(models::Family::qwz, -1.0), {}, g)));
  HomotopyPath path;
  path.label = "mass sweep";
  path.generator = [g, sw](double t) {
    const LatticeOperator gh = spectral::apply_function_eig(
        models::build_bulk(make(models::Family::qwz, -1.0 - 2.0 * t), {}, g), [&sw](double x) { return sw.value(x); });
    const Eigen::VectorXd lam = lattice::step_diagonal(g, 2);
    return LatticeOperator::hermitian_from(g, gh.matrix() * lam.asDiagonal() * gh.matrix());
  };
  path.samples = {0.0, 0.5, 1.0};
  Thresholds th;
  th.max_refinements = 0;
  const HomotopyReport r = monitor(path, fedosov_box(g), th);
  CHECK((r.verdict != Verdict::index_constant || r.flagged > 0));
}

TEST_CASE("physical transport") {
  const models::ModelSpec m = make(models::Family::bhz, -1.0);
  const LatticeGeometry g = LatticeGeometry::square(8, 4);
  const LatticeOperator h0 = models::build_bulk(m, {}, g);
  const TransportReport same = transport(path_physical(h0, h0), 1);
  CHECK_FALSE(same.refused);
  REQUIRE(same.value);
  CHECK(*same.value == 1);

  const double half_gap = 0.5 * spectral::spectral_gap(h0).width();
  const LatticeOperator h1 = models::build_bulk(m, {0.3 * half_gap * 2.0, 7}, g);
  const TransportReport dis = transport(path_physical(h0, h1), 1);
  CHECK_FALSE(dis.refused);
  CHECK(dis.t.size() == 21);

  const LatticeOperator trivial = models::build_bulk(make(models::Family::bhz, -3.0), {}, g);
  const TransportReport across = transport(path_physical(h0, trivial), 1);
  CHECK(across.refused);
  CHECK_FALSE(across.value);
  CHECK_FALSE(across.reason.empty());
}

TEST_CASE("paths reject gapless input") {
  const LatticeGeometry g = LatticeGeometry::square(8, 2);
  const LatticeOperator h = models::build_bulk(make(models::Family::qwz, 0.0), {}, g);
  const spectral::SwitchFunction sw(-0.1, 0.1);
  CHECK_THROWS_AS(path_corner_flatten(h, sw), Error);
}
