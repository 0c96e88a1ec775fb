#include <doctest.h>

#include <cmath>
#include <numbers>

#include "core/indices.hpp"
#include "core/linalg.hpp"
#include "core/models.hpp"
#include "core/oracles.hpp"
#include "core/rng.hpp"
#include "core/spectral.hpp"
#include "core/symmetry.hpp"

using namespace fredlab;
using namespace fredlab::indices;
using lattice::cplx;
using lattice::LatticeGeometry;
using lattice::Region;

namespace {

models::ModelSpec make(models::Family f, double mass) {
  models::ModelSpec m;
  m.family = f;
  m.mass = mass;
  return m;
}

LatticeOperator projection(const models::ModelSpec& m, int side) {
  return spectral::fermi_projection(models::build_bulk(m, {}, LatticeGeometry::square(side, m.n_internal())));
}

FedosovOptions disk_options(const LatticeGeometry& g) {
  FedosovOptions o;
  o.region = default_bulk_region(g);
  return o;
}

double max_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("project_compress") {
  const LatticeGeometry g = LatticeGeometry::square(4, 1);
  Random r(1);
  const LatticeOperator a(g, r.gaussian(g.dim(), g.dim()));
  const LatticeOperator id = LatticeOperator::identity(g);
  CHECK(max_diff(project_compress(id, a).matrix(), a.matrix()) < 1e-15);
  CHECK(max_diff(project_compress(LatticeOperator::zero(g), a).matrix(), id.matrix()) == 0.0);
  const LatticeOperator q = lattice::step_function(g, 1);
  const LatticeOperator once = project_compress(q, a);
  CHECK(max_diff(project_compress(q, once).matrix(), once.matrix()) < 1e-14);
}

TEST_CASE("winding operator") {
  const LatticeGeometry g = LatticeGeometry::square(8, 2);
  const Matrix id = Matrix::Identity(g.dim(), g.dim());
  CHECK(max_diff(winding_op(LatticeOperator::zero(g)).matrix(), id) < 1e-12);
  const LatticeOperator p = projection(make(models::Family::qwz, -1.0), 8);
  CHECK(max_diff(winding_op(p).matrix(), id) < 1e-10);

  const LatticeOperator p12 = projection(make(models::Family::qwz, -1.0), 12);
  const LatticeGeometry& g12 = p12.geometry();
  const LatticeOperator w = winding_op(LatticeOperator::hermitian_from(
      g12, p12.matrix() * lattice::step_function(g12, 2).matrix() * p12.matrix()));
  CHECK(linalg::singular_values(w.matrix()).maxCoeff() <= 1.0 + 1e-10);
  const LatticeOperator defect(g12, Matrix::Identity(g12.dim(), g12.dim()) - w.matrix().adjoint() * w.matrix());
  for (int axis : {1, 2}) CHECK(lattice::decay_fit(defect, lattice::DecayModel::loc2_exponential, axis).success());
}

TEST_CASE("flux operator special cases") {
  const LatticeGeometry g = LatticeGeometry::square(4, 2);
  const LatticeOperator u = flux_route_unitary(g);
  CHECK(max_diff(bulk_flux_operator(LatticeOperator::zero(g), u).matrix(), Matrix::Identity(g.dim(), g.dim())) == 0.0);
  CHECK(max_diff(bulk_flux_operator(LatticeOperator::identity(g), u).matrix(), u.matrix()) < 1e-15);
  CHECK(max_diff(bulk_corner_operator(LatticeOperator::zero(g)).matrix(), Matrix::Identity(g.dim(), g.dim())) < 1e-12);
}

TEST_CASE("Fedosov index of a unitary is exactly zero") {
  Random r(2);
  const LatticeGeometry g = LatticeGeometry::square(6, 1);
  FedosovOptions o;
  o.n_start = 1;
  const IndexResult res = fredholm_index_fedosov(LatticeOperator(g, r.unitary(g.dim())), o);
  CHECK(res.value == 0);
  CHECK(std::abs(res.raw) < 1e-10);
  REQUIRE_FALSE(res.history.empty());
  CHECK(res.history.front().first == 1);
  CHECK(std::abs(res.history.front().second) < 1e-10);
}

TEST_CASE("QWZ Chern routes agree with the Berry oracle") {
  for (double u : {-1.0, 1.0}) {
    const models::ModelSpec m = make(models::Family::qwz, u);
    const LatticeOperator p = projection(m, 16);
    const LatticeGeometry& g = p.geometry();
    const IndexResult flux = fredholm_index_fedosov(bulk_flux_operator(p, flux_route_unitary(g)), disk_options(g));
    const IndexResult corner = fredholm_index_fedosov(bulk_corner_operator(p), disk_options(g));
    const double kubo = chern_kubo(p, default_bulk_region(g));
    const long berry = oracles::chern_berry(m, 64);
    CHECK(std::abs(berry) == 1);
    CHECK(flux.converged());
    CHECK(corner.converged());
    CHECK(flux.value == berry);
    CHECK(corner.value == berry);
    CHECK(std::abs(kubo - flux.raw) <= 0.05);
    CHECK(std::abs(flux.raw - berry) <= 0.05);
    REQUIRE_FALSE(flux.history.empty());
  }
  const LatticeOperator p3 = projection(make(models::Family::qwz, -3.0), 16);
  CHECK(std::abs(chern_kubo(p3, default_bulk_region(p3.geometry()))) <= 0.05);
}

TEST_CASE("trivial projections have index zero") {
  const LatticeOperator p = projection(make(models::Family::atomic_trivial, 1.0), 8);
  const LatticeGeometry& g = p.geometry();
  const IndexResult flux = fredholm_index_fedosov(bulk_flux_operator(p, flux_route_unitary(g)), disk_options(g));
  CHECK(flux.value == 0);
  CHECK(chern_kubo(p, default_bulk_region(g)) == 0.0);
}

TEST_CASE("unrestricted traces vanish on finite matrices") {
  const LatticeOperator p = projection(make(models::Family::qwz, -1.0), 8);
  const IndexResult f = fredholm_index_fedosov(bulk_flux_operator(p, flux_route_unitary(p.geometry())));
  CHECK(std::abs(f.raw) < 1e-8);
}

TEST_CASE("trace-limit kernel dimension") {
  Matrix a = Matrix::Zero(2, 2);
  a(1, 1) = 0.5;
  const IndexResult r = kernel_dim_trace_limit(a);
  CHECK(r.converged());
  CHECK(r.value == 1);
  REQUIRE(r.history.size() >= 2);
  CHECK(r.history[0].second == doctest::Approx(1.0 + std::pow(0.75, r.history[0].first)));
  for (size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i].second <= r.history[i - 1].second);

  Random rng(4);
  const IndexResult u = kernel_dim_trace_limit(rng.unitary(6));
  CHECK(u.value == 0);
  for (const auto& [n, v] : u.history) CHECK(std::abs(v) < 1e-10);

  for (int k = 0; k < 20; ++k) {
    const Matrix c = rng.planted_contraction(20, k % 6, 0.1);
    const IndexResult t = kernel_dim_trace_limit(c);
    CHECK(t.converged());
    CHECK(t.value == oracles::brute_force_kernel(c, 1e-8).value);
  }
}

TEST_CASE("near-kernel modes") {
  Matrix inv = Matrix::Identity(3, 3);
  inv(0, 0) = 0.5;
  CHECK(near_kernel_modes(inv).cluster_size == 0);
  Matrix d = Matrix::Zero(3, 3);
  d(1, 1) = 0.5;
  d(2, 2) = 1.0;
  const SingularSpectrum s = near_kernel_modes(d);
  CHECK(s.cluster_size == 1);
  CHECK(s.fredholm_gap == doctest::Approx(0.5));

  const LatticeOperator p = projection(make(models::Family::bhz, -1.0), 16);
  const SingularSpectrum b = near_kernel_modes(bulk_flux_operator(p, flux_route_unitary(p.geometry())).matrix());
  CHECK(b.cluster_size % 2 == 0);
  CHECK(b.cluster_size > 0);
  CHECK(b.gap_ratio >= 10.0);
}

TEST_CASE("localized Z2 count") {
  const LatticeOperator pa = projection(make(models::Family::atomic_trivial, 1.0), 8);
  const IndexResult a =
      z2_localized_count(bulk_flux_operator(pa, flux_route_unitary(pa.geometry())), default_bulk_region(pa.geometry()));
  CHECK(a.value == 0);

  const models::ModelSpec bhz = make(models::Family::bhz, -1.0);
  const LatticeOperator p = projection(bhz, 16);
  const LatticeGeometry& g = p.geometry();
  const IndexResult z = z2_localized_count(bulk_flux_operator(p, flux_route_unitary(g)), Region::flux_disk(g, 0.25));
  CHECK(z.converged());
  CHECK(z.z2() == oracles::z2_pfaffian_trim(bhz));
  CHECK(z.z2() == 1);
}

TEST_CASE("doubled QWZ: Z2 equals the block Chern number mod 2") {
  const LatticeGeometry g = LatticeGeometry::square(12, 2);
  const models::ModelSpec m = make(models::Family::qwz, -1.0);
  const LatticeOperator h = models::build_bulk(m, {}, g);
  const auto [h2, theta2] = models::doubled_model(h, symmetry::standard_tr(2));
  const LatticeOperator p2 = spectral::fermi_projection(h2);
  const IndexResult z = z2_localized_count(bulk_flux_operator(p2, flux_route_unitary(p2.geometry())),
                                           default_bulk_region(p2.geometry()));
  const LatticeOperator p = spectral::fermi_projection(h);
  const IndexResult c = fredholm_index_fedosov(bulk_flux_operator(p, flux_route_unitary(g)), disk_options(g));
  CHECK(z.converged());
  CHECK(z.z2() == ((c.value % 2) + 2) % 2);
  CHECK(z.z2() == 1);
}

TEST_CASE("edge operator") {
  const LatticeGeometry strip = LatticeGeometry::strip(8, 4, 4);
  const LatticeOperator triv = models::build_edge(make(models::Family::atomic_trivial, 1.0), {}, strip);
  const spectral::GapReport tg{-1.0, 1.0, false};
  const spectral::SwitchFunction tsw = spectral::SwitchFunction::from_gap(tg);
  CHECK(max_diff(edge_operator(triv, tsw, tg).matrix(), Matrix::Identity(strip.dim(), strip.dim())) < 1e-10);
  CHECK(edge_chern(edge_operator(triv, tsw, tg), Region::lower_half(strip)).value == 0);
  CHECK(edge_z2(edge_operator(triv, tsw, tg), Region::lower_half(strip)).value == 0);

  const models::ModelSpec bhz = make(models::Family::bhz, -1.0);
  const LatticeGeometry s4 = LatticeGeometry::strip(16, 8, 4);
  const LatticeOperator h_hat = models::build_edge(bhz, {}, s4);
  const spectral::GapReport gap =
      spectral::spectral_gap(models::build_bulk(bhz, {}, LatticeGeometry::square(16, 4)));
  const spectral::SwitchFunction sw = spectral::SwitchFunction::from_gap(gap);
  const spectral::EigenDecomposition e = spectral::eig_hermitian(h_hat);
  const LatticeOperator f_hat = edge_operator(h_hat, e, sw, gap);
  CHECK(symmetry::theta_odd_residual(f_hat.matrix(), symmetry::standard_tr(4)) <= 1e-10);
  const LatticeOperator ex = spectral::apply_function_eig_complex(
      s4, e, [&](double x) { return std::exp(cplx(0.0, -2.0 * std::numbers::pi * sw.value(x))); });
  CHECK(max_diff(ex.matrix() * ex.matrix().adjoint(), Matrix::Identity(s4.dim(), s4.dim())) < 1e-10);
  const IndexResult z = edge_z2(f_hat, Region::lower_half(s4));
  CHECK(z.converged());
  CHECK(z.z2() == oracles::edge_spectral_flow(bhz, 24));
  CHECK(edge_diagnostic(h_hat, e, sw).success());
}

TEST_CASE("edge Chern number matches the bulk index") {
  const models::ModelSpec m = make(models::Family::qwz, -1.0);
  const LatticeOperator p = projection(m, 16);
  const IndexResult bulk =
      fredholm_index_fedosov(bulk_flux_operator(p, flux_route_unitary(p.geometry())), disk_options(p.geometry()));
  const LatticeGeometry strip = LatticeGeometry::strip(16, 8, 2);
  const LatticeOperator h_hat = models::build_edge(m, {}, strip);
  const spectral::GapReport gap = spectral::spectral_gap(models::build_bulk(m, {}, LatticeGeometry::square(16, 2)));
  const LatticeOperator f_hat = edge_operator(h_hat, spectral::SwitchFunction::from_gap(gap), gap);
  const IndexResult edge = edge_chern(f_hat, Region::lower_half(strip));
  CHECK(edge.converged());
  CHECK(edge.value == bulk.value);
  CHECK(std::abs(edge_chern(f_hat, Region::all()).raw) < 1e-8);
}

TEST_CASE("Fermi scan below the spectrum") {
  const LatticeGeometry g = LatticeGeometry::square(8, 2);
  const LatticeOperator h = models::build_bulk(make(models::Family::qwz, -1.0), {}, g);
  FermiScanOptions o;
  o.region = default_bulk_region(g);
  o.fedosov.region = o.region;
  const double below = spectral::eig_hermitian(h).eigenvalues.minCoeff() - 0.5;
  const auto recs = fermi_scan(h, {below, 0.0}, o);
  REQUIRE(recs.size() == 2);
  REQUIRE(recs[0].index);
  CHECK(recs[0].index->value == 0);
  CHECK(recs[0].sigma_min == doctest::Approx(1.0));
  REQUIRE(recs[1].index);
  CHECK(std::abs(recs[1].index->value) == 1);
}
