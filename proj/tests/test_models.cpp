#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "core/lattice.hpp"
#include "core/linalg.hpp"
#include "core/models.hpp"
#include "core/oracles.hpp"
#include "core/spectral.hpp"
#include "core/symmetry.hpp"

using namespace fredlab;
using namespace fredlab::models;
using lattice::Index;
using lattice::LatticeGeometry;

namespace {

ModelSpec make(Family f, double mass) {
  ModelSpec m;
  m.family = f;
  m.mass = mass;
  return m;
}

// interleave per-site blocks of a and b into a 2n block-diagonal operator
Matrix direct_sum(const LatticeGeometry& g, const Matrix& a, const Matrix& b) {
  const int n = g.n_internal;
  Matrix out = Matrix::Zero(2 * g.dim(), 2 * g.dim());
  for (Index j = 0; j < g.sites(); ++j)
    for (Index i = 0; i < g.sites(); ++i) {
      out.block(2 * n * i, 2 * n * j, n, n) = a.block(n * i, n * j, n, n);
      out.block(2 * n * i + n, 2 * n * j + n, n, n) = b.block(n * i, n * j, n, n);
    }
  return out;
}

}  // namespace

TEST_CASE("atomic trivial model") {
  const LatticeGeometry g = LatticeGeometry::square(6, 4);
  const LatticeOperator h = build_bulk(make(Family::atomic_trivial, 0.0), {}, g);
  CHECK((h.matrix() - Matrix(h.matrix().diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
  const spectral::GapReport gap = spectral::spectral_gap(h);
  CHECK(gap.gap_lower == -1.0);
  CHECK(gap.gap_upper == 1.0);
}

TEST_CASE("QWZ bulk is gapped and Hermitian") {
  const LatticeGeometry g = LatticeGeometry::square(16, 2);
  const LatticeOperator h = build_bulk(make(Family::qwz, -1.0), {}, g);
  CHECK(h.hermitian());
  CHECK_FALSE(spectral::spectral_gap(h).contains_zero);
}

TEST_CASE("periodic spectrum is the union of Bloch spectra") {
  for (Family f : {Family::qwz, Family::bhz}) {
    const ModelSpec m = make(f, -1.3);
    const int side = 6;
    const LatticeGeometry g = LatticeGeometry::square(side, m.n_internal());
    const Eigen::VectorXd real_space = linalg::eigvalsh(build_bulk(m, {}, g).matrix());
    std::vector<double> bloch;
    for (int i = 0; i < side; ++i)
      for (int j = 0; j < side; ++j) {
        const double k1 = 2 * std::numbers::pi * i / side, k2 = 2 * std::numbers::pi * j / side;
        const Eigen::VectorXd ev = linalg::eigvalsh(oracles::bloch_hamiltonian(m, k1, k2));
        bloch.insert(bloch.end(), ev.data(), ev.data() + ev.size());
      }
    std::sort(bloch.begin(), bloch.end());
    REQUIRE(bloch.size() == static_cast<size_t>(real_space.size()));
    for (size_t i = 0; i < bloch.size(); ++i) CHECK(std::abs(bloch[i] - real_space(static_cast<Index>(i))) < 1e-9);
  }
}

TEST_CASE("disordered BHZ keeps its gap at W = 0.3 of the clean gap") {
  const ModelSpec m = make(Family::bhz, -1.0);
  const LatticeGeometry g = LatticeGeometry::square(12, 4);
  const double clean = spectral::spectral_gap(build_bulk(m, {}, g)).width();
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    DisorderSpec d;
    d.amplitude = 0.3 * clean;
    d.seed = seed;
    CHECK_FALSE(spectral::spectral_gap(build_bulk(m, d, g)).contains_zero);
  }
}

TEST_CASE("disorder is a deterministic function of seed and coordinates") {
  DisorderSpec d;
  d.amplitude = 0.5;
  d.seed = 7;
  CHECK(d.at(3, -2) == d.at(3, -2));
  CHECK(d.at(3, -2) != d.at(-2, 3));
  CHECK(std::abs(d.at(0, 0)) <= 0.5);
  DisorderSpec other = d;
  other.seed = 8;
  CHECK(d.at(1, 1) != other.at(1, 1));
}

TEST_CASE("Dirichlet edge is the half-space block of the bulk") {
  const ModelSpec m = make(Family::bhz, -1.0);
  const LatticeGeometry strip = LatticeGeometry::strip(8, 4, 4);
  DisorderSpec d;
  d.amplitude = 0.4;
  d.seed = 3;
  const LatticeOperator h_hat = build_edge(m, d, strip);
  const LatticeOperator bulk = build_bulk(m, d, LatticeGeometry::matching_bulk(strip));
  const std::vector<Index> map = lattice::injection_map(strip, bulk.geometry());
  double err = 0.0;
  for (size_t c = 0; c < map.size(); ++c)
    for (size_t r = 0; r < map.size(); ++r)
      err = std::max(err, std::abs(h_hat.matrix()(static_cast<Index>(r), static_cast<Index>(c)) -
                                   bulk.matrix()(map[r], map[c])));
  CHECK(err == 0.0);
}

TEST_CASE("strip spectra") {
  const LatticeGeometry strip = LatticeGeometry::strip(16, 8, 4, true);
  CHECK(spectral::spectral_gap(build_edge(make(Family::bhz, -1.0), {}, strip)).contains_zero);
  const LatticeGeometry strip2 = LatticeGeometry::strip(8, 4, 4);
  CHECK_FALSE(spectral::spectral_gap(build_edge(make(Family::atomic_trivial, 0.0), {}, strip2)).contains_zero);
}

TEST_CASE("boundary perturbation has finite depth") {
  const ModelSpec m = make(Family::bhz, -1.0);
  const LatticeGeometry strip = LatticeGeometry::strip(8, 4, 4);
  const LatticeOperator v = boundary_perturbation(m, strip, 0.5, 1);
  for (Index i = 0; i < strip.dim(); ++i)
    if (lattice::site_at(strip, i / 4).x2 >= 1) CHECK(v.matrix().row(i).cwiseAbs().maxCoeff() == 0.0);
  CHECK(v.max_abs() > 0.0);
  CHECK(symmetry::commutes_with_tr(v.matrix(), symmetry::standard_tr(4)) < 1e-12);
}

TEST_CASE("doubled model") {
  const LatticeGeometry g = LatticeGeometry::square(6, 2);
  const symmetry::TimeReversal theta = symmetry::standard_tr(2);
  const auto [zero, t0] = doubled_model(LatticeOperator::zero(g), theta);
  CHECK(zero.max_abs() == 0.0);
  CHECK(t0.site_block.rows() == 4);

  const LatticeOperator h = build_bulk(make(Family::qwz, -1.0), {}, g);
  const auto [h2, t2] = doubled_model(h, theta);
  CHECK(symmetry::commutes_with_tr(h2.matrix(), t2) <= 1e-12);
  const Matrix p = spectral::fermi_projection(h).matrix();
  const Matrix p2 = spectral::fermi_projection(h2).matrix();
  CHECK((p2 - direct_sum(g, p, theta.conjugate(p))).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("model names") {
  CHECK(family_from_string("atomic-trivial") == Family::atomic_trivial);
  CHECK(std::string(to_string(Family::bhz)) == "bhz");
  CHECK_THROWS_AS(family_from_string("haldane"), Error);
}
