#include <doctest.h>

#include <cmath>
#include <numbers>

#include "core/models.hpp"
#include "core/oracles.hpp"
#include "core/pfaffian.hpp"
#include "core/rng.hpp"
#include "core/symmetry.hpp"

using namespace fredlab;
using namespace fredlab::oracles;
using lattice::Matrix;

namespace {

models::ModelSpec make(models::Family f, double mass) {
  models::ModelSpec m;
  m.family = f;
  m.mass = mass;
  return m;
}

Matrix sigma3() {
  Matrix s = Matrix::Zero(2, 2);
  s(0, 0) = 1.0;
  s(1, 1) = -1.0;
  return s;
}

}  // namespace

TEST_CASE("QWZ Bloch Hamiltonian at the corners of the zone") {
  constexpr double pi = std::numbers::pi;
  for (double u : {-1.0, 0.5, 3.0}) {
    const models::ModelSpec m = make(models::Family::qwz, u);
    CHECK((bloch_hamiltonian(m, 0.0, 0.0) - (u + 2.0) * sigma3()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((bloch_hamiltonian(m, pi, pi) - (u - 2.0) * sigma3()).cwiseAbs().maxCoeff() < 1e-15);
  }
  models::DisorderSpec d;
  d.amplitude = 0.1;
  CHECK_THROWS_AS(bloch_hamiltonian(make(models::Family::qwz, -1.0), d, 0.0, 0.0), Error);
}

TEST_CASE("half gap from the Bloch grid") {
  CHECK(bloch_half_gap(make(models::Family::qwz, -1.0)) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(bloch_half_gap(make(models::Family::atomic_trivial, 1.0)) == doctest::Approx(1.0));
}

TEST_CASE("Berry-curvature Chern number") {
  CHECK(chern_berry(make(models::Family::atomic_trivial, 1.0)) == 0);
  const long c = chern_berry(make(models::Family::qwz, -1.0));
  CHECK(std::abs(c) == 1);
  CHECK(chern_berry(make(models::Family::qwz, 1.0)) == -c);
  CHECK(chern_berry(make(models::Family::qwz, 3.0)) == 0);
  CHECK(chern_berry(make(models::Family::qwz, -3.0)) == 0);
  CHECK(chern_berry(make(models::Family::bhz, -1.0)) == 0);
  CHECK(chern_berry(make(models::Family::qwz, -1.0), 128) == c);

  BlochGrid grid;
  grid.model = make(models::Family::qwz, -1.0);
  const ChernResult r = chern_berry_detail(grid);
  CHECK(r.quantization_residual <= 1e-6);
  CHECK(r.min_gap > 0.0);
  grid.n_k = 16;
  CHECK_THROWS(chern_berry_detail(grid));
  grid.n_k = 64;
  grid.model.mass = 0.0;
  CHECK_THROWS(chern_berry_detail(grid));
}

TEST_CASE("Pfaffian Z2 oracle") {
  CHECK(z2_pfaffian_trim(make(models::Family::atomic_trivial, 1.0)) == 0);
  for (double m : {-1.5, -1.0, -0.5, 0.5, 1.0, 1.5}) CHECK(z2_pfaffian_trim(make(models::Family::bhz, m)) == 1);
  for (double m : {-3.0, -2.5, 2.5, 3.0}) CHECK(z2_pfaffian_trim(make(models::Family::bhz, m)) == 0);
  // BHZ without inter-block coupling is doubled QWZ
  CHECK(z2_pfaffian_trim(make(models::Family::bhz, -1.0)) ==
        std::abs(chern_berry(make(models::Family::qwz, -1.0))) % 2);
  CHECK_THROWS(z2_pfaffian_trim(make(models::Family::qwz, -1.0)));
}

TEST_CASE("Pfaffian oracle is gauge stable") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    PfaffianOptions o;
    o.gauge_seed = seed;
    CHECK(z2_pfaffian_trim(make(models::Family::bhz, -1.0), o) == 1);
    CHECK(z2_pfaffian_trim(make(models::Family::bhz, -3.0), o) == 0);
  }
  models::ModelSpec coupled = make(models::Family::bhz, -1.0);
  coupled.inter_block = 0.2;
  CHECK(z2_pfaffian_trim(coupled) == 1);
}

TEST_CASE("edge spectral flow") {
  CHECK(edge_spectral_flow(make(models::Family::atomic_trivial, 1.0), 16) == 0);
  CHECK(edge_spectral_flow(make(models::Family::bhz, -3.0), 24) == 0);
  const models::ModelSpec m = make(models::Family::bhz, -1.0);
  CHECK(edge_spectral_flow(m, 24) == 1);
  for (double mu : {-0.3, 0.1, 0.3}) {
    SpectralFlowOptions o;
    o.mu = mu;
    CHECK(edge_spectral_flow(m, 24, o) == 1);
  }
  for (int w : {16, 20, 32}) CHECK(edge_spectral_flow(m, w) == 1);
  CHECK(cylinder_hamiltonian(m, 8, 0.3).rows() == 32);
}

TEST_CASE("brute-force kernel") {
  CHECK(brute_force_kernel(Matrix::Zero(5, 5), 1e-8).value == 5);
  CHECK(brute_force_kernel(Matrix::Identity(5, 5), 1e-8).value == 0);
  Random rng(11);
  for (int r : {0, 3, 7, 10}) {
    const Matrix a = rng.gaussian(10, r) * rng.gaussian(r, 10);
    CHECK(brute_force_kernel(a, 1e-8).value == 10 - r);
  }
  Matrix d = Matrix::Identity(3, 3);
  d(0, 0) = 1.5e-8;
  const KernelCount k = brute_force_kernel(d, 1e-8);
  CHECK(k.value == 0);
  CHECK_FALSE(k.warnings.empty());
}

TEST_CASE("Pfaffian squared is the determinant") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Random rng(seed);
    const Matrix g = rng.gaussian(8, 8);
    const Matrix a = g - g.transpose();
    const std::complex<double> pf = pfaffian::pfaffian(a);
    CHECK(std::abs(pf * pf - a.determinant()) <= 1e-10 * std::max(1.0, std::abs(a.determinant())));
  }
  Matrix j = Matrix::Zero(2, 2);
  j(0, 1) = 1.0;
  j(1, 0) = -1.0;
  CHECK(std::abs(pfaffian::pfaffian(j) - 1.0) < 1e-15);
  CHECK_THROWS(pfaffian::pfaffian(Matrix::Identity(2, 2)));
}
