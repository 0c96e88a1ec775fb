#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include "core/experiments.hpp"
#include "core/oracles.hpp"
#include "core/pfaffian.hpp"
#include "core/rng.hpp"
#include "core/symmetry.hpp"
#include "core/version.hpp"

namespace fredlab::experiments {

namespace {

using lattice::LatticeGeometry;
using lattice::LatticeOperator;
using lattice::Matrix;
using models::Family;
using models::ModelSpec;

struct Check {
  std::string name;
  std::string module;
  std::string invariant;
  std::uint64_t seed = 0;
  bool passed = false;
  std::string detail;
};

class Suite {
 public:
  void add(std::string name, std::string module, std::string invariant, std::uint64_t seed,
           const std::function<bool(std::ostringstream&)>& body) {
    Check c{std::move(name), std::move(module), std::move(invariant), seed, false, ""};
    std::ostringstream detail;
    detail.precision(12);
    try {
      c.passed = body(detail);
    } catch (const Error& e) {
      detail << "error " << error_name(e.code()) << ": " << e.what();
      c.passed = false;
    }
    c.detail = detail.str();
    checks_.push_back(std::move(c));
  }
  const std::vector<Check>& checks() const { return checks_; }

 private:
  std::vector<Check> checks_;
};

ModelSpec model(Family f, double mass) {
  ModelSpec m;
  m.family = f;
  m.mass = mass;
  return m;
}

struct Bulk {
  LatticeGeometry g;
  LatticeOperator p;
  Eigen::VectorXd w;
  lattice::Region region;
};

Bulk clean_bulk(const ModelSpec& m, int side) {
  const LatticeGeometry g = LatticeGeometry::square(side, m.n_internal(), true);
  const LatticeOperator p = spectral::fermi_projection(models::build_bulk(m, {}, g));
  const lattice::Region region = indices::default_bulk_region(g, 0.25);
  return Bulk{g, p, region.weights(g), region};
}

void oracle_checks(Suite& s, int side) {
  // QWZ: flux-route Fedosov against the Kubo formula and the Berry oracle
  for (double u : {-1.0, 3.0}) {
    s.add("Fedosov/Kubo agreement (QWZ u=" + format_double(u) + ")", "indices",
          "flux-route Fedosov index = rounded Kubo = Berry Chern number", 0, [&](std::ostringstream& d) {
            const ModelSpec m = model(Family::qwz, u);
            const Bulk b = clean_bulk(m, side);
            indices::FedosovOptions fo;
            fo.region = b.region;
            const auto f = indices::fredholm_index_fedosov(
                indices::bulk_flux_operator(b.p, indices::flux_route_unitary(b.g)), fo);
            const auto k = indices::chern_kubo_index(b.p, b.region);
            const long berry = oracles::chern_berry(m, 64);
            d << "fedosov raw " << f.raw << " status " << indices::to_string(f.status) << ", kubo raw " << k.raw
              << ", berry " << berry;
            return f.converged() && k.converged() && f.value == k.value && k.value == berry;
          });
  }
  // BHZ: localized count, Pfaffian and spectral flow
  for (double u : {-3.0, -1.0, 1.0, 3.0}) {
    s.add("Z2 oracle triangle (BHZ u=" + format_double(u) + ")", "oracles",
          "bulk localized count = Pfaffian = edge spectral flow", 0, [&](std::ostringstream& d) {
            const ModelSpec m = model(Family::bhz, u);
            const Bulk b = clean_bulk(m, side);
            const auto z = indices::z2_localized_count(
                indices::bulk_flux_operator(b.p, indices::flux_route_unitary(b.g)), b.region);
            const int pf = oracles::z2_pfaffian_trim(m);
            const int sf = oracles::edge_spectral_flow(m, 24);
            d << "count " << z.z2() << " (raw " << z.raw << "), pfaffian " << pf << ", spectral flow " << sf;
            return z.converged() && z.z2() == pf && pf == sf;
          });
  }
  s.add("Berry orientation", "oracles", "chern_berry(-u) = -chern_berry(u)", 0, [](std::ostringstream& d) {
    const long a = oracles::chern_berry(model(Family::qwz, 1.0), 64);
    const long b = oracles::chern_berry(model(Family::qwz, -1.0), 64);
    d << "c(1) " << a << ", c(-1) " << b;
    return a == -b && a != 0;
  });
}

void derivative_checks(Suite& s) {
  const LatticeGeometry g = LatticeGeometry::square(4, 1, false);
  for (int axis : {1, 2}) {
    s.add("derivative identities: hopping across the step (axis " + std::to_string(axis) + ")", "lattice-ops",
          "d_j |x+e_j><x| = -i |x+e_j><x| for x_j = -1", 0, [&](std::ostringstream& d) {
            Matrix t = Matrix::Zero(g.dim(), g.dim());
            const int x1 = axis == 1 ? 0 : 1, x2 = axis == 2 ? 0 : 1;
            const int y1 = axis == 1 ? -1 : 1, y2 = axis == 2 ? -1 : 1;
            t(lattice::site_index(g, x1, x2, 0), lattice::site_index(g, y1, y2, 0)) = 1.0;
            const LatticeOperator a(g, t);
            const Matrix expect = lattice::cplx(0.0, -1.0) * t;
            const double err = (lattice::nc_derivative(axis, a).matrix() - expect).cwiseAbs().maxCoeff();
            d << "max deviation " << err;
            return err < 1e-14;
          });
  }
  s.add("derivative identities: Leibniz rule", "lattice-ops", "d(AB) = d(A)B + A d(B)", 11, [&](std::ostringstream& d) {
    Random r(11);
    const LatticeOperator a(g, r.gaussian(g.dim(), g.dim()));
    const LatticeOperator b(g, r.gaussian(g.dim(), g.dim()));
    double err = 0.0;
    for (int axis : {1, 2}) {
      const Matrix lhs = lattice::nc_derivative(axis, a * b).matrix();
      const Matrix rhs =
          lattice::nc_derivative(axis, a).matrix() * b.matrix() + a.matrix() * lattice::nc_derivative(axis, b).matrix();
      err = std::max(err, (lhs - rhs).cwiseAbs().maxCoeff());
    }
    d << "max deviation " << err;
    return err < 1e-12;
  });
  s.add("derivative identities: half-space injection", "lattice-ops", "iota iota* = Lambda_2, iota* iota = 1", 0,
        [](std::ostringstream& d) {
          const LatticeGeometry strip = LatticeGeometry::strip(4, 3, 2, false);
          const LatticeGeometry bulk = LatticeGeometry::matching_bulk(strip);
          const Matrix iota = lattice::injection(strip, bulk);
          const Matrix lam2 = lattice::step_diagonal(bulk, 2).cast<lattice::cplx>().asDiagonal();
          const double e1 = (iota * iota.adjoint() - lam2).cwiseAbs().maxCoeff();
          const double e2 = (iota.adjoint() * iota - Matrix::Identity(strip.dim(), strip.dim())).cwiseAbs().maxCoeff();
          d << "deviations " << e1 << ", " << e2;
          return e1 < 1e-14 && e2 < 1e-14;
        });
}

void algebra_checks(Suite& s) {
  s.add("Theta-odd even rank", "symmetry", "dim im A is even for Theta-odd A", 21, [](std::ostringstream& d) {
    int odd = 0;
    for (std::uint64_t k = 0; k < 40; ++k) {
      const Matrix a = symmetry::random_theta_odd_deficient(12, 21 + k, static_cast<int>(k % 4));
      if (symmetry::numerical_rank(a) % 2) ++odd;
    }
    d << odd << " of 40 odd";
    return odd == 0;
  });
  s.add("trace limit vs brute force", "indices", "kernel_dim_trace_limit = brute_force_kernel", 31,
        [](std::ostringstream& d) {
          Random r(31);
          int bad = 0;
          for (int k = 0; k < 10; ++k) {
            const Matrix a = r.planted_contraction(16, k % 5, 0.2);
            const auto t = indices::kernel_dim_trace_limit(a);
            const auto b = oracles::brute_force_kernel(a, 1e-8);
            if (!t.converged() || t.value != b.value) ++bad;
          }
          d << bad << " of 10 mismatched";
          return bad == 0;
        });
  s.add("Fedosov unitary", "indices", "index of a unitary is 0 at n = 1", 41, [](std::ostringstream& d) {
    Random r(41);
    const LatticeGeometry g = LatticeGeometry::square(4, 1, false);
    indices::FedosovOptions fo;
    fo.n_start = 1;
    const auto f = indices::fredholm_index_fedosov(LatticeOperator(g, r.unitary(g.dim())), fo);
    d << "raw " << f.raw;
    return f.value == 0 && std::abs(f.raw) < 1e-10;
  });
  s.add("Pfaffian squared", "oracles", "Pf(A)^2 = det(A)", 51, [](std::ostringstream& d) {
    Random r(51);
    const Matrix g = r.gaussian(8, 8);
    const Matrix a = g - g.transpose();
    const auto pf = pfaffian::pfaffian(a);
    const auto det = a.determinant();
    const double err = std::abs(pf * pf - det) / std::max(1.0, std::abs(det));
    d << "relative deviation " << err;
    return err < 1e-10;
  });
}

}  // namespace

RunOutput selfcheck(const config::RunConfig& c, const lattice::FaultInjection& faults) {
  const auto t0 = std::chrono::steady_clock::now();
  lattice::ScopedFaults scoped(faults);
  Suite s;
  const int side = std::min(c.geometry.side, 12);
  oracle_checks(s, side);
  derivative_checks(s);
  algebra_checks(s);

  Csv csv({{"check", "check name"},
           {"module", "module under test"},
           {"invariant", "invariant checked"},
           {"seed", "instance seed"},
           {"passed", "1 when the check passed"},
           {"detail", "values compared"}});
  json checks = json::array();
  std::vector<std::string> failed;
  for (const Check& k : s.checks()) {
    csv.add_row({k.name, k.module, k.invariant, std::to_string(k.seed), k.passed ? "1" : "0", k.detail});
    checks.push_back({{"check", k.name},
                      {"module", k.module},
                      {"invariant", k.invariant},
                      {"seed", k.seed},
                      {"passed", k.passed},
                      {"detail", k.detail}});
    if (!k.passed) failed.push_back(k.name + " [" + k.module + ": " + k.invariant + ", seed " + std::to_string(k.seed) + "]");
  }
  RunOutput out;
  out.exit_code = failed.empty() ? 0 : 1;
  out.result = {{"tool", "fredlab"},
                {"version", kVersion},
                {"experiment", "selfcheck"},
                {"side", side},
                {"checks", checks},
                {"failed", failed},
                {"passed", failed.empty()},
                {"exit_code", out.exit_code}};
  out.csv = csv.str();
  out.timing = {{"experiment", "selfcheck"},
                {"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
  std::ostringstream os;
  os << "selfcheck: " << (s.checks().size() - failed.size()) << "/" << s.checks().size() << " passed";
  for (const auto& f : failed) os << "\n  FAIL " << f;
  out.summary = os.str();
  return out;
}

}  // namespace fredlab::experiments
