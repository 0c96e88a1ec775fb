// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/experiments.hpp"
#include "core/indices.hpp"
#include "core/linalg.hpp"
#include "core/models.hpp"
#include "core/oracles.hpp"
#include "core/rng.hpp"
#include "core/spectral.hpp"
#include "core/symmetry.hpp"

using namespace fredlab;
using indices::IndexResult;
using lattice::LatticeGeometry;
using lattice::LatticeOperator;
using lattice::Matrix;
using lattice::Region;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) { return experiments::format_double(v); }

std::string config_path(const std::string& name) { return std::string(FREDLAB_SOURCE_DIR) + "/configs/" + name; }

models::ModelSpec make(models::Family f, double mass) {
  models::ModelSpec m;
  m.family = f;
  m.mass = mass;
  return m;
}

indices::FedosovOptions disk(const LatticeGeometry& g) {
  indices::FedosovOptions o;
  o.region = indices::default_bulk_region(g);
  return o;
}

bool near_integer(const IndexResult& r) { return std::abs(r.raw - static_cast<double>(r.value)) <= 0.05; }

double opnorm(const Matrix& a) { return linalg::singular_values(a).maxCoeff(); }

// block of `a` on internal components [lo, lo + n) of an n_full-component geometry
Matrix sub_block(const Matrix& a, int n_full, int lo, int n, Eigen::Index sites) {
  Matrix out(sites * n, sites * n);
  for (Eigen::Index j = 0; j < sites; ++j)
    for (Eigen::Index i = 0; i < sites; ++i) out.block(i * n, j * n, n, n) = a.block(i * n_full + lo, j * n_full + lo, n, n);
  return out;
}

Outcome criterion_routes() {
  std::ostringstream os;
  bool ok = true;
  for (double u : {-3.0, -1.0, 1.0, 3.0}) {
    const models::ModelSpec m = make(models::Family::qwz, u);
    const LatticeGeometry g = LatticeGeometry::square(16, 2);
    const LatticeOperator p = spectral::fermi_projection(models::build_bulk(m, {}, g));
    const IndexResult flux = indices::fredholm_index_fedosov(indices::bulk_flux_operator(p, indices::flux_route_unitary(g)), disk(g));
    const IndexResult corner = indices::fredholm_index_fedosov(indices::bulk_corner_operator(p), disk(g));
    const IndexResult kubo = indices::chern_kubo_index(p, indices::default_bulk_region(g));
    const long berry = oracles::chern_berry(m);
    const bool here = flux.converged() && corner.converged() && flux.value == berry && corner.value == berry &&
                      std::lround(kubo.raw) == berry && near_integer(flux) && near_integer(corner) && near_integer(kubo);
    ok = ok && here;
    os << "u=" << u << " flux " << fmt(flux.raw) << " corner " << fmt(corner.raw) << " kubo " << fmt(kubo.raw)
       << " berry " << berry << (here ? "" : " MISMATCH") << "; ";
  }
  return {ok, os.str()};
}

Outcome criterion_doubling() {
  std::ostringstream os;
  int agreements = 0;
  for (double u : {-3.0, -1.0, 1.0, 3.0}) {
    const models::ModelSpec m = make(models::Family::qwz, u);
    const long expected = ((oracles::chern_berry(m) % 2) + 2) % 2;
    const LatticeGeometry g = LatticeGeometry::square(16, 2);
    const auto [h2, theta2] = models::doubled_model(models::build_bulk(m, {}, g), symmetry::standard_tr(2));
    const LatticeGeometry& g2 = h2.geometry();
    const LatticeOperator p2 = spectral::fermi_projection(h2);
    const LatticeOperator f2 = indices::bulk_flux_operator(p2, indices::flux_route_unitary(g2));

    // block route: the doubled operator is F (+) its twin; ind2 is ind F mod 2
    const Matrix b11 = sub_block(f2.matrix(), 4, 0, 2, g.sites());
    Matrix off = f2.matrix();
    for (Eigen::Index j = 0; j < g2.dim(); ++j)
      for (Eigen::Index i = 0; i < g2.dim(); ++i)
        if ((i % 4 < 2) == (j % 4 < 2)) off(i, j) = 0.0;
    const IndexResult block = indices::fredholm_index_fedosov(LatticeOperator(g, b11), disk(g));
    const long via_block = block.converged() && off.cwiseAbs().maxCoeff() < 1e-10 ? block.z2() : -1;

    const IndexResult z = indices::z2_localized_count(f2, indices::default_bulk_region(g2));
    const long via_count = z.converged() ? z.z2() : -1;
    agreements += (via_block == expected) + (via_count == expected);
    os << "u=" << u << " block " << via_block << " count " << via_count << " oracle " << expected << "; ";
  }
  os << agreements << "/8 agreements";
  return {agreements == 8, os.str()};
}

Outcome criterion_triangle() {
  std::ostringstream os;
  int agree = 0, total = 0, ambiguous = 0, trivial = 0, nontrivial = 0;
  for (double mass : {-3.0, -2.5, -1.5, -0.5, 0.5, 1.5, 2.5, 3.0}) {
    const models::ModelSpec m = make(models::Family::bhz, mass);
    const LatticeGeometry g = LatticeGeometry::square(16, 4);
    const LatticeOperator p = spectral::fermi_projection(models::build_bulk(m, {}, g));
    long bulk = -1;
    try {
      const IndexResult z = indices::z2_localized_count(indices::bulk_flux_operator(p, indices::flux_route_unitary(g)),
                                                        indices::default_bulk_region(g));
      if (z.converged()) bulk = z.z2();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ambiguous) throw;
      ++ambiguous;
    }
    const int pf = oracles::z2_pfaffian_trim(m);
    const int sf = oracles::edge_spectral_flow(m, 24);
    ++total;
    if (bulk == pf && pf == sf) ++agree;
    (pf ? nontrivial : trivial) += 1;
    os << "M=" << mass << " " << bulk << "/" << pf << "/" << sf << "; ";
  }
  os << agree << "/" << total << " agree, " << ambiguous << " ambiguous";
  return {agree == total && ambiguous == 0 && trivial > 0 && nontrivial > 0, os.str()};
}

Outcome criterion_bec() {
  const experiments::RunOutput out = experiments::run(config::load(config_path("bec_check_bhz.json")));
  const auto& s = out.result.at("summary");
  const int runs = s.at("runs").get<int>(), agree = s.at("agreements").get<int>();
  return {runs == 20 && agree == 20 && out.exit_code == 0,
          std::to_string(agree) + "/" + std::to_string(runs) + " runs agree, exit " + std::to_string(out.exit_code)};
}

Outcome criterion_trace_limit() {
  Random rng(20260501);
  int exact = 0, monotone = 0;
  for (int k = 0; k < 100; ++k) {
    const Eigen::Index n = 12 + static_cast<Eigen::Index>(rng.below(29));
    const Eigen::Index kernel = static_cast<Eigen::Index>(rng.below(7));
    const Matrix a = rng.planted_contraction(n, kernel, 0.1);
    const IndexResult t = indices::kernel_dim_trace_limit(a);
    if (t.converged() && t.value == oracles::brute_force_kernel(a, 1e-8).value && t.value == kernel) ++exact;
    bool mono = true;
    for (size_t i = 1; i < t.history.size(); ++i) mono = mono && t.history[i].second <= t.history[i - 1].second;
    monotone += mono;
  }
  return {exact == 100 && monotone == 100,
          std::to_string(exact) + "/100 exact, " + std::to_string(monotone) + "/100 non-increasing"};
}

Outcome criterion_fedosov_unitary() {
  Random rng(6);
  int ok = 0;
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const int side = 4 + 2 * static_cast<int>(rng.below(3));
    const LatticeGeometry g = LatticeGeometry::square(side, 2);
    indices::FedosovOptions o;
    o.n_start = 1;
    o.region = indices::default_bulk_region(g);
    const IndexResult r = indices::fredholm_index_fedosov(LatticeOperator(g, rng.unitary(g.dim())), o);
    worst = std::max(worst, std::abs(r.raw));
    ok += r.value == 0 && std::abs(r.raw) < 1e-10 && !r.history.empty() && r.history.front().first == 1 &&
          std::abs(r.history.front().second) < 1e-10;
  }
  return {ok == 50, std::to_string(ok) + "/50, worst |raw| " + fmt(worst)};
}

// Theta C M with M antisymmetric is Theta-odd for the lattice time reversal
Matrix theta_odd_from(const Matrix& full_c, const Matrix& antisym) { return full_c * antisym; }

Outcome criterion_theta_odd() {
  std::ostringstream os;
  int even = 0;
  for (int s = 0; s < 1000; ++s) {
    const int dim = 8;
    const int zero_blocks = s % 3;
    const Matrix f = zero_blocks ? symmetry::random_theta_odd_deficient(dim, static_cast<std::uint64_t>(s), zero_blocks)
                                 : symmetry::random_theta_odd(dim, static_cast<std::uint64_t>(s));
    even += symmetry::numerical_rank(f) % 2 == 0;
  }
  os << even << "/1000 even ranks; ";

  const models::ModelSpec m = make(models::Family::bhz, -1.0);
  const LatticeGeometry strip = LatticeGeometry::strip(16, 8, 4);
  const LatticeOperator h_hat = models::build_edge(m, {}, strip);
  const spectral::GapReport gap = spectral::spectral_gap(models::build_bulk(m, {}, LatticeGeometry::square(16, 4)));
  const LatticeOperator f_hat = indices::edge_operator(h_hat, spectral::SwitchFunction::from_gap(gap), gap);
  const Region lower = Region::lower_half(strip);
  const IndexResult base = indices::edge_z2(f_hat, lower);
  const double fgap = indices::near_kernel_modes(f_hat.matrix()).fredholm_gap;
  const symmetry::TimeReversal theta = symmetry::standard_tr(4);
  const Matrix c = theta.full(strip);
  const Eigen::Index n = strip.dim();

  int small_same = 0, compact_same = 0;
  double worst_residual = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Matrix a = symmetry::random_antisymmetric_rank(static_cast<int>(n), static_cast<int>(n), 1000 + k);
    Matrix kmat = theta_odd_from(c, a);
    kmat *= 0.1 * fgap / opnorm(kmat);
    worst_residual = std::max(worst_residual, symmetry::theta_odd_residual(kmat, theta));
    const IndexResult r = indices::edge_z2(LatticeOperator(strip, f_hat.matrix() + kmat), lower);
    small_same += r.converged() && r.z2() == base.z2();
  }
  // finite rank, supported on sites next to the boundary near x1 = 0
  std::vector<Eigen::Index> support;
  for (int x2 = 0; x2 < 2; ++x2)
    for (int x1 = -2; x1 < 2; ++x1)
      for (int s = 0; s < 4; ++s) support.push_back(lattice::site_index(strip, x1, x2, s));
  for (int k = 0; k < 20; ++k) {
    const int rank = 2 * (1 + k % 3);
    const Matrix local = symmetry::random_antisymmetric_rank(static_cast<int>(support.size()), rank, 2000 + k);
    Matrix a = Matrix::Zero(n, n);
    for (size_t i = 0; i < support.size(); ++i)
      for (size_t j = 0; j < support.size(); ++j) a(support[i], support[j]) = local(i, j);
    Matrix kmat = theta_odd_from(c, a);
    kmat /= opnorm(kmat);
    worst_residual = std::max(worst_residual, symmetry::theta_odd_residual(kmat, theta));
    const IndexResult r = indices::edge_z2(LatticeOperator(strip, f_hat.matrix() + kmat), lower);
    compact_same += r.converged() && r.z2() == base.z2();
  }
  os << "base ind2 " << base.z2() << ", small perturbations " << small_same << "/20, finite rank " << compact_same
     << "/20, worst Theta-odd residual " << fmt(worst_residual);
  return {even == 1000 && base.converged() && base.z2() == 1 && small_same == 20 && compact_same == 20 &&
              worst_residual <= symmetry::kThetaOddTolerance,
          os.str()};
}

Outcome criterion_homotopy() {
  std::ostringstream os;
  bool ok = true;
  for (const char* name : {"homotopy_check_qwz.json", "homotopy_check_bhz.json"}) {
    const config::RunConfig c = config::load(config_path(name));
    const experiments::RunOutput out = experiments::run(c);
    bool all = out.result.at("summary").at("all_ok").get<bool>();
    int samples_min = 1 << 30;
    for (const auto& p : out.result.at("records"))
      if (p.at("label") != "adversarial" && p.contains("samples"))
        samples_min = std::min(samples_min, static_cast<int>(p.at("samples").size()));
    all = all && samples_min >= 21 && out.exit_code == 0;
    ok = ok && all;
    os << models::to_string(c.model.family) << ": " << (all ? "all paths ok" : "FAILED") << " (min samples "
       << samples_min << "); ";
    for (const auto& p : out.result.at("records")) {
      os << p.at("label").get<std::string>() << " ";
      if (p.contains("verdict"))
        os << p.at("verdict").get<std::string>() << " min gap " << fmt(p.at("min_fredholm_gap").get<double>()) << ", ";
      else
        os << (p.value("ok", false) ? "transported" : "refused") << ", ";
    }
  }
  return {ok, os.str()};
}

Outcome criterion_hs_and_ct(const experiments::RunOutput& out, bool hs) {
  const auto& s = out.result.at("summary");
  std::ostringstream os;
  if (hs) {
    const auto& h = s.at("helffer_sjostrand");
    for (const auto& r : h.at("runs")) os << r.at("nodes").get<int>() << " nodes: " << fmt(r.at("error").get<double>()) << "; ";
    return {h.at("ok").get<bool>(), os.str()};
  }
  const auto& c = s.at("combes_thomas");
  for (const auto& r : out.result.at("records"))
    if (r.at("check") == "combes-thomas")
      os << r.at("parameter").get<std::string>() << " rate " << fmt(r.at("fit").at("rate").get<double>()) << " prefactor "
         << fmt(r.at("fit").at("prefactor").get<double>()) << "; ";
  os << "worst residual " << fmt(c.at("worst_log_residual").get<double>());
  return {c.at("ok").get<bool>(), os.str()};
}

Outcome criterion_delocalization() {
  const experiments::RunOutput q = experiments::run(config::load(config_path("mu_scan_qwz.json")));
  const auto& d = q.result.at("summary").at("delocalization");
  const bool rows40 = q.result.at("records").size() == 40;
  const bool qwz_ok = rows40 && d.value("dip_found", false) && d.value("index_low", 1L) == 0 &&
                      std::abs(d.value("index_high", 0L)) == 1;

  config::RunConfig t = config::load(config_path("mu_scan_qwz.json"));
  t.model = make(models::Family::atomic_trivial, 1.0);
  const experiments::RunOutput a = experiments::run(t);
  const auto& da = a.result.at("summary").at("delocalization");
  const bool trivial_ok = !da.value("index_changes", true);
  std::ostringstream os;
  os << "QWZ: 40 points " << (rows40 ? "yes" : "no") << ", index " << d.value("index_low", 99L) << " -> "
     << d.value("index_high", 99L) << ", min Fredholm gap " << fmt(d.value("min_fredholm_gap", 0.0)) << " at mu "
     << fmt(d.value("min_fredholm_gap_mu", 0.0)) << "; atomic: index change " << (trivial_ok ? "none" : "FOUND");
  return {qwz_ok && trivial_ok, os.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

Outcome criterion_determinism() {
  const auto root = std::filesystem::temp_directory_path() / "fredlab_acceptance_determinism";
  std::filesystem::remove_all(root);
  std::ostringstream os;
  bool ok = true;
  for (const char* name : {"bulk_index_qwz.json", "edge_index_bhz.json", "phase_scan_qwz.json", "locality_check_qwz.json"}) {
    config::RunConfig c = config::load(config_path(name));
    c.seeds = c.experiment == config::Experiment::bulk_index ? std::vector<std::uint64_t>{3, 4} : c.seeds;
    if (c.experiment == config::Experiment::bulk_index) c.disorder.amplitude = 0.5;
    std::string files[2][2];
    for (int rep = 0; rep < 2; ++rep) {
      const auto dir = root / (std::string(name) + "." + std::to_string(rep));
      experiments::write_outputs(c, experiments::run(c), dir.string());
      const std::string stem = config::to_string(c.experiment);
      files[rep][0] = slurp(dir / (stem + ".json"));
      files[rep][1] = slurp(dir / (stem + ".csv"));
    }
    const bool same = !files[0][0].empty() && files[0][0] == files[1][0] && files[0][1] == files[1][1];
    ok = ok && same;
    os << name << (same ? " identical" : " DIFFERS") << "; ";
  }
  std::filesystem::remove_all(root);
  return {ok, os.str()};
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int id, const char* title, const std::function<Outcome()>& f) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("%s %2d %s [%.0fs]: %s\n", o.pass ? "PASS" : "FAIL", id, title, secs, o.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "index-route concordance", criterion_routes);
  report(2, "Z2 doubling equivalence", criterion_doubling);
  report(3, "clean Z2 triangle", criterion_triangle);
  report(4, "bulk-edge correspondence", criterion_bec);
  report(5, "trace-limit formula", criterion_trace_limit);
  report(6, "Fedosov identity on unitaries", criterion_fedosov_unitary);
  report(7, "Theta-odd theory", criterion_theta_odd);
  report(8, "homotopy monitors", criterion_homotopy);
  std::optional<experiments::RunOutput> locality;
  auto locality_run = [&]() -> const experiments::RunOutput& {
    if (!locality) locality = experiments::run(config::load(config_path("locality_check_qwz.json")));
    return *locality;
  };
  report(9, "Helffer-Sjostrand cross-check", [&] { return criterion_hs_and_ct(locality_run(), true); });
  report(10, "Combes-Thomas", [&] { return criterion_hs_and_ct(locality_run(), false); });
  report(11, "delocalization forcing", criterion_delocalization);
  report(12, "determinism", criterion_determinism);
  std::printf("%d/12 criteria passed\n", 12 - failed);
  return failed == 0 ? 0 : 1;
}
