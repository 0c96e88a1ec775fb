#include "core/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "core/oracles.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"
#include "core/symmetry.hpp"
#include "core/version.hpp"

namespace fredlab::experiments {

using config::Experiment;
using config::RunConfig;
using indices::IndexResult;
using indices::IndexStatus;
using lattice::LatticeGeometry;
using lattice::LatticeOperator;
using lattice::Region;
using models::DisorderSpec;
using models::ModelSpec;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void Csv::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size()) fail(ErrorCode::invalid_argument, "csv row width does not match the schema");
  rows_.push_back(std::move(cells));
}

std::string Csv::str() const {
  std::ostringstream os;
  os << "# ";
  for (size_t i = 0; i < columns_.size(); ++i) os << (i ? " | " : "") << columns_[i].name << ": " << columns_[i].description;
  os << "\n";
  for (size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i].name;
  os << "\n";
  for (const auto& row : rows_) {
    for (size_t i = 0; i < row.size(); ++i) {
      const bool quote = row[i].find_first_of(",\"\n") != std::string::npos;
      if (i) os << ",";
      if (quote) {
        os << '"';
        for (char ch : row[i]) os << (ch == '"' ? "\"\"" : std::string(1, ch));
        os << '"';
      } else {
        os << row[i];
      }
    }
    os << "\n";
  }
  return os.str();
}

json to_json(const IndexResult& r) {
  json history = json::array();
  for (const auto& [n, raw] : r.history) history.push_back({n, raw});
  return json{{"method", r.method},
              {"kind", r.kind == indices::IndexKind::z2 ? "z2" : "integer"},
              {"raw", r.raw},
              {"value", r.kind == indices::IndexKind::z2 ? r.z2() : r.value},
              {"n_used", r.n_used},
              {"history", history},
              {"distance_to_integer", r.distance_to_integer},
              {"status", indices::to_string(r.status)},
              {"imaginary_residue", r.imaginary_residue},
              {"warnings", r.warnings}};
}

json to_json(const spectral::GapReport& g) {
  return json{{"gap_lower", g.gap_lower}, {"gap_upper", g.gap_upper}, {"contains_zero", g.contains_zero}};
}

json to_json(const lattice::LocalityFit& f) {
  json j{{"model", lattice::to_string(f.model)},
         {"rate", f.rate},
         {"prefactor", f.prefactor},
         {"max_residual", f.max_residual},
         {"status", lattice::to_string(f.status)},
         {"points", f.points}};
  j["confinement_direction"] = f.confinement_direction ? json(*f.confinement_direction) : json(nullptr);
  return j;
}

json to_json(const homotopy::HomotopyReport& r) {
  json samples = json::array();
  for (const auto& s : r.samples) {
    json j{{"t", s.t},
           {"fredholm_gap", s.fredholm_gap},
           {"cluster_size", s.cluster_size},
           {"loc2_fit", to_json(s.loc2_fit)},
           {"flagged", s.flagged},
           {"note", s.note}};
    j["index"] = s.index ? to_json(*s.index) : json(nullptr);
    j["theta_odd_residual"] = s.theta_odd_residual ? json(*s.theta_odd_residual) : json(nullptr);
    samples.push_back(std::move(j));
  }
  json j{{"label", r.label},
         {"verdict", homotopy::to_string(r.verdict)},
         {"reference_value", r.reference_value},
         {"gaps_ok", r.gaps_ok},
         {"loc2_ok", r.loc2_ok},
         {"flagged", r.flagged},
         {"min_fredholm_gap", r.min_fredholm_gap},
         {"samples", samples}};
  j["supporting_fit"] = r.supporting_fit ? to_json(*r.supporting_fit) : json(nullptr);
  return j;
}

json to_json(const homotopy::TransportReport& r) {
  json gaps = json::array();
  for (size_t i = 0; i < r.t.size(); ++i) gaps.push_back({{"t", r.t[i]}, {"gap", to_json(r.gaps[i])}});
  json j{{"refused", r.refused}, {"min_gap_width", r.min_gap_width}, {"reason", r.reason}, {"samples", gaps}};
  j["value"] = r.value ? json(*r.value) : json(nullptr);
  return j;
}

json to_json(const indices::FermiScanRecord& r) {
  json j{{"mu", r.mu},
         {"gap", to_json(r.gap)},
         {"on_eigenvalue", r.on_eigenvalue},
         {"sigma_min", r.sigma_min},
         {"fredholm_gap", r.fredholm_gap},
         {"cluster_size", r.cluster_size},
         {"note", r.note}};
  j["index"] = r.index ? to_json(*r.index) : json(nullptr);
  return j;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string opt_long(const std::optional<long>& v) { return v ? std::to_string(*v) : ""; }
std::string index_cell(const std::optional<IndexResult>& r) {
  if (!r || r->status != IndexStatus::converged) return "";
  return std::to_string(r->kind == indices::IndexKind::z2 ? r->z2() : r->value);
}
std::string raw_cell(const std::optional<IndexResult>& r) { return r ? format_double(r->raw) : ""; }
std::string status_cell(const std::optional<IndexResult>& r) { return r ? indices::to_string(r->status) : "absent"; }
json opt_json(const std::optional<IndexResult>& r) { return r ? to_json(*r) : json(nullptr); }

long index_value(const IndexResult& r) { return r.kind == indices::IndexKind::z2 ? r.z2() : r.value; }

// Run bookkeeping shared by all experiments.
struct Ledger {
  std::vector<std::string> warnings;
  std::vector<json> errors;
  bool unconverged = false;

  void warn(const std::string& w) { warnings.push_back(w); }
  void error(const json& provenance, const Error& e) {
    json j = provenance;
    j["code"] = error_name(e.code());
    j["message"] = e.what();
    errors.push_back(std::move(j));
  }
  int exit_code() const {
    if (!errors.empty()) return 1;
    return (unconverged || !warnings.empty()) ? 2 : 0;
  }
};

indices::KernelPolicy kernel_policy(const RunConfig& c) {
  indices::KernelPolicy p;
  p.kind = c.index.kernel_policy == "absolute" ? indices::KernelPolicy::Kind::absolute
                                               : indices::KernelPolicy::Kind::relative_gap;
  p.tau = c.index.kernel_tau;
  p.below = c.index.kernel_below;
  p.min_gap_ratio = c.index.min_gap_ratio;
  return p;
}

indices::FedosovOptions fedosov_options(const RunConfig& c, std::optional<Region> region) {
  indices::FedosovOptions o;
  o.n_start = c.index.fedosov_n_start;
  o.n_max = c.index.fedosov_n_max;
  o.tol = c.index.fedosov_tol;
  o.step_tol = c.index.fedosov_step_tol;
  o.region = std::move(region);
  return o;
}

LatticeGeometry bulk_geometry(const RunConfig& c, const ModelSpec& m) {
  return LatticeGeometry::square(c.geometry.side, m.n_internal(), c.geometry.periodic);
}

LatticeGeometry strip_geometry(const RunConfig& c, const ModelSpec& m) {
  return LatticeGeometry::strip(c.geometry.strip_length, c.geometry.strip_width, m.n_internal(),
                                c.geometry.strip_periodic_x1);
}

double clean_gap_width(const RunConfig& c, const ModelSpec& m) {
  const LatticeGeometry g = bulk_geometry(c, m);
  const spectral::GapReport gap = spectral::spectral_gap(linalg::eigvalsh(models::build_bulk(m, {}, g).matrix()));
  if (gap.contains_zero) fail(ErrorCode::gap_violation, "disorder.gap_fraction needs a gapped clean model");
  return gap.width();
}

DisorderSpec disorder_for(const RunConfig& c, const ModelSpec& m, std::uint64_t seed) {
  DisorderSpec d;
  d.seed = seed;
  d.amplitude = c.disorder.gap_fraction ? *c.disorder.gap_fraction * clean_gap_width(c, m) : c.disorder.amplitude;
  return d;
}

// clean-limit reference: Chern number for QWZ, Fu-Kane Z2 for TRI families
std::optional<long> bulk_oracle(const RunConfig& c, const ModelSpec& m, std::string* note) {
  try {
    if (m.time_reversal_invariant()) return oracles::z2_pfaffian_trim(m);
    return oracles::chern_berry(m, c.oracle.n_k);
  } catch (const Error& e) {
    if (note) *note = e.what();
    return std::nullopt;
  }
}

std::optional<long> edge_oracle(const RunConfig& c, const ModelSpec& m, std::string* note) {
  try {
    if (m.time_reversal_invariant()) return oracles::edge_spectral_flow(m, c.oracle.strip_width);
    return oracles::chern_berry(m, c.oracle.n_k);
  } catch (const Error& e) {
    if (note) *note = e.what();
    return std::nullopt;
  }
}

struct BulkEval {
  json j;
  bool gapless = false;
  std::optional<IndexResult> flux, corner, kubo, z2;
  // Chern (flux route) for QWZ, localized Z2 count for TRI families
  std::optional<IndexResult> primary() const { return z2 ? z2 : flux; }
};

BulkEval evaluate_bulk(const RunConfig& c, const ModelSpec& m, const DisorderSpec& d, bool corner_route) {
  BulkEval out;
  const LatticeGeometry g = bulk_geometry(c, m);
  const LatticeOperator h = models::build_bulk(m, d, g);
  const spectral::EigenDecomposition e = spectral::eig_hermitian(h);
  const spectral::GapReport gap = spectral::spectral_gap(e.eigenvalues);
  out.j["geometry"] = g.describe();
  out.j["gap"] = to_json(gap);
  if (gap.contains_zero) {
    out.gapless = true;
    out.j["note"] = "spectral gap closed at the Fermi level";
    return out;
  }
  const LatticeOperator p = spectral::fermi_projection(g, e);
  const Region region = indices::default_bulk_region(g, c.index.localization_radius_fraction);
  const Eigen::VectorXd w = region.weights(g);
  const indices::FedosovOptions fo = fedosov_options(c, region);
  out.j["region"] = region.describe();

  const LatticeOperator f = indices::bulk_flux_operator(p, indices::flux_route_unitary(g));
  const linalg::Svd svd = linalg::svd(f.matrix());
  out.flux = indices::fedosov_from_svd(svd, &w, fo);
  out.flux->method = "fedosov-flux";
  const indices::SingularSpectrum spec = indices::near_kernel_from_svd(svd, kernel_policy(c));
  out.j["flux_spectrum"] = {{"cluster_size", spec.cluster_size},
                            {"gap_ratio", spec.gap_ratio},
                            {"fredholm_gap", spec.fredholm_gap},
                            {"sigma_min", svd.values.size() ? svd.values(0) : 0.0}};
  if (m.time_reversal_invariant()) {
    const symmetry::TimeReversal theta = symmetry::standard_tr(g.n_internal);
    out.j["theta_odd_residual"] = symmetry::theta_odd_residual(f.matrix(), theta);
    try {
      out.z2 = indices::z2_count_from_spectrum(spec, w);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::ambiguous) throw;
      IndexResult amb;
      amb.method = "z2-localized-count";
      amb.kind = indices::IndexKind::z2;
      amb.status = IndexStatus::ambiguous;
      amb.warnings.push_back(err.what());
      out.z2 = amb;
    }
  }
  if (corner_route) {
    const LatticeOperator wc = indices::bulk_corner_operator(p);
    out.corner = fedosov_from_svd(linalg::svd(wc.matrix()), &w, fo);
    out.corner->method = "fedosov-corner";
  }
  out.kubo = indices::chern_kubo_index(p, region, c.index.fedosov_tol);
  out.j["flux"] = opt_json(out.flux);
  out.j["corner"] = opt_json(out.corner);
  out.j["kubo"] = opt_json(out.kubo);
  out.j["z2"] = opt_json(out.z2);
  return out;
}

struct EdgeEval {
  json j;
  std::optional<IndexResult> index;
  lattice::LocalityFit diagnostic;
};

models::BoundaryCondition boundary_condition(const RunConfig& c, const ModelSpec& m, const LatticeGeometry& strip,
                                             const std::string& kind) {
  models::BoundaryCondition bc;
  if (kind == "loc2-perturbation") {
    bc.kind = models::BoundaryCondition::Kind::loc2_perturbation;
    bc.depth = c.boundary.depth;
    bc.perturbation = models::boundary_perturbation(m, strip, c.boundary.amplitude, c.boundary.depth);
  }
  return bc;
}

spectral::GapReport edge_bulk_gap(const RunConfig& c, const ModelSpec& m, const DisorderSpec& d) {
  const LatticeGeometry g = LatticeGeometry::square(c.geometry.strip_length, m.n_internal(), true);
  const spectral::GapReport gap = spectral::spectral_gap(linalg::eigvalsh(models::build_bulk(m, d, g).matrix()));
  if (gap.contains_zero) fail(ErrorCode::gap_violation, "edge index: the bulk gap is closed");
  return gap;
}

EdgeEval evaluate_edge(const RunConfig& c, const ModelSpec& m, const DisorderSpec& d, const std::string& bc_kind) {
  EdgeEval out;
  const LatticeGeometry strip = strip_geometry(c, m);
  const spectral::GapReport gap = edge_bulk_gap(c, m, d);
  const spectral::SwitchFunction sw = spectral::SwitchFunction::from_gap(gap, c.index.window_fraction);
  const LatticeOperator h_hat = models::build_edge(m, d, strip, boundary_condition(c, m, strip, bc_kind));
  const spectral::EigenDecomposition e = spectral::eig_hermitian(h_hat);
  const LatticeOperator f_hat = indices::edge_operator(h_hat, e, sw, gap);
  out.diagnostic = indices::edge_diagnostic(h_hat, e, sw);
  out.j["geometry"] = strip.describe();
  out.j["boundary"] = bc_kind;
  out.j["bulk_gap"] = to_json(gap);
  out.j["window"] = {sw.a(), sw.b()};
  out.j["diagnostic_fit"] = to_json(out.diagnostic);
  const Region region = Region::lower_half(strip);
  out.j["region"] = region.describe();
  if (m.time_reversal_invariant()) {
    out.j["theta_odd_residual"] = symmetry::theta_odd_residual(f_hat.matrix(), symmetry::standard_tr(strip.n_internal));
    try {
      out.index = indices::edge_z2(f_hat, region, kernel_policy(c));
    } catch (const Error& err) {
      if (err.code() != ErrorCode::ambiguous) throw;
      IndexResult amb;
      amb.method = "edge-z2";
      amb.kind = indices::IndexKind::z2;
      amb.status = IndexStatus::ambiguous;
      amb.warnings.push_back(err.what());
      out.index = amb;
    }
  } else {
    out.index = indices::edge_chern(f_hat, region, fedosov_options(c, region));
  }
  out.j["index"] = opt_json(out.index);
  return out;
}

homotopy::TransportReport transport_from_clean(const RunConfig& c, const ModelSpec& m, const DisorderSpec& d,
                                               long clean_value) {
  const LatticeGeometry g = bulk_geometry(c, m);
  homotopy::PhysicalPath path = homotopy::path_physical(models::build_bulk(m, {}, g), models::build_bulk(m, d, g));
  path.samples = homotopy::default_samples(c.homotopy.samples);
  return homotopy::transport(path, clean_value, spectral::kGapResolution, c.workers);
}

json provenance(const RunConfig& c, std::uint64_t seed) {
  return json{{"experiment", config::to_string(c.experiment)}, {"seed", seed}};
}

bool converged(const std::optional<IndexResult>& r) { return r && r->converged(); }

// ---------------------------------------------------------------------------------------

void run_bulk_index(const RunConfig& c, json& records, Csv& csv, Ledger& ledger) {
  std::string note;
  const bool clean = !c.disorder.gap_fraction && c.disorder.amplitude == 0.0;
  const std::optional<long> oracle = clean ? bulk_oracle(c, c.model, &note) : std::nullopt;
  std::vector<json> rows(c.seeds.size());
  std::vector<std::vector<std::string>> cells(c.seeds.size());
  std::vector<std::optional<Error>> errs(c.seeds.size());
  parallel_for(c.seeds.size(), c.workers, [&](std::size_t i) {
    const std::uint64_t seed = c.seeds[i];
    try {
      const DisorderSpec d = disorder_for(c, c.model, seed);
      BulkEval b = evaluate_bulk(c, c.model, d, true);
      json j = provenance(c, seed);
      j["disorder_amplitude"] = d.amplitude;
      j.update(b.j);
      j["oracle"] = oracle ? json(*oracle) : json(nullptr);
      rows[i] = j;
      const auto gap = b.j["gap"];
      cells[i] = {std::to_string(seed),
                  format_double(d.amplitude),
                  format_double(gap["gap_lower"].get<double>()),
                  format_double(gap["gap_upper"].get<double>()),
                  raw_cell(b.flux),
                  index_cell(b.flux),
                  raw_cell(b.corner),
                  index_cell(b.corner),
                  raw_cell(b.kubo),
                  index_cell(b.kubo),
                  index_cell(b.z2),
                  opt_long(oracle),
                  b.gapless ? "gapless" : status_cell(b.primary())};
    } catch (const Error& e) {
      errs[i] = e;
    }
  });
  for (size_t i = 0; i < c.seeds.size(); ++i) {
    if (errs[i]) {
      ledger.error(provenance(c, c.seeds[i]), *errs[i]);
      continue;
    }
    records.push_back(rows[i]);
    csv.add_row(cells[i]);
    const std::string& status = cells[i].back();
    if (status != "converged") ledger.unconverged = true;
    // routes must agree
    const json& r = rows[i];
    if (!r.contains("flux") || r["flux"].is_null()) continue;
    std::vector<std::string> names{"flux", "corner", "kubo"};
    std::optional<long> first;
    for (const auto& n : names) {
      if (r[n].is_null() || r[n]["status"] != "converged") {
        ledger.warn("seed " + std::to_string(c.seeds[i]) + ": route " + n + " not converged");
        continue;
      }
      const long v = r[n]["value"].get<long>();
      if (first && *first != v) ledger.warn("seed " + std::to_string(c.seeds[i]) + ": Chern routes disagree");
      first = v;
    }
    if (oracle) {
      const json& prim = c.model.time_reversal_invariant() ? r["z2"] : r["flux"];
      if (!prim.is_null() && prim["status"] == "converged" && prim["value"].get<long>() != *oracle)
        ledger.warn("seed " + std::to_string(c.seeds[i]) + ": bulk index differs from the clean oracle");
    }
  }
  if (!note.empty()) ledger.warn("oracle: " + note);
}

void run_edge_index(const RunConfig& c, json& records, Csv& csv, Ledger& ledger) {
  std::string note;
  const bool clean = !c.disorder.gap_fraction && c.disorder.amplitude == 0.0;
  const std::optional<long> oracle = clean ? edge_oracle(c, c.model, &note) : std::nullopt;
  struct Job {
    std::uint64_t seed;
    std::string bc;
  };
  std::vector<Job> jobs;
  for (auto s : c.seeds)
    for (const auto& k : c.boundary.kinds) jobs.push_back({s, k});
  std::vector<json> rows(jobs.size());
  std::vector<std::vector<std::string>> cells(jobs.size());
  std::vector<std::optional<Error>> errs(jobs.size());
  std::vector<bool> ok(jobs.size(), false);
  parallel_for(jobs.size(), c.workers, [&](std::size_t i) {
    try {
      const DisorderSpec d = disorder_for(c, c.model, jobs[i].seed);
      EdgeEval ev = evaluate_edge(c, c.model, d, jobs[i].bc);
      json j = provenance(c, jobs[i].seed);
      j["disorder_amplitude"] = d.amplitude;
      j.update(ev.j);
      j["oracle"] = oracle ? json(*oracle) : json(nullptr);
      rows[i] = j;
      ok[i] = converged(ev.index) && ev.diagnostic.success();
      cells[i] = {std::to_string(jobs[i].seed), jobs[i].bc, format_double(d.amplitude), raw_cell(ev.index),
                  index_cell(ev.index), status_cell(ev.index), lattice::to_string(ev.diagnostic.status),
                  format_double(ev.diagnostic.rate), opt_long(oracle)};
    } catch (const Error& e) {
      errs[i] = e;
    }
  });
  for (size_t i = 0; i < jobs.size(); ++i) {
    if (errs[i]) {
      json p = provenance(c, jobs[i].seed);
      p["boundary"] = jobs[i].bc;
      ledger.error(p, *errs[i]);
      continue;
    }
    records.push_back(rows[i]);
    csv.add_row(cells[i]);
    if (!ok[i]) ledger.unconverged = true;
    if (oracle && !cells[i][4].empty() && std::stol(cells[i][4]) != *oracle)
      ledger.warn("seed " + std::to_string(jobs[i].seed) + " (" + jobs[i].bc + "): edge index differs from the oracle");
  }
  if (!note.empty()) ledger.warn("oracle: " + note);
}

void run_bec_check(const RunConfig& c, json& records, Csv& csv, Ledger& ledger, json& summary) {
  std::string note;
  const std::optional<long> clean_value = bulk_oracle(c, c.model, &note);
  if (!clean_value) fail(ErrorCode::gap_violation, "bec-check needs a gapped clean model for transport: " + note);
  struct SeedOut {
    json bulk;
    std::optional<long> direct, transported;
    std::vector<std::pair<json, std::optional<long>>> edges;
    std::optional<Error> err;
  };
  std::vector<SeedOut> outs(c.seeds.size());
  // seeds run sequentially so the transport samples can use the workers
  for (size_t i = 0; i < c.seeds.size(); ++i) {
    SeedOut& o = outs[i];
    try {
      const DisorderSpec d = disorder_for(c, c.model, c.seeds[i]);
      BulkEval b = evaluate_bulk(c, c.model, d, false);
      o.bulk = b.j;
      o.bulk["disorder_amplitude"] = d.amplitude;
      const auto prim = b.primary();
      if (converged(prim)) o.direct = index_value(*prim);
      const homotopy::TransportReport tr = transport_from_clean(c, c.model, d, *clean_value);
      o.bulk["transport"] = to_json(tr);
      if (tr.value) o.transported = *tr.value;
      for (const auto& k : c.boundary.kinds) {
        EdgeEval ev = evaluate_edge(c, c.model, d, k);
        o.edges.emplace_back(ev.j, converged(ev.index) ? std::optional<long>(index_value(*ev.index)) : std::nullopt);
      }
    } catch (const Error& e) {
      o.err = e;
    }
  }
  int runs = 0, agree = 0;
  for (size_t i = 0; i < c.seeds.size(); ++i) {
    const SeedOut& o = outs[i];
    if (o.err) {
      ledger.error(provenance(c, c.seeds[i]), *o.err);
      continue;
    }
    json rec = provenance(c, c.seeds[i]);
    rec["bulk"] = o.bulk;
    rec["bulk_direct"] = o.direct ? json(*o.direct) : json(nullptr);
    rec["bulk_transported"] = o.transported ? json(*o.transported) : json(nullptr);
    const bool bulk_ok = o.direct && o.transported && *o.direct == *o.transported;
    json edges = json::array();
    for (size_t k = 0; k < o.edges.size(); ++k) {
      const auto& [ej, ev] = o.edges[k];
      const bool match = bulk_ok && ev && *ev == *o.direct;
      ++runs;
      agree += match;
      json e = ej;
      e["agree"] = match;
      edges.push_back(e);
      csv.add_row({std::to_string(c.seeds[i]), c.boundary.kinds[k], format_double(o.bulk["disorder_amplitude"].get<double>()),
                   opt_long(o.direct), opt_long(o.transported), opt_long(ev), match ? "1" : "0"});
      if (!match)
        ledger.warn("seed " + std::to_string(c.seeds[i]) + " (" + c.boundary.kinds[k] + "): bulk and edge indices disagree");
    }
    rec["edges"] = edges;
    records.push_back(rec);
  }
  summary["runs"] = runs;
  summary["agreements"] = agree;
  summary["clean_oracle"] = *clean_value;
}

void run_phase_scan(const RunConfig& c, json& records, Csv& csv, Ledger& ledger) {
  std::vector<double> masses;
  const long count = std::lround(std::floor((c.scan.to - c.scan.from) / c.scan.step + 1e-9)) + 1;
  for (long i = 0; i < count; ++i) masses.push_back(c.scan.from + static_cast<double>(i) * c.scan.step);
  std::vector<json> rows(masses.size());
  std::vector<std::vector<std::string>> cells(masses.size());
  std::vector<std::optional<Error>> errs(masses.size());
  std::vector<bool> ok(masses.size(), false);
  parallel_for(masses.size(), c.workers, [&](std::size_t i) {
    try {
      ModelSpec m = c.model;
      m.mass = masses[i];
      const DisorderSpec d = disorder_for(c, c.model, c.seeds.front());
      BulkEval b = evaluate_bulk(c, m, d, false);
      std::string note;
      const std::optional<long> oracle = d.amplitude == 0.0 ? bulk_oracle(c, m, &note) : std::nullopt;
      json j = provenance(c, c.seeds.front());
      j["mass"] = masses[i];
      j.update(b.j);
      j["oracle"] = oracle ? json(*oracle) : json(nullptr);
      if (!note.empty()) j["oracle_note"] = note;
      rows[i] = j;
      const auto prim = b.primary();
      ok[i] = !b.gapless && converged(prim);
      const auto& gap = b.j["gap"];
      cells[i] = {format_double(masses[i]),
                  format_double(gap["gap_lower"].get<double>()),
                  format_double(gap["gap_upper"].get<double>()),
                  b.gapless ? "1" : "0",
                  raw_cell(prim),
                  index_cell(prim),
                  b.gapless ? "not-converged" : status_cell(prim),
                  opt_long(oracle)};
    } catch (const Error& e) {
      errs[i] = e;
    }
  });
  for (size_t i = 0; i < masses.size(); ++i) {
    if (errs[i]) {
      json p = provenance(c, c.seeds.front());
      p["mass"] = masses[i];
      ledger.error(p, *errs[i]);
      continue;
    }
    records.push_back(rows[i]);
    csv.add_row(cells[i]);
    if (!ok[i]) ledger.unconverged = true;
    if (ok[i] && !cells[i][7].empty() && cells[i][5] != cells[i][7])
      ledger.warn("mass " + cells[i][0] + ": index differs from the oracle");
  }
}

void run_mu_scan(const RunConfig& c, json& records, Csv& csv, Ledger& ledger, json& summary) {
  const DisorderSpec d = disorder_for(c, c.model, c.seeds.front());
  const LatticeGeometry g = bulk_geometry(c, c.model);
  const LatticeOperator h = models::build_bulk(c.model, d, g);
  const Eigen::VectorXd ev = linalg::eigvalsh(h.matrix());
  const double from = c.mu_scan.from ? *c.mu_scan.from : ev.minCoeff() - 0.5;
  const double to = c.mu_scan.to ? *c.mu_scan.to : 0.0;
  std::vector<double> grid;
  for (int i = 0; i < c.mu_scan.count; ++i) grid.push_back(from + (to - from) * i / (c.mu_scan.count - 1));
  indices::FermiScanOptions opt;
  opt.z2 = c.model.time_reversal_invariant();
  opt.region = indices::default_bulk_region(g, c.index.localization_radius_fraction);
  opt.fedosov = fedosov_options(c, opt.region);
  opt.policy = kernel_policy(c);
  const auto recs = indices::fermi_scan(h, grid, opt);
  for (const auto& r : recs) {
    json j = to_json(r);
    j["seed"] = c.seeds.front();
    records.push_back(j);
    csv.add_row({format_double(r.mu), r.gap.contains_zero ? "1" : "0", r.on_eigenvalue ? "1" : "0",
                 format_double(r.sigma_min), format_double(r.fredholm_gap), std::to_string(r.cluster_size),
                 raw_cell(r.index), index_cell(r.index), status_cell(r.index)});
    if (!r.gap.contains_zero && !converged(r.index)) ledger.unconverged = true;
  }
  // locate a Fredholm-gap dip between the first and last converged indices when they differ
  std::optional<size_t> first, last;
  for (size_t i = 0; i < recs.size(); ++i)
    if (converged(recs[i].index)) {
      if (!first) first = i;
      last = i;
    }
  json deloc{{"index_changes", false}, {"dip_found", false}};
  if (first && last && *first < *last) {
    const long a = index_value(*recs[*first].index), b = index_value(*recs[*last].index);
    deloc["index_low"] = a;
    deloc["index_high"] = b;
    deloc["index_changes"] = a != b;
    double best = std::numeric_limits<double>::infinity();
    double best_mu = std::numeric_limits<double>::quiet_NaN();
    // the last mu with the low-mu index and the first with the high-mu index bracket the change
    size_t lo = *first, hi = *last;
    for (size_t i = *first; i <= *last; ++i)
      if (converged(recs[i].index) && index_value(*recs[i].index) == a) lo = i;
    for (size_t i = *last + 1; i-- > lo;)
      if (converged(recs[i].index) && index_value(*recs[i].index) == b) hi = i;
    for (size_t i = *first + 1; i < *last; ++i)
      if (!recs[i].on_eigenvalue && recs[i].fredholm_gap < best) {
        best = recs[i].fredholm_gap;
        best_mu = recs[i].mu;
      }
    deloc["bracket"] = {recs[lo].mu, recs[hi].mu};
    deloc["min_fredholm_gap"] = best;
    deloc["min_fredholm_gap_mu"] = best_mu;
    deloc["dip_found"] = a != b && best < 0.1;
  }
  summary["delocalization"] = deloc;
}

// corner-flatten style family along a mass sweep through a gap closing
homotopy::HomotopyPath path_adversarial(const RunConfig& c, const LatticeGeometry& g, const DisorderSpec& d,
                                        const spectral::SwitchFunction& sw) {
  const ModelSpec m0 = c.model;
  const double mass_to = c.homotopy.adversarial_mass_to;
  homotopy::HomotopyPath p;
  p.label = "adversarial";
  p.generator = [g, m0, mass_to, d, sw](double t) {
    ModelSpec m = m0;
    m.mass = (1.0 - t) * m0.mass + t * mass_to;
    const LatticeOperator h = models::build_bulk(m, d, g);
    const LatticeOperator gh = spectral::apply_function_eig(h, [&sw](double x) { return sw.value(x); });
    const Eigen::VectorXd lam2 = lattice::step_diagonal(g, 2);
    return LatticeOperator::hermitian_from(g, gh.matrix() * lam2.asDiagonal() * gh.matrix());
  };
  p.samples = homotopy::default_samples(c.homotopy.samples);
  return p;
}

void run_homotopy_check(const RunConfig& c, json& records, Csv& csv, Ledger& ledger, json& summary) {
  const ModelSpec& m = c.model;
  const bool tri = m.time_reversal_invariant();
  const DisorderSpec d = disorder_for(c, m, c.seeds.front());
  const LatticeGeometry g =
      LatticeGeometry::rectangle(c.homotopy.x1_length, c.geometry.side, m.n_internal(), c.geometry.periodic);
  const LatticeOperator h = models::build_bulk(m, d, g);
  const spectral::GapReport gap = spectral::spectral_gap(h);
  if (gap.contains_zero) fail(ErrorCode::gap_violation, "homotopy-check needs a gapped Hamiltonian");
  const spectral::SwitchFunction sw = spectral::SwitchFunction::from_gap(gap, c.index.window_fraction);

  homotopy::Thresholds th;
  th.fredholm_gap = c.index.fredholm_gap_threshold;
  th.max_refinements = c.homotopy.max_refinements;
  th.workers = c.workers;
  if (tri) th.theta = symmetry::standard_tr(m.n_internal());

  auto method_for = [&](const Region& region) {
    homotopy::IndexMethod im;
    im.kind = tri ? homotopy::IndexMethod::Kind::z2_count : homotopy::IndexMethod::Kind::fedosov;
    im.region = region;
    im.fedosov = fedosov_options(c, region);
    im.policy = kernel_policy(c);
    return im;
  };
  const Region bulk_region = Region::flux_box(g, c.index.localization_radius_fraction);

  json paths = json::array();
  bool all_ok = true;
  for (const std::string& name : c.homotopy.paths) {
    json entry{{"label", name}};
    try {
      if (name == "physical") {
        std::string note;
        const std::optional<long> clean_value = bulk_oracle(c, m, &note);
        if (!clean_value) fail(ErrorCode::gap_violation, "physical path needs a gapped clean model: " + note);
        const homotopy::TransportReport tr = transport_from_clean(c, m, d, *clean_value);
        entry["transport"] = to_json(tr);
        entry["ok"] = !tr.refused;
        for (size_t i = 0; i < tr.t.size(); ++i)
          csv.add_row({name, format_double(tr.t[i]), "", "", format_double(tr.gaps[i].width()), "", "", "",
                       tr.gaps[i].contains_zero ? "1" : "0", ""});
        if (tr.refused) {
          ledger.warn("physical path: transport refused (" + tr.reason + ")");
          all_ok = false;
        }
        paths.push_back(entry);
        continue;
      }
      homotopy::HomotopyPath path;
      homotopy::IndexMethod im = method_for(bulk_region);
      if (name == "corner-flatten") {
        path = homotopy::path_corner_flatten(h, sw);
      } else if (name == "truncate-flatten") {
        path = homotopy::path_truncate_flatten(h, sw);
      } else if (name == "boundary-conditions") {
        const LatticeGeometry strip = strip_geometry(c, m);
        const LatticeOperator hb = models::build_bulk(m, d, LatticeGeometry::matching_bulk(strip));
        const bool pert = std::find(c.boundary.kinds.begin(), c.boundary.kinds.end(), "loc2-perturbation") !=
                          c.boundary.kinds.end();
        const LatticeOperator h_hat =
            models::build_edge(m, d, strip, boundary_condition(c, m, strip, pert ? "loc2-perturbation" : "dirichlet"));
        const spectral::SwitchFunction sw_edge =
            spectral::SwitchFunction::from_gap(edge_bulk_gap(c, m, d), c.index.window_fraction);
        path = homotopy::path_boundary_conditions(hb, h_hat, sw_edge);
        im = method_for(Region::lower_half(strip));
      } else if (name == "adversarial") {
        path = path_adversarial(c, g, d, sw);
      }
      path.samples = homotopy::default_samples(c.homotopy.samples);
      const homotopy::HomotopyReport rep = homotopy::monitor(path, im, th);
      entry = to_json(rep);
      bool ok;
      if (name == "adversarial") {
        // must not pass silently
        ok = rep.verdict != homotopy::Verdict::index_constant || rep.flagged > 0;
        entry["caught"] = ok;
        if (!ok) ledger.warn("adversarial path passed without a flag");
      } else {
        bool theta_ok = true;
        for (const auto& s : rep.samples)
          if (s.theta_odd_residual && *s.theta_odd_residual > symmetry::kThetaOddTolerance) theta_ok = false;
        ok = rep.verdict == homotopy::Verdict::index_constant && rep.gaps_ok && rep.loc2_ok && theta_ok &&
             rep.flagged == 0;
        if (rep.supporting_fit && !rep.supporting_fit->success() &&
            rep.supporting_fit->status != lattice::FitStatus::numerically_zero)
          ok = false;
        if (!ok) ledger.warn(name + " path: verdict " + homotopy::to_string(rep.verdict) + ", gaps_ok " +
                             (rep.gaps_ok ? "1" : "0") + ", loc2_ok " + (rep.loc2_ok ? "1" : "0") +
                             ", flagged " + std::to_string(rep.flagged));
      }
      entry["ok"] = ok;
      all_ok = all_ok && ok;
      for (const auto& s : rep.samples)
        csv.add_row({name, format_double(s.t), format_double(s.fredholm_gap), std::to_string(s.cluster_size), "",
                     lattice::to_string(s.loc2_fit.status), index_cell(s.index), status_cell(s.index), s.flagged ? "1" : "0",
                     s.theta_odd_residual ? format_double(*s.theta_odd_residual) : ""});
    } catch (const Error& e) {
      json p = provenance(c, c.seeds.front());
      p["path"] = name;
      ledger.error(p, e);
      all_ok = false;
      entry["error"] = e.what();
    }
    paths.push_back(entry);
  }
  records = paths;
  summary["all_ok"] = all_ok;
}

double operator_norm(const lattice::Matrix& a) {
  const Eigen::VectorXd s = linalg::singular_values(a);
  return s.size() ? s.maxCoeff() : 0.0;
}

void run_locality_check(const RunConfig& c, json& records, Csv& csv, Ledger& ledger, json& summary) {
  const ModelSpec& m = c.model;
  const DisorderSpec d = disorder_for(c, m, c.seeds.front());
  const LatticeGeometry g = LatticeGeometry::square(c.locality.side, m.n_internal(), c.geometry.periodic);
  const LatticeOperator h = models::build_bulk(m, d, g);
  const spectral::EigenDecomposition e = spectral::eig_hermitian(h);
  const spectral::GapReport gap = spectral::spectral_gap(e.eigenvalues);
  if (gap.contains_zero) fail(ErrorCode::gap_violation, "locality-check needs a gapped Hamiltonian");
  const LatticeOperator p = spectral::fermi_projection(g, e);

  auto add_fit = [&](const std::string& name, const std::string& param, const lattice::LocalityFit& f) {
    records.push_back({{"check", name}, {"parameter", param}, {"fit", to_json(f)}});
    csv.add_row({name, param, format_double(f.rate), format_double(f.prefactor), format_double(f.max_residual),
                 lattice::to_string(f.status), ""});
    if (!f.success() && f.status != lattice::FitStatus::numerically_zero) ledger.warn(name + ": fit failed");
  };
  add_fit("hamiltonian", "exponential", lattice::decay_fit(h, lattice::DecayModel::exponential));
  add_fit("fermi-projection", "exponential", lattice::decay_fit(p, lattice::DecayModel::exponential));
  add_fit("d2-fermi-projection", "loc2-exponential",
          lattice::decay_fit(lattice::nc_derivative(2, p), lattice::DecayModel::loc2_exponential, 2));

  // Combes-Thomas: z = E + i y with E inside the lower band
  const double re = c.locality.re_z ? *c.locality.re_z : 0.5 * (e.eigenvalues.minCoeff() + gap.gap_lower);
  std::vector<spectral::cplx> zs;
  for (double y : c.locality.im_z) zs.emplace_back(re, y);
  const spectral::CombesThomasReport ct = spectral::combes_thomas_check(h, zs);
  bool rates_up = true, pref_down = true;
  double worst = 0.0;
  std::vector<std::pair<double, size_t>> order;
  for (size_t i = 0; i < zs.size(); ++i) order.emplace_back(std::abs(zs[i].imag()), i);
  std::sort(order.begin(), order.end());
  for (size_t k = 0; k < order.size(); ++k) {
    const auto& f = ct.fits[order[k].second];
    add_fit("combes-thomas", "im_z=" + format_double(order[k].first), f);
    worst = std::max(worst, f.max_residual);
    if (k > 0) {
      const auto& prev = ct.fits[order[k - 1].second];
      rates_up = rates_up && f.rate > prev.rate;
      pref_down = pref_down && f.prefactor < prev.prefactor;
    }
  }
  const bool ct_ok = ct.all_fits_ok && rates_up && pref_down && worst <= 1.0;
  summary["combes_thomas"] = {{"re_z", re},
                              {"rates_increasing", rates_up},
                              {"prefactors_decreasing", pref_down},
                              {"worst_log_residual", worst},
                              {"rate_constant", ct.rate_constant},
                              {"prefactor_bound", ct.prefactor_bound},
                              {"ok", ct_ok}};
  if (!ct_ok) ledger.warn("Combes-Thomas monotonicity or residual check failed");

  // Helffer-Sjostrand against the eigenbasis
  const LatticeGeometry gs = LatticeGeometry::square(c.locality.hs_side, m.n_internal(), c.geometry.periodic);
  const LatticeOperator hs_h = models::build_bulk(m, d, gs);
  const spectral::GapReport hs_gap = spectral::spectral_gap(hs_h);
  if (hs_gap.contains_zero) fail(ErrorCode::gap_violation, "locality-check: HS instance is gapless");
  const spectral::SwitchFunction sw = spectral::SwitchFunction::from_gap(hs_gap, c.index.window_fraction);
  const LatticeOperator ref = spectral::apply_function_eig(hs_h, [&sw](double x) { return sw.value(x); });
  const spectral::TruncatedSwitch f = spectral::hs_switch(hs_h, sw);
  json hs = json::array();
  std::vector<double> errors;
  for (int k = 0; k < 3; ++k) {
    spectral::HsQuadrature q;
    q.extension_order = c.locality.hs_extension_order;
    q.nodes_x = q.nodes_y = c.locality.hs_nodes * (2 + k) / 2;
    const spectral::HsResult r = spectral::apply_function_hs(hs_h, f, q);
    const double err = operator_norm(r.value.matrix() - ref.matrix());
    errors.push_back(err);
    hs.push_back({{"nodes", q.nodes_x}, {"error", err}, {"resolvents", r.nodes_used}});
    records.push_back({{"check", "helffer-sjostrand"}, {"parameter", "nodes=" + std::to_string(q.nodes_x)}, {"error", err}});
    csv.add_row({"helffer-sjostrand", "nodes=" + std::to_string(q.nodes_x), "", "", "", "", format_double(err)});
  }
  const bool hs_ok = errors[0] <= 1e-6 && errors[1] < errors[0] && errors[2] < errors[1];
  summary["helffer_sjostrand"] = {{"runs", hs}, {"ok", hs_ok}};
  if (!hs_ok) ledger.warn("Helffer-Sjostrand accuracy or refinement monotonicity failed");
}

Csv csv_for(Experiment e, bool tri) {
  switch (e) {
    case Experiment::bulk_index:
      return Csv({{"seed", "disorder seed"},
                  {"disorder_amplitude", "disorder half-width W, energy units"},
                  {"gap_lower", "upper edge of the spectrum below 0"},
                  {"gap_upper", "lower edge of the spectrum above 0"},
                  {"flux_raw", "restricted Fedosov trace of PU*P+1-P"},
                  {"flux_index", "rounded flux-route Chern index"},
                  {"corner_raw", "restricted Fedosov trace of W1(P L2 P)"},
                  {"corner_index", "rounded corner-route Chern index"},
                  {"kubo_raw", "2 pi Im tr(chi P [d1 P, d2 P])"},
                  {"kubo_index", "rounded Kubo Chern index"},
                  {"z2", tri ? "localized near-kernel count mod 2 of the flux operator" : "unused for Chern models"},
                  {"oracle", tri ? "Fu-Kane Pfaffian Z2 of the clean model" : "Berry-curvature Chern number"},
                  {"status", "convergence of the primary index"}});
    case Experiment::edge_index:
      return Csv({{"seed", "disorder seed"},
                  {"boundary", "boundary condition"},
                  {"disorder_amplitude", "disorder half-width W, energy units"},
                  {"raw", tri ? "localized mass sum of the near-kernel cluster" : "lower-half Fedosov trace"},
                  {"index", tri ? "edge Z2" : "edge Chern index"},
                  {"status", "index convergence"},
                  {"diagnostic_status", "LOC2 fit of exp(-2 pi i g(H)) - 1"},
                  {"diagnostic_rate", "decay rate of that fit, per site"},
                  {"oracle", tri ? "edge spectral flow of the clean cylinder" : "Berry-curvature Chern number"}});
    case Experiment::bec_check:
      return Csv({{"seed", "disorder seed"},
                  {"boundary", "boundary condition"},
                  {"disorder_amplitude", "disorder half-width W, energy units"},
                  {"bulk_direct", "bulk index from the flux operator"},
                  {"bulk_transported", "clean oracle value carried along a gapped path"},
                  {"edge", "edge index"},
                  {"agree", "1 when all three agree"}});
    case Experiment::phase_scan:
      return Csv({{"mass", "model mass u"},
                  {"gap_lower", "upper edge of the spectrum below 0"},
                  {"gap_upper", "lower edge of the spectrum above 0"},
                  {"gapless", "1 when the gap at 0 is closed"},
                  {"raw", "raw value of the primary bulk index"},
                  {"index", "primary bulk index"},
                  {"status", "index convergence"},
                  {"oracle", tri ? "Fu-Kane Pfaffian Z2" : "Berry-curvature Chern number"}});
    case Experiment::mu_scan:
      return Csv({{"mu", "Fermi level"},
                  {"in_spectrum", "1 when mu lies in the spectrum at gap resolution 0.05"},
                  {"on_eigenvalue", "1 when mu is within 1e-9 of an eigenvalue"},
                  {"sigma_min", "smallest singular value of F_mu"},
                  {"fredholm_gap", "singular value just above the near-kernel cluster"},
                  {"cluster_size", "near-kernel cluster size"},
                  {"raw", "raw index value"},
                  {"index", "index value"},
                  {"status", "index convergence"}});
    case Experiment::homotopy_check:
      return Csv({{"path", "path label"},
                  {"t", "path parameter"},
                  {"fredholm_gap", "singular value just above the near-kernel cluster of W1 A(t)"},
                  {"cluster_size", "near-kernel cluster size"},
                  {"gap_width", "spectral gap width of H(t) (physical path)"},
                  {"loc2_status", "LOC2 fit of A(t)^2 - A(t)"},
                  {"index", "index at t"},
                  {"status", "index convergence, or gap state for the physical path"},
                  {"flagged", "1 when the sample is flagged"},
                  {"theta_odd_residual", "Theta-odd residual of W1 A(t)"}});
    case Experiment::locality_check:
      return Csv({{"check", "quantity"},
                  {"parameter", "model or spectral parameter"},
                  {"rate", "fitted decay rate, per site"},
                  {"prefactor", "fitted prefactor"},
                  {"max_residual", "worst log residual of the fit"},
                  {"status", "fit status"},
                  {"error", "operator-norm error against the eigenbasis"}});
    case Experiment::selfcheck:
      break;
  }
  return Csv({{"check", "check name"},
              {"module", "module"},
              {"invariant", "invariant"},
              {"seed", "instance seed"},
              {"passed", "1 when the check passed"},
              {"detail", "values compared"}});
}

}  // namespace

RunOutput run(const RunConfig& c) {
  c.validate();
  if (c.experiment == Experiment::selfcheck) return selfcheck(c);
  const auto t0 = Clock::now();
  Ledger ledger;
  json records = json::array();
  json summary = json::object();
  Csv csv = csv_for(c.experiment, c.model.time_reversal_invariant());
  try {
    switch (c.experiment) {
      case Experiment::bulk_index: run_bulk_index(c, records, csv, ledger); break;
      case Experiment::edge_index: run_edge_index(c, records, csv, ledger); break;
      case Experiment::bec_check: run_bec_check(c, records, csv, ledger, summary); break;
      case Experiment::phase_scan: run_phase_scan(c, records, csv, ledger); break;
      case Experiment::mu_scan: run_mu_scan(c, records, csv, ledger, summary); break;
      case Experiment::homotopy_check: run_homotopy_check(c, records, csv, ledger, summary); break;
      case Experiment::locality_check: run_locality_check(c, records, csv, ledger, summary); break;
      case Experiment::selfcheck: break;
    }
  } catch (const Error& e) {
    ledger.error(provenance(c, c.seeds.front()), e);
  }
  RunOutput out;
  out.exit_code = ledger.exit_code();
  out.result = {{"tool", "fredlab"},
                {"version", kVersion},
                {"experiment", config::to_string(c.experiment)},
                {"config_hash", config::hash(c)},
                {"config", json::parse(config::canonical(c))},
                {"rng", {{"disorder", kDisorderRng}, {"sampling", kSampleRng}}},
                {"records", records},
                {"summary", summary},
                {"warnings", ledger.warnings},
                {"errors", ledger.errors},
                {"exit_code", out.exit_code}};
  out.csv = csv.str();
  out.timing = {{"experiment", config::to_string(c.experiment)},
                {"config_hash", config::hash(c)},
                {"wall_seconds", seconds_since(t0)},
                {"workers", c.workers}};
  std::ostringstream s;
  s << config::to_string(c.experiment) << ": " << csv.rows() << " rows, " << ledger.warnings.size() << " warnings, "
    << ledger.errors.size() << " errors, exit " << out.exit_code;
  out.summary = s.str();
  return out;
}

void write_outputs(const RunConfig& c, const RunOutput& out, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::io, "cannot create output directory '" + dir + "': " + ec.message());
  const std::string stem = c.output.stem.empty() ? config::to_string(c.experiment) : c.output.stem;
  auto write = [&](const std::string& name, const std::string& text) {
    const auto path = std::filesystem::path(dir) / name;
    std::ofstream os(path, std::ios::binary);
    if (!os) fail(ErrorCode::io, "cannot write '" + path.string() + "'");
    os << text;
    if (!os) fail(ErrorCode::io, "write failed for '" + path.string() + "'");
  };
  write(stem + ".json", out.result.dump(2) + "\n");
  write(stem + ".csv", out.csv);
  write(stem + ".timing.json", out.timing.dump(2) + "\n");
}

}  // namespace fredlab::experiments
