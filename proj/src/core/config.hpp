#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/models.hpp"

namespace fredlab::config {

using json = nlohmann::json;

enum class Experiment { bulk_index, edge_index, bec_check, phase_scan, mu_scan, homotopy_check, locality_check, selfcheck };

const char* to_string(Experiment e);
Experiment experiment_from_string(const std::string& s);

struct DisorderConfig {
  double amplitude = 0.0;               // energy units of the hopping
  std::optional<double> gap_fraction;  // overrides amplitude with fraction * clean gap width
};

struct GeometryConfig {
  int side = 16;          // bulk square side, sites
  int strip_length = 16;  // strip extent in x1, sites
  int strip_width = 8;    // strip extent in x2, sites
  bool periodic = true;   // bulk torus
  bool strip_periodic_x1 = false;
};

struct IndexConfig {
  double window_fraction = 0.8;  // switch window as a fraction of the spectral gap
  double fedosov_tol = 0.05;
  double fedosov_step_tol = 0.01;
  int fedosov_n_start = 8;
  int fedosov_n_max = 4096;
  double fredholm_gap_threshold = 0.05;
  double localization_radius_fraction = 0.25;  // disk radius in units of the side length
  std::string kernel_policy = "relative-gap";  // or "absolute"
  double kernel_tau = 1e-6;
  double kernel_below = 0.5;
  double min_gap_ratio = 10.0;
};

struct BoundaryConfig {
  std::vector<std::string> kinds{"dirichlet"};  // dirichlet | loc2-perturbation
  double amplitude = 0.5;                       // energy units
  int depth = 1;                                // rows
};

struct ScanConfig {
  double from = -3.0;
  double to = 3.0;
  double step = 0.5;
};

struct MuScanConfig {
  std::optional<double> from;  // default: below the spectrum
  std::optional<double> to;    // default: 0
  int count = 40;
};

struct HomotopyConfig {
  std::vector<std::string> paths{"corner-flatten", "truncate-flatten", "boundary-conditions", "physical", "adversarial"};
  int samples = 21;
  int max_refinements = 2;
  double adversarial_mass_to = -3.0;  // mass at t = 1 of the gap-closing path
  // bulk paths run on an x1_length x geometry.side torus
  int x1_length = 32;
};

struct LocalityConfig {
  std::vector<double> im_z{0.25, 0.5, 1.0};
  std::optional<double> re_z;  // default: middle of the lower band
  int side = 12;
  int hs_side = 8;
  int hs_extension_order = 3;
  int hs_nodes = 64;
};

struct OracleConfig {
  int n_k = 64;
  int strip_width = 24;
};

struct OutputConfig {
  std::string dir = "out";
  std::string stem;  // default: experiment name
};

struct RunConfig {
  Experiment experiment = Experiment::bulk_index;
  models::ModelSpec model;
  DisorderConfig disorder;
  GeometryConfig geometry;
  IndexConfig index;
  BoundaryConfig boundary;
  ScanConfig scan;
  MuScanConfig mu_scan;
  HomotopyConfig homotopy;
  LocalityConfig locality;
  OracleConfig oracle;
  std::vector<std::uint64_t> seeds{0};
  int workers = 1;
  OutputConfig output;

  void validate() const;
};

// JSON with comments; unknown keys and wrong types are schema errors
RunConfig parse(const std::string& text);
RunConfig load(const std::string& path);
json to_json(const RunConfig& c);
std::string canonical(const RunConfig& c);
// FNV-1a 64 over the canonical dump
std::string hash(const RunConfig& c);

std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace fredlab::config
