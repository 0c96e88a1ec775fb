#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "core/indices.hpp"
#include "core/lattice.hpp"
#include "core/spectral.hpp"
#include "core/symmetry.hpp"

namespace fredlab::homotopy {

using lattice::LatticeOperator;
using lattice::LocalityFit;
using lattice::Region;

struct HomotopyPath {
  std::string label;
  std::function<LatticeOperator(double)> generator;
  std::vector<double> samples;
  // e.g. Lambda_2 (g(Lambda_2 H Lambda_2) - g(H)) Lambda_2 for the truncation path
  std::optional<LocalityFit> supporting_fit;
};

std::vector<double> default_samples(int n = 21);

HomotopyPath path_corner_flatten(const LatticeOperator& h, const spectral::SwitchFunction& g);
HomotopyPath path_truncate_flatten(const LatticeOperator& h, const spectral::SwitchFunction& g);
// h: bulk Hamiltonian on the matching geometry of h_hat's strip
HomotopyPath path_boundary_conditions(const LatticeOperator& h, const LatticeOperator& h_hat,
                                      const spectral::SwitchFunction& g);

struct PhysicalPath {
  std::string label;
  std::function<LatticeOperator(double)> hamiltonian;
  std::vector<double> samples;
};

PhysicalPath path_physical(const LatticeOperator& h0, const LatticeOperator& h1);

struct TransportReport {
  std::vector<double> t;
  std::vector<spectral::GapReport> gaps;
  double min_gap_width = 0.0;
  bool refused = true;
  std::optional<long> value;
  std::string reason;
};

TransportReport transport(const PhysicalPath& path, long value_at_start, double min_gap_width = 0.05,
                          int workers = 1);

struct IndexMethod {
  enum class Kind { fedosov, z2_count };
  Kind kind = Kind::fedosov;
  Region region;
  indices::FedosovOptions fedosov;
  indices::KernelPolicy policy;
};

struct Thresholds {
  double fredholm_gap = 0.05;
  int max_refinements = 2;
  int workers = 1;
  std::optional<symmetry::TimeReversal> theta;
};

struct SampleRecord {
  double t = 0.0;
  double fredholm_gap = 0.0;
  int cluster_size = 0;
  LocalityFit loc2_fit;
  std::optional<indices::IndexResult> index;
  std::optional<double> theta_odd_residual;
  bool flagged = false;
  std::string note;
};

enum class Verdict { index_constant, violation, withheld };
const char* to_string(Verdict v);

struct HomotopyReport {
  std::string label;
  std::vector<SampleRecord> samples;
  Verdict verdict = Verdict::withheld;
  long reference_value = 0;
  bool gaps_ok = false;
  bool loc2_ok = false;
  int flagged = 0;
  double min_fredholm_gap = 0.0;
  std::optional<LocalityFit> supporting_fit;
};

HomotopyReport monitor(const HomotopyPath& path, const IndexMethod& method, const Thresholds& thresholds = {});

}  // namespace fredlab::homotopy
