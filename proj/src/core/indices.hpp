#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "core/lattice.hpp"
#include "core/linalg.hpp"
#include "core/spectral.hpp"

namespace fredlab::indices {

using lattice::LatticeGeometry;
using lattice::LatticeOperator;
using lattice::Matrix;
using lattice::Region;

enum class IndexKind { integer, z2 };
enum class IndexStatus { converged, not_converged, ambiguous };

const char* to_string(IndexStatus s);

struct IndexResult {
  std::string method;
  IndexKind kind = IndexKind::integer;
  double raw = 0.0;
  long value = 0;
  int n_used = 0;
  std::vector<std::pair<int, double>> history;
  double distance_to_integer = 0.0;
  IndexStatus status = IndexStatus::not_converged;
  double imaginary_residue = 0.0;
  std::vector<std::string> warnings;

  bool converged() const { return status == IndexStatus::converged; }
  long z2() const { return ((value % 2) + 2) % 2; }
};

LatticeOperator project_compress(const LatticeOperator& q, const LatticeOperator& a);

LatticeOperator winding_op(const LatticeOperator& a);
LatticeOperator winding_op(const LatticeGeometry& g, const spectral::EigenDecomposition& e);

// unitary used by the flux route: the adjoint of flux_phase, orienting the index like the Berry oracle
LatticeOperator flux_route_unitary(const LatticeGeometry& g);
LatticeOperator bulk_flux_operator(const LatticeOperator& p, const LatticeOperator& u);
LatticeOperator bulk_corner_operator(const LatticeOperator& p);

// disk of radius fraction * side around the flux point
Region default_bulk_region(const LatticeGeometry& g, double fraction = 0.25);

struct FedosovOptions {
  int n_start = 8;
  int n_max = 4096;
  double tol = 0.05;
  double step_tol = 0.01;
  std::optional<Region> region;
};

IndexResult fredholm_index_fedosov(const LatticeOperator& a, const FedosovOptions& options = {});
IndexResult fedosov_from_svd(const linalg::Svd& svd, const Eigen::VectorXd* weights, const FedosovOptions& options);

double chern_kubo(const LatticeOperator& p, const std::optional<Region>& region = std::nullopt);
IndexResult chern_kubo_index(const LatticeOperator& p, const std::optional<Region>& region, double tol = 0.05);

struct TraceLimitOptions {
  std::vector<int> schedule;  // empty: 1, 2, 4, ..., 4096
  double tol = 0.01;
  double integer_tol = 0.05;
};

IndexResult kernel_dim_trace_limit(const Matrix& a, const TraceLimitOptions& options = {});

struct KernelPolicy {
  enum class Kind { absolute, relative_gap };
  Kind kind = Kind::relative_gap;
  double tau = 1e-6;
  double below = 0.5;
  double min_gap_ratio = 10.0;
};

struct SingularSpectrum {
  Eigen::VectorXd values;  // ascending
  Matrix vectors;          // right singular vectors of the cluster
  Matrix left_vectors;     // left singular vectors of the cluster
  int cluster_size = 0;
  double threshold = 0.0;
  double gap_ratio = 0.0;
  bool ambiguous = false;
  // first singular value above the cluster, sigma_min when ambiguous
  double fredholm_gap = 0.0;
};

SingularSpectrum near_kernel_modes(const Matrix& a, const KernelPolicy& policy = {});
SingularSpectrum near_kernel_from_svd(const linalg::Svd& svd, const KernelPolicy& policy = {});

inline constexpr double kAmbiguousLow = 0.4;
inline constexpr double kAmbiguousHigh = 0.6;

IndexResult z2_count_from_spectrum(const SingularSpectrum& s, const Eigen::VectorXd& weights);
IndexResult z2_localized_count(const LatticeOperator& a, const Region& region, const KernelPolicy& policy = {});

LatticeOperator edge_operator(const LatticeOperator& h_hat, const spectral::SwitchFunction& g,
                              const spectral::GapReport& bulk_gap);
LatticeOperator edge_operator(const LatticeOperator& h_hat, const spectral::EigenDecomposition& e,
                              const spectral::SwitchFunction& g, const spectral::GapReport& bulk_gap);
// LOC2 fit of exp(-2 pi i g(H_hat)) - 1, confined in direction 2
lattice::LocalityFit edge_diagnostic(const LatticeOperator& h_hat, const spectral::EigenDecomposition& e,
                                     const spectral::SwitchFunction& g);

IndexResult edge_chern(const LatticeOperator& f_hat, std::optional<Region> region = std::nullopt,
                       FedosovOptions options = {});
IndexResult edge_z2(const LatticeOperator& f_hat, std::optional<Region> region = std::nullopt,
                    const KernelPolicy& policy = {});

struct FermiScanOptions {
  bool z2 = false;
  std::optional<Region> region;
  FedosovOptions fedosov;
  KernelPolicy policy;
};

struct FermiScanRecord {
  double mu = 0.0;
  spectral::GapReport gap;
  bool on_eigenvalue = false;
  double sigma_min = 0.0;
  double fredholm_gap = 0.0;
  int cluster_size = 0;
  std::optional<IndexResult> index;
  std::string note;
};

std::vector<FermiScanRecord> fermi_scan(const LatticeOperator& h, const std::vector<double>& mu_grid,
                                        const FermiScanOptions& options = {});

}  // namespace fredlab::indices
