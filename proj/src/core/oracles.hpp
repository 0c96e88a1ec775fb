#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/lattice.hpp"
#include "core/models.hpp"

namespace fredlab::oracles {

using lattice::Matrix;
using models::DisorderSpec;
using models::ModelSpec;

struct BlochGrid {
  int n_k = 64;
  ModelSpec model;
  void validate() const;
};

Matrix bloch_hamiltonian(const ModelSpec& model, double k1, double k2);
// rejects disordered specs
Matrix bloch_hamiltonian(const ModelSpec& model, const DisorderSpec& disorder, double k1, double k2);

// smallest |E| over the grid, i.e. half the clean spectral gap around 0
double bloch_half_gap(const ModelSpec& model, int n_k = 128);

struct ChernResult {
  long value = 0;
  double raw = 0.0;
  double quantization_residual = 0.0;
  double min_gap = 0.0;
};

// lattice link-variable curvature of the lower N/2 bands
ChernResult chern_berry_detail(const BlochGrid& grid);
long chern_berry(const ModelSpec& model, int n_k = 64);

struct PfaffianOptions {
  int n_k1 = 96;  // k1 grid per line
  int n_k2 = 48;  // k2 grid for the branch continuation from (k1, k2) = (-pi, 0)
  std::optional<std::uint64_t> gauge_seed;  // random frame rotations at every grid point
};

struct Z2PfaffianResult {
  int value = 0;
  double delta[2][2] = {{0, 0}, {0, 0}};  // delta[k1 = 0|pi][k2 = 0|pi]
  double min_pfaffian = 0.0;
};

Z2PfaffianResult z2_pfaffian_trim_detail(const ModelSpec& model, const PfaffianOptions& options = {});
int z2_pfaffian_trim(const ModelSpec& model, const PfaffianOptions& options = {});

struct SpectralFlowOptions {
  std::optional<double> mu;  // default: a quarter of the clean half gap
  int n_k = 241;
};

struct SpectralFlowResult {
  int value = 0;
  double mu = 0.0;
  int lower_edge_crossings = 0;
  int upper_edge_crossings = 0;
  std::vector<double> crossing_k;
};

Matrix cylinder_hamiltonian(const ModelSpec& model, int width, double k1);
SpectralFlowResult edge_spectral_flow_detail(const ModelSpec& model, int width,
                                             const SpectralFlowOptions& options = {});
int edge_spectral_flow(const ModelSpec& model, int width, const SpectralFlowOptions& options = {});

struct KernelCount {
  int value = 0;
  std::vector<std::string> warnings;
};

KernelCount brute_force_kernel(const Matrix& a, double tau);

}  // namespace fredlab::oracles
