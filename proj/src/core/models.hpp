#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "core/lattice.hpp"
#include "core/symmetry.hpp"

namespace fredlab::models {

using lattice::LatticeGeometry;
using lattice::LatticeOperator;
using lattice::Matrix;

enum class Family { qwz, bhz, atomic_trivial };

const char* to_string(Family f);
Family family_from_string(const std::string& s);

struct ModelSpec {
  Family family = Family::qwz;
  double mass = -1.0;
  // on-site sigma_y (x) tau_y coupling between the BHZ blocks; preserves time reversal
  double inter_block = 0.0;

  int n_internal() const;
  bool time_reversal_invariant() const { return family != Family::qwz; }
};

struct DisorderSpec {
  double amplitude = 0.0;
  std::uint64_t seed = 0;
  double at(int x1, int x2) const;
};

// <x + e_j| H |x> = t_j, <x|H|x> = onsite
struct Hoppings {
  Matrix onsite;
  Matrix t1;
  Matrix t2;
};

Hoppings hoppings(const ModelSpec& model);

LatticeOperator build_on(const ModelSpec& model, const DisorderSpec& disorder, const LatticeGeometry& g);
LatticeOperator build_bulk(const ModelSpec& model, const DisorderSpec& disorder, const LatticeGeometry& g);

struct BoundaryCondition {
  enum class Kind { dirichlet, loc2_perturbation };
  Kind kind = Kind::dirichlet;
  std::optional<LatticeOperator> perturbation;
  int depth = 1;
  int range = 1;
};

// finite-depth, range-1 boundary term: amplitude times the model's mass matrix and x1 hopping on rows x2 < depth
LatticeOperator boundary_perturbation(const ModelSpec& model, const LatticeGeometry& strip, double amplitude,
                                      int depth = 1);
void validate_perturbation(const BoundaryCondition& bc, const LatticeGeometry& strip);

LatticeOperator build_edge(const ModelSpec& model, const DisorderSpec& disorder, const LatticeGeometry& strip,
                           const BoundaryCondition& bc = {});

std::pair<LatticeOperator, symmetry::TimeReversal> doubled_model(const LatticeOperator& h,
                                                                  const symmetry::TimeReversal& theta);

}  // namespace fredlab::models
