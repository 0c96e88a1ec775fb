#pragma once

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "core/error.hpp"

namespace fredlab::lattice {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

enum class GeometryKind { bulk, half_space };

struct Interval {
  int lo = 0;
  int hi = -1;
  int size() const { return hi - lo + 1; }
  bool contains(int x) const { return x >= lo && x <= hi; }
  bool operator==(const Interval&) const = default;
};

struct LatticeGeometry {
  GeometryKind kind = GeometryKind::bulk;
  Interval x1;
  Interval x2;
  int n_internal = 1;
  std::array<double, 2> origin_offset{0.5, 0.5};
  std::array<bool, 2> periodic{false, false};

  // side x side square centered on the origin, ranges [-side/2, side/2 - 1]
  static LatticeGeometry square(int side, int n_internal, bool periodic = true);
  // length1 x length2, ranges [-length/2, length/2 - 1]
  static LatticeGeometry rectangle(int length1, int length2, int n_internal, bool periodic = true);
  // half-space strip x1 in [-length/2, length/2 - 1], x2 in [0, width - 1]
  static LatticeGeometry strip(int length, int width, int n_internal, bool periodic_x1 = false);
  // bulk geometry sharing x1 with a strip, x2 in [-width, width - 1], open in x2
  static LatticeGeometry matching_bulk(const LatticeGeometry& strip);

  void validate() const;
  const Interval& range(int axis) const;
  int sites() const { return x1.size() * x2.size(); }
  Index dim() const { return static_cast<Index>(sites()) * n_internal; }
  bool operator==(const LatticeGeometry&) const = default;
  std::string describe() const;
};

struct Site {
  int x1 = 0;
  int x2 = 0;
};

Index site_index(const LatticeGeometry& g, int x1, int x2, int s);
Site site_at(const LatticeGeometry& g, Index site_number);

class LatticeOperator {
 public:
  LatticeOperator(LatticeGeometry geometry, Matrix matrix);

  // symmetrizes after checking that the input is Hermitian up to roundoff
  static LatticeOperator hermitian_from(LatticeGeometry geometry, Matrix matrix);
  static LatticeOperator identity(const LatticeGeometry& geometry);
  static LatticeOperator zero(const LatticeGeometry& geometry);
  static LatticeOperator diagonal(const LatticeGeometry& geometry, const Eigen::VectorXcd& d);

  const LatticeGeometry& geometry() const { return geometry_; }
  const Matrix& matrix() const { return matrix_; }
  bool hermitian() const { return hermitian_; }
  Index dim() const { return matrix_.rows(); }
  double max_abs() const;
  Matrix block(Site row, Site col) const;
  LatticeOperator adjoint() const;
  LatticeOperator with_matrix(Matrix m) const { return LatticeOperator(geometry_, std::move(m)); }

 private:
  LatticeGeometry geometry_;
  Matrix matrix_;
  bool hermitian_ = false;
};

void require_same_geometry(const LatticeOperator& a, const LatticeOperator& b, const char* where);

LatticeOperator operator*(const LatticeOperator& a, const LatticeOperator& b);
LatticeOperator operator+(const LatticeOperator& a, const LatticeOperator& b);
LatticeOperator operator-(const LatticeOperator& a, const LatticeOperator& b);
LatticeOperator operator*(cplx c, const LatticeOperator& a);

double max_norm_diff(const LatticeOperator& a, const LatticeOperator& b);

// Test fixture hooks for mutation checks; thread local, off by default.
struct FaultInjection {
  bool flip_flux_sign = false;
  bool flip_step_convention = false;
};
FaultInjection& faults();

class ScopedFaults {
 public:
  explicit ScopedFaults(FaultInjection f) : saved_(faults()) { faults() = f; }
  ~ScopedFaults() { faults() = saved_; }
  ScopedFaults(const ScopedFaults&) = delete;
  ScopedFaults& operator=(const ScopedFaults&) = delete;

 private:
  FaultInjection saved_;
};

double heaviside(int x);

Eigen::VectorXd position_diagonal(const LatticeGeometry& g, int axis);
Eigen::VectorXd step_diagonal(const LatticeGeometry& g, int axis);
Eigen::VectorXcd flux_phase_diagonal(const LatticeGeometry& g);

LatticeOperator position_multiplier(const LatticeGeometry& g, int axis, const std::function<cplx(int)>& f);
LatticeOperator step_function(const LatticeGeometry& g, int axis);
LatticeOperator position_operator(const LatticeGeometry& g, int axis);
LatticeOperator flux_phase(const LatticeGeometry& g);

LatticeOperator nc_derivative(int axis, const LatticeOperator& a);
Matrix nc_derivative_matrix(const LatticeGeometry& g, int axis, const Matrix& a);

void require_compatible(const LatticeGeometry& half, const LatticeGeometry& bulk);
// bulk basis index of every half-space basis index
std::vector<Index> injection_map(const LatticeGeometry& half, const LatticeGeometry& bulk);
Matrix injection(const LatticeGeometry& half, const LatticeGeometry& bulk);
LatticeOperator embed_half_space(const LatticeOperator& half_op, const LatticeGeometry& bulk,
                                 std::optional<cplx> filler = std::nullopt);
LatticeOperator restrict_half_space(const LatticeOperator& a, const LatticeGeometry& half);

// Spatial 0/1 weights used to restrict traces and localization masses.
struct Region {
  enum class Kind { everywhere, disk, box, x2_below };
  Kind kind = Kind::everywhere;
  double cx = 0.0;
  double cy = 0.0;
  double radius = 0.0;
  double half_width1 = 0.0;
  double half_width2 = 0.0;
  double x2_bound = 0.0;

  static Region all() { return Region{}; }
  static Region disk(double cx, double cy, double radius);
  // |x1 - cx| <= hw1 and |x2 - cy| <= hw2
  static Region box(double cx, double cy, double hw1, double hw2);
  static Region x2_below(double bound);
  // disk around the flux point with radius fraction * side
  static Region flux_disk(const LatticeGeometry& g, double fraction);
  // box around the flux point with half widths fraction * length per axis
  static Region flux_box(const LatticeGeometry& g, double fraction);
  // x2 < width / 2
  static Region lower_half(const LatticeGeometry& strip);

  bool contains(const Site& s) const;
  Eigen::VectorXd weights(const LatticeGeometry& g) const;
  std::string describe() const;
};

enum class DecayModel { exponential, polynomial, loc2_exponential, loc2_polynomial };
enum class FitStatus { ok, numerically_zero, fit_failed };

const char* to_string(DecayModel m);
const char* to_string(FitStatus s);

struct LocalityFit {
  DecayModel model = DecayModel::exponential;
  double rate = 0.0;
  double prefactor = 0.0;
  double max_residual = 0.0;
  std::optional<int> confinement_direction;
  FitStatus status = FitStatus::fit_failed;
  int points = 0;
  bool success() const { return status == FitStatus::ok; }
};

struct DecayFitOptions {
  int margin = 2;
  double floor = 1e-15;
};

// distance from the nearest confinement wall along an axis (step wall at -1/2 for
// bulk geometries, lattice ends or periodic seam otherwise)
double confinement_distance(const LatticeGeometry& g, int axis, int x);
double site_distance(const LatticeGeometry& g, const Site& a, const Site& b);

LocalityFit decay_fit(const LatticeOperator& a, DecayModel model,
                      std::optional<int> confinement_direction = std::nullopt,
                      const DecayFitOptions& options = {});

double block_trace_norm(const Matrix& m, Index row, Index col, int n);

}  // namespace fredlab::lattice
