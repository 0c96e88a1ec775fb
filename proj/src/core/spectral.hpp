#pragma once

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "core/lattice.hpp"

namespace fredlab::spectral {

using lattice::cplx;
using lattice::LatticeGeometry;
using lattice::LatticeOperator;
using lattice::Matrix;

struct EigenDecomposition {
  Eigen::VectorXd eigenvalues;
  Matrix eigenvectors;
};

EigenDecomposition eig_hermitian(const LatticeOperator& a);
// max-norm residuals of A V - V diag(lambda) and V^dagger V - 1
std::pair<double, double> eig_residuals(const Matrix& a, const EigenDecomposition& e);

struct GapReport {
  double gap_lower = 0.0;
  double gap_upper = 0.0;
  bool contains_zero = true;
  double width() const { return gap_upper - gap_lower; }
};

inline constexpr double kGapResolution = 0.05;

GapReport spectral_gap(const Eigen::VectorXd& eigenvalues, double around = 0.0, double resolution = kGapResolution);
GapReport spectral_gap(const LatticeOperator& h, double around = 0.0, double resolution = kGapResolution);

LatticeOperator fermi_projection(const LatticeOperator& h, double mu = 0.0);
LatticeOperator fermi_projection(const LatticeGeometry& g, const EigenDecomposition& e, double mu = 0.0);

// Truncated Taylor series: c[k] = f^(k)(x) / k!
class Jet {
 public:
  static constexpr int kMaxOrder = 10;
  explicit Jet(int order = kMaxOrder, double value = 0.0);
  static Jet variable(double x, int order);

  int order() const { return order_; }
  double coeff(int k) const { return c_[k]; }
  double& coeff(int k) { return c_[k]; }
  double derivative(int k) const;

  Jet operator+(const Jet& o) const;
  Jet operator-(const Jet& o) const;
  Jet operator*(const Jet& o) const;
  Jet operator*(double s) const;
  Jet reciprocal() const;
  Jet exp() const;

 private:
  int order_;
  std::array<double, kMaxOrder + 1> c_{};
};

class SmoothFunction {
 public:
  virtual ~SmoothFunction() = default;
  virtual double value(double x) const = 0;
  virtual Jet jet(double x, int order) const = 0;
  // sorted panel boundaries; the function vanishes outside [front, back] when compact
  virtual std::vector<double> breakpoints() const = 0;
  virtual bool compact() const { return true; }
};

// g(E) = 1 - int_a^E phi / int_a^b phi with phi(t) = exp(-1/((t-a)(b-t)))
class SwitchFunction : public SmoothFunction {
 public:
  SwitchFunction(double a, double b);
  // central `fraction` of a gap
  static SwitchFunction from_gap(const GapReport& gap, double fraction = 0.8);

  double a() const { return a_; }
  double b() const { return b_; }
  double value(double e) const override;
  Jet jet(double e, int order) const override;
  std::vector<double> breakpoints() const override { return {a_, b_}; }
  bool compact() const override { return false; }
  double bump(double t) const;
  Jet bump_jet(double t, int order) const;

 private:
  double a_;
  double b_;
  double norm_;
};

// g(E) times a smooth cutoff rising from 0 at e1 to 1 at e0 < a, compactly supported
class TruncatedSwitch : public SmoothFunction {
 public:
  TruncatedSwitch(SwitchFunction g, double e1, double e0);
  double value(double e) const override;
  Jet jet(double e, int order) const override;
  std::vector<double> breakpoints() const override;

 private:
  SwitchFunction g_;
  SwitchFunction rise_;
};

class ZeroFunction : public SmoothFunction {
 public:
  double value(double) const override { return 0.0; }
  Jet jet(double, int order) const override { return Jet(order); }
  std::vector<double> breakpoints() const override { return {0.0, 1.0}; }
};

LatticeOperator apply_function_eig(const LatticeOperator& h, const std::function<double(double)>& f);
LatticeOperator apply_function_eig(const LatticeGeometry& g, const EigenDecomposition& e,
                                   const std::function<double(double)>& f);
LatticeOperator apply_function_eig_complex(const LatticeGeometry& g, const EigenDecomposition& e,
                                           const std::function<cplx(double)>& f);

struct HsQuadrature {
  int extension_order = 3;
  double delta = 0.0;  // <= 0: half the width of the gap around 0
  int nodes_x = 64;    // Gauss-Legendre nodes per x panel
  int nodes_y = 64;    // Gauss-Legendre nodes per y panel
  std::optional<double> tolerance;
};

struct HsResult {
  LatticeOperator value;
  long nodes_used = 0;
  std::optional<double> residual_vs_eig;
  bool diverged = false;
};

HsResult apply_function_hs(const LatticeOperator& h, const SmoothFunction& f, const HsQuadrature& q = {});

// g with a cutoff placed below a Gershgorin bound of H, suitable for apply_function_hs
TruncatedSwitch hs_switch(const LatticeOperator& h, const SwitchFunction& g);

// Gauss-Legendre nodes and weights on [-1, 1]
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int n);

Matrix resolvent(const LatticeOperator& h, cplx z);

struct CombesThomasReport {
  std::vector<cplx> z;
  std::vector<lattice::LocalityFit> fits;
  double rate_constant = 0.0;    // min over z of rate / |Im z|
  double prefactor_bound = 0.0;  // max over z of prefactor * |Im z|
  bool all_fits_ok = false;
};

CombesThomasReport combes_thomas_check(const LatticeOperator& h, const std::vector<cplx>& z_list);

}  // namespace fredlab::spectral
