#pragma once

#include <functional>
#include <string>
#include <vector>

#include "roughdelay/grid.hpp"

namespace roughdelay {

/// Diffusion/drift coefficient bundle. sigma maps R^d to d x m matrices;
/// derivative tensors are row-major with the differentiation index last:
///   dsigma[(i*m + j)*d + k]          = d sigma_ij / d x_k
///   d2sigma[((i*m + j)*d + k)*d + l] = d^2 sigma_ij / d x_k d x_l
/// The sup/lambda constants are declared bounds; validate_hypotheses
/// cross-checks them against lattice samples.
struct CoefficientModel {
  std::string name;
  std::size_t d = 1;
  std::size_t m = 1;
  double lambda = 0.9;

  std::function<void(std::span<const double>, std::span<double>)> sigma;
  std::function<void(std::span<const double>, std::span<double>)> dsigma;
  std::function<void(std::span<const double>, std::span<double>)> d2sigma;
  std::function<void(double, std::span<const double>, std::span<double>)> b;

  double sup_sigma = 0.0;
  double sup_dsigma = 0.0;
  double sup_d2sigma = 0.0;
  double lambda_norm_dsigma = 0.0;
  double lambda_norm_d2sigma = 0.0;
  double sup_b = 0.0;
  std::function<double(double)> lipschitz_L;  // N -> L_N

  bool sigma_bounded = true;
  bool b_bounded = true;
  bool sigma_is_constant = false;

  bool satisfies_h3() const { return sigma_bounded && b_bounded; }

  void eval_sigma(std::span<const double> x, std::span<double> out) const { sigma(x, out); }
  void eval_dsigma(std::span<const double> x, std::span<double> out) const { dsigma(x, out); }
  void eval_b(double t, std::span<const double> x, std::span<double> out) const { b(t, x, out); }
};

/// Optional drift attached to a builtin: b(t, x) = b_const + b_linear * x.
struct DriftSpec {
  std::vector<double> b_const;   // length d (empty = zero)
  std::vector<double> b_linear;  // d x d row-major (empty = zero)
};

/// Builtin zoo: tanh_diag | sine | constant | affine_test. constant takes
/// the diagonal value c; affine_test is sigma(x) = diag(x), deliberately
/// unbounded (flagged as violating the boundedness hypothesis) so that
/// closed-form oracles are available.
CoefficientModel builtin_model(const std::string& name, std::size_t d,
                               std::size_t m, double lambda,
                               double constant_c = 1.0,
                               const DriftSpec& drift = {});

struct LatticeSpec {
  double lo = -10.0;
  double hi = 10.0;
  std::size_t points = 401;  // per axis (component-wise diagonal lattice)
};

struct HypothesisReport {
  double max_derivative_rel_err = 0.0;   // analytic vs central differences
  double empirical_sup_sigma = 0.0;
  double empirical_sup_dsigma = 0.0;
  double empirical_sup_d2sigma = 0.0;
  double empirical_lambda_dsigma = 0.0;  // lattice lambda-Hölder quotient
  double empirical_lambda_d2sigma = 0.0;
  double empirical_lipschitz_b = 0.0;    // on |x| <= N
  double lipschitz_bound_used = 0.0;
  bool sup_bounds_dominate = false;
  bool lambda_bounds_dominate = false;
  bool h3_satisfied = false;
  std::vector<std::string> notes;
};

/// Report-only numerical validation of the coefficient hypotheses.
HypothesisReport validate_hypotheses(const CoefficientModel& model,
                                     const HolderExponents& exps,
                                     const LatticeSpec& lattice,
                                     double lipschitz_domain_N = 10.0);

} // namespace roughdelay
