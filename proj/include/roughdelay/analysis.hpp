#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "roughdelay/solver.hpp"

namespace roughdelay {

/// The six Lipschitz-type bound coefficients evaluated literally from
/// discrete norms over (a, b) with a user-supplied generic constant K.
/// g4..g6 are NaN when no z data is supplied.
struct GValues {
  double g1 = 0.0, g2 = 0.0, g3 = 0.0;
  double g4 = 0.0, g5 = 0.0, g6 = 0.0;
  double a = 0.0, b = 0.0;
  double K = 1.0;
};

GValues g_functionals(const CoefficientModel& f, const GridPath& x,
                      const TwoParamTensor& xy, const GridPath& x_tilde,
                      const GridPath& y, double beta, double a, double b,
                      double K, const GridPath* z = nullptr,
                      const TwoParamTensor* yz = nullptr);

/// A-priori constants and bound checks for a solved instance. All
/// inequality checks are report-only: the minimal K validating each
/// displayed bound is solved for rather than asserted.
struct AprioriBounds {
  // rho_{eta,b,sigma} and its summands
  double rho_eta_b_sigma = 0.0;
  double eta_beta_norm = 0.0;
  double b_term = 0.0;
  double sigma_term = 0.0;

  double lambda_y = 0.0;     // Lambda_y
  double y_beta_norm = 0.0;
  double yy_two_beta_norm = 0.0;

  double m_eta_y = 0.0;      // M_{eta,y} at the supplied K
  double delta_tilde_y = 0.0;
  double K = 1.0;

  // measured solution norms
  double sup_xhat = 0.0;           // ||xhat||_inf(0, T+r)
  double beta_prime_xhat = 0.0;    // ||xhat||_beta'(0, T+r)
  double two_beta_prime_xhat_y = 0.0;  // ||xhat (x) y||_2beta'(0, T)
  bool sup_bound_ok = false;

  double min_K_sup = 0.0;
  double min_K_beta = 0.0;
  double min_K_two_beta = 0.0;

  // constants of the x^r - xhat^r proposition (distinct rho; report-only)
  double rho_delay_prop = 0.0;
  double lambda_prop = 0.0;
  double lambda_r = 0.0;  // max(1, ||x^r||_b') * (sum of vanishing tensor norms)
};

AprioriBounds apriori(const DelayProblem& problem, const SolveResult& solution,
                      double K, const DelayedTensors* coarse_delayed = nullptr);

/// Discrete check of ||y - y_{.-r}||_inf(r,T) <= ||y||_beta r^beta and
/// ||y - y_{.-r}||_beta'(r,T) <= 2 ||y||_beta r^eps. Both hold for grid
/// norms whenever r is on-grid; the report carries the margins.
struct DelayDifferenceReport {
  double sup_lhs = 0.0, sup_rhs = 0.0;
  double beta_prime_lhs = 0.0, beta_prime_rhs = 0.0;
  bool sup_bound_ok = false;
  bool beta_prime_bound_ok = false;
};

DelayDifferenceReport delay_difference_check(const GridPath& y, double r,
                               const HolderExponents& exps, double T);

/// 2beta'(r,T) norms of the delayed difference tensors. The first three
/// columns are the running forms (difference path by value), which are the
/// quantities that visibly decay in r at finite resolution; for y = t the
/// first has the closed form sup r (t-s)^(1-2beta'). The mf_* columns are
/// the bilinear multiplicative-functional differences.
struct DelayedNormRow {
  double r = 0.0;
  double diff_y_norm = 0.0;        // ||(y - y_{.-r}) (x) y||, running
  double shift_diff_norm = 0.0;    // ||(y - y_{.-r}) (x) y_{.-r}||, running
  double y_diff_norm = 0.0;        // ||(y - y_{.-r}) (x) (y - y_{.-r})||, running
  double mf_diff_y_norm = 0.0;     // ||(y - y_{.-r}) (x) y||, bilinear
  double mf_shift_diff_norm = 0.0; // ||y_{.-r} (x) (y - y_{.-r})||, bilinear
  double mf_y_diff_norm = 0.0;     // ||y (x) (y - y_{.-r})||, bilinear
};

std::vector<DelayedNormRow> delayed_tensor_norms(const Signal& fine,
                                                 const std::vector<double>& r_list,
                                                 const HolderExponents& exps,
                                                 std::size_t coarsen_factor,
                                                 double T);

/// r-sweep experiment: one no-delay reference per seed, one delay solve per
/// (seed, r), with sup/tensor/Hölder error norms and the delayed-difference norm values.
struct StudyConfig {
  ProblemSpec base;                  // base.r ignored; r comes from r_list
  std::vector<double> r_list;        // strictly decreasing grid multiples
  std::vector<std::uint64_t> seeds;
  double K = 1.0;
  std::size_t parallelism = 1;
};

struct StudyRow {
  std::uint64_t seed = 0;
  double r = 0.0;
  double sup_err = 0.0;         // ||x - x^r||_inf(0,T)
  double tensor_sup_err = 0.0;  // ||(x - x^r) (x) y||_inf(0,T)
  double holder_err = 0.0;      // ||x - x^r||_beta'(0,T)
  double yy_r_norm_1 = 0.0;     // ||(y - y_{.-r}) (x) y||_2beta'(r,T)
  double yy_r_norm_2 = 0.0;     // ||y_{.-r} (x) (y - y_{.-r})||_2beta'(r,T)
  double phi_eta_r = 0.0;       // Phi_beta(0,r)(eta_{.-r}, y)
  double runtime_ms = 0.0;
};

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t points_used = 0;
  bool zeros_excluded = false;
};

struct StudyResult {
  std::vector<StudyRow> rows;            // sorted by (seed index, r index)
  bool exact = false;                    // all sup errors at rounding level
  std::optional<FitResult> fit;          // pooled log-log fit of sup_err vs r
  std::vector<FitResult> per_seed_fits;  // aligned with config.seeds
};

StudyResult convergence_study(const StudyConfig& cfg);

/// Ordinary least squares of log(err) against log(r). Zero/negative errors
/// are dropped (flagged); fewer than 3 usable points is an error.
FitResult fit_rate(const std::vector<std::pair<double, double>>& points);

} // namespace roughdelay
