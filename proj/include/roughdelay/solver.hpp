#pragma once

#include <optional>

#include "roughdelay/coefficients.hpp"
#include "roughdelay/signals.hpp"
#include "roughdelay/tensor.hpp"

namespace roughdelay {

/// Driver data on the solver grid [-r0, T].
struct ProblemSignal {
  GridPath y;
  TwoParamTensor yy;
};

/// Full problem instance. The solver grid has step h = T / solver_n; r and
/// r0 must be exact multiples of h with 0 <= r <= r0. eta lives on [-r0, 0]
/// with the same spacing; shift_yy is (y_{.-r} (x) y) on [0, T] and is
/// required when r > 0.
struct DelayProblem {
  HolderExponents exps;
  double T = 1.0;
  double r = 0.0;
  double r0 = 0.0;
  std::size_t solver_n = 1024;
  GridPath eta;
  CoefficientModel coeff;
  ProblemSignal signal;
  std::optional<TwoParamTensor> shift_yy;

  void validate() const;
  double h() const { return T / static_cast<double>(solver_n); }
  std::size_t delay_steps() const;
  std::size_t history_steps() const;
};

struct SolveDiagnostics {
  NormReport x_norms;          // beta'/2beta' norms of (x, x (x) y) on [0, T]
  double runtime_ms = 0.0;
  bool eta_extension_clamped = false;
};

/// Solution triple: path on [-r, T] (delay) or [0, T] (no delay), the
/// co-constructed tensor x (x) y on the same grid, and diagnostics.
struct SolveResult {
  GridPath x;
  TwoParamTensor x_tensor;
  SolveDiagnostics diagnostics;
};

/// Explicit one-step level-2 stepper for the no-delay equation
///   x_t = eta_0 + int b(u, x_u) du + int sigma(x_u) dy_u.
SolveResult solve_nodelay(const DelayProblem& problem, bool with_diagnostics = true);

/// Level-2 stepper for the delay equation (r > 0); history from eta, the
/// second-order term pairs sigma'(x_{.-r}) sigma(x_{.-2r}) with
/// (y_{.-r} (x) y), with an eta-slope / time-tensor fallback on [0, r).
SolveResult solve_delay(const DelayProblem& problem, bool with_diagnostics = true);

/// Dispatches on problem.r.
SolveResult solve(const DelayProblem& problem, bool with_diagnostics = true);

/// The shifted solution xhat_t = x^r_{t-r} on [0, T] and its tensor
/// (xhat (x) y), built from (y_{.-r} (x) y) past r and from eta data before.
struct ShiftedSolution {
  GridPath xhat;
  TwoParamTensor tensor;
};
ShiftedSolution shifted_solution(const DelayProblem& problem, const SolveResult& res);

/// Problem assembly: generates the fine signal, builds delayed tensors,
/// and coarsens everything onto the solver grid.
struct ProblemSpec {
  HolderExponents exps;
  double T = 1.0;
  double r = 0.0;
  double r0 = 0.0;             // defaults to max(r, one step)
  std::size_t solver_n = 1024;
  std::size_t fine_factor = 8;
  SignalKind signal_kind = SignalKind::brownian;
  std::size_t dim = 1;         // driver dimension m (state dimension d = dim)
  std::uint64_t seed = 1;
  std::vector<double> eta0;    // history value at 0 (broadcast if size 1)
  double eta_slope = 0.0;      // eta_t = eta0 + slope * t on [-r0, 0]
  std::string coeff_name = "tanh_diag";
  double coeff_constant = 1.0;
  double lambda = 0.9;
  DriftSpec drift;
  // optional overrides for deterministic signal kinds
  std::optional<SignalSpec> signal_override;
};

DelayProblem build_problem(const ProblemSpec& spec);

/// build_problem variant that also hands back the fine-grid signal, so
/// callers can derive further delayed tensors without regenerating.
struct BuiltProblem {
  DelayProblem problem;
  Signal fine;
  std::size_t fine_factor = 8;
};
BuiltProblem build_problem_with_fine(const ProblemSpec& spec);

/// (eta_{.-r} (x) y) on [0, r]: per-step trapezoid against d eta.
TwoParamTensor eta_shift_tensor(const GridPath& eta, const GridPath& y, double r);

} // namespace roughdelay
