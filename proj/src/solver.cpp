#include "roughdelay/solver.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

namespace roughdelay {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// corr_i += sum_{j,l,k} dsig[(i*m+j)*d + k] * v[k*m + l] * A[l*m + j]
void add_level2_term(std::span<double> out, std::span<const double> dsig,
                     std::span<const double> v, std::span<const double> area,
                     std::size_t d, std::size_t m) {
  for (std::size_t i = 0; i < d; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < d; ++k) {
        const double ds = dsig[(i * m + j) * d + k];
        if (ds == 0.0) continue;
        for (std::size_t l = 0; l < m; ++l)
          acc += ds * v[k * m + l] * area[l * m + j];
      }
    out[i] += acc;
  }
}

// corr_i += sum_{j,k} dsig[(i*m+j)*d + k] * slope[k] * tau_y[j]
void add_slope_term(std::span<double> out, std::span<const double> dsig,
                    std::span<const double> slope, std::span<const double> tau_y,
                    std::size_t d, std::size_t m) {
  for (std::size_t i = 0; i < d; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < d; ++k)
        acc += dsig[(i * m + j) * d + k] * slope[k] * tau_y[j];
    out[i] += acc;
  }
}

// step_ij = sum_l sigma[i*m+l] * area[l*m+j] + 0.5 * h * b_i * dy_j
void fill_tensor_step(std::span<double> step, std::span<const double> sigma,
                      std::span<const double> area, std::span<const double> bvec,
                      std::span<const double> dy, double h, std::size_t d,
                      std::size_t m) {
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      double acc = 0.0;
      for (std::size_t l = 0; l < m; ++l) acc += sigma[i * m + l] * area[l * m + j];
      step[i * m + j] = acc + 0.5 * h * bvec[i] * dy[j];
    }
}

void check_step_finite(std::span<const double> x, std::size_t step) {
  for (double v : x)
    if (!std::isfinite(v))
      throw std::runtime_error("blow-up at step " + std::to_string(step));
}

SolveDiagnostics make_diagnostics(const GridPath& x, const TwoParamTensor& xt,
                                  const HolderExponents& exps, double T,
                                  double ms, bool with_norms) {
  SolveDiagnostics diag;
  diag.runtime_ms = ms;
  if (with_norms)
    diag.x_norms = make_norm_report(x.restrict(0.0, T), xt, exps.beta_prime(), 0.0, T);
  return diag;
}

} // namespace

void DelayProblem::validate() const {
  if (!(T > 0.0)) throw std::invalid_argument("T must be positive");
  if (solver_n < 1) throw std::invalid_argument("solver_n must be >= 1");
  if (r < 0.0 || r > r0 + 1e-12) throw std::invalid_argument("need 0 <= r <= r0");
  const std::size_t m0 = history_steps();
  if (eta.grid.n != m0 || std::abs(eta.grid.t0 + r0) > 1e-9 ||
      std::abs(eta.grid.h - h()) > 1e-9 * h())
    throw std::invalid_argument("eta must cover [-r0, 0] on the solver spacing");
  if (signal.y.grid.n != solver_n + m0 || std::abs(signal.y.grid.t0 + r0) > 1e-9 ||
      std::abs(signal.y.grid.h - h()) > 1e-9 * h())
    throw std::invalid_argument("signal must cover [-r0, T] on the solver grid");
  if (!(signal.yy.grid() == signal.y.grid))
    throw std::invalid_argument("grid mismatch");
  if (eta.dim != coeff.d) throw std::invalid_argument("eta dimension mismatch");
  if (signal.y.dim != coeff.m) throw std::invalid_argument("driver dimension mismatch");
  if (r > 0.0) {
    if (!shift_yy) throw std::invalid_argument("missing delayed tensor");
    if (shift_yy->grid().n != solver_n || std::abs(shift_yy->grid().t0) > 1e-9 ||
        std::abs(shift_yy->grid().h - h()) > 1e-9 * h())
      throw std::invalid_argument("delayed tensor must cover [0, T] on the solver grid");
  }
}

std::size_t DelayProblem::delay_steps() const {
  return Grid(0.0, h(), solver_n).delay_steps(r);
}

std::size_t DelayProblem::history_steps() const {
  return Grid(0.0, h(), std::max<std::size_t>(solver_n, 1)).delay_steps(r0);
}

SolveResult solve_nodelay(const DelayProblem& problem, bool with_diagnostics) {
  const auto start = Clock::now();
  problem.validate();
  const std::size_t K = problem.solver_n;
  const std::size_t m0 = problem.history_steps();
  const std::size_t d = problem.coeff.d, m = problem.coeff.m;
  const double h = problem.h();
  const GridPath& y = problem.signal.y;
  const TwoParamTensor& yy = problem.signal.yy;

  GridPath x(Grid(0.0, h, K), d);
  for (std::size_t i = 0; i < d; ++i) x.at(0)[i] = problem.eta.at(problem.eta.grid.n)[i];

  TwoParamTensor xt(x, y.restrict(0.0, problem.T));

  std::vector<double> sig(d * m), dsig(d * m * d), bvec(d), dy(m), corr(d);
  for (std::size_t k = 0; k < K; ++k) {
    const auto xk = x.at(k);
    const double tk = x.grid.time(k);
    problem.coeff.b(tk, xk, bvec);
    problem.coeff.sigma(xk, sig);
    problem.coeff.dsigma(xk, dsig);
    for (std::size_t j = 0; j < m; ++j)
      dy[j] = y.at(m0 + k + 1)[j] - y.at(m0 + k)[j];
    const auto area = yy.step(m0 + k);

    std::fill(corr.begin(), corr.end(), 0.0);
    add_level2_term(corr, dsig, sig, area, d, m);
    auto xn = x.at(k + 1);
    for (std::size_t i = 0; i < d; ++i) {
      double drive = 0.0;
      for (std::size_t j = 0; j < m; ++j) drive += sig[i * m + j] * dy[j];
      xn[i] = xk[i] + bvec[i] * h + drive + corr[i];
    }
    check_step_finite(xn, k);
    fill_tensor_step(xt.step(k), sig, area, bvec, dy, h, d, m);
  }
  // keep the tensor's carrier path in sync with the computed solution
  xt.left = x;

  SolveResult res{std::move(x), std::move(xt), {}};
  res.diagnostics = make_diagnostics(res.x, res.x_tensor, problem.exps, problem.T,
                                     elapsed_ms(start), with_diagnostics);
  return res;
}

SolveResult solve_delay(const DelayProblem& problem, bool with_diagnostics) {
  const auto start = Clock::now();
  problem.validate();
  if (problem.r <= 0.0)
    throw std::invalid_argument("solve_delay requires r > 0");
  const std::size_t K = problem.solver_n;
  const std::size_t m0 = problem.history_steps();
  const std::size_t mdel = problem.delay_steps();
  const std::size_t d = problem.coeff.d, m = problem.coeff.m;
  const double h = problem.h();
  const GridPath& y = problem.signal.y;
  const GridPath& eta = problem.eta;
  const TwoParamTensor& yy = problem.signal.yy;
  const TwoParamTensor& syy = *problem.shift_yy;

  bool clamped = false;
  // eta node for time t (an on-grid time in [-r0, 0]); clamps at the left
  // boundary if ever asked below -r0.
  const auto eta_at = [&](double t) -> std::span<const double> {
    double x_idx = (t + problem.r0) / h;
    std::ptrdiff_t k = static_cast<std::ptrdiff_t>(std::llround(x_idx));
    if (k < 0) {
      clamped = true;
      k = 0;
    }
    if (k > static_cast<std::ptrdiff_t>(eta.grid.n))
      k = static_cast<std::ptrdiff_t>(eta.grid.n);
    return eta.at(static_cast<std::size_t>(k));
  };

  // Solution grid [-r, T]; history prefix copied from eta.
  GridPath x(Grid(-problem.r, h, K + mdel), d);
  for (std::size_t q = 0; q <= mdel; ++q) {
    const auto src = eta_at(x.grid.time(q));
    for (std::size_t i = 0; i < d; ++i) x.at(q)[i] = src[i];
  }

  TwoParamTensor xt(x, y.restrict(-problem.r, problem.T));

  // Tensor steps on [-r, 0): (eta (x) y) by trapezoid against d eta.
  for (std::size_t q = 0; q < mdel; ++q) {
    auto st = xt.step(q);
    const std::size_t ye = m0 - mdel + q;
    for (std::size_t i = 0; i < d; ++i) {
      const double de = x.at(q + 1)[i] - x.at(q)[i];
      for (std::size_t j = 0; j < m; ++j)
        st[i * m + j] = 0.5 * de * (y.at(ye + 1)[j] - y.at(ye)[j]);
    }
  }

  std::vector<double> sig(d * m), dsig(d * m * d), vmat(d * m), bvec(d), dy(m),
      corr(d), slope(d), tau_y(m);
  for (std::size_t k = 0; k < K; ++k) {
    const double tk = static_cast<double>(k) * h;
    const auto xk = x.at(mdel + k);
    const auto xdel = x.at(k);  // time tk - r
    problem.coeff.b(tk, xk, bvec);
    problem.coeff.sigma(xdel, sig);
    problem.coeff.dsigma(xdel, dsig);
    for (std::size_t j = 0; j < m; ++j)
      dy[j] = y.at(m0 + k + 1)[j] - y.at(m0 + k)[j];
    const auto area = yy.step(m0 + k);

    std::fill(corr.begin(), corr.end(), 0.0);
    if (k >= mdel) {
      // Gubinelli derivative sigma'(x_{.-r}) sigma(x_{.-2r}) against (y_{.-r} (x) y).
      problem.coeff.sigma(x.at(k - mdel), vmat);
      add_level2_term(corr, dsig, vmat, syy.step(k), d, m);
    } else {
      // On [0, r) the delayed argument is eta; pair its slope with the
      // time tensor (tau (x) y)_k = h/2 * dy_k.
      const auto e0 = eta_at(tk - problem.r);
      const auto e1 = eta_at(tk - problem.r + h);
      for (std::size_t i = 0; i < d; ++i) slope[i] = (e1[i] - e0[i]) / h;
      for (std::size_t j = 0; j < m; ++j) tau_y[j] = 0.5 * h * dy[j];
      add_slope_term(corr, dsig, slope, tau_y, d, m);
    }

    auto xn = x.at(mdel + k + 1);
    for (std::size_t i = 0; i < d; ++i) {
      double drive = 0.0;
      for (std::size_t j = 0; j < m; ++j) drive += sig[i * m + j] * dy[j];
      xn[i] = xk[i] + bvec[i] * h + drive + corr[i];
    }
    check_step_finite(xn, k);
    fill_tensor_step(xt.step(mdel + k), sig, area, bvec, dy, h, d, m);
  }
  xt.left = x;

  SolveResult res{std::move(x), std::move(xt), {}};
  res.diagnostics = make_diagnostics(res.x, res.x_tensor, problem.exps, problem.T,
                                     elapsed_ms(start), with_diagnostics);
  res.diagnostics.eta_extension_clamped = clamped;
  return res;
}

SolveResult solve(const DelayProblem& problem, bool with_diagnostics) {
  return problem.r > 0.0 ? solve_delay(problem, with_diagnostics)
                         : solve_nodelay(problem, with_diagnostics);
}

ShiftedSolution shifted_solution(const DelayProblem& problem, const SolveResult& res) {
  if (problem.r == 0.0) return {res.x, res.x_tensor};
  const std::size_t K = problem.solver_n;
  const std::size_t mdel = problem.delay_steps();
  const std::size_t m0 = problem.history_steps();
  const std::size_t d = problem.coeff.d, m = problem.coeff.m;
  const double h = problem.h();
  if (res.x.grid.n != K + mdel || std::abs(res.x.grid.t0 + problem.r) > 1e-9)
    throw std::invalid_argument("result does not match problem delay");
  const GridPath& y = problem.signal.y;
  const TwoParamTensor& syy = *problem.shift_yy;

  GridPath xhat(Grid(0.0, h, K), d);
  for (std::size_t k = 0; k <= K; ++k)
    for (std::size_t i = 0; i < d; ++i) xhat.at(k)[i] = res.x.at(k)[i];

  TwoParamTensor t(xhat, y.restrict(0.0, problem.T));
  std::vector<double> sig(d * m), bvec(d), dy(m);
  for (std::size_t k = 0; k < K; ++k) {
    auto st = t.step(k);
    for (std::size_t j = 0; j < m; ++j)
      dy[j] = y.at(m0 + k + 1)[j] - y.at(m0 + k)[j];
    if (k < mdel) {
      // (eta_{.-r} (x) y): trapezoid against d eta_{.-r} = d xhat here.
      for (std::size_t i = 0; i < d; ++i) {
        const double de = xhat.at(k + 1)[i] - xhat.at(k)[i];
        for (std::size_t j = 0; j < m; ++j) st[i * m + j] = 0.5 * de * dy[j];
      }
    } else {
      problem.coeff.sigma(xhat.at(k - mdel), sig);
      problem.coeff.b(static_cast<double>(k) * h - problem.r, xhat.at(k), bvec);
      fill_tensor_step(st, sig, syy.step(k), bvec, dy, h, d, m);
    }
  }
  return {std::move(xhat), std::move(t)};
}

TwoParamTensor eta_shift_tensor(const GridPath& eta, const GridPath& y, double r) {
  const std::size_t mdel = y.grid.delay_steps(r);
  if (mdel == 0) throw std::invalid_argument("r must be positive");
  const std::size_t iy0 = y.grid.index_of(0.0);
  const std::size_t ie = eta.grid.index_of(-r);
  GridPath shifted_eta(Grid(0.0, y.grid.h, mdel), eta.dim);
  for (std::size_t k = 0; k <= mdel; ++k)
    for (std::size_t i = 0; i < eta.dim; ++i)
      shifted_eta.at(k)[i] = eta.at(ie + k)[i];
  GridPath yr = y.restrict(0.0, y.grid.time(iy0 + mdel));
  TwoParamTensor t(shifted_eta, yr);
  for (std::size_t k = 0; k < mdel; ++k) {
    auto st = t.step(k);
    for (std::size_t i = 0; i < eta.dim; ++i) {
      const double de = shifted_eta.at(k + 1)[i] - shifted_eta.at(k)[i];
      for (std::size_t j = 0; j < y.dim; ++j)
        st[i * y.dim + j] = 0.5 * de * (yr.at(k + 1)[j] - yr.at(k)[j]);
    }
  }
  return t;
}

BuiltProblem build_problem_with_fine(const ProblemSpec& spec) {
  DelayProblem p;
  p.exps = spec.exps;
  p.T = spec.T;
  p.solver_n = spec.solver_n;
  const double h = p.h();
  p.r = spec.r;
  p.r0 = spec.r0 > 0.0 ? spec.r0 : std::max(spec.r, h);
  const Grid solver_grid(0.0, h, spec.solver_n);
  const std::size_t mdel = solver_grid.delay_steps(p.r);
  const std::size_t m0 = solver_grid.delay_steps(p.r0);
  if (mdel > m0) throw std::invalid_argument("need r <= r0");

  p.coeff = builtin_model(spec.coeff_name, spec.dim, spec.dim, spec.lambda,
                          spec.coeff_constant, spec.drift);

  // History eta_t = eta0 + slope * t on [-r0, 0].
  std::vector<double> eta0 = spec.eta0;
  if (eta0.empty()) eta0.assign(spec.dim, 0.0);
  if (eta0.size() == 1 && spec.dim > 1) eta0.assign(spec.dim, spec.eta0[0]);
  if (eta0.size() != spec.dim)
    throw std::invalid_argument("eta0 must have length 1 or d");
  GridPath eta(Grid(-p.r0, h, m0), spec.dim);
  for (std::size_t k = 0; k <= m0; ++k)
    for (std::size_t i = 0; i < spec.dim; ++i)
      eta.at(k)[i] = eta0[i] + spec.eta_slope * eta.grid.time(k);
  p.eta = std::move(eta);

  // Fine signal on [-r0, T], coarsened to the solver grid.
  SignalSpec sig;
  if (spec.signal_override) {
    sig = *spec.signal_override;
  } else {
    sig.kind = spec.signal_kind;
    sig.dim = spec.dim;
    sig.T = spec.T;
    sig.seed = spec.seed;
    if (spec.signal_kind == SignalKind::smooth_poly)
      sig.poly_coeffs.assign(spec.dim, {0.0, 1.0});
    if (spec.signal_kind == SignalKind::smooth_sine) {
      sig.sine_amp.assign(spec.dim, 1.0);
      sig.sine_freq.assign(spec.dim, 1.0);
      sig.sine_phase.assign(spec.dim, 0.0);
    }
  }
  sig.fine_n = spec.solver_n * spec.fine_factor;
  sig.r_max = p.r0;
  Signal fine = generate(sig);

  p.signal.y = fine.path.coarsen(spec.fine_factor);
  p.signal.yy = coarsen_tensor(fine.tensor, spec.fine_factor);

  if (p.r > 0.0) {
    DelayedTensors dt = delayed_cross_tensors(fine.path, fine.tensor, p.r);
    TwoParamTensor coarse = coarsen_tensor(dt.shift_y, spec.fine_factor);
    p.shift_yy = coarse.restrict(0.0, p.T);
  }
  p.validate();
  return {std::move(p), std::move(fine), spec.fine_factor};
}

DelayProblem build_problem(const ProblemSpec& spec) {
  return build_problem_with_fine(spec).problem;
}

} // namespace roughdelay
