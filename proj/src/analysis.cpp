#include "roughdelay/analysis.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace roughdelay {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double pow_safe(double base, double e) { return base <= 0.0 ? 0.0 : std::pow(base, e); }

} // namespace

GValues g_functionals(const CoefficientModel& f, const GridPath& x,
                      const TwoParamTensor& xy, const GridPath& x_tilde,
                      const GridPath& y, double beta, double a, double b,
                      double K, const GridPath* z, const TwoParamTensor* yz) {
  GValues g;
  g.a = a;
  g.b = b;
  g.K = K;
  const double gap = b - a;
  const double nx = holder_norm(x, beta, a, b);
  const double nxt = holder_norm(x_tilde, beta, a, b);
  const double ny = holder_norm(y, beta, a, b);
  const double phi_xy = phi2(xy, beta, a, b);
  const double f1 = f.sup_dsigma;
  const double f2 = f.sup_d2sigma;
  const double f2l = f.lambda_norm_d2sigma;
  const double lam = f.lambda;
  const double holder_powers =
      f2 + f2l * (pow_safe(nx, lam) + pow_safe(nxt, lam)) * std::pow(gap, lam * beta);

  g.g1 = K * (ny * f1 + holder_powers * (phi_xy + ny * nxt));
  g.g2 = K * (ny * f1 + f2 * (phi_xy + ny * nxt) * std::pow(gap, beta));
  g.g3 = K * (f1 + f2 * nxt * std::pow(gap, beta));

  if (z == nullptr) {
    g.g4 = g.g5 = g.g6 = kNaN;
    return g;
  }
  const double nz = holder_norm(*z, beta, a, b);
  g.g6 = K * g.g3 * nz;
  if (yz == nullptr) throw std::invalid_argument("missing tensor");
  const double phi_yz = phi2(*yz, beta, a, b);
  const double phi_xyz = phi3(xy, *yz, beta, a, b);
  g.g4 = K * (f1 * phi_yz + holder_powers * (phi_xyz + nxt * phi_yz));
  g.g5 = K * ((f1 + f2 * nxt * std::pow(gap, beta)) * phi_yz +
              f2 * phi_xyz * std::pow(gap, beta));
  return g;
}

namespace {

// smallest K >= 0 with target <= rhs(K); rhs must be nondecreasing in K
double min_k_for(double target, const std::function<double(double)>& rhs) {
  if (target <= rhs(0.0)) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (rhs(hi) < target) {
    hi *= 2.0;
    if (hi > 1e12) return std::numeric_limits<double>::infinity();
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (rhs(mid) < target ? lo : hi) = mid;
  }
  return hi;
}

} // namespace

AprioriBounds apriori(const DelayProblem& problem, const SolveResult& solution,
                      double K, const DelayedTensors* coarse_delayed) {
  AprioriBounds out;
  out.K = K;
  const HolderExponents& e = problem.exps;
  const double beta = e.beta;
  const double bp = e.beta_prime();
  const double eps = e.epsilon;
  const double lam = problem.coeff.lambda;
  const double T = problem.T;
  const double r0 = problem.r0;
  const CoefficientModel& c = problem.coeff;

  out.eta_beta_norm = holder_norm(problem.eta, beta, -r0, 0.0);
  out.b_term = c.sup_b * std::pow(T, 1.0 - beta);
  out.sigma_term = c.sup_sigma + c.sup_dsigma + c.lambda_norm_dsigma;
  out.rho_eta_b_sigma = 2.0 * out.eta_beta_norm + out.b_term + out.sigma_term;

  out.y_beta_norm = holder_norm(problem.signal.y, beta, 0.0, T);
  out.yy_two_beta_norm = two_param_norm(problem.signal.yy, 2.0 * beta, 0.0, T);
  out.lambda_y = out.y_beta_norm +
                 std::max(1.0, out.y_beta_norm * out.y_beta_norm + out.yy_two_beta_norm);

  const double rho_lam = out.rho_eta_b_sigma * out.lambda_y;
  double eta0_abs = 0.0;
  for (std::size_t i = 0; i < problem.eta.dim; ++i) {
    const double v = problem.eta.at(problem.eta.grid.n)[i];
    eta0_abs += v * v;
  }
  eta0_abs = std::sqrt(eta0_abs);
  out.m_eta_y = eta0_abs + (T + r0) * std::pow(K * rho_lam, 1.0 / beta) + 1.0;
  out.delta_tilde_y = std::pow(K * rho_lam, -1.0 / beta);

  // xhat norms read directly off x^r on [-r, T] (xhat_t = x^r_{t-r}).
  const double xa = solution.x.grid.t0;
  const double xb = solution.x.grid.end();
  out.sup_xhat = sup_norm(solution.x, xa, xb);
  out.beta_prime_xhat = holder_norm(solution.x, bp, xa, xb);
  out.sup_bound_ok = out.sup_xhat <= out.m_eta_y;

  const ShiftedSolution sh = shifted_solution(problem, solution);
  out.two_beta_prime_xhat_y = two_param_norm(sh.tensor, 2.0 * bp, 0.0, T);

  out.min_K_sup = min_k_for(out.sup_xhat, [&](double k) {
    return eta0_abs + (T + r0) * pow_safe(k * rho_lam, 1.0 / beta) + 1.0;
  });
  out.min_K_beta = min_k_for(out.beta_prime_xhat, [&](double k) {
    const double mk = eta0_abs + (T + r0) * pow_safe(k * rho_lam, 1.0 / beta) + 1.0;
    return k * rho_lam * (1.0 + 2.0 * mk);
  });
  out.min_K_two_beta = min_k_for(out.two_beta_prime_xhat_y, [&](double k) {
    return k * rho_lam * (2.0 + (T + r0) * pow_safe(k * rho_lam, 1.0 / beta));
  });

  // Constants of the x^r - xhat^r stability estimate (which reuses rho for a
  // different expression under the same Greek letter; kept as its own field).
  const double xr_bp = holder_norm(solution.x, bp, 0.0, T);
  const double eta_bp = holder_norm(problem.eta, bp, -r0, 0.0);
  out.rho_delay_prop =
      (1.0 + 3.0 * c.sup_b * std::pow(T, 1.0 - bp) +
       3.0 * c.sup_sigma * (1.0 + std::pow(T, bp)) +
       2.0 * c.sup_dsigma * (1.0 + std::pow(T, bp)) +
       3.0 * c.sup_dsigma * std::pow(T, bp - eps) +
       c.lambda_norm_dsigma * (2.0 * pow_safe(xr_bp, lam) + pow_safe(eta_bp, lam)) *
           std::pow(T, (lam + 1.0) * bp - eps) +
       c.sup_d2sigma * std::pow(T, bp) * (1.0 + std::pow(T, bp)) +
       2.0 * c.lambda_norm_d2sigma * pow_safe(out.beta_prime_xhat, lam) *
           std::pow(T, (lam + 1.0) * bp)) *
      (1.0 + std::pow(T, eps));

  if (problem.r > 0.0 && problem.shift_yy) {
    const double r = problem.r;
    const TwoParamTensor eta_y = eta_shift_tensor(problem.eta, problem.signal.y, r);
    const TwoParamTensor yy0 = problem.signal.yy.restrict(0.0, T);
    const TwoParamTensor xr_y = solution.x_tensor.restrict(0.0, T);

    const double phi_eta = phi2(eta_y, bp, 0.0, r);
    const double phi_yy = phi2(yy0, beta, 0.0, T);
    const double phi_shift = phi2(*problem.shift_yy, bp, r, T);
    const double phi_eta3 = phi3(eta_y, yy0.restrict(0.0, r), bp, 0.0, r);
    const double phi_xr = phi2(xr_y, bp, 0.0, T);
    const double phi_xhat = phi2(sh.tensor, bp, 0.0, T);
    const double xr_bp_rT = holder_norm(solution.x, bp, r, T);
    double lam_max = std::max({1.0, out.eta_beta_norm, phi_eta, phi_yy, phi_shift,
                               phi_eta3, phi_xr, phi_xhat});
    out.lambda_prop =
        lam_max * (1.0 + xr_bp_rT) * (1.0 + out.y_beta_norm);

    if (coarse_delayed) {
      const double n1 =
          two_param_norm(coarse_delayed->diff_y, 2.0 * bp, r, T);
      const double n2 =
          two_param_norm(coarse_delayed->shift_diff, 2.0 * bp, r, T);
      out.lambda_r = std::max(1.0, xr_bp) * (n1 + n2);
    }
  }
  return out;
}

DelayDifferenceReport delay_difference_check(const GridPath& y, double r,
                               const HolderExponents& exps, double T) {
  DelayDifferenceReport rep;
  const std::size_t m = y.grid.delay_steps(r);
  if (m == 0) throw std::invalid_argument("r must be positive and on-grid");
  const double y_beta = holder_norm(y, exps.beta, 0.0, T);

  const std::size_t i0 = y.grid.index_of(0.0);
  const std::size_t ir = i0 + m;
  const std::size_t iT = y.grid.index_of(T);
  double sup = 0.0;
  for (std::size_t k = ir; k <= iT; ++k) {
    double acc = 0.0;
    for (std::size_t q = 0; q < y.dim; ++q) {
      const double dv = y.at(k)[q] - y.at(k - m)[q];
      acc += dv * dv;
    }
    sup = std::max(sup, std::sqrt(acc));
  }
  rep.sup_lhs = sup;
  rep.sup_rhs = y_beta * std::pow(r, exps.beta);

  GridPath diff(Grid(y.grid.time(ir), y.grid.h, iT - ir), y.dim);
  for (std::size_t k = ir; k <= iT; ++k)
    for (std::size_t q = 0; q < y.dim; ++q)
      diff.at(k - ir)[q] = y.at(k)[q] - y.at(k - m)[q];
  rep.beta_prime_lhs = holder_norm(diff, exps.beta_prime(), diff.grid.t0, diff.grid.end());
  rep.beta_prime_rhs = 2.0 * y_beta * std::pow(r, exps.epsilon);

  const double slack = 1.0 + 1e-12;
  rep.sup_bound_ok = rep.sup_lhs <= rep.sup_rhs * slack;
  rep.beta_prime_bound_ok = rep.beta_prime_lhs <= rep.beta_prime_rhs * slack;
  return rep;
}

std::vector<DelayedNormRow> delayed_tensor_norms(const Signal& fine,
                                                 const std::vector<double>& r_list,
                                                 const HolderExponents& exps,
                                                 std::size_t coarsen_factor,
                                                 double T) {
  std::vector<DelayedNormRow> rows;
  rows.reserve(r_list.size());
  const double tb = exps.two_beta_prime();
  for (double r : r_list) {
    DelayedTensors dt = delayed_cross_tensors(fine.path, fine.tensor, r);
    DelayedNormRow row;
    row.r = r;
    row.diff_y_norm =
        two_param_norm(coarsen_tensor(dt.running_diff, coarsen_factor), tb, r, T);
    row.shift_diff_norm = two_param_norm(
        coarsen_tensor(dt.running_diff_shift, coarsen_factor), tb, r, T);
    row.y_diff_norm = two_param_norm(
        coarsen_tensor(dt.running_diff_diff, coarsen_factor), tb, r, T);
    row.mf_diff_y_norm =
        two_param_norm(coarsen_tensor(dt.diff_y, coarsen_factor), tb, r, T);
    row.mf_shift_diff_norm =
        two_param_norm(coarsen_tensor(dt.shift_diff, coarsen_factor), tb, r, T);
    row.mf_y_diff_norm =
        two_param_norm(coarsen_tensor(dt.y_diff, coarsen_factor), tb, r, T);
    rows.push_back(row);
  }
  return rows;
}

FitResult fit_rate(const std::vector<std::pair<double, double>>& points) {
  FitResult fit;
  std::vector<std::pair<double, double>> logs;
  for (const auto& [r, err] : points) {
    if (!(r > 0.0)) throw std::invalid_argument("fit_rate needs positive r");
    if (err <= 0.0) {
      fit.zeros_excluded = true;
      continue;
    }
    logs.emplace_back(std::log(r), std::log(err));
  }
  if (logs.size() < 3) throw std::invalid_argument("fit_rate needs at least 3 usable points");
  fit.points_used = logs.size();
  double mx = 0.0, my = 0.0;
  for (const auto& [lx, ly] : logs) {
    mx += lx;
    my += ly;
  }
  mx /= static_cast<double>(logs.size());
  my /= static_cast<double>(logs.size());
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [lx, ly] : logs) {
    sxx += (lx - mx) * (lx - mx);
    sxy += (lx - mx) * (ly - my);
    syy += (ly - my) * (ly - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_rate needs distinct r values");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (syy == 0.0) {
    fit.r2 = 1.0;
  } else {
    double ss_res = 0.0;
    for (const auto& [lx, ly] : logs) {
      const double res = ly - (fit.intercept + fit.slope * lx);
      ss_res += res * res;
    }
    fit.r2 = 1.0 - ss_res / syy;
  }
  return fit;
}

namespace {

StudyRow study_cell(const StudyConfig& cfg, std::uint64_t seed, double r) {
  const auto start = std::chrono::steady_clock::now();
  ProblemSpec spec = cfg.base;
  spec.seed = seed;
  spec.r = r;
  if (spec.r0 <= 0.0 && !cfg.r_list.empty()) spec.r0 = cfg.r_list.front();

  BuiltProblem built = build_problem_with_fine(spec);
  DelayProblem& problem = built.problem;
  DelayProblem ref_problem = problem;
  ref_problem.r = 0.0;
  ref_problem.shift_yy.reset();

  SolveResult ref = solve_nodelay(ref_problem, false);
  SolveResult del = solve_delay(problem, false);

  const double T = spec.T;
  StudyRow row;
  row.seed = seed;
  row.r = r;

  GridPath xr0 = del.x.restrict(0.0, T);
  GridPath diff = path_difference(ref.x, xr0);
  row.sup_err = sup_norm(diff, 0.0, T);
  row.holder_err = holder_norm(diff, cfg.base.exps.beta_prime(), 0.0, T);

  // per-step tensor subtraction re-aggregated by Chen with x - x^r as carrier
  TwoParamTensor xr_tensor0 = del.x_tensor.restrict(0.0, T);
  TwoParamTensor err_tensor = tensor_linear_combination(
      1.0, ref.x_tensor, -1.0, xr_tensor0, diff, ref.x_tensor.right);
  row.tensor_sup_err = tensor_sup_norm(err_tensor, 0.0, T);

  // Hypothesis norms (running forms), built fine and Chen-coarsened.
  const double tb = cfg.base.exps.two_beta_prime();
  DelayedTensors dt = delayed_cross_tensors(built.fine.path, built.fine.tensor, r);
  row.yy_r_norm_1 =
      two_param_norm(coarsen_tensor(dt.running_diff, built.fine_factor), tb, r, T);
  row.yy_r_norm_2 = two_param_norm(
      coarsen_tensor(dt.running_diff_shift, built.fine_factor), tb, r, T);

  row.phi_eta_r =
      phi2(eta_shift_tensor(problem.eta, problem.signal.y, r), cfg.base.exps.beta,
           0.0, r);

  row.runtime_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return row;
}

} // namespace

StudyResult convergence_study(const StudyConfig& cfg) {
  if (cfg.r_list.empty()) throw std::invalid_argument("r_list must not be empty");
  for (std::size_t i = 1; i < cfg.r_list.size(); ++i)
    if (!(cfg.r_list[i] < cfg.r_list[i - 1]))
      throw std::invalid_argument("r_list must be strictly decreasing");
  if (cfg.seeds.empty()) throw std::invalid_argument("seeds must not be empty");
  // every r must be a grid multiple before any solve starts
  const Grid solver_grid(0.0, cfg.base.T / static_cast<double>(cfg.base.solver_n),
                         cfg.base.solver_n);
  for (double r : cfg.r_list) {
    if (!(r > 0.0)) throw std::invalid_argument("r_list entries must be positive");
    if (solver_grid.delay_steps(r) == 0)
      throw std::invalid_argument("r not a grid multiple");
  }

  const std::size_t cells = cfg.seeds.size() * cfg.r_list.size();
  StudyResult result;
  result.rows.resize(cells);

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= cells) return;
      const std::uint64_t seed = cfg.seeds[c / cfg.r_list.size()];
      const double r = cfg.r_list[c % cfg.r_list.size()];
      try {
        result.rows[c] = study_cell(cfg, seed, r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(cells);
        return;
      }
    }
  };

  const std::size_t nthreads = std::max<std::size_t>(1, cfg.parallelism);
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  double max_err = 0.0;
  for (const auto& row : result.rows) max_err = std::max(max_err, row.sup_err);
  result.exact = max_err <= 1e-12;
  if (!result.exact) {
    std::vector<std::pair<double, double>> pooled;
    for (const auto& row : result.rows) pooled.emplace_back(row.r, row.sup_err);
    result.fit = fit_rate(pooled);
    if (cfg.r_list.size() >= 3) {
      for (std::size_t s = 0; s < cfg.seeds.size(); ++s) {
        std::vector<std::pair<double, double>> pts;
        for (std::size_t j = 0; j < cfg.r_list.size(); ++j) {
          const auto& row = result.rows[s * cfg.r_list.size() + j];
          pts.emplace_back(row.r, row.sup_err);
        }
        result.per_seed_fits.push_back(fit_rate(pts));
      }
    }
  }
  return result;
}

} // namespace roughdelay
