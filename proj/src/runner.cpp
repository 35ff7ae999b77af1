#include "roughdelay/runner.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>

namespace roughdelay {

namespace {

namespace fs = std::filesystem;

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
  if (!dir.empty()) fs::create_directories(dir);
}

} // namespace

int run_gen(const Config& cfg, const std::string& out_dir, std::ostream& log) {
  ensure_dir(out_dir);
  const SignalSpec spec = cfg.signal_spec();
  const Signal sig = generate(spec);
  write_file_atomic(join(out_dir, "path.csv"), path_to_csv(sig.path));
  write_file_atomic(join(out_dir, "tensor.csv"), tensor_to_csv(sig.tensor));
  log << "kind=" << to_string(spec.kind) << "\n";
  log << "nodes=" << sig.path.grid.nodes() << "\n";
  log << "chen_defect_rel=" << format_double(chen_defect_relative(sig.tensor)) << "\n";
  log << "wrote=" << join(out_dir, "path.csv") << "\n";
  log << "wrote=" << join(out_dir, "tensor.csv") << "\n";
  return 0;
}

int run_solve(const Config& cfg, const std::string& out_dir, std::ostream& log) {
  ensure_dir(out_dir);
  const DelayProblem problem = build_problem(cfg.problem_spec());
  const SolveResult res = solve(problem);
  write_file_atomic(join(out_dir, "solution.csv"), path_to_csv(res.x));
  write_file_atomic(join(out_dir, "solution_tensor.csv"),
                    tensor_to_csv(res.x_tensor));
  log << "r=" << format_double(problem.r) << "\n";
  log << "solver_n=" << problem.solver_n << "\n";
  log << "sup_norm=" << format_double(res.diagnostics.x_norms.sup) << "\n";
  log << "beta_prime_norm=" << format_double(res.diagnostics.x_norms.beta_norm) << "\n";
  log << "two_beta_prime_norm="
      << format_double(res.diagnostics.x_norms.two_beta_norm) << "\n";
  log << "chen_defect_rel=" << format_double(chen_defect_relative(res.x_tensor))
      << "\n";
  log << "runtime_ms=" << format_double(res.diagnostics.runtime_ms) << "\n";
  log << "wrote=" << join(out_dir, "solution.csv") << "\n";
  log << "wrote=" << join(out_dir, "solution_tensor.csv") << "\n";
  return 0;
}

int run_converge(const Config& cfg, const std::string& out_dir, std::ostream& log) {
  ensure_dir(out_dir);
  const auto start = std::chrono::steady_clock::now();
  const StudyConfig sc = cfg.study_config();
  const StudyResult res = convergence_study(sc);
  write_file_atomic(join(out_dir, "study.csv"), study_to_csv(res.rows));
  const double total_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - start)
                              .count();
  if (res.exact) {
    log << "slope=nan r2=nan flag=exact rows=" << res.rows.size() << "\n";
  } else {
    log << "slope=" << format_double(res.fit->slope)
        << " r2=" << format_double(res.fit->r2)
        << " points=" << res.fit->points_used
        << (res.fit->zeros_excluded ? " zeros_excluded=1" : "") << "\n";
  }
  log << "total_ms=" << format_double(total_ms) << "\n";
  log << "wrote=" << join(out_dir, "study.csv") << "\n";
  return 0;
}

int run_bounds(const Config& cfg, std::ostream& log) {
  ProblemSpec spec = cfg.problem_spec();
  BuiltProblem built = build_problem_with_fine(spec);
  const SolveResult res = solve(built.problem);

  const DelayedTensors* delayed_ptr = nullptr;
  DelayedTensors coarse;
  if (built.problem.r > 0.0) {
    DelayedTensors fine_dt =
        delayed_cross_tensors(built.fine.path, built.fine.tensor, built.problem.r);
    coarse.r = built.problem.r;
    coarse.diff_y = coarsen_tensor(fine_dt.diff_y, built.fine_factor);
    coarse.shift_diff = coarsen_tensor(fine_dt.shift_diff, built.fine_factor);
    coarse.y_diff = coarsen_tensor(fine_dt.y_diff, built.fine_factor);
    coarse.shift_y = coarsen_tensor(fine_dt.shift_y, built.fine_factor);
    coarse.y_shift = coarsen_tensor(fine_dt.y_shift, built.fine_factor);
    delayed_ptr = &coarse;
  }
  const AprioriBounds b = apriori(built.problem, res, cfg.K, delayed_ptr);

  log << "rho_eta_b_sigma=" << format_double(b.rho_eta_b_sigma) << "\n";
  log << "lambda_y=" << format_double(b.lambda_y) << "\n";
  log << "m_eta_y=" << format_double(b.m_eta_y) << "\n";
  log << "delta_tilde_y=" << format_double(b.delta_tilde_y) << "\n";
  log << "sup_xhat=" << format_double(b.sup_xhat) << "\n";
  log << "beta_prime_xhat=" << format_double(b.beta_prime_xhat) << "\n";
  log << "two_beta_prime_xhat_y=" << format_double(b.two_beta_prime_xhat_y) << "\n";
  log << "sup_bound_ok=" << (b.sup_bound_ok ? 1 : 0) << "\n";
  log << "min_K_sup=" << format_double(b.min_K_sup) << "\n";
  log << "min_K_beta=" << format_double(b.min_K_beta) << "\n";
  log << "min_K_two_beta=" << format_double(b.min_K_two_beta) << "\n";
  log << "rho_delay_prop=" << format_double(b.rho_delay_prop) << "\n";
  if (built.problem.r > 0.0) {
    log << "lambda_prop=" << format_double(b.lambda_prop) << "\n";
    log << "lambda_r=" << format_double(b.lambda_r) << "\n";
  }

  const GValues g =
      g_functionals(built.problem.coeff, res.x, res.x_tensor, res.x,
                    built.problem.signal.y.restrict(0.0, built.problem.T),
                    built.problem.exps.beta_prime(), 0.0, built.problem.T, cfg.K,
                    &built.problem.signal.y, &built.problem.signal.yy);
  log << "g1=" << format_double(g.g1) << "\n";
  log << "g2=" << format_double(g.g2) << "\n";
  log << "g3=" << format_double(g.g3) << "\n";
  log << "g4=" << format_double(g.g4) << "\n";
  log << "g5=" << format_double(g.g5) << "\n";
  log << "g6=" << format_double(g.g6) << "\n";
  return 0;
}

namespace {

struct CheckContext {
  std::ostream& log;
  int failures = 0;

  void expect(bool ok, const std::string& name, const std::string& detail = "") {
    if (ok) {
      log << "ok: " << name << "\n";
    } else {
      ++failures;
      log << "FAIL: " << name << (detail.empty() ? "" : " (" + detail + ")") << "\n";
    }
  }
};

} // namespace

int run_check(const Config& cfg, std::ostream& log) {
  CheckContext ctx{log};
  const HolderExponents exps = cfg.exps();
  const double T = cfg.T;
  const std::size_t n = std::min<std::size_t>(cfg.solver_n, 256);
  const double r = T * 32.0 / static_cast<double>(n * 8);

  // representative tensors: smooth, fourier, brownian, solution
  SignalSpec poly;
  poly.kind = SignalKind::smooth_poly;
  poly.dim = 2;
  poly.T = T;
  poly.fine_n = n * 8;
  poly.poly_coeffs = {{0.0, 1.0}, {0.0, 0.0, 1.0}};
  const Signal sp = gen_smooth(poly);
  ctx.expect(chen_defect_relative(sp.tensor) <= 1e-10, "chen smooth_poly");

  SignalSpec fh;
  fh.kind = SignalKind::fourier_holder;
  fh.T = T;
  fh.fine_n = n * 8;
  fh.seed = cfg.seed;
  fh.fourier_beta = cfg.beta;
  const Signal sf = gen_fourier_holder(fh);
  ctx.expect(chen_defect_relative(sf.tensor) <= 1e-10, "chen fourier_holder");

  SignalSpec bm;
  bm.kind = SignalKind::brownian;
  bm.dim = 2;
  bm.T = T;
  bm.fine_n = n * 8;
  bm.seed = cfg.seed;
  bm.r_max = r;
  const Signal sb = gen_brownian(bm);
  ctx.expect(chen_defect_relative(sb.tensor) <= 1e-10, "chen brownian");
  ctx.expect(chen_defect_relative(coarsen_tensor(sb.tensor, 8)) <= 1e-10,
             "chen coarsened");

  // Stratonovich identities on the coarse grid, every pair
  {
    const TwoParamTensor tc = coarsen_tensor(sb.tensor, 8);
    const GridPath pc = sb.path.coarsen(8);
    double worst_diag = 0.0, worst_sym = 0.0;
    const std::size_t nn = tc.grid().n;
    for (std::size_t i = 0; i < nn; ++i) {
      for (std::size_t j = i + 1; j <= nn; ++j) {
        const auto v = tc.value(i, j);
        const double gap = tc.grid().h * static_cast<double>(j - i);
        for (std::size_t q = 0; q < 2; ++q) {
          const double db = pc.at(j)[q] - pc.at(i)[q];
          worst_diag = std::max(
              worst_diag, std::abs(v[q * 2 + q] - (0.5 * db * db - 0.5 * gap)));
        }
        const double d0 = pc.at(j)[0] - pc.at(i)[0];
        const double d1 = pc.at(j)[1] - pc.at(i)[1];
        worst_sym = std::max(worst_sym, std::abs(v[1] + v[2] - d0 * d1));
      }
    }
    ctx.expect(worst_diag <= 1e-12, "brownian diagonal identity");
    ctx.expect(worst_sym <= 1e-12, "brownian symmetrization identity");
  }

  // solved instance: tanh coefficients, brownian driver
  ProblemSpec spec;
  spec.exps = exps;
  spec.T = T;
  spec.r = r;
  spec.r0 = r;
  spec.solver_n = n;
  spec.seed = cfg.seed;
  spec.eta0 = {0.5};
  spec.coeff_name = "tanh_diag";
  BuiltProblem built = build_problem_with_fine(spec);
  const SolveResult del = solve_delay(built.problem);
  ctx.expect(chen_defect_relative(del.x_tensor) <= 1e-10, "chen solution tensor");
  const ShiftedSolution sh = shifted_solution(built.problem, del);
  ctx.expect(chen_defect_relative(sh.tensor) <= 1e-10, "chen shifted tensor");

  // x^r = eta on [-r, 0)
  {
    double worst = 0.0;
    const std::size_t mdel = built.problem.delay_steps();
    const std::size_t m0 = built.problem.history_steps();
    for (std::size_t q = 0; q < mdel; ++q)
      worst = std::max(worst, std::abs(del.x.scalar(q) -
                                       built.problem.eta.scalar(m0 - mdel + q)));
    ctx.expect(worst == 0.0, "history prefix exact");
  }

  // inequality (3.29) with all quantities discrete
  {
    const double beta = exps.beta;
    const double a = 0.0, b = T;
    const double lhs = endpoint_slice_norm(del.x_tensor, beta, a, b);
    const double rhs = phi2(del.x_tensor, beta, a, b) * std::pow(b - a, beta);
    ctx.expect(lhs <= rhs * (1.0 + 1e-12), "inequality (slice vs phi)");
  }

  // ||y - y_{.-r}|| bounds, brownian + deterministic
  for (std::uint64_t s : {cfg.seed, cfg.seed + 1}) {
    SignalSpec b2 = bm;
    b2.seed = s;
    const Signal sig = gen_brownian(b2);
    const DelayDifferenceReport rep = delay_difference_check(sig.path.coarsen(8), r, exps, T);
    ctx.expect(rep.sup_bound_ok && rep.beta_prime_bound_ok,
               "delay difference bounds seed " + std::to_string(s));
  }
  {
    const DelayDifferenceReport rep = delay_difference_check(sp.path.coarsen(8), r, exps, T);
    ctx.expect(rep.sup_bound_ok && rep.beta_prime_bound_ok, "delay difference bounds smooth");
  }

  // G6 factorization is exact by construction
  {
    const GridPath y0 = built.problem.signal.y.restrict(0.0, T);
    const GValues g = g_functionals(built.problem.coeff, del.x, del.x_tensor,
                                    del.x, y0, exps.beta_prime(), 0.0, T, cfg.K,
                                    &y0, &built.problem.signal.yy);
    const double expected =
        cfg.K * g.g3 * holder_norm(y0, exps.beta_prime(), 0.0, T);
    ctx.expect(g.g6 == expected, "g6 factorization");
  }

  // constant sigma: delay invisible, errors identically zero
  {
    ProblemSpec cspec = spec;
    cspec.coeff_name = "constant";
    cspec.coeff_constant = 0.7;
    BuiltProblem cb = build_problem_with_fine(cspec);
    DelayProblem ref = cb.problem;
    ref.r = 0.0;
    ref.shift_yy.reset();
    const SolveResult xr = solve_delay(cb.problem, false);
    const SolveResult x0 = solve_nodelay(ref, false);
    double worst = 0.0;
    const std::size_t mdel = cb.problem.delay_steps();
    for (std::size_t k = 0; k <= cb.problem.solver_n; ++k)
      worst = std::max(worst, std::abs(xr.x.scalar(mdel + k) - x0.x.scalar(k)));
    ctx.expect(worst == 0.0, "constant sigma exactness");
  }

  // a-priori monotonicity: Lambda_y >= 1 and delta_tilde <= (K sigma)^(-1/beta)
  {
    const AprioriBounds b = apriori(built.problem, del, cfg.K);
    const double cap = std::pow(cfg.K * built.problem.coeff.sup_sigma, -1.0 / exps.beta);
    ctx.expect(b.lambda_y >= 1.0, "lambda_y >= 1");
    ctx.expect(b.delta_tilde_y <= cap * (1.0 + 1e-12), "delta_tilde cap");
    ctx.expect(std::isfinite(b.min_K_sup), "min K finite");
  }

  log << (ctx.failures == 0 ? "all checks passed" : "checks FAILED") << "\n";
  return ctx.failures == 0 ? 0 : 1;
}

} // namespace roughdelay
