#include "roughdelay/coefficients.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace roughdelay {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ScalarFamily {
  double (*f)(double);
  double (*f1)(double);
  double (*f2)(double);
  double sup_f;    // sup |f|
  double sup_f1;   // sup |f'|
  double sup_f2;   // sup |f''|
  double sup_f3;   // sup |f'''|, feeds the lambda-norm bound for f''
  bool bounded;
};

double tanh_f(double x) { return std::tanh(x); }
double tanh_f1(double x) {
  const double t = std::tanh(x);
  return 1.0 - t * t;
}
double tanh_f2(double x) {
  const double t = std::tanh(x);
  return -2.0 * t * (1.0 - t * t);
}

double sine_f(double x) { return std::sin(x); }
double sine_f1(double x) { return std::cos(x); }
double sine_f2(double x) { return -std::sin(x); }

double id_f(double x) { return x; }
double one_f(double) { return 1.0; }
double zero_f(double) { return 0.0; }

// |g(u) - g(v)| <= min(L |u - v|, 2 M) gives the interpolation bound
// ||g||_lambda <= (2M)^(1-lambda) L^lambda.
double lambda_bound(double sup_g, double lip_g, double lambda) {
  if (sup_g == 0.0 || lip_g == 0.0) return 0.0;
  return std::pow(2.0 * sup_g, 1.0 - lambda) * std::pow(lip_g, lambda);
}

ScalarFamily family_for(const std::string& name) {
  if (name == "tanh_diag")
    return {tanh_f, tanh_f1, tanh_f2, 1.0, 1.0, 4.0 / (3.0 * std::sqrt(3.0)),
            2.0, true};
  if (name == "sine") return {sine_f, sine_f1, sine_f2, 1.0, 1.0, 1.0, 1.0, true};
  if (name == "affine_test")
    return {id_f, one_f, zero_f, kInf, 1.0, 0.0, 0.0, false};
  throw std::invalid_argument("unknown coefficient model: " + name);
}

} // namespace

CoefficientModel builtin_model(const std::string& name, std::size_t d,
                               std::size_t m, double lambda, double constant_c,
                               const DriftSpec& drift) {
  if (d < 1 || m < 1) throw std::invalid_argument("dimensions must be >= 1");
  CoefficientModel model;
  model.name = name;
  model.d = d;
  model.m = m;
  model.lambda = lambda;
  const std::size_t diag = std::min(d, m);
  const double dim_factor = std::sqrt(static_cast<double>(diag));

  if (name == "constant") {
    const double c = constant_c;
    model.sigma = [d, m, diag, c](std::span<const double>, std::span<double> out) {
      std::fill(out.begin(), out.end(), 0.0);
      for (std::size_t i = 0; i < diag; ++i) out[i * m + i] = c;
      (void)d;
    };
    model.dsigma = [](std::span<const double>, std::span<double> out) {
      std::fill(out.begin(), out.end(), 0.0);
    };
    model.d2sigma = [](std::span<const double>, std::span<double> out) {
      std::fill(out.begin(), out.end(), 0.0);
    };
    model.sup_sigma = std::abs(c) * dim_factor;
    model.sup_dsigma = 0.0;
    model.sup_d2sigma = 0.0;
    model.lambda_norm_dsigma = 0.0;
    model.lambda_norm_d2sigma = 0.0;
    model.sigma_bounded = true;
    model.sigma_is_constant = true;
  } else {
    const ScalarFamily fam = family_for(name);
    model.sigma = [fam, m, diag](std::span<const double> x, std::span<double> out) {
      std::fill(out.begin(), out.end(), 0.0);
      for (std::size_t i = 0; i < diag; ++i) out[i * m + i] = fam.f(x[i]);
    };
    model.dsigma = [fam, d, m, diag](std::span<const double> x, std::span<double> out) {
      std::fill(out.begin(), out.end(), 0.0);
      for (std::size_t i = 0; i < diag; ++i) out[(i * m + i) * d + i] = fam.f1(x[i]);
    };
    model.d2sigma = [fam, d, m, diag](std::span<const double> x, std::span<double> out) {
      std::fill(out.begin(), out.end(), 0.0);
      for (std::size_t i = 0; i < diag; ++i)
        out[((i * m + i) * d + i) * d + i] = fam.f2(x[i]);
    };
    model.sup_sigma = fam.bounded ? fam.sup_f * dim_factor : kInf;
    model.sup_dsigma = fam.sup_f1 * dim_factor;
    model.sup_d2sigma = fam.sup_f2 * dim_factor;
    model.lambda_norm_dsigma =
        lambda_bound(fam.sup_f1, fam.sup_f2, lambda) * dim_factor;
    model.lambda_norm_d2sigma =
        lambda_bound(fam.sup_f2, fam.sup_f3, lambda) * dim_factor;
    model.sigma_bounded = fam.bounded;
    model.sigma_is_constant = false;
  }

  // Drift b(t, x) = b_const + b_linear x (pointwise in x).
  std::vector<double> bc = drift.b_const;
  std::vector<double> bl = drift.b_linear;
  if (!bc.empty() && bc.size() != d)
    throw std::invalid_argument("b_const must have length d");
  if (!bl.empty() && bl.size() != d * d)
    throw std::invalid_argument("b_linear must be d x d");
  model.b = [d, bc, bl](double, std::span<const double> x, std::span<double> out) {
    for (std::size_t i = 0; i < d; ++i) {
      double v = bc.empty() ? 0.0 : bc[i];
      if (!bl.empty())
        for (std::size_t k = 0; k < d; ++k) v += bl[i * d + k] * x[k];
      out[i] = v;
    }
  };
  double lin_norm = 0.0;
  for (double v : bl) lin_norm += v * v;
  lin_norm = std::sqrt(lin_norm);
  double const_norm = 0.0;
  for (double v : bc) const_norm += v * v;
  const_norm = std::sqrt(const_norm);
  model.b_bounded = lin_norm == 0.0;
  model.sup_b = model.b_bounded ? const_norm : kInf;
  model.lipschitz_L = [lin_norm](double) { return lin_norm; };
  return model;
}

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

} // namespace

HypothesisReport validate_hypotheses(const CoefficientModel& model,
                                     const HolderExponents& exps,
                                     const LatticeSpec& lattice,
                                     double lipschitz_domain_N) {
  HypothesisReport rep;
  const std::size_t d = model.d, m = model.m;
  const std::size_t nd = d * m * d;
  const std::size_t nd2 = d * m * d * d;
  const std::size_t P = lattice.points;
  const double span = lattice.hi - lattice.lo;
  const double fd_h = 1e-5;

  // Axis lattice: x = t * e_axis. Componentwise builtins make this the
  // informative direction; a documented under-approximation.
  std::vector<double> x(d, 0.0), xp(d, 0.0), xm(d, 0.0);
  std::vector<double> sig(d * m), sig_p(d * m), sig_m(d * m);
  std::vector<double> ds(nd), ds2(nd2);
  std::vector<std::vector<double>> ds_samples(P), d2_samples(P);
  std::vector<double> ts(P);

  double max_abs_fd_err_1 = 0.0, max_abs_fd_err_2 = 0.0;
  double scale_1 = 0.0, scale_2 = 0.0;

  for (std::size_t axis = 0; axis < d; ++axis) {
    for (std::size_t p = 0; p < P; ++p) {
      const double t = lattice.lo + span * static_cast<double>(p) /
                                        static_cast<double>(P - 1);
      ts[p] = t;
      std::fill(x.begin(), x.end(), 0.0);
      x[axis] = t;
      model.sigma(x, sig);
      model.dsigma(x, ds);
      model.d2sigma(x, ds2);
      rep.empirical_sup_sigma = std::max(rep.empirical_sup_sigma, norm2(sig));
      rep.empirical_sup_dsigma = std::max(rep.empirical_sup_dsigma, norm2(ds));
      rep.empirical_sup_d2sigma = std::max(rep.empirical_sup_d2sigma, norm2(ds2));
      if (axis == 0) {
        ds_samples[p] = ds;
        d2_samples[p] = ds2;
      }

      // Central differences against the analytic first derivative.
      for (std::size_t k = 0; k < d; ++k) {
        xp = x;
        xm = x;
        xp[k] += fd_h;
        xm[k] -= fd_h;
        model.sigma(xp, sig_p);
        model.sigma(xm, sig_m);
        for (std::size_t ij = 0; ij < d * m; ++ij) {
          const double fd = (sig_p[ij] - sig_m[ij]) / (2.0 * fd_h);
          max_abs_fd_err_1 = std::max(max_abs_fd_err_1, std::abs(fd - ds[ij * d + k]));
          scale_1 = std::max(scale_1, std::abs(ds[ij * d + k]));
        }
      }
      // Second derivative check via central differences of dsigma.
      std::vector<double> dsp(nd), dsm(nd);
      for (std::size_t k = 0; k < d; ++k) {
        xp = x;
        xm = x;
        xp[k] += fd_h;
        xm[k] -= fd_h;
        model.dsigma(xp, dsp);
        model.dsigma(xm, dsm);
        for (std::size_t q = 0; q < nd; ++q) {
          const double fd = (dsp[q] - dsm[q]) / (2.0 * fd_h);
          max_abs_fd_err_2 = std::max(max_abs_fd_err_2, std::abs(fd - ds2[q * d + k]));
          scale_2 = std::max(scale_2, std::abs(ds2[q * d + k]));
        }
      }
    }
  }
  rep.max_derivative_rel_err =
      std::max(max_abs_fd_err_1 / std::max(scale_1, 1.0),
               max_abs_fd_err_2 / std::max(scale_2, 1.0));

  // lambda-Hölder quotients over lattice pairs (first axis).
  const double lam = model.lambda;
  for (std::size_t p = 0; p < P; ++p)
    for (std::size_t q = p + 1; q < P; ++q) {
      const double gap = std::pow(ts[q] - ts[p], lam);
      double acc = 0.0;
      for (std::size_t r = 0; r < nd; ++r) {
        const double dv = ds_samples[q][r] - ds_samples[p][r];
        acc += dv * dv;
      }
      rep.empirical_lambda_dsigma =
          std::max(rep.empirical_lambda_dsigma, std::sqrt(acc) / gap);
      acc = 0.0;
      for (std::size_t r = 0; r < nd2; ++r) {
        const double dv = d2_samples[q][r] - d2_samples[p][r];
        acc += dv * dv;
      }
      rep.empirical_lambda_d2sigma =
          std::max(rep.empirical_lambda_d2sigma, std::sqrt(acc) / gap);
    }

  // Lipschitz estimate for b on |x| <= N (first axis line).
  const double N = lipschitz_domain_N;
  std::vector<double> bx(d), by(d), xx(d, 0.0), yy(d, 0.0);
  const std::size_t PB = std::min<std::size_t>(P, 101);
  for (std::size_t p = 0; p < PB; ++p)
    for (std::size_t q = p + 1; q < PB; ++q) {
      const double tp = -N + 2.0 * N * static_cast<double>(p) / static_cast<double>(PB - 1);
      const double tq = -N + 2.0 * N * static_cast<double>(q) / static_cast<double>(PB - 1);
      xx[0] = tp;
      yy[0] = tq;
      model.b(0.0, xx, bx);
      model.b(0.0, yy, by);
      double acc = 0.0;
      for (std::size_t r = 0; r < d; ++r) acc += (bx[r] - by[r]) * (bx[r] - by[r]);
      rep.empirical_lipschitz_b =
          std::max(rep.empirical_lipschitz_b, std::sqrt(acc) / (tq - tp));
    }
  rep.lipschitz_bound_used = model.lipschitz_L(N);

  const double slack = 1.0 + 1e-9;
  rep.sup_bounds_dominate =
      rep.empirical_sup_sigma <= model.sup_sigma * slack &&
      rep.empirical_sup_dsigma <= model.sup_dsigma * slack + 1e-12 &&
      rep.empirical_sup_d2sigma <= model.sup_d2sigma * slack + 1e-12;
  rep.lambda_bounds_dominate =
      rep.empirical_lambda_dsigma <= model.lambda_norm_dsigma * slack + 1e-12 &&
      rep.empirical_lambda_d2sigma <= model.lambda_norm_d2sigma * slack + 1e-12;
  rep.h3_satisfied = model.satisfies_h3();
  if (!model.sigma_bounded) rep.notes.push_back("violates H3 (sigma unbounded)");
  if (!model.b_bounded) rep.notes.push_back("violates H3 (b unbounded)");
  if (!(model.lambda > 1.0 / exps.beta_prime() - 2.0))
    rep.notes.push_back("lambda too small for beta'");
  return rep;
}

} // namespace roughdelay
