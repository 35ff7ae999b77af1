#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "roughdelay/coefficients.hpp"

using namespace roughdelay;

namespace {
const HolderExponents kExps(0.4, 0.02, 0.9);
}

TEST_CASE("constant model") {
  const CoefficientModel m = builtin_model("constant", 1, 1, 0.9, -2.5);
  std::vector<double> x{0.7}, sig(1), ds(1), d2(1);
  m.sigma(x, sig);
  m.dsigma(x, ds);
  m.d2sigma(x, d2);
  CHECK(sig[0] == -2.5);
  CHECK(ds[0] == 0.0);
  CHECK(d2[0] == 0.0);
  CHECK(m.sup_sigma == 2.5);
  CHECK(m.sup_dsigma == 0.0);
  CHECK(m.sigma_is_constant);
  CHECK(m.satisfies_h3());
}

TEST_CASE("tanh model constants against a lattice brute force") {
  const CoefficientModel m = builtin_model("tanh_diag", 1, 1, 0.9);
  CHECK(m.sup_sigma == 1.0);
  CHECK(m.sup_dsigma == 1.0);

  // brute-force sup of |tanh''| over [-10, 10]
  double sup2 = 0.0;
  for (int k = 0; k <= 20000; ++k) {
    const double t = std::tanh(-10.0 + k * 1e-3);
    sup2 = std::max(sup2, std::abs(-2.0 * t * (1.0 - t * t)));
  }
  CHECK(sup2 == doctest::Approx(0.7698).epsilon(2e-3));
  CHECK(m.sup_d2sigma == doctest::Approx(sup2).epsilon(1e-3));
}

TEST_CASE("derivative check against central differences") {
  for (const char* name : {"tanh_diag", "sine", "affine_test"}) {
    const CoefficientModel m = builtin_model(name, 1, 1, 0.9);
    const HypothesisReport rep = validate_hypotheses(m, kExps, {});
    CHECK(rep.max_derivative_rel_err <= 1e-6);
  }
}

TEST_CASE("validate_hypotheses verdicts per model") {
  const LatticeSpec lat;

  const CoefficientModel cst = builtin_model("constant", 1, 1, 0.9, 1.0);
  const HypothesisReport rc = validate_hypotheses(cst, kExps, lat);
  CHECK(rc.empirical_lambda_dsigma == 0.0);
  CHECK(rc.empirical_lambda_d2sigma == 0.0);
  CHECK(rc.sup_bounds_dominate);
  CHECK(rc.lambda_bounds_dominate);
  CHECK(rc.h3_satisfied);

  const CoefficientModel th = builtin_model("tanh_diag", 1, 1, 0.9);
  const HypothesisReport rt = validate_hypotheses(th, kExps, lat);
  CHECK(std::isfinite(rt.empirical_lambda_dsigma));
  CHECK(rt.empirical_lambda_dsigma <= th.lambda_norm_dsigma * (1.0 + 1e-9));
  CHECK(rt.sup_bounds_dominate);
  CHECK(rt.lambda_bounds_dominate);

  const CoefficientModel af = builtin_model("affine_test", 1, 1, 0.9);
  const HypothesisReport ra = validate_hypotheses(af, kExps, lat);
  CHECK_FALSE(ra.h3_satisfied);
  REQUIRE(!ra.notes.empty());
  CHECK(ra.notes.front() == "violates H3 (sigma unbounded)");
}

TEST_CASE("reported sup bounds dominate sampled values") {
  for (const char* name : {"tanh_diag", "sine"}) {
    const CoefficientModel m = builtin_model(name, 2, 2, 0.9);
    const HypothesisReport rep = validate_hypotheses(m, kExps, {});
    CHECK(rep.sup_bounds_dominate);
    CHECK(rep.lambda_bounds_dominate);
  }
}

TEST_CASE("affine drift and its Lipschitz constant") {
  DriftSpec drift;
  drift.b_const = {0.5};
  drift.b_linear = {-1.5};
  const CoefficientModel m = builtin_model("constant", 1, 1, 0.9, 1.0, drift);
  std::vector<double> x{2.0}, out(1);
  m.b(0.0, x, out);
  CHECK(out[0] == doctest::Approx(0.5 - 3.0));
  CHECK(m.lipschitz_L(10.0) == doctest::Approx(1.5));
  CHECK_FALSE(m.b_bounded);

  const HypothesisReport rep = validate_hypotheses(m, kExps, {});
  CHECK(rep.empirical_lipschitz_b <= m.lipschitz_L(10.0) * (1.0 + 1e-9));
  CHECK(rep.empirical_lipschitz_b == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("unknown model name") {
  CHECK_THROWS((void)builtin_model("lorenz", 1, 1, 0.9));
}
