#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "roughdelay/signals.hpp"
#include "roughdelay/tensor.hpp"

using namespace roughdelay;

namespace {

GridPath scalar_path(double t0, double h, std::size_t n, double (*f)(double)) {
  GridPath p(Grid(t0, h, n), 1);
  for (std::size_t k = 0; k <= n; ++k) p.at(k)[0] = f(p.grid.time(k));
  return p;
}

double f_linear(double t) { return t; }
double f_const(double) { return 3.5; }
double f_sqrt(double t) { return std::sqrt(t); }
double f_square(double t) { return t * t; }

} // namespace

TEST_CASE("holder_norm on reference paths") {
  const GridPath lin = scalar_path(0.0, 0.01, 100, f_linear);
  CHECK(holder_norm(lin, 0.5, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));

  const GridPath cst = scalar_path(0.0, 0.01, 100, f_const);
  CHECK(holder_norm(cst, 0.5, 0.0, 1.0) == 0.0);

  // sup at s = 0 for sqrt: (sqrt(t) - 0) / sqrt(t) = 1 on every pair (0, t)
  const GridPath sq = scalar_path(0.0, 0.001, 1000, f_sqrt);
  CHECK(holder_norm(sq, 0.5, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("holder_norm interval and input errors") {
  const GridPath lin = scalar_path(0.0, 0.01, 100, f_linear);
  CHECK_THROWS_WITH(holder_norm(lin, 0.5, 0.0, 0.555), "off-grid interval");
  CHECK_THROWS(holder_norm(lin, 0.5, 0.3, 0.3));
  CHECK_THROWS(holder_norm(lin, 1.5, 0.0, 1.0));
}

TEST_CASE("two_param_norm on reference tensors") {
  // A_{s,t} = t - s: unit steps of h with a constant left path
  const std::size_t n = 100;
  GridPath cst = scalar_path(0.0, 0.01, n, f_const);
  std::vector<double> steps(n, 0.01);
  TwoParamTensor lin_tensor(cst, cst, steps);
  CHECK(two_param_norm(lin_tensor, 1.0, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));

  // x = y = t: A_{s,t} = (t-s)^2 / 2, sup at the full interval
  const GridPath lin = scalar_path(0.0, 0.01, n, f_linear);
  const TwoParamTensor tt = tensor_from_quadrature(lin, lin);
  CHECK(two_param_norm(tt, 1.0, 0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-12));

  // zero steps with a constant carrier reconstruct to the zero tensor
  TwoParamTensor zero(cst, lin);
  CHECK(two_param_norm(zero, 1.0, 0.0, 1.0) == 0.0);
}

TEST_CASE("tensor_from_quadrature matches closed forms") {
  const GridPath lin = scalar_path(0.0, 1.0 / 128.0, 128, f_linear);
  const TwoParamTensor tt = tensor_from_quadrature(lin, lin);
  CHECK(tt.value(0, 128)[0] == doctest::Approx(0.5).epsilon(1e-12));

  const GridPath cst = scalar_path(0.0, 1.0 / 128.0, 128, f_const);
  const TwoParamTensor tc = tensor_from_quadrature(lin, cst);
  for (std::size_t k = 0; k < 128; ++k) CHECK(tc.step(k)[0] == 0.0);

  // int_0^1 u d(u^2) = 2/3 at fine resolution
  const std::size_t n = 4096;
  const GridPath x = scalar_path(0.0, 1.0 / n, n, f_linear);
  const GridPath y = scalar_path(0.0, 1.0 / n, n, f_square);
  const TwoParamTensor txy = tensor_from_quadrature(x, y);
  CHECK(txy.value(0, n)[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-5));

  CHECK_THROWS_WITH((void)tensor_from_quadrature(lin, x), "grid mismatch");
}

TEST_CASE("chen_defect: constructed, symbolic, and corrupted data") {
  const std::size_t n = 256;
  const GridPath x = scalar_path(0.0, 1.0 / n, n, f_linear);
  const GridPath y = scalar_path(0.0, 1.0 / n, n, f_square);
  const TwoParamTensor t = tensor_from_quadrature(x, y);
  CHECK(chen_defect(t) <= 1e-12);

  // symbolic A_{s,t} = int_s^t (u - s) 2u du satisfies the relation exactly
  const auto symbolic = [&](std::size_t i, std::size_t j) {
    const double s = x.grid.time(i), tt = x.grid.time(j);
    return std::vector<double>{2.0 / 3.0 * (tt * tt * tt - s * s * s) -
                               s * (tt * tt - s * s)};
  };
  CHECK(chen_defect(symbolic, x.grid, x, y) <= 1e-12);

  // an inconsistent source is caught: one single-step value perturbed
  const std::size_t bad = n / 2;
  const auto corrupted = [&](std::size_t i, std::size_t j) {
    auto v = t.value(i, j);
    if (i == bad && j == bad + 1) v[0] += 1e-3;
    return v;
  };
  CHECK(chen_defect(corrupted, x.grid, x, y) >= 1e-3);
}

TEST_CASE("coarsen_tensor is exact Chen aggregation") {
  const GridPath lin = scalar_path(0.0, 0.01, 100, f_linear);
  const TwoParamTensor t = tensor_from_quadrature(lin, lin);
  const TwoParamTensor same = coarsen_tensor(t, 1);
  CHECK(same.steps == t.steps);

  const TwoParamTensor c10 = coarsen_tensor(t, 10);
  CHECK(c10.value(0, 10)[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(chen_defect(c10) <= 1e-12);
  CHECK_THROWS_WITH((void)coarsen_tensor(t, 3), "non-divisible factor");

  SignalSpec spec;
  spec.kind = SignalKind::brownian;
  spec.dim = 2;
  spec.fine_n = 8192;
  spec.seed = 7;
  const Signal sig = gen_brownian(spec);
  const TwoParamTensor coarse = coarsen_tensor(sig.tensor, 16);
  const auto vf = sig.tensor.value(0, 8192);
  const auto vc = coarse.value(0, 512);
  for (std::size_t q = 0; q < 4; ++q) CHECK(vc[q] == doctest::Approx(vf[q]).epsilon(1e-12));

  // coarse reconstruction agrees with fine reconstruction at coarse nodes
  for (std::size_t i : {0u, 17u, 100u})
    for (std::size_t j : {250u, 511u}) {
      const auto a = coarse.value(i, j);
      const auto b = sig.tensor.value(i * 16, j * 16);
      for (std::size_t q = 0; q < 4; ++q)
        CHECK(a[q] == doctest::Approx(b[q]).epsilon(1e-11));
    }
}

TEST_CASE("shift_path") {
  const GridPath lin = scalar_path(-0.5, 0.01, 150, f_linear);
  const GridPath same = shift_path(lin, 0.0);
  CHECK(same.values == lin.values);

  const GridPath sh = shift_path(lin, 0.1);
  CHECK(sh.grid.t0 == doctest::Approx(-0.4));
  for (std::size_t k = 0; k <= sh.grid.n; ++k)
    CHECK(sh.at(k)[0] == doctest::Approx(sh.grid.time(k) - 0.1).epsilon(1e-12));

  const GridPath twice = shift_path(shift_path(lin, 0.1), 0.1);
  const GridPath once = shift_path(lin, 0.2);
  CHECK(twice.values == once.values);
  CHECK(twice.grid == once.grid);

  CHECK_THROWS_WITH((void)shift_path(lin, 0.0105), "r not a grid multiple");
}

TEST_CASE("phi2 and phi3") {
  const GridPath lin = scalar_path(0.0, 0.01, 100, f_linear);
  const TwoParamTensor tt = tensor_from_quadrature(lin, lin);
  CHECK(phi2(tt, 0.5, 0.0, 1.0) == doctest::Approx(1.5).epsilon(1e-12));

  const GridPath cst = scalar_path(0.0, 0.01, 100, f_const);
  const TwoParamTensor tc = tensor_from_quadrature(cst, lin);
  CHECK(phi2(tc, 0.5, 0.0, 1.0) == 0.0);

  // z constant kills every term of the three-path functional
  const TwoParamTensor yz = tensor_from_quadrature(lin, cst);
  CHECK(phi3(tt, yz, 0.5, 0.0, 1.0) == 0.0);
}

TEST_CASE("norm monotonicity in the interval and under refinement") {
  SignalSpec spec;
  spec.kind = SignalKind::fourier_holder;
  spec.fine_n = 1024;
  spec.seed = 3;
  const Signal sig = gen_fourier_holder(spec);
  const double full = holder_norm(sig.path, 0.4, 0.0, 1.0);
  for (auto [a, b] : {std::pair{0.0, 0.5}, {0.25, 0.75}, {0.5, 1.0}})
    CHECK(holder_norm(sig.path, 0.4, a, b) <= full + 1e-15);

  const GridPath coarse = sig.path.coarsen(4);
  CHECK(holder_norm(coarse, 0.4, 0.0, 1.0) <= full + 1e-15);
}

TEST_CASE("integration by parts: trapezoid symmetrization is exact") {
  const std::size_t n = 512;
  const GridPath x = scalar_path(0.0, 1.0 / n, n, f_sqrt);
  const GridPath y = scalar_path(0.0, 1.0 / n, n, f_square);
  const TwoParamTensor xy = tensor_from_quadrature(x, y);
  const TwoParamTensor yx = tensor_from_quadrature(y, x);
  for (std::size_t i : {0u, 31u, 200u})
    for (std::size_t j : {400u, 512u}) {
      const double sum = xy.value(i, j)[0] + yx.value(i, j)[0];
      const double prod = (x.at(j)[0] - x.at(i)[0]) * (y.at(j)[0] - y.at(i)[0]);
      CHECK(sum == doctest::Approx(prod).epsilon(1e-12));
    }
}

TEST_CASE("slice norm inequality against phi2") {
  SignalSpec spec;
  spec.kind = SignalKind::brownian;
  spec.dim = 2;
  spec.fine_n = 2048;
  spec.seed = 11;
  const Signal sig = gen_brownian(spec);
  const TwoParamTensor t = coarsen_tensor(sig.tensor, 8);
  for (auto [a, b] : {std::pair{0.0, 1.0}, {0.25, 0.75}}) {
    const double beta = 0.45;
    const double lhs = endpoint_slice_norm(t, beta, a, b);
    const double rhs = phi2(t, beta, a, b) * std::pow(b - a, beta);
    CHECK(lhs <= rhs * (1.0 + 1e-12));
  }
}

TEST_CASE("restrict keeps values and steps aligned") {
  const GridPath lin = scalar_path(-0.25, 0.25 / 32.0, 160, f_linear);
  const TwoParamTensor t = tensor_from_quadrature(lin, lin);
  const TwoParamTensor mid = t.restrict(0.0, 0.75);
  CHECK(mid.grid().n == 96);
  const auto a = mid.value(0, 96);
  const auto b = t.value(32, 128);
  CHECK(a[0] == doctest::Approx(b[0]).epsilon(1e-13));
}
