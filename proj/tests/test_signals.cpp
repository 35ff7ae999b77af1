#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "roughdelay/signals.hpp"

using namespace roughdelay;

namespace {

SignalSpec brownian_spec(std::uint64_t seed, std::size_t fine_n = 1024,
                         std::size_t dim = 2, double r_max = 0.0) {
  SignalSpec s;
  s.kind = SignalKind::brownian;
  s.dim = dim;
  s.T = 1.0;
  s.fine_n = fine_n;
  s.seed = seed;
  s.r_max = r_max;
  return s;
}

} // namespace

TEST_CASE("brownian basics: anchor, determinism, finiteness") {
  for (std::uint64_t seed : {1ull, 42ull, 987654321ull}) {
    const Signal s = gen_brownian(brownian_spec(seed, 512, 2, 0.25));
    const std::size_t i0 = s.path.grid.index_of(0.0);
    CHECK(s.path.at(i0)[0] == 0.0);
    CHECK(s.path.at(i0)[1] == 0.0);
  }
  const Signal a = gen_brownian(brownian_spec(5));
  const Signal b = gen_brownian(brownian_spec(5));
  CHECK(a.path.values == b.path.values);
  CHECK(a.tensor.steps == b.tensor.steps);
  const Signal c = gen_brownian(brownian_spec(6));
  CHECK(a.path.values != c.path.values);

  SignalSpec tiny = brownian_spec(1, 1);
  CHECK_THROWS_WITH((void)gen_brownian(tiny), "fine_n too small");
}

TEST_CASE("brownian diagonal identity holds to rounding on all pairs") {
  const Signal s = gen_brownian(brownian_spec(42, 256));
  const std::size_t n = s.path.grid.n;
  double worst = 0.0;
  for (std::size_t i = 0; i < n; i += 3)
    for (std::size_t j = i + 1; j <= n; j += 5) {
      const auto v = s.tensor.value(i, j);
      const double gap = s.path.grid.h * static_cast<double>(j - i);
      for (std::size_t q = 0; q < 2; ++q) {
        const double db = s.path.at(j)[q] - s.path.at(i)[q];
        worst = std::max(worst,
                         std::abs(v[q * 2 + q] - (0.5 * db * db - 0.5 * gap)));
      }
    }
  CHECK(worst <= 1e-12);
}

TEST_CASE("uncorrected symmetrization telescopes exactly") {
  const Signal s = gen_brownian(brownian_spec(9, 256));
  const TwoParamTensor strat = tensor_from_quadrature(s.path, s.path);
  const std::size_t n = s.path.grid.n;
  double worst = 0.0;
  for (std::size_t i = 0; i < n; i += 7)
    for (std::size_t j = i + 1; j <= n; j += 3) {
      const auto v = strat.value(i, j);
      for (std::size_t p = 0; p < 2; ++p)
        for (std::size_t q = 0; q < 2; ++q) {
          const double dp = s.path.at(j)[p] - s.path.at(i)[p];
          const double dq = s.path.at(j)[q] - s.path.at(i)[q];
          worst = std::max(worst, std::abs(v[p * 2 + q] + v[q * 2 + p] - dp * dq));
        }
    }
  CHECK(worst <= 1e-12);
}

TEST_CASE("monte carlo moments: endpoint variance and area variance") {
  const std::size_t runs = 10000;
  double sum_b = 0.0, sum_b2 = 0.0, sum_a = 0.0, sum_a2 = 0.0;
  for (std::size_t k = 0; k < runs; ++k) {
    const Signal s = gen_brownian(brownian_spec(k + 1, 128));
    const double b1 = s.path.at(s.path.grid.n)[0];
    const auto area = s.tensor.value(0, s.path.grid.n);
    sum_b += b1;
    sum_b2 += b1 * b1;
    sum_a += area[1];
    sum_a2 += area[1] * area[1];
  }
  const double nb = static_cast<double>(runs);
  const double var_b = sum_b2 / nb - (sum_b / nb) * (sum_b / nb);
  const double var_a = sum_a2 / nb - (sum_a / nb) * (sum_a / nb);
  CHECK(var_b > 0.95);
  CHECK(var_b < 1.05);
  CHECK(var_a > 0.475);
  CHECK(var_a < 0.525);
}

TEST_CASE("delayed cross tensors at r = 0 keep the uncorrected diagonal") {
  const Signal s = gen_brownian(brownian_spec(17, 256));
  const DelayedTensors dt = delayed_cross_tensors(s.path, s.tensor, 0.0);
  const std::size_t n = s.path.grid.n;
  double worst = 0.0;
  for (std::size_t i = 0; i < n; i += 5)
    for (std::size_t j = i + 1; j <= n; j += 9) {
      const auto v = dt.shift_y.value(i, j);
      for (std::size_t q = 0; q < 2; ++q) {
        const double db = s.path.at(j)[q] - s.path.at(i)[q];
        worst = std::max(worst, std::abs(v[q * 2 + q] - 0.5 * db * db));
      }
    }
  CHECK(worst <= 1e-12);
}

TEST_CASE("delayed cross tensor of the linear driver") {
  SignalSpec spec;
  spec.kind = SignalKind::smooth_poly;
  spec.dim = 1;
  spec.T = 1.0;
  spec.fine_n = 200;
  spec.r_max = 0.25;
  spec.poly_coeffs = {{0.0, 1.0}};
  const Signal s = gen_smooth(spec);
  const DelayedTensors dt = delayed_cross_tensors(s.path, s.tensor, 0.1);

  // y = t: (y_{.-r} (x) y)_{s,t} = (t - s)^2 / 2 regardless of r
  const Grid& g = dt.shift_y.grid();
  for (std::size_t i : {0u, 10u, 55u})
    for (std::size_t j : {120u, 230u}) {
      const double gap = g.h * static_cast<double>(j - i);
      CHECK(dt.shift_y.value(i, j)[0] ==
            doctest::Approx(gap * gap / 2.0).epsilon(1e-12));
    }

  // the bilinear differences vanish identically for a linear driver,
  // while the running left difference has step values r * dy
  const double h = g.h;
  for (std::size_t j = 0; j < dt.diff_y.grid().n; ++j) {
    CHECK(std::abs(dt.diff_y.step(j)[0]) <= 1e-15);
    CHECK(std::abs(dt.shift_diff.step(j)[0]) <= 1e-15);
    CHECK(std::abs(dt.y_diff.step(j)[0]) <= 1e-15);
    CHECK(dt.running_diff.step(j)[0] == doctest::Approx(0.1 * h).epsilon(1e-12));
  }
  // running value over any pair is r (t - s)
  CHECK(dt.running_diff.value(5, 105)[0] ==
        doctest::Approx(0.1 * 100.0 * h).epsilon(1e-12));
}

TEST_CASE("delayed cross tensors respect r off-grid errors") {
  const Signal s = gen_brownian(brownian_spec(3, 128, 1, 0.25));
  CHECK_THROWS_WITH((void)delayed_cross_tensors(s.path, s.tensor, 0.0033),
                    "r not a grid multiple");
}

TEST_CASE("smooth generators match symbolic tensors") {
  SignalSpec lin;
  lin.kind = SignalKind::smooth_poly;
  lin.dim = 1;
  lin.T = 1.0;
  lin.fine_n = 512;
  lin.poly_coeffs = {{0.0, 1.0}};
  const Signal sl = gen_smooth(lin);
  CHECK(sl.tensor.value(0, 512)[0] == doctest::Approx(0.5).epsilon(1e-10));

  SignalSpec two;
  two.kind = SignalKind::smooth_poly;
  two.dim = 2;
  two.T = 1.0;
  two.fine_n = 4096;
  two.poly_coeffs = {{0.0, 1.0}, {0.0, 0.0, 1.0}};
  const Signal st = gen_smooth(two);
  CHECK(st.tensor.value(0, 4096)[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-6));

  SignalSpec cst;
  cst.kind = SignalKind::smooth_poly;
  cst.dim = 1;
  cst.T = 1.0;
  cst.fine_n = 64;
  cst.poly_coeffs = {{2.5}};
  const Signal sc = gen_smooth(cst);
  for (std::size_t k = 0; k < 64; ++k) CHECK(sc.tensor.step(k)[0] == 0.0);
}

TEST_CASE("fourier holder driver") {
  SignalSpec spec;
  spec.kind = SignalKind::fourier_holder;
  spec.dim = 1;
  spec.T = 1.0;
  spec.fine_n = 1024;
  spec.seed = 21;
  spec.fourier_modes = 64;
  spec.fourier_beta = 0.4;

  const Signal a = gen_fourier_holder(spec);
  const Signal b = gen_fourier_holder(spec);
  CHECK(a.path.values == b.path.values);
  CHECK(a.tensor.steps == b.tensor.steps);

  // one mode with the same phase collapses onto the sine generator
  SignalSpec one = spec;
  one.fourier_modes = 1;
  const Signal sf = gen_fourier_holder(one);
  const double phase =
      2.0 * 3.14159265358979323846 * counter_uniform(one.seed ^ 0x5eedf00dULL, 0);
  SignalSpec sine;
  sine.kind = SignalKind::smooth_sine;
  sine.dim = 1;
  sine.T = 1.0;
  sine.fine_n = 1024;
  sine.sine_amp = {1.0};
  sine.sine_freq = {1.0};
  sine.sine_phase = {phase};
  const Signal ss = gen_smooth(sine);
  double worst = 0.0;
  for (std::size_t k = 0; k <= 1024; ++k)
    worst = std::max(worst, std::abs(sf.path.at(k)[0] - ss.path.at(k)[0]));
  CHECK(worst <= 1e-12);
}

TEST_CASE("fourier holder beta-prime norm is stable under refinement") {
  const HolderExponents exps(0.4, 0.02, 0.9);
  double prev = 0.0;
  for (std::size_t fine_n : {2048u, 4096u}) {
    SignalSpec spec;
    spec.kind = SignalKind::fourier_holder;
    spec.T = 1.0;
    spec.fine_n = fine_n;
    spec.seed = 21;
    spec.fourier_modes = 64;
    spec.fourier_beta = 0.4;
    const Signal s = gen_fourier_holder(spec);
    const double norm = holder_norm(s.path, exps.beta_prime(), 0.0, 1.0);
    CHECK(std::isfinite(norm));
    if (prev != 0.0) CHECK(std::abs(norm - prev) / prev < 0.05);
    prev = norm;
  }
}

TEST_CASE("coarsening commutes with generation") {
  const Signal fine = gen_brownian(brownian_spec(33, 2048, 2, 0.0));
  const TwoParamTensor coarse = coarsen_tensor(fine.tensor, 8);
  const GridPath coarse_path = fine.path.coarsen(8);
  CHECK(coarse.left.values == coarse_path.values);
  for (std::size_t i : {0u, 5u, 100u})
    for (std::size_t j : {128u, 256u}) {
      const auto a = coarse.value(i, j);
      const auto b = fine.tensor.value(8 * i, 8 * j);
      for (std::size_t q = 0; q < 4; ++q)
        CHECK(a[q] == doctest::Approx(b[q]).epsilon(1e-12));
    }
}
