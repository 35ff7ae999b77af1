#include "roughdelay/signals.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace roughdelay {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Grid generation_grid(const SignalSpec& spec, std::size_t& ext_steps) {
  if (spec.fine_n < 2) throw std::invalid_argument("fine_n too small");
  if (!(spec.T > 0.0)) throw std::invalid_argument("T must be positive");
  const double h = spec.T / static_cast<double>(spec.fine_n);
  const double x = spec.r_max / h;
  const double k = std::round(x);
  if (spec.r_max < 0.0 || std::abs(x - k) > 1e-9 * std::max(1.0, x))
    throw std::invalid_argument("r_max not a grid multiple");
  ext_steps = static_cast<std::size_t>(k);
  return Grid(-spec.r_max, h, spec.fine_n + ext_steps);
}

// Closed-form evaluation for the deterministic kinds.
double eval_component(const SignalSpec& spec, std::size_t i, double t) {
  switch (spec.kind) {
    case SignalKind::smooth_poly: {
      double v = 0.0, p = 1.0;
      for (double c : spec.poly_coeffs[i]) {
        v += c * p;
        p *= t;
      }
      return v;
    }
    case SignalKind::smooth_sine:
      return spec.sine_amp[i] *
             std::sin(kTwoPi * spec.sine_freq[i] * t + spec.sine_phase[i]);
    case SignalKind::fourier_holder: {
      double v = 0.0;
      for (std::size_t k = 1; k <= spec.fourier_modes; ++k) {
        const double amp = spec.fourier_scale *
                           std::pow(static_cast<double>(k),
                                    -(spec.fourier_beta + 0.5));
        const double phase =
            kTwoPi * counter_uniform(spec.seed ^ 0x5eedf00dULL,
                                     (k - 1) * spec.dim + i);
        v += amp * std::sin(kTwoPi * static_cast<double>(k) * t + phase);
      }
      return v;
    }
    default:
      throw std::invalid_argument("unknown signal kind");
  }
}

Signal deterministic_signal(const SignalSpec& spec) {
  std::size_t ext = 0;
  const Grid g = generation_grid(spec, ext);
  GridPath path(g, spec.dim);
  for (std::size_t k = 0; k <= g.n; ++k)
    for (std::size_t i = 0; i < spec.dim; ++i)
      path.at(k)[i] = eval_component(spec, i, g.time(k));
  path.check_finite();
  TwoParamTensor tensor = tensor_from_quadrature(path, path);
  return {std::move(path), std::move(tensor)};
}

} // namespace

SignalKind signal_kind_from_string(const std::string& s) {
  if (s == "brownian") return SignalKind::brownian;
  if (s == "smooth_poly") return SignalKind::smooth_poly;
  if (s == "smooth_sine") return SignalKind::smooth_sine;
  if (s == "fourier_holder") return SignalKind::fourier_holder;
  throw std::invalid_argument("unknown signal kind: " + s);
}

std::string to_string(SignalKind k) {
  switch (k) {
    case SignalKind::brownian: return "brownian";
    case SignalKind::smooth_poly: return "smooth_poly";
    case SignalKind::smooth_sine: return "smooth_sine";
    case SignalKind::fourier_holder: return "fourier_holder";
  }
  return "unknown";
}

std::uint64_t counter_u64(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + (index + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double counter_uniform(std::uint64_t seed, std::uint64_t index) {
  return static_cast<double>(counter_u64(seed, index) >> 11) * 0x1.0p-53;
}

double counter_gaussian(std::uint64_t seed, std::uint64_t index) {
  // Box-Muller on counters 2k, 2k+1; u1 shifted away from zero.
  const double u1 = (static_cast<double>(counter_u64(seed, 2 * index) >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = counter_uniform(seed, 2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

Signal gen_brownian(const SignalSpec& spec) {
  if (spec.kind != SignalKind::brownian)
    throw std::invalid_argument("spec is not brownian");
  std::size_t ext = 0;
  const Grid g = generation_grid(spec, ext);
  const std::size_t m = spec.dim;
  const double sqrt_h = std::sqrt(g.h);

  GridPath path(g, m);
  // Cumulative sums from the left edge, then re-anchor so B_0 = 0 exactly.
  for (std::size_t k = 1; k <= g.n; ++k)
    for (std::size_t i = 0; i < m; ++i)
      path.at(k)[i] = path.at(k - 1)[i] +
                      sqrt_h * counter_gaussian(spec.seed, (k - 1) * m + i);
  for (std::size_t i = 0; i < m; ++i) {
    const double b0 = path.at(ext)[i];
    for (std::size_t k = 0; k <= g.n; ++k) path.at(k)[i] -= b0;
  }
  path.check_finite();

  TwoParamTensor tensor = tensor_from_quadrature(path, path);
  // Stratonovich-to-level-2 step correction: -h/2 on each diagonal entry.
  // (t - s)/2 aggregates additively under the Chen recursion.
  for (std::size_t k = 0; k < g.n; ++k) {
    auto sk = tensor.step(k);
    for (std::size_t i = 0; i < m; ++i) sk[i * m + i] -= 0.5 * g.h;
  }
  return {std::move(path), std::move(tensor)};
}

Signal gen_smooth(const SignalSpec& spec) {
  if (spec.kind != SignalKind::smooth_poly && spec.kind != SignalKind::smooth_sine)
    throw std::invalid_argument("spec is not a smooth kind");
  if (spec.kind == SignalKind::smooth_poly && spec.poly_coeffs.size() != spec.dim)
    throw std::invalid_argument("poly_coeffs must have one list per dimension");
  if (spec.kind == SignalKind::smooth_sine &&
      (spec.sine_amp.size() != spec.dim || spec.sine_freq.size() != spec.dim ||
       spec.sine_phase.size() != spec.dim))
    throw std::invalid_argument("sine params must have one entry per dimension");
  return deterministic_signal(spec);
}

Signal gen_fourier_holder(const SignalSpec& spec) {
  if (spec.kind != SignalKind::fourier_holder)
    throw std::invalid_argument("spec is not fourier_holder");
  if (spec.fourier_modes < 1)
    throw std::invalid_argument("fourier_holder needs at least one mode");
  return deterministic_signal(spec);
}

Signal generate(const SignalSpec& spec) {
  switch (spec.kind) {
    case SignalKind::brownian: return gen_brownian(spec);
    case SignalKind::smooth_poly:
    case SignalKind::smooth_sine: return gen_smooth(spec);
    case SignalKind::fourier_holder: return gen_fourier_holder(spec);
  }
  throw std::invalid_argument("unknown signal kind");
}

DelayedTensors delayed_cross_tensors(const GridPath& y,
                                     const TwoParamTensor& yy, double r) {
  if (!(yy.grid() == y.grid)) throw std::invalid_argument("grid mismatch");
  const std::size_t m = y.grid.delay_steps(r);
  const std::size_t dim = y.dim;
  const Grid& g = y.grid;
  if (m >= g.n) throw std::invalid_argument("insufficient left extension for shift");

  GridPath shifted = shift_path(y, r);                       // on [t0 + r, T]
  GridPath trimmed = y.restrict(g.time(m), g.end());         // y on the same grid
  const std::size_t n = trimmed.grid.n;

  DelayedTensors out;
  out.r = r;
  out.shift_y = TwoParamTensor(shifted, trimmed);
  out.y_shift = TwoParamTensor(trimmed, shifted);
  for (std::size_t k = 0; k < n; ++k) {
    auto a = out.shift_y.step(k);
    auto b = out.y_shift.step(k);
    for (std::size_t i = 0; i < dim; ++i) {
      const double dxs = y.at(k + 1)[i] - y.at(k)[i];          // shifted increment
      const double dx = y.at(m + k + 1)[i] - y.at(m + k)[i];
      for (std::size_t j = 0; j < dim; ++j) {
        const double dys = y.at(k + 1)[j] - y.at(k)[j];
        const double dy = y.at(m + k + 1)[j] - y.at(m + k)[j];
        a[i * dim + j] = 0.5 * dxs * dy;
        b[i * dim + j] = 0.5 * dx * dys;
      }
    }
  }

  // y (x) y restricted to [t0 + r, T]; carries any diagonal correction.
  TwoParamTensor yy_trim = yy.restrict(g.time(m), g.end());
  // Tensor of the shifted path: the original steps re-indexed.
  TwoParamTensor yy_shifted(shifted, shifted);
  const std::size_t bl = yy_shifted.block();
  for (std::size_t k = 0; k < n; ++k) {
    auto sk = yy_shifted.step(k);
    const auto src = yy.step(k);
    for (std::size_t q = 0; q < bl; ++q) sk[q] = src[q];
  }

  GridPath diff = path_difference(trimmed, shifted);
  out.diff_y = tensor_linear_combination(1.0, yy_trim, -1.0, out.shift_y,
                                         diff, trimmed);
  out.shift_diff = tensor_linear_combination(1.0, out.shift_y, -1.0, yy_shifted,
                                             shifted, diff);
  out.y_diff = tensor_linear_combination(1.0, yy_trim, -1.0, out.y_shift,
                                         trimmed, diff);

  // Running forms. Step k of int z (x) dy is the bilinear step plus
  // z(t_k) (x) dy_k, which reproduces the trapezoid value of the integral
  // with z by value; the diagonal correction carried by yy / yy_shifted
  // turns the Brownian cases into their mean-zero versions. Carrier left
  // paths are constant, so aggregation is a plain sum.
  GridPath zero_carrier(trimmed.grid, dim);
  out.running_diff = TwoParamTensor(zero_carrier, trimmed);
  out.running_diff_shift = TwoParamTensor(zero_carrier, shifted);
  out.running_diff_diff = TwoParamTensor(zero_carrier, diff);
  for (std::size_t k = 0; k < n; ++k) {
    auto st = out.running_diff.step(k);
    auto ss = out.running_diff_shift.step(k);
    auto sd = out.running_diff_diff.step(k);
    const auto base_y = out.diff_y.step(k);        // yy - shift_y
    const auto y_sh = out.y_shift.step(k);
    const auto yy_sh = yy_shifted.step(k);
    for (std::size_t i = 0; i < dim; ++i) {
      const double zi = diff.at(k)[i];
      for (std::size_t j = 0; j < dim; ++j) {
        const double dy = y.at(m + k + 1)[j] - y.at(m + k)[j];
        const double dyr = y.at(k + 1)[j] - y.at(k)[j];
        const std::size_t q = i * dim + j;
        st[q] = base_y[q] + zi * dy;
        ss[q] = (y_sh[q] - yy_sh[q]) + zi * dyr;
        sd[q] = st[q] - ss[q];
      }
    }
  }
  return out;
}

} // namespace roughdelay
