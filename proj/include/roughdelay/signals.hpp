#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "roughdelay/tensor.hpp"

namespace roughdelay {

enum class SignalKind { brownian, smooth_poly, smooth_sine, fourier_holder };

SignalKind signal_kind_from_string(const std::string& s);
std::string to_string(SignalKind k);

/// Driving-signal description. The generation grid covers [-r_max, T]
/// with step T / fine_n, so shifted reads never run off the grid.
/// The seed fully determines brownian/fourier output (bit-reproducible).
struct SignalSpec {
  SignalKind kind = SignalKind::brownian;
  std::size_t dim = 1;
  double T = 1.0;
  std::size_t fine_n = 8192;   // steps on [0, T]
  std::uint64_t seed = 1;
  double r_max = 0.0;          // left extension, multiple of T / fine_n

  // smooth_poly: component i is sum_j poly_coeffs[i][j] * t^j
  std::vector<std::vector<double>> poly_coeffs;
  // smooth_sine: component i is amp[i] * sin(2*pi*freq[i]*t + phase[i])
  std::vector<double> sine_amp, sine_freq, sine_phase;
  // fourier_holder: modes with amplitude decay k^-(beta + 1/2), random phases
  std::size_t fourier_modes = 64;
  double fourier_beta = 0.4;
  double fourier_scale = 1.0;
};

/// A generated driver: the path y and its level-2 tensor y (x) y on the
/// fine grid [-r_max, T].
struct Signal {
  GridPath path;
  TwoParamTensor tensor;
};

/// Dispatches on spec.kind. Brownian tensors carry the -h/2 diagonal
/// step correction; smooth/fourier tensors are plain trapezoid sums.
Signal generate(const SignalSpec& spec);

Signal gen_brownian(const SignalSpec& spec);
Signal gen_smooth(const SignalSpec& spec);
Signal gen_fourier_holder(const SignalSpec& spec);

/// The delayed cross tensors for a delay r (an exact multiple of the fine
/// step), each on the trimmed grid [t0 + r, T]:
///   shift_y      = y_{.-r} (x) y
///   y_shift      = y (x) y_{.-r}
///   diff_y       = (y - y_{.-r}) (x) y        (bilinear: yy - shift_y)
///   shift_diff   = y_{.-r} (x) (y - y_{.-r})  (bilinear: shift_y - shifted yy)
///   y_diff       = y (x) (y - y_{.-r})        (bilinear: yy - y_shift)
/// and the running family, where the difference z = y - y_{.-r} enters by
/// value rather than by increment from s (additive two-parameter
/// functions; constant carrier left path, plain-sum aggregation):
///   running_diff       = int z_u (x) dy_u        (for y = t: steps r * dy)
///   running_diff_shift = int z_u (x) dy_{u-r}
///   running_diff_diff  = int z_u (x) dz_u
/// The bilinear differences satisfy the Chen relation with carrier z but
/// their 2beta' norms carry an r-independent small-gap component; the
/// running forms are the quantities that visibly vanish as r -> 0 at
/// finite resolution. yy is the signal's own tensor, so any diagonal
/// correction it carries flows through all differences.
struct DelayedTensors {
  double r = 0.0;
  TwoParamTensor shift_y;
  TwoParamTensor y_shift;
  TwoParamTensor diff_y;
  TwoParamTensor shift_diff;
  TwoParamTensor y_diff;
  TwoParamTensor running_diff;
  TwoParamTensor running_diff_shift;
  TwoParamTensor running_diff_diff;
};

DelayedTensors delayed_cross_tensors(const GridPath& y,
                                     const TwoParamTensor& yy, double r);

/// Deterministic counter RNG: value k of stream `seed` (splitmix64).
std::uint64_t counter_u64(std::uint64_t seed, std::uint64_t index);
double counter_uniform(std::uint64_t seed, std::uint64_t index);
double counter_gaussian(std::uint64_t seed, std::uint64_t index);

} // namespace roughdelay
