#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace roughdelay {

/// Hölder exponent bundle: beta in (1/3,1/2), beta' = beta - epsilon.
/// Construction enforces beta - 2*epsilon > 0 and lambda > 1/beta' - 2.
struct HolderExponents {
  double beta = 0.4;
  double epsilon = 0.02;
  double lambda = 0.9;

  HolderExponents() = default;
  HolderExponents(double beta_, double epsilon_, double lambda_);

  double beta_prime() const { return beta - epsilon; }
  double two_beta_prime() const { return 2.0 * (beta - epsilon); }
};

/// Uniform time grid t_k = t0 + k*h, k = 0..n. t0 may be negative
/// (history intervals [-r0, 0] use the same representation).
struct Grid {
  double t0 = 0.0;
  double h = 1.0;
  std::size_t n = 1;

  Grid() = default;
  Grid(double t0_, double h_, std::size_t n_);

  std::size_t nodes() const { return n + 1; }
  double time(std::size_t k) const { return t0 + static_cast<double>(k) * h; }
  double end() const { return time(n); }

  /// Index of an on-grid time; throws "off-grid interval" otherwise.
  std::size_t index_of(double t) const;
  bool contains_time(double t) const;

  /// Number of steps in a delay r; throws "r not a grid multiple" if r
  /// is not an exact nonnegative multiple of h.
  std::size_t delay_steps(double r) const;

  bool same_spacing(const Grid& other) const;
  bool operator==(const Grid& other) const;
};

/// d-dimensional path sampled on a uniform grid. Values are stored
/// node-major: values[k*dim + i] is component i at node k.
struct GridPath {
  Grid grid;
  std::size_t dim = 1;
  std::vector<double> values;

  GridPath() = default;
  GridPath(Grid g, std::size_t d);
  GridPath(Grid g, std::size_t d, std::vector<double> vals);

  std::span<const double> at(std::size_t k) const {
    return {values.data() + k * dim, dim};
  }
  std::span<double> at(std::size_t k) {
    return {values.data() + k * dim, dim};
  }
  double scalar(std::size_t k) const { return values[k * dim]; }

  /// Throws if any entry is non-finite.
  void check_finite() const;

  /// Restriction to the on-grid interval [a, b].
  GridPath restrict(double a, double b) const;

  /// Keep every `factor`-th node; factor must divide grid.n.
  GridPath coarsen(std::size_t factor) const;
};

/// Shifted path t -> p(t - r) on the trimmed grid [t0 + r, end].
/// r must be an exact multiple of the step.
GridPath shift_path(const GridPath& p, double r);

/// Pointwise difference on the common (identical) grid.
GridPath path_difference(const GridPath& a, const GridPath& b);

} // namespace roughdelay
