#include "roughdelay/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace roughdelay {

namespace {
constexpr double kGridTol = 1e-9;
} // namespace

HolderExponents::HolderExponents(double beta_, double epsilon_, double lambda_)
    : beta(beta_), epsilon(epsilon_), lambda(lambda_) {
  if (!(beta > 1.0 / 3.0 && beta < 0.5))
    throw std::invalid_argument("beta must lie in (1/3, 1/2)");
  if (!(epsilon > 0.0))
    throw std::invalid_argument("epsilon must be positive");
  if (!(beta - 2.0 * epsilon > 0.0))
    throw std::invalid_argument("beta - 2*epsilon must be positive");
  if (!(lambda > 1.0 / (beta - epsilon) - 2.0))
    throw std::invalid_argument("lambda must exceed 1/(beta-epsilon) - 2");
}

Grid::Grid(double t0_, double h_, std::size_t n_) : t0(t0_), h(h_), n(n_) {
  if (!(h > 0.0)) throw std::invalid_argument("grid step must be positive");
  if (n < 1) throw std::invalid_argument("grid needs at least one step");
}

std::size_t Grid::index_of(double t) const {
  const double x = (t - t0) / h;
  const double k = std::round(x);
  if (k < 0.0 || k > static_cast<double>(n) ||
      std::abs(x - k) > kGridTol * std::max(1.0, std::abs(x)))
    throw std::invalid_argument("off-grid interval");
  return static_cast<std::size_t>(k);
}

bool Grid::contains_time(double t) const {
  const double x = (t - t0) / h;
  const double k = std::round(x);
  return k >= 0.0 && k <= static_cast<double>(n) &&
         std::abs(x - k) <= kGridTol * std::max(1.0, std::abs(x));
}

std::size_t Grid::delay_steps(double r) const {
  if (r < 0.0) throw std::invalid_argument("delay must be nonnegative");
  const double x = r / h;
  const double k = std::round(x);
  if (std::abs(x - k) > kGridTol * std::max(1.0, x))
    throw std::invalid_argument("r not a grid multiple");
  return static_cast<std::size_t>(k);
}

bool Grid::same_spacing(const Grid& other) const {
  return std::abs(h - other.h) <= kGridTol * h;
}

bool Grid::operator==(const Grid& other) const {
  return n == other.n && std::abs(t0 - other.t0) <= kGridTol * std::max(1.0, std::abs(t0)) &&
         same_spacing(other);
}

GridPath::GridPath(Grid g, std::size_t d)
    : grid(g), dim(d), values(g.nodes() * d, 0.0) {
  if (d < 1) throw std::invalid_argument("path dimension must be >= 1");
}

GridPath::GridPath(Grid g, std::size_t d, std::vector<double> vals)
    : grid(g), dim(d), values(std::move(vals)) {
  if (d < 1) throw std::invalid_argument("path dimension must be >= 1");
  if (values.size() != grid.nodes() * dim)
    throw std::invalid_argument("path value count does not match grid");
  check_finite();
}

void GridPath::check_finite() const {
  for (double v : values)
    if (!std::isfinite(v)) throw std::runtime_error("non-finite path value");
}

GridPath GridPath::restrict(double a, double b) const {
  const std::size_t ia = grid.index_of(a);
  const std::size_t ib = grid.index_of(b);
  if (ia >= ib) throw std::invalid_argument("off-grid interval");
  GridPath out(Grid(grid.time(ia), grid.h, ib - ia), dim);
  std::copy(values.begin() + static_cast<std::ptrdiff_t>(ia * dim),
            values.begin() + static_cast<std::ptrdiff_t>((ib + 1) * dim),
            out.values.begin());
  return out;
}

GridPath GridPath::coarsen(std::size_t factor) const {
  if (factor == 0 || grid.n % factor != 0)
    throw std::invalid_argument("non-divisible factor");
  if (factor == 1) return *this;
  GridPath out(Grid(grid.t0, grid.h * static_cast<double>(factor), grid.n / factor), dim);
  for (std::size_t k = 0; k <= out.grid.n; ++k)
    for (std::size_t i = 0; i < dim; ++i)
      out.values[k * dim + i] = values[k * factor * dim + i];
  return out;
}

GridPath shift_path(const GridPath& p, double r) {
  const std::size_t m = p.grid.delay_steps(r);
  if (m == 0) return p;
  if (m >= p.grid.n)
    throw std::invalid_argument("insufficient left extension for shift");
  GridPath out(Grid(p.grid.time(m), p.grid.h, p.grid.n - m), p.dim);
  std::copy(p.values.begin(),
            p.values.begin() + static_cast<std::ptrdiff_t>((p.grid.n - m + 1) * p.dim),
            out.values.begin());
  return out;
}

GridPath path_difference(const GridPath& a, const GridPath& b) {
  if (!(a.grid == b.grid) || a.dim != b.dim)
    throw std::invalid_argument("grid mismatch");
  GridPath out(a.grid, a.dim);
  for (std::size_t i = 0; i < a.values.size(); ++i)
    out.values[i] = a.values[i] - b.values[i];
  return out;
}

} // namespace roughdelay
