#include "roughdelay/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace roughdelay {

namespace {

double frobenius(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

// out += (xu - xi) (x) dy
void add_cross(std::span<double> out, std::span<const double> xu,
               std::span<const double> xi, std::span<const double> dy) {
  const std::size_t d = xu.size(), m = dy.size();
  for (std::size_t i = 0; i < d; ++i) {
    const double xv = xu[i] - xi[i];
    for (std::size_t j = 0; j < m; ++j) out[i * m + j] += xv * dy[j];
  }
}

void check_pair_interval(const Grid& g, double a, double b, std::size_t& ia,
                         std::size_t& ib) {
  ia = g.index_of(a);
  ib = g.index_of(b);
  if (ia >= ib) throw std::invalid_argument("off-grid interval");
}

// Strided index set {0, c, 2c, ..., n} with c = ceil(n / 512).
std::vector<std::size_t> defect_indices(std::size_t n) {
  const std::size_t c = (n + 511) / 512;
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < n; k += c) idx.push_back(k);
  idx.push_back(n);
  return idx;
}

} // namespace

TwoParamTensor::TwoParamTensor(GridPath x, GridPath y)
    : left(std::move(x)), right(std::move(y)),
      steps(left.grid.n * left.dim * right.dim, 0.0) {
  if (!(left.grid == right.grid))
    throw std::invalid_argument("grid mismatch");
}

TwoParamTensor::TwoParamTensor(GridPath x, GridPath y,
                               std::vector<double> step_values)
    : left(std::move(x)), right(std::move(y)), steps(std::move(step_values)) {
  if (!(left.grid == right.grid))
    throw std::invalid_argument("grid mismatch");
  if (steps.size() != left.grid.n * left.dim * right.dim)
    throw std::invalid_argument("step value count does not match grid");
}

std::vector<double> TwoParamTensor::value(std::size_t i, std::size_t j) const {
  const std::size_t bl = block();
  std::vector<double> acc(bl, 0.0);
  if (j <= i) return acc;
  const auto xi = left.at(i);
  std::vector<double> dy(right.dim);
  for (std::size_t k = i; k < j; ++k) {
    const auto sk = step(k);
    for (std::size_t q = 0; q < bl; ++q) acc[q] += sk[q];
    if (k > i) {
      for (std::size_t q = 0; q < right.dim; ++q)
        dy[q] = right.at(k + 1)[q] - right.at(k)[q];
      add_cross(acc, left.at(k), xi, dy);
    }
  }
  return acc;
}

TwoParamTensor TwoParamTensor::restrict(double a, double b) const {
  std::size_t ia, ib;
  check_pair_interval(grid(), a, b, ia, ib);
  GridPath lx = left.restrict(a, b);
  GridPath ry = right.restrict(a, b);
  std::vector<double> st(steps.begin() + static_cast<std::ptrdiff_t>(ia * block()),
                         steps.begin() + static_cast<std::ptrdiff_t>(ib * block()));
  return TwoParamTensor(std::move(lx), std::move(ry), std::move(st));
}

TwoParamTensor tensor_from_quadrature(const GridPath& x, const GridPath& y) {
  if (!(x.grid == y.grid)) throw std::invalid_argument("grid mismatch");
  TwoParamTensor out(x, y);
  const std::size_t d = x.dim, m = y.dim;
  for (std::size_t k = 0; k < x.grid.n; ++k) {
    auto sk = out.step(k);
    for (std::size_t i = 0; i < d; ++i) {
      const double dx = x.at(k + 1)[i] - x.at(k)[i];
      for (std::size_t j = 0; j < m; ++j)
        sk[i * m + j] = 0.5 * dx * (y.at(k + 1)[j] - y.at(k)[j]);
    }
  }
  return out;
}

TwoParamTensor coarsen_tensor(const TwoParamTensor& t, std::size_t factor) {
  if (factor == 0 || t.grid().n % factor != 0)
    throw std::invalid_argument("non-divisible factor");
  if (factor == 1) return t;
  GridPath lx = t.left.coarsen(factor);
  GridPath ry = t.right.coarsen(factor);
  TwoParamTensor out(std::move(lx), std::move(ry));
  const std::size_t bl = t.block();
  std::vector<double> dy(t.right.dim);
  for (std::size_t K = 0; K < out.grid().n; ++K) {
    auto acc = out.step(K);
    const std::size_t base = K * factor;
    const auto xi = t.left.at(base);
    for (std::size_t k = base; k < base + factor; ++k) {
      const auto sk = t.step(k);
      for (std::size_t q = 0; q < bl; ++q) acc[q] += sk[q];
      if (k > base) {
        for (std::size_t q = 0; q < t.right.dim; ++q)
          dy[q] = t.right.at(k + 1)[q] - t.right.at(k)[q];
        add_cross(acc, t.left.at(k), xi, dy);
      }
    }
  }
  return out;
}

TwoParamTensor tensor_linear_combination(double a, const TwoParamTensor& s,
                                         double b, const TwoParamTensor& t,
                                         GridPath new_left, GridPath new_right) {
  if (!(s.grid() == t.grid()) || s.block() != t.block())
    throw std::invalid_argument("grid mismatch");
  if (!(new_left.grid == s.grid()) || !(new_right.grid == s.grid()) ||
      new_left.dim * new_right.dim != s.block())
    throw std::invalid_argument("grid mismatch");
  std::vector<double> st(s.steps.size());
  for (std::size_t q = 0; q < st.size(); ++q)
    st[q] = a * s.steps[q] + b * t.steps[q];
  return TwoParamTensor(std::move(new_left), std::move(new_right), std::move(st));
}

double holder_norm(const GridPath& p, double beta, double a, double b) {
  if (!(beta > 0.0 && beta <= 1.0))
    throw std::invalid_argument("beta must lie in (0, 1]");
  std::size_t ia, ib;
  check_pair_interval(p.grid, a, b, ia, ib);
  const std::size_t d = p.dim;
  double best = 0.0;
  for (std::size_t i = ia; i < ib; ++i) {
    const double* vi = p.values.data() + i * d;
    for (std::size_t j = i + 1; j <= ib; ++j) {
      const double* vj = p.values.data() + j * d;
      double s = 0.0;
      for (std::size_t q = 0; q < d; ++q) {
        const double dv = vj[q] - vi[q];
        s += dv * dv;
      }
      const double gap = static_cast<double>(j - i) * p.grid.h;
      const double val = std::sqrt(s) / std::pow(gap, beta);
      if (val > best) best = val;
    }
  }
  return best;
}

double sup_norm(const GridPath& p, double a, double b) {
  const std::size_t ia = p.grid.index_of(a);
  const std::size_t ib = p.grid.index_of(b);
  double best = 0.0;
  for (std::size_t k = ia; k <= ib; ++k)
    best = std::max(best, frobenius(p.at(k)));
  return best;
}

namespace {

// Shared pair sweep: visits every grid pair (i, j) in [ia, ib] with the
// running Chen value A_{i,j} and calls cb(gap, value).
template <typename Cb>
void sweep_pairs(const TwoParamTensor& t, std::size_t ia, std::size_t ib, Cb cb) {
  const std::size_t bl = t.block();
  const std::size_t m = t.right.dim;
  std::vector<double> acc(bl);
  std::vector<double> dy(m);
  for (std::size_t i = ia; i < ib; ++i) {
    std::fill(acc.begin(), acc.end(), 0.0);
    const auto xi = t.left.at(i);
    for (std::size_t j = i + 1; j <= ib; ++j) {
      const auto sk = t.step(j - 1);
      for (std::size_t q = 0; q < bl; ++q) acc[q] += sk[q];
      if (j - 1 > i) {
        for (std::size_t q = 0; q < m; ++q)
          dy[q] = t.right.at(j)[q] - t.right.at(j - 1)[q];
        add_cross(acc, t.left.at(j - 1), xi, dy);
      }
      cb(static_cast<double>(j - i) * t.grid().h, std::span<const double>(acc));
    }
  }
}

} // namespace

double two_param_norm(const TwoParamTensor& t, double two_beta, double a, double b) {
  if (!(two_beta > 0.0 && two_beta <= 2.0))
    throw std::invalid_argument("two_beta must lie in (0, 2]");
  std::size_t ia, ib;
  check_pair_interval(t.grid(), a, b, ia, ib);
  double best = 0.0;
  sweep_pairs(t, ia, ib, [&](double gap, std::span<const double> v) {
    const double val = frobenius(v) / std::pow(gap, two_beta);
    if (val > best) best = val;
  });
  return best;
}

double tensor_sup_norm(const TwoParamTensor& t, double a, double b) {
  std::size_t ia, ib;
  check_pair_interval(t.grid(), a, b, ia, ib);
  double best = 0.0;
  sweep_pairs(t, ia, ib, [&](double, std::span<const double> v) {
    best = std::max(best, frobenius(v));
  });
  return best;
}

double endpoint_slice_norm(const TwoParamTensor& t, double beta, double a, double b) {
  std::size_t ia, ib;
  check_pair_interval(t.grid(), a, b, ia, ib);
  // Slice values A_{u,b} for u in [a, b]; A_{b,b} = 0.
  const std::size_t bl = t.block();
  std::vector<std::vector<double>> slice(ib - ia + 1);
  for (std::size_t i = ia; i <= ib; ++i) slice[i - ia] = t.value(i, ib);
  double best = 0.0;
  for (std::size_t i = ia; i < ib; ++i)
    for (std::size_t j = i + 1; j <= ib; ++j) {
      double s = 0.0;
      for (std::size_t q = 0; q < bl; ++q) {
        const double dv = slice[j - ia][q] - slice[i - ia][q];
        s += dv * dv;
      }
      const double gap = static_cast<double>(j - i) * t.grid().h;
      best = std::max(best, std::sqrt(s) / std::pow(gap, beta));
    }
  return best;
}

namespace {

double defect_from_table(const std::vector<std::vector<double>>& table,
                         const std::vector<std::size_t>& idx,
                         const GridPath& left, const GridPath& right,
                         double* scale_out) {
  const std::size_t s = idx.size();
  double scale = 0.0;
  for (std::size_t p = 0; p < s; ++p)
    for (std::size_t q = p + 1; q < s; ++q)
      scale = std::max(scale, frobenius(table[p * s + q]));
  if (scale_out) *scale_out = scale;

  double worst2 = 0.0;
  const std::size_t d = left.dim, m = right.dim;
  for (std::size_t p = 0; p < s; ++p) {
    const auto xi = left.at(idx[p]);
    for (std::size_t u = p + 1; u < s; ++u) {
      const auto& a_iu = table[p * s + u];
      const auto xu = left.at(idx[u]);
      const auto yu = right.at(idx[u]);
      for (std::size_t q = u + 1; q < s; ++q) {
        const auto& a_ij = table[p * s + q];
        const auto& a_uj = table[u * s + q];
        const auto yj = right.at(idx[q]);
        double acc = 0.0;
        for (std::size_t r = 0; r < d; ++r) {
          const double dx = xu[r] - xi[r];
          for (std::size_t c = 0; c < m; ++c) {
            const double v = a_ij[r * m + c] - a_iu[r * m + c] -
                             a_uj[r * m + c] - dx * (yj[c] - yu[c]);
            acc += v * v;
          }
        }
        worst2 = std::max(worst2, acc);
      }
    }
  }
  return std::sqrt(worst2);
}

// Table rows come from one forward sweep per strided base index, so every
// entry is an independently accumulated value (not spliced via the relation
// being checked).
double defect_scan(const TwoParamTensor& t, double* scale_out) {
  const std::vector<std::size_t> idx = defect_indices(t.grid().n);
  const std::size_t s = idx.size();
  const std::size_t bl = t.block();
  std::vector<std::vector<double>> table(s * s);
  std::vector<double> acc(bl), dy(t.right.dim);
  for (std::size_t p = 0; p < s; ++p) {
    std::fill(acc.begin(), acc.end(), 0.0);
    const auto xi = t.left.at(idx[p]);
    std::size_t q = p + 1;
    for (std::size_t j = idx[p] + 1; j <= idx.back() && q < s; ++j) {
      const auto sk = t.step(j - 1);
      for (std::size_t b = 0; b < bl; ++b) acc[b] += sk[b];
      if (j - 1 > idx[p]) {
        for (std::size_t c = 0; c < t.right.dim; ++c)
          dy[c] = t.right.at(j)[c] - t.right.at(j - 1)[c];
        add_cross(acc, t.left.at(j - 1), xi, dy);
      }
      if (j == idx[q]) {
        table[p * s + q] = acc;
        ++q;
      }
    }
  }
  return defect_from_table(table, idx, t.left, t.right, scale_out);
}

} // namespace

double chen_defect(const TwoParamTensor& t) { return defect_scan(t, nullptr); }

double chen_defect(const MultFunctional& mf) { return defect_scan(mf.tensor, nullptr); }

double chen_defect(const TensorValueFn& value, const Grid& grid,
                   const GridPath& left, const GridPath& right) {
  const std::vector<std::size_t> idx = defect_indices(grid.n);
  const std::size_t s = idx.size();
  std::vector<std::vector<double>> table(s * s);
  for (std::size_t p = 0; p < s; ++p)
    for (std::size_t q = p + 1; q < s; ++q)
      table[p * s + q] = value(idx[p], idx[q]);
  return defect_from_table(table, idx, left, right, nullptr);
}

double chen_defect_relative(const TwoParamTensor& t) {
  double scale = 0.0;
  const double worst = defect_scan(t, &scale);
  return worst / std::max(scale, 1e-300);
}

double phi2(const TwoParamTensor& xy, double beta, double a, double b) {
  return two_param_norm(xy, 2.0 * beta, a, b) +
         holder_norm(xy.left, beta, a, b) * holder_norm(xy.right, beta, a, b);
}

double phi2(const MultFunctional& mf, double a, double b) {
  return phi2(mf.tensor, mf.exps.beta, a, b);
}

double phi3(const TwoParamTensor& xy, const TwoParamTensor& yz, double beta,
            double a, double b) {
  const double nx = holder_norm(xy.left, beta, a, b);
  const double ny = holder_norm(xy.right, beta, a, b);
  const double nz = holder_norm(yz.right, beta, a, b);
  return nx * ny * nz + nz * two_param_norm(xy, 2.0 * beta, a, b) +
         nx * two_param_norm(yz, 2.0 * beta, a, b);
}

NormReport make_norm_report(const GridPath& p, const TwoParamTensor& t,
                            double beta, double a, double b) {
  NormReport r;
  r.a = a;
  r.b = b;
  r.beta_norm = holder_norm(p, beta, a, b);
  r.two_beta_norm = two_param_norm(t, 2.0 * beta, a, b);
  r.sup = sup_norm(p, a, b);
  r.phi2_value = r.two_beta_norm +
                 r.beta_norm * holder_norm(t.right, beta, a, b);
  return r;
}

} // namespace roughdelay
