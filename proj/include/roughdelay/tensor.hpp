#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "roughdelay/grid.hpp"

namespace roughdelay {

/// Discrete level-2 increment (x (x) y)_{s,t} stored as one d x m matrix
/// per grid step (row-major). General (s,t) values are reconstructed with
/// the Chen recursion
///   A_{i,j+1} = A_{i,j} + (x_{t_j} - x_{t_i}) (x) (y_{t_{j+1}} - y_{t_j}) + A_{j,j+1},
/// so the multiplicative property holds by construction up to rounding.
struct TwoParamTensor {
  GridPath left;   // the x of x (x) y
  GridPath right;  // the y of x (x) y
  std::vector<double> steps;  // n * d*m step matrices, row-major

  TwoParamTensor() = default;
  TwoParamTensor(GridPath x, GridPath y);
  TwoParamTensor(GridPath x, GridPath y, std::vector<double> step_values);

  const Grid& grid() const { return left.grid; }
  std::size_t d() const { return left.dim; }
  std::size_t m() const { return right.dim; }
  std::size_t block() const { return left.dim * right.dim; }

  std::span<const double> step(std::size_t k) const {
    return {steps.data() + k * block(), block()};
  }
  std::span<double> step(std::size_t k) {
    return {steps.data() + k * block(), block()};
  }

  /// Reconstructed value A_{i,j}; O(j - i) per query.
  std::vector<double> value(std::size_t i, std::size_t j) const;

  /// Restriction to the on-grid interval [a, b] (paths and steps).
  TwoParamTensor restrict(double a, double b) const;
};

/// Per-step trapezoid tensor of two paths on a shared grid:
/// step k carries (1/2) * dx_k (x) dy_k. Refine by generating on a finer
/// grid and coarsening (see coarsen_tensor).
TwoParamTensor tensor_from_quadrature(const GridPath& x, const GridPath& y);

/// Chen-aggregates fine steps onto a coarser grid; exact.
TwoParamTensor coarsen_tensor(const TwoParamTensor& t, std::size_t factor);

/// Per-step linear combination a*s + b*t with explicit carrier paths;
/// the bilinearity route for difference tensors such as (y - y_{.-r}) (x) y.
TwoParamTensor tensor_linear_combination(double a, const TwoParamTensor& s,
                                         double b, const TwoParamTensor& t,
                                         GridPath new_left, GridPath new_right);

/// The triple (x, y, x (x) y) together with its exponents.
struct MultFunctional {
  TwoParamTensor tensor;
  HolderExponents exps;

  const GridPath& x() const { return tensor.left; }
  const GridPath& y() const { return tensor.right; }
};

/// Discrete beta-Hölder norm: max over grid pairs i<j in [a,b] of
/// |p_{t_j} - p_{t_i}| / (t_j - t_i)^beta (Euclidean norm).
double holder_norm(const GridPath& p, double beta, double a, double b);

/// Supremum norm of a path over on-grid [a, b].
double sup_norm(const GridPath& p, double a, double b);

/// Discrete two-parameter norm: max over grid pairs of
/// ||A_{s,t}||_F / (t - s)^two_beta.
double two_param_norm(const TwoParamTensor& t, double two_beta, double a, double b);

/// Max of ||A_{s,t}||_F over grid pairs in [a, b].
double tensor_sup_norm(const TwoParamTensor& t, double a, double b);

/// beta-Hölder norm of the one-parameter slice u -> A_{u,b} over [a, b].
double endpoint_slice_norm(const TwoParamTensor& t, double beta, double a, double b);

/// Max Chen-relation residual over grid triples s < u < t. For n > 512 all
/// three indices are strided by ceil(n/512), which caps the scan at O(n^2)
/// work; below that the scan is exhaustive.
double chen_defect(const TwoParamTensor& t);
double chen_defect(const MultFunctional& mf);

/// Same scan against an arbitrary value source f(i, j) -> row-major d x m
/// matrix, for checking externally supplied two-parameter data.
using TensorValueFn =
    std::function<std::vector<double>(std::size_t, std::size_t)>;
double chen_defect(const TensorValueFn& value, const Grid& grid,
                   const GridPath& left, const GridPath& right);

/// chen_defect normalized by the largest reconstructed magnitude.
double chen_defect_relative(const TwoParamTensor& t);

/// Phi_{beta(a,b)}(x,y) = ||x (x) y||_{2beta(a,b)} + ||x||_{beta(a,b)} ||y||_{beta(a,b)}.
double phi2(const TwoParamTensor& xy, double beta, double a, double b);
double phi2(const MultFunctional& mf, double a, double b);

/// Phi_{beta(a,b)}(x,y,z) = ||x|| ||y|| ||z|| + ||z|| ||x (x) y|| + ||x|| ||y (x) z||.
double phi3(const TwoParamTensor& xy, const TwoParamTensor& yz, double beta,
            double a, double b);

/// Norm summary for a path/tensor pair over one interval.
struct NormReport {
  double beta_norm = 0.0;
  double two_beta_norm = 0.0;
  double sup = 0.0;
  double a = 0.0;
  double b = 0.0;
  std::optional<double> phi2_value;
  std::optional<double> phi3_value;
};

NormReport make_norm_report(const GridPath& p, const TwoParamTensor& t,
                            double beta, double a, double b);

} // namespace roughdelay
