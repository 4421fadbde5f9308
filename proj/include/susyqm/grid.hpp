#pragma once

#include <cmath>
#include <complex>
#include <type_traits>

#include <Eigen/Dense>

#include "susyqm/errors.hpp"

namespace susyqm {

using Complex = std::complex<double>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename T>
struct is_complex : std::false_type {};
template <typename T>
struct is_complex<std::complex<T>> : std::true_type {};
template <typename T>
inline constexpr bool is_complex_v = is_complex<T>::value;

/// Uniform grid on [x_min, x_max] with n points (both ends included).
struct Grid {
  double x_min = 0.0;
  double x_max = 1.0;
  Eigen::Index n = 2;

  double spacing() const { return (x_max - x_min) / static_cast<double>(n - 1); }
  double operator[](Eigen::Index i) const { return x_min + static_cast<double>(i) * spacing(); }

  /// Grid over [x_min, x_max] with spacing as close as possible to h.
  static Grid with_spacing(double x_min, double x_max, double h) {
    const auto cells = static_cast<Eigen::Index>(std::llround((x_max - x_min) / h));
    return Grid{x_min, x_max, cells + 1};
  }
};

inline void validate(const Grid& grid) {
  if (!(grid.x_max > grid.x_min) || !std::isfinite(grid.x_min) || !std::isfinite(grid.x_max))
    throw InputError("grid: require finite x_min < x_max");
  if (grid.n < 5) throw InputError("grid: at least 5 points are required");
}

/// Function sampled on a uniform grid: values[i] = f(x0 + i*dx).
template <typename Scalar>
struct GridFunction {
  double x0 = 0.0;
  double dx = 1.0;
  Vector<Scalar> values;

  GridFunction() = default;
  GridFunction(const Grid& grid, Vector<Scalar> v)
      : x0(grid.x_min), dx(grid.spacing()), values(std::move(v)) {}

  Eigen::Index size() const { return values.size(); }
  double x(Eigen::Index i) const { return x0 + static_cast<double>(i) * dx; }
  Grid grid() const { return Grid{x0, x(size() - 1), size()}; }

  Vector<double> abscissas() const {
    return Vector<double>::LinSpaced(size(), x0, x(size() - 1));
  }

  Scalar operator[](Eigen::Index i) const { return values[i]; }
};

/// Samples f on the grid. Throws InputError on a non-finite sample.
template <typename F>
auto sample(const Grid& grid, F&& f) {
  using Scalar = std::decay_t<decltype(f(0.0))>;
  validate(grid);
  Vector<Scalar> v(grid.n);
  for (Eigen::Index i = 0; i < grid.n; ++i) {
    v[i] = f(grid[i]);
    if (!std::isfinite(std::abs(v[i]))) throw InputError("sample: non-finite value");
  }
  return GridFunction<Scalar>(grid, std::move(v));
}

inline bool same_grid(double x0a, double dxa, Eigen::Index na, double x0b, double dxb,
                      Eigen::Index nb) {
  const double tol = 1e-12 * std::max(1.0, std::abs(x0a) + std::abs(dxa) * static_cast<double>(na));
  return na == nb && std::abs(x0a - x0b) <= tol && std::abs(dxa - dxb) <= 1e-12 * dxa;
}

template <typename A, typename B>
bool same_grid(const GridFunction<A>& a, const GridFunction<B>& b) {
  return same_grid(a.x0, a.dx, a.size(), b.x0, b.dx, b.size());
}

/// Composite trapezoidal rule of |f|^2.
template <typename Scalar>
double trapezoid_norm2(const GridFunction<Scalar>& f) {
  const auto a2 = f.values.cwiseAbs2();
  const Eigen::Index n = f.size();
  return f.dx * (a2.sum() - 0.5 * (a2[0] + a2[n - 1]));
}

template <typename Scalar>
double max_abs(const GridFunction<Scalar>& f) {
  return f.values.cwiseAbs().maxCoeff();
}

}  // namespace susyqm
