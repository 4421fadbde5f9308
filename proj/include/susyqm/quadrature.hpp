#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <type_traits>

#include "susyqm/grid.hpp"

namespace susyqm {

namespace detail {

// 15-point Kronrod nodes on [0,1] (symmetric); odd indices carry the 7-point Gauss rule.
inline constexpr std::array<double, 8> kronrod_x = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_w = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss_w = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename F>
auto gauss_kronrod15(F& f, double a, double b) {
  using Scalar = std::decay_t<decltype(f(a))>;
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const Scalar fc = f(center);
  Scalar kronrod = fc * kronrod_w[7];
  Scalar gauss = fc * gauss_w[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kronrod_x[j];
    const Scalar sum = f(center - dx) + f(center + dx);
    kronrod += sum * kronrod_w[j];
    if (j % 2 == 1) gauss += sum * gauss_w[j / 2];
  }
  return std::pair<Scalar, double>{kronrod * half, std::abs((kronrod - gauss) * half)};
}

template <typename F, typename Scalar>
Scalar adapt(F& f, double a, double b, Scalar whole, double err, double tol, int depth) {
  if (err <= tol) return whole;
  if (depth == 0 || std::abs(b - a) < 1e-15 * (1.0 + std::abs(a)))
    throw NumericError("adaptive quadrature: tolerance not reached");
  const double mid = 0.5 * (a + b);
  const auto [left, el] = gauss_kronrod15(f, a, mid);
  const auto [right, er] = gauss_kronrod15(f, mid, b);
  return adapt(f, a, mid, left, el, 0.5 * tol, depth - 1) +
         adapt(f, mid, b, right, er, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (7/15) quadrature of f over [a, b] to absolute
/// tolerance abs_tol. Works for real and complex integrands. Throws
/// NumericError when the recursion limit is reached first.
template <typename F>
auto integrate(F f, double a, double b, double abs_tol = 1e-10, int max_depth = 40) {
  using Scalar = std::decay_t<decltype(f(a))>;
  if (a == b) return Scalar(0);
  const auto [whole, err] = detail::gauss_kronrod15(f, a, b);
  const double tol = std::max(abs_tol, 1e-14 * std::abs(whole));
  const Scalar value = detail::adapt(f, a, b, whole, err, tol, max_depth);
  if (!std::isfinite(std::abs(value))) throw NumericError("adaptive quadrature: non-finite result");
  return value;
}

/// Running integral I(x_i) = \int_{anchor}^{x_i} f on every point of the grid.
/// Cells are integrated independently and accumulated outward from the anchor.
template <typename F>
auto cumulative_integral(F f, const Grid& grid, double anchor, double abs_tol = 1e-10) {
  using Scalar = std::decay_t<decltype(f(anchor))>;
  validate(grid);
  const double cell_tol = abs_tol / static_cast<double>(grid.n);
  Vector<Scalar> out(grid.n);
  const double h = grid.spacing();
  auto k = static_cast<Eigen::Index>(std::llround((anchor - grid.x_min) / h));
  k = std::clamp<Eigen::Index>(k, 0, grid.n - 1);
  out[k] = integrate(f, anchor, grid[k], cell_tol);
  for (Eigen::Index i = k + 1; i < grid.n; ++i)
    out[i] = out[i - 1] + integrate(f, grid[i - 1], grid[i], cell_tol);
  for (Eigen::Index i = k - 1; i >= 0; --i)
    out[i] = out[i + 1] - integrate(f, grid[i], grid[i + 1], cell_tol);
  return GridFunction<Scalar>(grid, std::move(out));
}

}  // namespace susyqm
