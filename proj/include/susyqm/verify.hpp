#pragma once

// Numerical oracles used to check the analytic constructions: finite-difference
// residuals, a bound-state eigensolver for -d^2/dx^2 + V and band-edge recovery.

#include <functional>
#include <vector>

#include "susyqm/grid.hpp"

namespace susyqm {

enum class Boundary { dirichlet, periodic };

struct EigensolveConfig {
  double x_min = -10.0;
  double x_max = 10.0;
  Eigen::Index n_points = 2001;
  Boundary boundary = Boundary::dirichlet;
  double energy_lo = -1e300;
  double energy_hi = 1e300;
  /// Upper bound on the number of eigenpairs returned (lowest first).
  Eigen::Index max_eigenpairs = 256;

  Grid grid() const { return Grid{x_min, x_max, n_points}; }
};

struct SpectrumReport {
  std::vector<double> eigenvalues;                  ///< ascending
  std::vector<GridFunction<double>> eigenvectors;   ///< unit norm, sum psi^2 h = 1
  std::vector<double> residuals;                    ///< max|H psi - E psi| / max|psi|
};

/// Second-order central difference psi'' at interior point i.
template <typename Scalar>
Scalar second_difference(const GridFunction<Scalar>& f, Eigen::Index i) {
  return (f[i + 1] - Scalar(2) * f[i] + f[i - 1]) / Scalar(f.dx * f.dx);
}

/// max over interior points of |-psi'' + V psi - E psi - source| / max|normalizer|.
template <typename Scalar>
double inhomogeneous_residual(const GridFunction<double>& V, const GridFunction<Scalar>& psi,
                              double E, const GridFunction<Scalar>* source, double normalizer) {
  if (!same_grid(V, psi) || (source && !same_grid(V, *source)))
    throw InputError("residual: grids do not match");
  if (V.size() < 5) throw InputError("residual: at least 5 points are required");
  double worst = 0.0;
  for (Eigen::Index i = 1; i + 1 < psi.size(); ++i) {
    Scalar r = -second_difference(psi, i) + Scalar(V[i] - E) * psi[i];
    if (source) r -= (*source)[i];
    worst = std::max(worst, std::abs(r));
  }
  return worst / normalizer;
}

/// Normalized residual of the stationary Schrodinger equation -psi'' + V psi = E psi.
template <typename Scalar>
double schrodinger_residual(const GridFunction<double>& V, const GridFunction<Scalar>& psi,
                            double E) {
  return inhomogeneous_residual<Scalar>(V, psi, E, nullptr, max_abs(psi));
}

/// Residual of the Jordan-chain equation (H - E) u2 = u1, normalized by max|u1|.
template <typename Scalar>
double jordan_residual(const GridFunction<double>& V, const GridFunction<Scalar>& u2,
                       const GridFunction<Scalar>& u1, double E) {
  return inhomogeneous_residual<Scalar>(V, u2, E, &u1, max_abs(u1));
}

/// Eigenpairs of the central-difference discretization of -d^2/dx^2 + V inside
/// [energy_lo, energy_hi]. Dirichlet: psi vanishes at both grid ends; uses
/// Sturm-sequence bisection and inverse iteration on the tridiagonal matrix.
/// Periodic: grid spans one period (last point identified with the first);
/// dense symmetric solve, limited to 6000 points.
SpectrumReport eigensolve(const GridFunction<double>& V, const EigensolveConfig& cfg);

/// Same, sampling the potential on cfg.grid().
SpectrumReport eigensolve(const std::function<double(double)>& V, const EigensolveConfig& cfg);

/// Number of eigenvalues below E of the Dirichlet matrix (Sturm count).
Eigen::Index sturm_count(const GridFunction<double>& V, double E);

/// Band edges {bottom of band 1, top of band 1, bottom of band 2} of the
/// n = 1 Lame potential from the periodic problem on cfg's domain, which must
/// span an integer number N of periods 2K(m) with an integer number of grid
/// cells per period. The periodic matrix is block-circulant, so its spectrum
/// is collected from N Bloch-twisted single-cell problems; each band holds
/// exactly N eigenvalues. Throws InputError on a non-integer period count.
std::vector<double> band_edges_numeric(double m, const EigensolveConfig& cfg);

/// Central difference in the factorization energy:
/// [u(x; eps + h) - u(x; eps - h)] / (2h) on the grid. `family(eps)` returns a
/// callable x -> u(x; eps).
template <typename Family>
auto fd_parametric_derivative(Family&& family, double epsilon1, double h_eps, const Grid& grid) {
  validate(grid);
  if (!(h_eps > 0.0)) throw InputError("fd_parametric_derivative: step must be positive");
  const auto plus = family(epsilon1 + h_eps);
  const auto minus = family(epsilon1 - h_eps);
  using Scalar = std::decay_t<decltype(plus(0.0))>;
  Vector<Scalar> v(grid.n);
  for (Eigen::Index i = 0; i < grid.n; ++i)
    v[i] = (plus(grid[i]) - minus(grid[i])) / Scalar(2.0 * h_eps);
  return GridFunction<Scalar>(grid, std::move(v));
}

}  // namespace susyqm
