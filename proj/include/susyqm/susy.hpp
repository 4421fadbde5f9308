#pragma once

// Confluent second-order SUSY transformations on a uniform grid.
//
// Given a seed u1 solving -u'' + V u = eps1 u together with its parametric
// derivative du1/deps1, the partner potential is
//
//   Vt = V - 2 [ln w]'',   w = D + W(u1, du1/deps1),
//
// and since w' = -u1^2 the second log-derivative is expanded analytically:
//
//   Vt = V + 4 u1 u1' / w + 2 u1^4 / w^2.
//
// Complex seeds (Bloch functions) are processed in complex arithmetic; the
// partner potential must come out real and its imaginary part is checked.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <tuple>
#include <string>
#include <vector>

#include "susyqm/errors.hpp"
#include "susyqm/grid.hpp"
#include "susyqm/quadrature.hpp"

namespace susyqm {

using Potential = std::function<double(double)>;

/// Wronskian W(f, g) = f g' - f' g from values and first derivatives.
template <typename Scalar>
constexpr Scalar wronskian(Scalar f, Scalar fprime, Scalar g, Scalar gprime) {
  return f * gprime - fprime * g;
}

/// Value of a seed and of its x-, eps- and mixed derivatives at one abscissa.
template <typename Scalar>
struct SeedSample {
  Scalar u;
  Scalar du_dx;
  Scalar du_deps;
  Scalar d2u_dxdeps;

  /// W(u1, du1/deps1).
  Scalar parametric_wronskian() const { return wronskian(u, du_dx, du_deps, d2u_dxdeps); }
};

/// Factorization energy plus an evaluator for u1 and its derivatives.
template <typename Scalar>
struct ConfluentSeed {
  double epsilon1 = 0.0;
  std::function<SeedSample<Scalar>(double)> evaluate;

  Scalar u1(double x) const { return evaluate(x).u; }
  Scalar du1_dx(double x) const { return evaluate(x).du_dx; }
  Scalar du1_deps(double x) const { return evaluate(x).du_deps; }
  Scalar d2u1_dxdeps(double x) const { return evaluate(x).d2u_dxdeps; }
};

template <typename Scalar>
struct TransformResult {
  GridFunction<double> partner_potential;  ///< Vt
  GridFunction<Scalar> w_function;         ///< D + W(u1, du1/deps1)
  GridFunction<Scalar> bound_state;        ///< u1 / w, unit L2 norm (trapezoidal)
  GridFunction<Scalar> seed;               ///< u1 on the grid
  GridFunction<Scalar> seed_derivative;    ///< u1' on the grid
  double D = 0.0;
  double epsilon1 = 0.0;
};

/// Coefficients of B+ = d^2/dx^2 + g d/dx + h.
template <typename Scalar>
struct IntertwinerCoefficients {
  GridFunction<Scalar> g;
  GridFunction<Scalar> h;
  double d = 0.0;
};

namespace detail {

template <typename Scalar>
double real_part(Scalar v) {
  if constexpr (is_complex_v<Scalar>)
    return v.real();
  else
    return v;
}

template <typename Scalar>
double imag_part(Scalar v) {
  if constexpr (is_complex_v<Scalar>)
    return v.imag();
  else
    return 0.0;
}

/// Bisection for a sign change of f on [a, b] down to a bracket of width tol.
template <typename F>
double bisect(F&& f, double a, double b, double tol = 1e-10) {
  double fa = f(a);
  if (fa == 0.0) return a;
  if (f(b) == 0.0) return b;
  while (b - a > tol) {
    const double mid = 0.5 * (a + b);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (fa < 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

/// First zero of a sampled real function: an exact zero sample or a sign
/// change between neighbours, refined with `refine` when it is provided.
template <typename Scalar, typename F>
std::optional<double> locate_zero(const GridFunction<Scalar>& w, F&& refine) {
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const double wi = real_part(w[i]);
    if (wi == 0.0) return w.x(i);
    if (i + 1 < w.size()) {
      const double wn = real_part(w[i + 1]);
      if ((wi < 0.0) != (wn < 0.0) && wn != 0.0) return bisect(refine, w.x(i), w.x(i + 1));
    }
  }
  return std::nullopt;
}

inline std::string location_message(const std::string& what, double x) {
  std::ostringstream os;
  os.precision(12);
  os << what << " at x = " << x;
  return os.str();
}

template <typename Scalar>
void check_finite(const SeedSample<Scalar>& s) {
  if (!std::isfinite(std::abs(s.u)) || !std::isfinite(std::abs(s.du_dx)) ||
      !std::isfinite(std::abs(s.du_deps)) || !std::isfinite(std::abs(s.d2u_dxdeps)))
    throw InputError("seed: non-finite value");
}

inline double partner_real(Complex v) {
  if (std::abs(v.imag()) > 1e-8 * std::max(1.0, std::abs(v.real())))
    throw ConsistencyError("partner potential: imaginary part exceeds 1e-8");
  return v.real();
}
inline double partner_real(double v) { return v; }

/// Vt on a grid from u1, u1', w (and V); shared by both confluent routes.
template <typename Scalar>
TransformResult<Scalar> assemble(const Grid& grid, const Potential& V, Vector<Scalar> u,
                                 Vector<Scalar> du, Vector<Scalar> w, double D,
                                 double epsilon1) {
  Vector<double> vt(grid.n);
  Vector<Scalar> psi(grid.n);
  for (Eigen::Index i = 0; i < grid.n; ++i) {
    // (u / w) u keeps the intermediate small when u grows like sqrt|w|
    const Scalar ratio = u[i] / w[i] * u[i];
    const Scalar delta = Scalar(4) * du[i] / w[i] * u[i] + Scalar(2) * ratio * ratio;
    vt[i] = V(grid[i]) + partner_real(delta);
    psi[i] = u[i] / w[i];
  }
  TransformResult<Scalar> out;
  out.partner_potential = GridFunction<double>(grid, std::move(vt));
  out.w_function = GridFunction<Scalar>(grid, std::move(w));
  out.bound_state = GridFunction<Scalar>(grid, std::move(psi));
  const double norm = std::sqrt(trapezoid_norm2(out.bound_state));
  if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericError("bound state: zero or non-finite norm");
  out.bound_state.values /= Scalar(norm);
  out.seed = GridFunction<Scalar>(grid, std::move(u));
  out.seed_derivative = GridFunction<Scalar>(grid, std::move(du));
  out.D = D;
  out.epsilon1 = epsilon1;
  return out;
}

}  // namespace detail

/// Confluent partner by the differential Wronskian formula,
/// w = D + W(u1, du1/deps1). Throws SingularTransformError naming the zero of
/// w when it vanishes on the grid.
template <typename Scalar>
TransformResult<Scalar> confluent_partner_differential(const ConfluentSeed<Scalar>& seed,
                                                       double D, const Potential& V,
                                                       const Grid& grid) {
  validate(grid);
  if (!std::isfinite(D)) throw InputError("confluent_partner_differential: D must be finite");
  Vector<Scalar> u(grid.n), du(grid.n), w(grid.n);
  for (Eigen::Index i = 0; i < grid.n; ++i) {
    const auto s = seed.evaluate(grid[i]);
    detail::check_finite(s);
    u[i] = s.u;
    du[i] = s.du_dx;
    w[i] = Scalar(D) + s.parametric_wronskian();
    if (!std::isfinite(std::abs(w[i])))
      throw NumericError(detail::location_message("w overflows", grid[i]));
  }
  const GridFunction<Scalar> wf(grid, w);
  const auto zero = detail::locate_zero(wf, [&](double x) {
    return D + detail::real_part(seed.evaluate(x).parametric_wronskian());
  });
  if (zero)
    throw SingularTransformError(
        detail::location_message("singular transform: w = D + W(u1, du1/deps1) vanishes", *zero),
        *zero);
  return detail::assemble(grid, V, std::move(u), std::move(du), std::move(w), D, seed.epsilon1);
}

/// Confluent partner by the integral formula, w = w0 - \int_{x0}^x u1^2,
/// with the integral done by adaptive quadrature (absolute tolerance 1e-10).
/// u1 and u1' are taken as plain functions; eps1 is informational.
template <typename U, typename DU>
auto confluent_partner_integral(U u1, DU du1, double w0, double x0, const Potential& V,
                                const Grid& grid, double epsilon1 = 0.0) {
  using Scalar = std::decay_t<decltype(u1(0.0))>;
  validate(grid);
  const auto square = [&](double y) { return u1(y) * u1(y); };
  auto integral = cumulative_integral(square, grid, x0);
  Vector<Scalar> w = Vector<Scalar>::Constant(grid.n, Scalar(w0)) - integral.values;
  const GridFunction<Scalar> wf(grid, w);
  const auto zero = detail::locate_zero(wf, [&](double x) {
    const auto k = static_cast<Eigen::Index>(std::floor((x - grid.x_min) / grid.spacing()));
    const auto i = std::clamp<Eigen::Index>(k, 0, grid.n - 1);
    return detail::real_part(w[i] - integrate(square, grid[i], x, 1e-12));
  });
  if (zero)
    throw SingularTransformError(
        detail::location_message("singular transform: w = w0 - int u1^2 vanishes", *zero), *zero);
  Vector<Scalar> u(grid.n), du(grid.n);
  for (Eigen::Index i = 0; i < grid.n; ++i) {
    u[i] = u1(grid[i]);
    du[i] = du1(grid[i]);
  }
  return detail::assemble(grid, V, std::move(u), std::move(du), std::move(w), w0, epsilon1);
}

/// u1_perp(x) = u1(x) \int_{anchor}^x u1^{-2}, so that W(u1, u1_perp) = 1.
template <typename Scalar>
class OrthogonalSolution {
public:
  OrthogonalSolution(std::function<Scalar(double)> u1, std::function<Scalar(double)> du1,
                     double anchor)
      : u1_(std::move(u1)), du1_(std::move(du1)), anchor_(anchor) {}

  Scalar value(double x) const { return u1_(x) * integral(x); }
  Scalar derivative(double x) const { return du1_(x) * integral(x) + Scalar(1) / u1_(x); }

  /// Value and derivative on a whole grid with one cumulative quadrature.
  std::pair<GridFunction<Scalar>, GridFunction<Scalar>> on_grid(const Grid& grid) const {
    check_path(std::min(grid.x_min, anchor_), std::max(grid.x_max, anchor_));
    const auto I = cumulative_integral(inverse_square(), grid, anchor_);
    Vector<Scalar> v(grid.n), d(grid.n);
    for (Eigen::Index i = 0; i < grid.n; ++i) {
      const Scalar u = u1_(grid[i]);
      v[i] = u * I[i];
      d[i] = du1_(grid[i]) * I[i] + Scalar(1) / u;
    }
    return {GridFunction<Scalar>(grid, std::move(v)), GridFunction<Scalar>(grid, std::move(d))};
  }

  double anchor() const { return anchor_; }

private:
  std::function<Scalar(double)> inverse_square() const {
    return [u1 = u1_](double y) {
      const Scalar u = u1(y);
      return Scalar(1) / (u * u);
    };
  }

  Scalar integral(double x) const {
    check_path(std::min(x, anchor_), std::max(x, anchor_));
    try {
      return integrate(inverse_square(), anchor_, x, 1e-12);
    } catch (const NumericError&) {
      throw DomainError("orthogonal_solution: 1/u1^2 not integrable on the path");
    }
  }

  // Nodes of u1 make 1/u1^2 non-integrable.
  void check_path(double a, double b) const {
    const auto steps = std::max<long>(16, static_cast<long>(std::ceil((b - a) * 64.0)));
    double prev = detail::real_part(u1_(a));
    for (long k = 0; k <= steps; ++k) {
      const double y = a + (b - a) * static_cast<double>(k) / static_cast<double>(steps);
      const Scalar u = u1_(y);
      const double re = detail::real_part(u);
      if (std::abs(u) == 0.0 || (k > 0 && (re < 0.0) != (prev < 0.0)))
        throw DomainError(detail::location_message(
            "orthogonal_solution: u1 vanishes on the integration path", y));
      prev = re;
    }
  }

  std::function<Scalar(double)> u1_;
  std::function<Scalar(double)> du1_;
  double anchor_;
};

template <typename Scalar>
OrthogonalSolution<Scalar> orthogonal_solution(const ConfluentSeed<Scalar>& seed, double anchor) {
  return OrthogonalSolution<Scalar>([seed](double x) { return seed.u1(x); },
                                    [seed](double x) { return seed.du1_dx(x); }, anchor);
}

/// Second member of the Jordan chain, u2 = C u1 + D u1_perp + du1/deps1,
/// solving (H - eps1) u2 = u1.
template <typename Scalar>
class JordanChainU2 {
public:
  JordanChainU2(ConfluentSeed<Scalar> seed, double C, double D, double anchor)
      : seed_(std::move(seed)), C_(C), D_(D), perp_(orthogonal_solution(seed_, anchor)) {}

  Scalar value(double x) const {
    const auto s = seed_.evaluate(x);
    return Scalar(C_) * s.u + perp_term(x, &OrthogonalSolution<Scalar>::value) + s.du_deps;
  }
  Scalar derivative(double x) const {
    const auto s = seed_.evaluate(x);
    return Scalar(C_) * s.du_dx + perp_term(x, &OrthogonalSolution<Scalar>::derivative) +
           s.d2u_dxdeps;
  }

  /// W(u1, u2) evaluated from the chain members (C drops out identically).
  Scalar wronskian_with_seed(double x) const {
    const auto s = seed_.evaluate(x);
    return wronskian(s.u, s.du_dx, value(x), derivative(x));
  }

  std::pair<GridFunction<Scalar>, GridFunction<Scalar>> on_grid(const Grid& grid) const {
    Vector<Scalar> v(grid.n), d(grid.n);
    GridFunction<Scalar> pv, pd;
    if (D_ != 0.0) std::tie(pv, pd) = perp_.on_grid(grid);
    for (Eigen::Index i = 0; i < grid.n; ++i) {
      const auto s = seed_.evaluate(grid[i]);
      v[i] = Scalar(C_) * s.u + s.du_deps;
      d[i] = Scalar(C_) * s.du_dx + s.d2u_dxdeps;
      if (D_ != 0.0) {
        v[i] += Scalar(D_) * pv[i];
        d[i] += Scalar(D_) * pd[i];
      }
    }
    return {GridFunction<Scalar>(grid, std::move(v)), GridFunction<Scalar>(grid, std::move(d))};
  }

  const ConfluentSeed<Scalar>& seed() const { return seed_; }
  double C() const { return C_; }
  double D() const { return D_; }

private:
  Scalar perp_term(double x, Scalar (OrthogonalSolution<Scalar>::*f)(double) const) const {
    return D_ == 0.0 ? Scalar(0) : Scalar(D_) * (perp_.*f)(x);
  }

  ConfluentSeed<Scalar> seed_;
  double C_;
  double D_;
  OrthogonalSolution<Scalar> perp_;
};

template <typename Scalar>
JordanChainU2<Scalar> jordan_chain_u2(const ConfluentSeed<Scalar>& seed, double C, double D,
                                      double anchor) {
  return JordanChainU2<Scalar>(seed, C, D, anchor);
}

/// g = -(ln w)' = u1^2 / w and h = -g'/2 + g^2/2 - V + d with d = eps1 (c = 0).
/// g' is taken analytically: g' = 2 u1 u1'/w + u1^4/w^2.
template <typename Scalar>
IntertwinerCoefficients<Scalar> intertwiner_coefficients(const TransformResult<Scalar>& r,
                                                         const Potential& V) {
  const auto grid = r.w_function.grid();
  const auto& u = r.seed.values;
  const auto& du = r.seed_derivative.values;
  const auto& w = r.w_function.values;
  Vector<Scalar> g(grid.n), h(grid.n);
  for (Eigen::Index i = 0; i < grid.n; ++i) {
    g[i] = u[i] * u[i] / w[i];
    const Scalar gprime = Scalar(2) * u[i] * du[i] / w[i] + g[i] * g[i];
    h[i] = -gprime / Scalar(2) + g[i] * g[i] / Scalar(2) - Scalar(V(grid[i])) + Scalar(r.epsilon1);
  }
  return {GridFunction<Scalar>(grid, std::move(g)), GridFunction<Scalar>(grid, std::move(h)),
          r.epsilon1};
}

/// A solution of (H - epsilon) u = source. An empty source means an ordinary
/// eigen-solution; a Jordan-chain partner carries source = u1.
template <typename Scalar>
struct Solution {
  double epsilon = 0.0;
  std::function<Scalar(double)> u;
  std::function<Scalar(double)> du;
  std::function<Scalar(double)> source;
  std::function<Scalar(double)> dsource;
};

/// Second-order partner Vt = V - 2 [ln W(ua, ub)]'' with W' and W'' taken from
/// the Schrodinger equations both solutions obey. Two ordinary eigen-solutions
/// at the same energy are rejected: the confluent case needs a Jordan chain.
template <typename Scalar>
GridFunction<double> nonconfluent_partner(const Solution<Scalar>& a, const Solution<Scalar>& b,
                                          const Potential& V, const Grid& grid) {
  validate(grid);
  if (a.epsilon == b.epsilon && !a.source && !b.source)
    throw InputError("nonconfluent_partner: equal factorization energies; use the confluent route");
  const double de = a.epsilon - b.epsilon;
  const auto eval = [](const std::function<Scalar(double)>& f, double x) {
    return f ? f(x) : Scalar(0);
  };
  const auto W = [&](double x) { return wronskian(a.u(x), a.du(x), b.u(x), b.du(x)); };

  Vector<Scalar> Wv(grid.n);
  for (Eigen::Index i = 0; i < grid.n; ++i) Wv[i] = W(grid[i]);
  const GridFunction<Scalar> Wf(grid, Wv);
  const auto zero = detail::locate_zero(Wf, [&](double x) { return detail::real_part(W(x)); });
  if (zero)
    throw SingularTransformError(
        detail::location_message("singular transform: W(ua, ub) vanishes", *zero), *zero);

  Vector<double> vt(grid.n);
  for (Eigen::Index i = 0; i < grid.n; ++i) {
    const double x = grid[i];
    const Scalar ua = a.u(x), dua = a.du(x), ub = b.u(x), dub = b.du(x);
    const Scalar sa = eval(a.source, x), dsa = eval(a.dsource, x);
    const Scalar sb = eval(b.source, x), dsb = eval(b.dsource, x);
    const Scalar w1 = Scalar(de) * ua * ub - ua * sb + sa * ub;
    const Scalar w2 = Scalar(de) * (dua * ub + ua * dub) - dua * sb - ua * dsb + dsa * ub + sa * dub;
    const Scalar ratio = w1 / Wv[i];
    vt[i] = V(x) + detail::partner_real(Scalar(-2) * (w2 / Wv[i] - ratio * ratio));
  }
  return GridFunction<double>(grid, std::move(vt));
}

/// One row of a D scan.
struct ScanRow {
  double D = 0.0;
  bool singular = false;
  /// Zero of w; +/-infinity when it lies beyond the grid on the side where
  /// W(u1, du1/deps1) tends to its limit.
  std::optional<double> crossing;
};

/// For each of `samples` equally spaced D in [D_min, D_max], decides whether
/// w = D + W(u1, du1/deps1) vanishes. w is monotone (w' = -u1^2), so there is
/// at most one zero: either a sign change on the grid, or one beyond the grid
/// on the decaying side of u1, where W approaches its limit. A limit below
/// 1e-6 max|W| is taken to be exactly zero.
template <typename Scalar>
std::vector<ScanRow> singularity_scan(const ConfluentSeed<Scalar>& seed, double D_min,
                                      double D_max, int samples, const Grid& grid) {
  validate(grid);
  if (samples < 1 || !(D_max >= D_min)) throw InputError("singularity_scan: empty D range");
  Vector<double> W(grid.n);
  for (Eigen::Index i = 0; i < grid.n; ++i)
    W[i] = detail::real_part(seed.evaluate(grid[i]).parametric_wronskian());
  const double scale = W.cwiseAbs().maxCoeff();
  const bool left_decays = std::abs(W[0]) <= std::abs(W[grid.n - 1]);
  const Eigen::Index dec = left_decays ? 0 : grid.n - 1;
  const Eigen::Index grow = left_decays ? grid.n - 1 : 0;
  const double limit = std::abs(W[dec]) < 1e-6 * scale ? 0.0 : W[dec];
  const double beyond = left_decays ? -std::numeric_limits<double>::infinity()
                                    : std::numeric_limits<double>::infinity();

  std::vector<ScanRow> rows;
  rows.reserve(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) {
    const double D = samples == 1 ? D_min
                                  : D_min + (D_max - D_min) * k / static_cast<double>(samples - 1);
    ScanRow row{D, false, std::nullopt};
    const GridFunction<double> w(grid, (W.array() + D).matrix());
    row.crossing = detail::locate_zero(w, [&](double x) {
      return D + detail::real_part(seed.evaluate(x).parametric_wronskian());
    });
    if (!row.crossing) {
      const double at_limit = D + limit;
      if (at_limit == 0.0 || (at_limit < 0.0) != (w[grow] < 0.0)) row.crossing = beyond;
    }
    row.singular = row.crossing.has_value();
    rows.push_back(row);
  }
  return rows;
}

}  // namespace susyqm

namespace susyqm {

/// The same seed translated by x0: u(x) -> u(x - x0).
template <typename Scalar>
ConfluentSeed<Scalar> translated(ConfluentSeed<Scalar> seed, double x0) {
  if (x0 == 0.0) return seed;
  auto inner = std::move(seed.evaluate);
  seed.evaluate = [inner = std::move(inner), x0](double x) { return inner(x - x0); };
  return seed;
}

}  // namespace susyqm
