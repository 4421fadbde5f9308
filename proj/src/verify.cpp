#include "susyqm/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "susyqm/elliptic.hpp"
#include "susyqm/lame.hpp"

namespace susyqm {

namespace {

// Interior Dirichlet matrix: diag_i = 2/h^2 + V_i, off-diagonal -1/h^2.
struct Tridiagonal {
  Vector<double> diag;
  double off;
};

Tridiagonal dirichlet_matrix(const GridFunction<double>& V) {
  const Eigen::Index n = V.size() - 2;
  const double h2 = V.dx * V.dx;
  return {V.values.segment(1, n).array() + 2.0 / h2, -1.0 / h2};
}

Eigen::Index count_below(const Tridiagonal& T, double E) {
  const double off2 = T.off * T.off;
  Eigen::Index count = 0;
  double d = 1.0;
  for (Eigen::Index i = 0; i < T.diag.size(); ++i) {
    d = T.diag[i] - E - (i == 0 ? 0.0 : off2 / d);
    if (d == 0.0) d = -1e-300;
    if (d < 0.0) ++count;
  }
  return count;
}

// k-th eigenvalue (0-based) by bisection on the Sturm count within [lo, hi].
double kth_eigenvalue(const Tridiagonal& T, Eigen::Index k, double lo, double hi) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= 4e-16 * std::max(1.0, std::abs(mid))) break;
    if (count_below(T, mid) > k)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

// (T - shift) x = b by Gaussian elimination with partial pivoting (dgtsv scheme).
Vector<double> solve_shifted(const Tridiagonal& T, double shift, Vector<double> b) {
  const Eigen::Index n = T.diag.size();
  Vector<double> d = T.diag.array() - shift;
  Vector<double> dl = Vector<double>::Constant(n, T.off);
  Vector<double> du = Vector<double>::Constant(n, T.off);
  Vector<double> du2 = Vector<double>::Zero(n);
  const double tiny = 1e-14 * T.diag.cwiseAbs().maxCoeff() + 1e-300;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      if (std::abs(d[i]) < tiny) d[i] = tiny;
      const double fact = dl[i] / d[i];
      d[i + 1] -= fact * du[i];
      b[i + 1] -= fact * b[i];
    } else {
      const double fact = d[i] / dl[i];
      d[i] = dl[i];
      const double temp = d[i + 1];
      d[i + 1] = du[i] - fact * temp;
      if (i + 2 < n) {
        du2[i] = du[i + 1];
        du[i + 1] = -fact * du[i + 1];
      }
      du[i] = temp;
      const double bt = b[i];
      b[i] = b[i + 1];
      b[i + 1] = bt - fact * b[i + 1];
    }
  }
  if (std::abs(d[n - 1]) < tiny) d[n - 1] = tiny;
  Vector<double> x(n);
  x[n - 1] = b[n - 1] / d[n - 1];
  if (n > 1) x[n - 2] = (b[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
  for (Eigen::Index i = n - 3; i >= 0; --i)
    x[i] = (b[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
  return x;
}

Vector<double> inverse_iteration(const Tridiagonal& T, double lambda) {
  const Eigen::Index n = T.diag.size();
  Vector<double> x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = 1.0 + 0.5 * std::sin(0.7 * static_cast<double>(i));
  x.normalize();
  const double shift = lambda + 1e-12 * std::max(1.0, std::abs(lambda));
  for (int it = 0; it < 4; ++it) {
    x = solve_shifted(T, shift, x);
    x /= x.norm();
  }
  return x;
}

double pair_residual(const Tridiagonal& T, const Vector<double>& x, double lambda) {
  const Eigen::Index n = x.size();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double r = (T.diag[i] - lambda) * x[i];
    if (i > 0) r += T.off * x[i - 1];
    if (i + 1 < n) r += T.off * x[i + 1];
    worst = std::max(worst, std::abs(r));
  }
  return worst / x.cwiseAbs().maxCoeff();
}

void check_config(const GridFunction<double>& V, const EigensolveConfig& cfg) {
  if (cfg.n_points < 100) throw InputError("eigensolve: n_points must be at least 100");
  if (!(cfg.x_max > cfg.x_min)) throw InputError("eigensolve: require x_max > x_min");
  if (!(cfg.energy_hi > cfg.energy_lo)) throw InputError("eigensolve: empty energy window");
  if (V.size() != cfg.n_points) throw InputError("eigensolve: potential does not match config grid");
  if (!V.values.allFinite()) throw InputError("eigensolve: potential must be finite");
}

SpectrumReport solve_dirichlet(const GridFunction<double>& V, const EigensolveConfig& cfg) {
  const Tridiagonal T = dirichlet_matrix(V);
  // Gershgorin bounds clip the window.
  const double radius = 2.0 * std::abs(T.off);
  const double lo = std::max(cfg.energy_lo, T.diag.minCoeff() - radius);
  const double hi = std::min(cfg.energy_hi, T.diag.maxCoeff() + radius);
  SpectrumReport out;
  if (!(hi > lo)) return out;
  const Eigen::Index first = count_below(T, lo);
  const Eigen::Index last = std::min(count_below(T, hi), first + cfg.max_eigenpairs);
  const double h = V.dx;
  for (Eigen::Index k = first; k < last; ++k) {
    const double lambda = kth_eigenvalue(T, k, lo, hi);
    const Vector<double> x = inverse_iteration(T, lambda);
    Vector<double> psi = Vector<double>::Zero(V.size());
    psi.segment(1, x.size()) = x / std::sqrt(h);
    out.eigenvalues.push_back(lambda);
    out.residuals.push_back(pair_residual(T, x, lambda));
    out.eigenvectors.emplace_back(V.grid(), std::move(psi));
  }
  return out;
}

SpectrumReport solve_periodic(const GridFunction<double>& V, const EigensolveConfig& cfg) {
  const Eigen::Index n = V.size() - 1;
  if (n > 6000) throw InputError("eigensolve: periodic problems are limited to 6000 points");
  const double h = V.dx;
  const double off = -1.0 / (h * h);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    H(i, i) = 2.0 / (h * h) + V[i];
    H(i, (i + 1) % n) += off;
    H((i + 1) % n, i) += off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  if (es.info() != Eigen::Success) throw NumericError("eigensolve: dense solver did not converge");
  SpectrumReport out;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double lambda = es.eigenvalues()[k];
    if (lambda < cfg.energy_lo || lambda > cfg.energy_hi) continue;
    if (static_cast<Eigen::Index>(out.eigenvalues.size()) >= cfg.max_eigenpairs) break;
    const Vector<double> x = es.eigenvectors().col(k);
    Vector<double> psi(V.size());
    psi.head(n) = x / std::sqrt(h);
    psi[n] = psi[0];
    out.eigenvalues.push_back(lambda);
    out.residuals.push_back((H * x - lambda * x).cwiseAbs().maxCoeff() / x.cwiseAbs().maxCoeff());
    out.eigenvectors.emplace_back(V.grid(), std::move(psi));
  }
  return out;
}

}  // namespace

Eigen::Index sturm_count(const GridFunction<double>& V, double E) {
  return count_below(dirichlet_matrix(V), E);
}

SpectrumReport eigensolve(const GridFunction<double>& V, const EigensolveConfig& cfg) {
  check_config(V, cfg);
  return cfg.boundary == Boundary::dirichlet ? solve_dirichlet(V, cfg) : solve_periodic(V, cfg);
}

SpectrumReport eigensolve(const std::function<double(double)>& V, const EigensolveConfig& cfg) {
  return eigensolve(sample(cfg.grid(), V), cfg);
}

std::vector<double> band_edges_numeric(double m, const EigensolveConfig& cfg) {
  if (cfg.n_points < 100) throw InputError("band_edges_numeric: n_points must be at least 100");
  const double period = 2.0 * complete_K(m);
  const double span = (cfg.x_max - cfg.x_min) / period;
  const auto periods = static_cast<Eigen::Index>(std::llround(span));
  if (periods < 1 || std::abs(span - static_cast<double>(periods)) > 1e-9 * span)
    throw InputError("band_edges_numeric: domain must span an integer number of periods");
  const Eigen::Index cells = cfg.n_points - 1;
  if (cells % periods != 0)
    throw InputError("band_edges_numeric: grid cells must divide evenly into periods");
  const Eigen::Index n = cells / periods;
  const double h = period / static_cast<double>(n);

  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    H(i, i) = 2.0 / (h * h) + lame_potential(m, cfg.x_min + static_cast<double>(i) * h);
    if (i + 1 < n) {
      H(i, i + 1) = -1.0 / (h * h);
      H(i + 1, i) = -1.0 / (h * h);
    }
  }
  std::vector<double> all;
  all.reserve(static_cast<std::size_t>(n * periods));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es;
  for (Eigen::Index j = 0; j < periods; ++j) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(periods);
    const Complex twist = std::polar(1.0, theta) * (-1.0 / (h * h));
    Eigen::MatrixXcd Hk = H;
    // psi_{n} = e^{i theta} psi_0 closes the cell.
    Hk(n - 1, 0) += twist;
    Hk(0, n - 1) += std::conj(twist);
    es.compute(Hk, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericError("band_edges_numeric: solver did not converge");
    for (Eigen::Index k = 0; k < std::min<Eigen::Index>(n, 4); ++k) all.push_back(es.eigenvalues()[k]);
  }
  std::sort(all.begin(), all.end());
  const auto N = static_cast<std::size_t>(periods);
  return {all[0], all[N - 1], all[N]};
}

}  // namespace susyqm
