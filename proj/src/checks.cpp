#include "susyqm/checks.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "susyqm/elliptic.hpp"
#include "susyqm/free_particle.hpp"
#include "susyqm/lame.hpp"
#include "susyqm/susy.hpp"
#include "susyqm/verify.hpp"

namespace susyqm {

namespace {

class Suite {
public:
  void check(const std::string& name, double value, double tolerance) {
    results_.push_back({name, value, tolerance, std::isfinite(value) && value < tolerance});
  }
  void expect(const std::string& name, bool ok) { results_.push_back({name, ok ? 0.0 : 1.0, 0.5, ok}); }
  std::vector<CheckResult> take() { return std::move(results_); }

private:
  std::vector<CheckResult> results_;
};

std::string tag(const std::string& base, double m) {
  std::ostringstream os;
  os << base << " (m=" << m << ")";
  return os.str();
}

// Random point of the centred period cell kept away from every lattice point
// of z and 2z.
ComplexValue random_cell_point(std::mt19937_64& rng, const LatticeData& lat) {
  std::uniform_real_distribution<double> unit(-0.95, 0.95);
  for (;;) {
    const ComplexValue z = unit(rng) * lat.omega + unit(rng) * lat.omega_prime;
    const auto near_lattice = [&](ComplexValue p) {
      const double a = std::round(p.real() / (2.0 * lat.omega));
      const double b = std::round(p.imag() / (2.0 * lat.omega_prime.imag()));
      return std::abs(p - 2.0 * a * lat.omega - 2.0 * b * lat.omega_prime) < 0.1;
    };
    if (!near_lattice(z) && !near_lattice(2.0 * z)) return z;
  }
}

double relative(ComplexValue a, ComplexValue b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

template <typename Scalar>
double max_diff(const GridFunction<Scalar>& a, const GridFunction<Scalar>& b) {
  return (a.values - b.values).cwiseAbs().maxCoeff();
}

// Central first difference on interior points.
template <typename Scalar>
Scalar first_difference(const GridFunction<Scalar>& f, Eigen::Index i) {
  return (f[i + 1] - f[i - 1]) / Scalar(2.0 * f.dx);
}

}  // namespace

std::vector<CheckResult> elliptic_suite() {
  Suite s;
  std::mt19937_64 rng(20120611);
  for (double m : {0.1, 0.5, 0.9}) {
    const auto lat = build_lattice(m);
    const ComplexValue legendre = lat.eta * lat.omega_prime - lat.eta_prime * lat.omega;
    s.check(tag("Legendre relation", m), std::abs(legendre - ComplexValue(0.0, std::numbers::pi / 2)), 1e-10);
    s.check(tag("e1 + e2 + e3 = 0", m), std::abs(lat.e1 + lat.e2 + lat.e3), 1e-12);
    s.check(tag("wp(omega) = e1", m), std::abs(wp(lat.omega, lat) - lat.e1), 1e-12);

    double dsigma = 0, dzeta = 0, dup = 0, ode = 0, quasi = 0;
    const double h = 1e-6;
    for (int k = 0; k < 100; ++k) {
      const ComplexValue z = random_cell_point(rng, lat);
      const ComplexValue sig = wsigma(z, lat), zet = wzeta(z, lat), p = wp(z, lat), pp = wp_prime(z, lat);
      dsigma = std::max(dsigma, relative((wsigma(z + h, lat) - wsigma(z - h, lat)) / (2 * h), sig * zet));
      dzeta = std::max(dzeta, relative((wzeta(z + h, lat) - wzeta(z - h, lat)) / (2 * h), -p));
      dup = std::max(dup, relative(-wsigma(2.0 * z, lat) / std::pow(sig, 4), pp));
      ode = std::max(ode, std::abs(pp * pp - (4.0 * p * p * p - lat.g2 * p - lat.g3)) /
                              std::max(1.0, std::pow(std::abs(p), 3)));
      const ComplexValue shifted = wsigma(z + 2.0 * lat.omega, lat);
      quasi = std::max(quasi, relative(shifted, -sig * std::exp(2.0 * lat.eta * (z + lat.omega))));
    }
    s.check(tag("sigma' = sigma zeta", m), dsigma, 1e-6);
    s.check(tag("zeta' = -wp", m), dzeta, 1e-6);
    s.check(tag("wp' = -sigma(2z)/sigma^4", m), dup, 1e-6);
    s.check(tag("wp'^2 = 4wp^3 - g2 wp - g3", m), ode, 1e-8);
    s.check(tag("sigma quasi-periodicity", m), quasi, 1e-8);

    if (m != 0.9) {
      double lame = 0;
      const double four_k = 4.0 * lat.omega;
      for (int i = 0; i <= 2000; ++i) {
        const double x = four_k * i / 2000.0;
        const double sn = jacobi_sn(x, m);
        lame = std::max(lame, std::abs(2 * m * sn * sn -
                                       2.0 * (wp(x + lat.omega_prime, lat).real() + (m + 1) / 3)));
      }
      s.check(tag("2m sn^2 = 2[wp(x+w') + (m+1)/3]", m), lame, 1e-8);
    }
  }
  return s.take();
}

std::vector<CheckResult> free_suite() {
  Suite s;
  const double kappa = 1.0, x0 = 3.0;
  const double D = free_D_from_x0(kappa, x0);
  const auto seed = free_seed(kappa);
  const Potential V = free_potential;
  const Grid grid{-10.0, 10.0, 2001};

  const auto diff = confluent_partner_differential(seed, D, V, grid);
  const auto closed = sample(grid, [&](double x) { return free_partner_closed_form(kappa, D, x); });
  const auto pt = sample(grid, [&](double x) { return poschl_teller(kappa, x0, x); });
  const double w0 = D + seed.evaluate(0.0).parametric_wronskian();
  const auto integral = confluent_partner_integral([&](double x) { return seed.u1(x); },
                                                   [&](double x) { return seed.du1_dx(x); }, w0,
                                                   0.0, V, grid, seed.epsilon1);
  s.check("differential vs closed form", max_diff(diff.partner_potential, closed), 1e-8);
  s.check("closed form vs Poschl-Teller", max_diff(closed, pt), 1e-12);
  s.check("differential vs Poschl-Teller", max_diff(diff.partner_potential, pt), 1e-8);
  s.check("integral vs differential", max_diff(integral.partner_potential, diff.partner_potential), 1e-6);

  EigensolveConfig cfg;
  cfg.x_min = -17.0;
  cfg.x_max = 23.0;
  cfg.n_points = 4001;
  cfg.energy_hi = 0.0;
  const auto spectrum = eigensolve([&](double x) { return poschl_teller(kappa, x0, x); }, cfg);
  s.expect("exactly one bound state below 0", spectrum.eigenvalues.size() == 1);
  if (!spectrum.eigenvalues.empty())
    s.check("bound state energy |E + 1|", std::abs(spectrum.eigenvalues[0] + 1.0), 1e-3);

  bool boundary_ok = true;
  for (const auto& row : singularity_scan(seed, -5.0, 5.0, 101, grid))
    boundary_ok &= row.singular == (row.D >= 0.0);
  s.expect("D scan: nonsingular iff D < 0", boundary_ok);

  // Fine grid for derivative identities.
  const Grid fine{-5.0, 5.0, 20001};
  const auto r = confluent_partner_differential(seed, D, V, fine);
  double wprime = 0, riccati = 0, bernoulli = 0;
  const auto gamma = sample(fine, [&](double x) { return seed.du1_dx(x) / seed.u1(x); });
  const auto coeffs = intertwiner_coefficients(r, V);
  for (Eigen::Index i = 1; i + 1 < fine.n; ++i) {
    const double u2 = r.seed[i] * r.seed[i];
    wprime = std::max(wprime, std::abs(first_difference(r.w_function, i) + u2) / u2);
    riccati = std::max(riccati, std::abs(first_difference(gamma, i) + gamma[i] * gamma[i] -
                                         (V(fine[i]) - seed.epsilon1)));
    const double g = coeffs.g[i];
    bernoulli = std::max(bernoulli, std::abs(first_difference(coeffs.g, i) - g * g - 2.0 * gamma[i] * g));
  }
  s.check("w' = -u1^2 (relative)", wprime, 1e-6);
  s.check("Riccati residual", riccati, 1e-6);
  s.check("Bernoulli residual", bernoulli, 1e-6);
  s.check("bound state residual", schrodinger_residual(r.partner_potential, r.bound_state, seed.epsilon1), 1e-5);
  return s.take();
}

std::vector<CheckResult> lame_suite() {
  Suite s;
  struct Case {
    double m, epsilon, D;
  };
  for (const Case c : {Case{0.5, 0.1, -45.0}, Case{0.1, 1.05, 20.0}}) {
    const LameSeed lame(c.m, c.epsilon);
    const auto seed = lame_seed(lame);
    const Potential V = [m = c.m](double x) { return lame_potential(m, x); };
    const Grid grid{-10.0, 10.0, 20001};

    const auto Vg = sample(grid, V);
    const auto u = sample(grid, [&](double x) { return seed.u1(x); });
    const auto due = sample(grid, [&](double x) { return seed.du1_deps(x); });
    s.check(tag("Bloch seed Schrodinger residual", c.m), schrodinger_residual(Vg, u, c.epsilon), 1e-5);
    s.check(tag("Jordan-chain residual of du1/deps1", c.m), jordan_residual(Vg, due, u, c.epsilon), 1e-4);

    const auto beta = lame.bloch_factor().beta;
    double bloch = 0;
    for (double x = -5.0; x <= 5.0; x += 0.37)
      bloch = std::max(bloch, std::abs(lame.u1(x + lame.period()) / lame.u1(x) - beta));
    s.check(tag("Bloch factor u(x+T)/u(x) = beta", c.m), bloch, 1e-8);

    const auto fd = fd_parametric_derivative(
        [m = c.m](double e) { return [l = LameSeed(m, e)](double x) { return l.u1(x); }; }, c.epsilon,
        1e-5, Grid{-5.0, 5.0, 1001});
    const auto analytic = sample(fd.grid(), [&](double x) { return seed.du1_deps(x); });
    s.check(tag("du1/deps1 vs finite difference in eps", c.m), max_diff(fd, analytic) / max_abs(analytic), 1e-4);

    const Grid wide{-20.0, 20.0, 4001};
    bool nonsingular = true;
    double closed = 0;
    try {
      const auto r = confluent_partner_differential(seed, c.D, V, wide);
      for (Eigen::Index i = 0; i < wide.n; ++i)
        closed = std::max(closed, std::abs(r.partner_potential[i] -
                                           lame_partner_closed_form(lame, c.D, wide[i])));
    } catch (const SingularTransformError&) {
      nonsingular = false;
    }
    s.expect(tag("partner nonsingular at the figure D", c.m), nonsingular);
    if (nonsingular) s.check(tag("closed form vs generic partner", c.m), closed, 1e-8);

    // Gap eigenvalue on a domain of at least 12 Bloch decay lengths.
    const double decay = std::log(std::abs(beta)) / lame.period();
    const double half = std::max(20.0, 12.0 / std::abs(decay));
    const Grid box = Grid::with_spacing(-half, half, 1e-2);
    const auto partner = confluent_partner_differential(seed, c.D, V, box);
    EigensolveConfig cfg;
    cfg.x_min = box.x_min;
    cfg.x_max = box.x_max;
    cfg.n_points = box.n;
    cfg.energy_lo = c.epsilon - 0.05;
    cfg.energy_hi = c.epsilon + 0.05;
    const auto spectrum = eigensolve(partner.partner_potential, cfg);
    double nearest = 1e300;
    for (double e : spectrum.eigenvalues) nearest = std::min(nearest, std::abs(e - c.epsilon));
    s.check(tag("gap eigenvalue |E - eps1|", c.m), nearest, 1e-2);

    const double T = 2.0 * complete_K(c.m);
    EigensolveConfig bands;
    bands.x_min = 0.0;
    bands.x_max = 16 * T;
    bands.n_points = 16 * 370 + 1;
    const auto edges = band_edges_numeric(c.m, bands);
    const auto exact = lame_bands(c.m).band_edges;
    double worst = 0;
    for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(edges[k] - exact[k]));
    s.check(tag("numeric band edges vs {m, 1, 1+m}", c.m), worst, 1e-2);
  }
  return s.take();
}

std::vector<CheckResult> run_suite(const std::string& name) {
  if (name == "elliptic") return elliptic_suite();
  if (name == "free") return free_suite();
  if (name == "lame") return lame_suite();
  if (name == "all") {
    auto out = elliptic_suite();
    for (auto&& part : {free_suite(), lame_suite()}) out.insert(out.end(), part.begin(), part.end());
    return out;
  }
  throw InputError("unknown suite '" + name + "' (expected elliptic, free, lame or all)");
}

}  // namespace susyqm
