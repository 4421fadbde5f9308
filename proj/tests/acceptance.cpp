// Acceptance run: one PASS/FAIL line per criterion, with the measured values.
// Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "susyqm/free_particle.hpp"
#include "susyqm/lame.hpp"
#include "susyqm/verify.hpp"

using namespace susyqm;

namespace {

struct Verdict {
  bool passed = true;
  std::ostringstream detail;

  // Records value < tolerance under a short label.
  void below(const std::string& label, double value, double tolerance) {
    const bool ok = std::isfinite(value) && value < tolerance;
    passed &= ok;
    detail << (detail.tellp() > 0 ? "; " : "") << label << " = " << value << (ok ? " < " : " NOT < ")
           << tolerance;
  }
  void require(const std::string& label, bool ok) {
    passed &= ok;
    detail << (detail.tellp() > 0 ? "; " : "") << label << (ok ? " ok" : " FAILED");
  }
};

int failures = 0;

void criterion(int id, const char* title, double time_limit, const std::function<void(Verdict&)>& body) {
  Verdict v;
  v.detail.precision(3);
  const auto start = std::chrono::steady_clock::now();
  try {
    body(v);
  } catch (const std::exception& e) {
    v.passed = false;
    v.detail << (v.detail.tellp() > 0 ? "; " : "") << "exception: " << e.what();
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (time_limit > 0 && seconds >= time_limit) {
    v.passed = false;
    v.detail << "; runtime over " << time_limit << " s";
  }
  if (!v.passed) ++failures;
  std::printf("%s  [%d] %s (%.2f s)\n      %s\n", v.passed ? "PASS" : "FAIL", id, title, seconds,
              v.detail.str().c_str());
  std::fflush(stdout);
}

template <typename Scalar>
double max_diff(const GridFunction<Scalar>& a, const GridFunction<Scalar>& b) {
  return (a.values - b.values).cwiseAbs().maxCoeff();
}

Potential lame_V(double m) {
  return [m](double x) { return lame_potential(m, x); };
}

double relative(ComplexValue a, ComplexValue b) { return std::abs(a - b) / std::abs(b); }

template <typename Scalar>
Scalar central(const GridFunction<Scalar>& f, Eigen::Index i) {
  return (f[i + 1] - f[i - 1]) / Scalar(2 * f.dx);
}

struct LameCase {
  double m, epsilon, D;
};
const LameCase fig3{0.5, 0.1, -45.0};
const LameCase fig4{0.1, 1.05, 20.0};

}  // namespace

int main() {
  std::printf("susyqm acceptance run\n\n");

  criterion(1, "Free-particle chain: differential = integral = closed form = Poschl-Teller", 1.0, [](Verdict& v) {
    const double kappa = 1.0, x0 = 3.0;
    const double D = free_D_from_x0(kappa, x0);
    const Grid g{-10.0, 10.0, 2001};
    const auto seed = free_seed(kappa);
    const auto diff = confluent_partner_differential(seed, D, free_potential, g);
    const double w0 = D + seed.evaluate(x0).parametric_wronskian();
    const auto integral = confluent_partner_integral([](double x) { return std::exp(x); },
                                                     [](double x) { return std::exp(x); }, w0, x0, free_potential,
                                                     g, seed.epsilon1);
    const auto closed = sample(g, [&](double x) { return free_partner_closed_form(kappa, D, x); });
    const auto pt = sample(g, [&](double x) { return poschl_teller(kappa, x0, x); });
    v.below("|diff - closed|", max_diff(diff.partner_potential, closed), 1e-8);
    v.below("|closed - PT|", max_diff(closed, pt), 1e-8);
    v.below("|diff - PT|", max_diff(diff.partner_potential, pt), 1e-8);
    v.below("|integral - diff|", max_diff(integral.partner_potential, diff.partner_potential), 1e-6);
  });

  criterion(2, "Bound-state creation: one E < 0 at -1 for the Fig. 1 potential", 10.0, [](Verdict& v) {
    const Grid g = Grid::with_spacing(-17.0, 23.0, 1e-2);
    const auto r = confluent_partner_differential(free_seed(1.0), free_D_from_x0(1.0, 3.0), free_potential, g);
    EigensolveConfig cfg;
    cfg.x_min = g.x_min;
    cfg.x_max = g.x_max;
    cfg.n_points = g.n;
    cfg.energy_hi = 0.0;
    const auto s = eigensolve(r.partner_potential, cfg);
    v.require("count(E < 0) = " + std::to_string(s.eigenvalues.size()), s.eigenvalues.size() == 1);
    if (!s.eigenvalues.empty()) v.below("|E0 + 1|", std::abs(s.eigenvalues[0] + 1.0), 1e-3);
  });

  criterion(3, "Elliptic identities: Legendre, sigma' = sigma zeta, zeta' = -wp, duplication, wp ODE", 5.0,
            [](Verdict& v) {
              std::mt19937_64 rng(2024);
              std::uniform_real_distribution<double> unit(-0.95, 0.95);
              const double h = 1e-6;
              double legendre = 0, d1 = 0, d2 = 0, d4 = 0, ode = 0;
              for (double m : {0.1, 0.5, 0.9}) {
                const auto lat = build_lattice(m);
                legendre = std::max(legendre, std::abs(lat.eta * lat.omega_prime - lat.eta_prime * lat.omega -
                                                       ComplexValue(0, std::numbers::pi / 2)));
                int accepted = 0;
                while (accepted < 100) {
                  const ComplexValue z = unit(rng) * lat.omega + unit(rng) * lat.omega_prime;
                  // keep z and 2z away from lattice points
                  if (std::abs(z) < 0.1 || std::abs(std::abs(z.real()) - lat.omega) < 0.05 ||
                      std::abs(std::abs(z.imag()) - lat.omega_prime.imag()) < 0.05 ||
                      std::abs(std::abs(2 * z.real()) - 2 * lat.omega) < 0.1 ||
                      std::abs(std::abs(2 * z.imag()) - 2 * lat.omega_prime.imag()) < 0.1)
                    continue;
                  ++accepted;
                  const ComplexValue s = wsigma(z, lat), ze = wzeta(z, lat), p = wp(z, lat), pp = wp_prime(z, lat);
                  d1 = std::max(d1, relative((wsigma(z + h, lat) - wsigma(z - h, lat)) / (2 * h), s * ze));
                  d2 = std::max(d2, relative((wzeta(z + h, lat) - wzeta(z - h, lat)) / (2 * h), -p));
                  d4 = std::max(d4, relative(-wsigma(2.0 * z, lat) / std::pow(s, 4), pp));
                  ode = std::max(ode, std::abs(pp * pp - (4.0 * p * p * p - lat.g2 * p - lat.g3)) /
                                          std::max(1.0, std::pow(std::abs(p), 3)));
                }
              }
              v.below("Legendre", legendre, 1e-10);
              v.below("sigma'", d1, 1e-6);
              v.below("zeta'", d2, 1e-6);
              v.below("duplication", d4, 1e-6);
              v.below("wp ODE", ode, 1e-6);
            });

  criterion(4, "Lame representation: 2m sn^2 = 2[wp(x + w') + (m+1)/3] on [0, 4K]", 0.0, [](Verdict& v) {
    for (double m : {0.1, 0.5}) {
      const auto lat = build_lattice(m);
      const double fourK = 4 * complete_K(m);
      double worst = 0;
      for (int i = 0; i <= 4000; ++i) {
        const double x = fourK * i / 4000.0;
        const double sn = jacobi_sn(x, m);
        worst = std::max(worst, std::abs(2 * m * sn * sn - 2 * (wp(x + lat.omega_prime, lat).real() + (m + 1) / 3)));
      }
      std::ostringstream label;
      label << "m=" << m;
      v.below(label.str(), worst, 1e-8);
    }
  });

  criterion(5, "Lame Bloch seed: Schrodinger, Bloch factor, Jordan chain, eps-derivative", 0.0, [](Verdict& v) {
    for (const auto& c : {fig3, fig4}) {
      const LameSeed lame(c.m, c.epsilon);
      const auto seed = lame_seed(lame);
      const Grid g{-10.0, 10.0, 20001};  // h = 1e-3
      const auto V = sample(g, lame_V(c.m));
      const auto u = sample(g, [&](double x) { return seed.u1(x); });
      const auto due = sample(g, [&](double x) { return seed.du1_deps(x); });
      const ComplexValue beta = lame_bloch_factor(lame).beta;
      double bloch = 0;
      for (double x = -10.0; x <= 10.0; x += 0.1)
        bloch = std::max(bloch, std::abs(lame.u1(x + lame.period()) / lame.u1(x) - beta));
      const Grid coarse{-5.0, 5.0, 1001};
      const auto fd = fd_parametric_derivative(
          [m = c.m](double e) { return [s = LameSeed(m, e)](double x) { return s.u1(x); }; }, c.epsilon, 1e-5,
          coarse);
      const auto exact = sample(coarse, [&](double x) { return seed.du1_deps(x); });
      const std::string tag = " (m=" + std::to_string(c.m).substr(0, 3) + ")";
      v.below("residual" + tag, schrodinger_residual(V, u, c.epsilon), 1e-5);
      v.below("Bloch" + tag, bloch, 1e-8);
      v.below("Jordan" + tag, jordan_residual(V, due, u, c.epsilon), 1e-4);
      v.below("eps-FD" + tag, max_diff(fd, exact) / exact.values.cwiseAbs().maxCoeff(), 1e-4);
    }
  });

  criterion(6, "Lame partner: closed form = generic, nonsingular, asymptotically periodic, gap eigenvalue", 60.0,
            [](Verdict& v) {
              for (const auto& c : {fig3, fig4}) {
                const LameSeed lame(c.m, c.epsilon);
                const auto seed = lame_seed(lame);
                const std::string tag = " (m=" + std::to_string(c.m).substr(0, 3) + ")";
                const Grid g{-20.0, 20.0, 4001};
                bool nonsingular = true;
                double closed = 0;
                try {
                  const auto r = confluent_partner_differential(seed, c.D, lame_V(c.m), g);
                  for (Eigen::Index i = 0; i < g.n; ++i)
                    closed = std::max(closed, std::abs(r.partner_potential[i] - lame_partner_closed_form(lame, c.D, g[i])));
                } catch (const SingularTransformError&) {
                  nonsingular = false;
                }
                v.require("nonsingular" + tag, nonsingular);
                v.below("|Vlame - generic|" + tag, closed, 1e-8);

                const double T = lame.period();
                double defect = 0;
                for (double x = 30.0; x <= 80.0; x += 0.01)
                  for (double y : {x, -x - T})
                    defect = std::max(defect, std::abs(lame_partner_closed_form(lame, c.D, y + T) -
                                                       lame_partner_closed_form(lame, c.D, y)));
                v.below("periodicity defect |x|>30" + tag, defect, 1e-4);

                // Dirichlet walls at least 12 decay lengths out, h = 1e-2
                const double decay = std::abs(std::log(std::abs(lame_bloch_factor(lame).beta))) / T;
                const double half = std::max(20.0, 12.0 / decay);
                const Grid box = Grid::with_spacing(-half, half, 1e-2);
                const auto r = confluent_partner_differential(seed, c.D, lame_V(c.m), box);
                EigensolveConfig cfg;
                cfg.x_min = box.x_min;
                cfg.x_max = box.x_max;
                cfg.n_points = box.n;
                cfg.energy_lo = c.epsilon - 0.05;
                cfg.energy_hi = c.epsilon + 0.05;
                double nearest = 1e300;
                for (double e : eigensolve(r.partner_potential, cfg).eigenvalues)
                  nearest = std::min(nearest, std::abs(e - c.epsilon));
                v.below("|E - eps1|" + tag, nearest, 1e-2);
              }
            });

  criterion(7, "Band structure: numeric edges within 1e-2 of {m, 1, 1+m}", 0.0, [](Verdict& v) {
    for (double m : {0.1, 0.5}) {
      EigensolveConfig cfg;
      cfg.boundary = Boundary::periodic;
      cfg.x_min = 0.0;
      cfg.x_max = 16 * 2 * complete_K(m);
      cfg.n_points = 16 * 370 + 1;
      const auto e = band_edges_numeric(m, cfg);
      const double exact[3] = {m, 1.0, 1.0 + m};
      double worst = 0;
      for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(e[k] - exact[k]));
      v.below("m=" + std::to_string(m).substr(0, 3), worst, 1e-2);
    }
  });

  criterion(8, "Structural invariants: w' = -u1^2, C-independence, Riccati, Bernoulli, D-scan boundary", 0.0,
            [](Verdict& v) {
              // free particle and the Fig. 3 seed, h = 5e-4
              const Grid fg{-5.0, 5.0, 20001};
              const auto free_r = confluent_partner_differential(free_seed(1.0), -0.5 * std::exp(6.0), free_potential, fg);
              const auto lame_r = confluent_partner_differential(lame_seed(fig3.m, fig3.epsilon), fig3.D,
                                                                 lame_V(fig3.m), fg);
              double wp_free = 0, wp_lame = 0, ric = 0, bern = 0;
              const double lame_scale = lame_r.seed.values.cwiseAbs2().maxCoeff();
              for (Eigen::Index i = 1; i + 1 < fg.n; ++i) {
                const double u2 = free_r.seed[i] * free_r.seed[i];
                wp_free = std::max(wp_free, std::abs(central(free_r.w_function, i) + u2) / u2);
                const Complex lu = lame_r.seed[i];
                wp_lame = std::max(wp_lame, std::abs(central(lame_r.w_function, i) + lu * lu) / lame_scale);
              }
              auto closure = [&](const auto& r, const Potential& V) {
                using S = std::decay_t<decltype(r.seed[0])>;
                Vector<S> gv(fg.n), gam(fg.n);
                for (Eigen::Index i = 0; i < fg.n; ++i) {
                  gv[i] = r.seed[i] / r.w_function[i] * r.seed[i];
                  gam[i] = r.seed_derivative[i] / r.seed[i];
                }
                const GridFunction<S> G(fg, gv), Gam(fg, gam);
                for (Eigen::Index i = 1; i + 1 < fg.n; ++i) {
                  ric = std::max(ric, std::abs(central(Gam, i) + gam[i] * gam[i] - S(V(fg[i]) - r.epsilon1)));
                  bern = std::max(bern, std::abs(central(G, i) - gv[i] * gv[i] - S(2) * gam[i] * gv[i]));
                }
              };
              closure(free_r, free_potential);
              closure(lame_r, lame_V(fig3.m));
              v.below("w' + u1^2 (free, relative)", wp_free, 1e-6);
              v.below("w' + u1^2 (Lame, relative to max u1^2)", wp_lame, 1e-6);
              v.below("Riccati", ric, 1e-6);
              v.below("Bernoulli", bern, 1e-6);

              double cdep = 0;
              const auto fs = free_seed(1.0);
              const auto ls = lame_seed(fig3.m, fig3.epsilon);
              for (double x : {-2.0, -0.3, 0.0, 1.1, 2.5}) {
                const double wf = jordan_chain_u2(fs, 0.0, 1.0, 0.0).wronskian_with_seed(x);
                const Complex wl = jordan_chain_u2(ls, 0.0, 1.0, 0.0).wronskian_with_seed(x);
                for (double C : {-5.0, 7.0}) {
                  cdep = std::max(cdep, std::abs(jordan_chain_u2(fs, C, 1.0, 0.0).wronskian_with_seed(x) - wf));
                  cdep = std::max(cdep, std::abs(jordan_chain_u2(ls, C, 1.0, 0.0).wronskian_with_seed(x) - wl));
                }
              }
              v.below("W(u1,u2) C-dependence", cdep, 1e-12);

              const Grid sg{-10.0, 10.0, 2001};
              bool boundary = true;
              for (const auto& row : singularity_scan(fs, -5.0, 5.0, 101, sg)) boundary &= row.singular == (row.D >= 0.0);
              const auto edge = singularity_scan(fs, -1e-12, 1e-12, 3, sg);
              boundary &= !edge[0].singular && edge[1].singular && edge[2].singular;
              v.require("D-scan boundary at D = 0", boundary);
            });

  std::printf("\n%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
