#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "susyqm/free_particle.hpp"
#include "susyqm/quadrature.hpp"
#include "susyqm/susy.hpp"
#include "susyqm/verify.hpp"

using namespace susyqm;

namespace {

const Potential zero_potential = free_potential;

// eps1 = 0 seed u = 1 with du/deps = -x^2/2, which solves -u'' = 1.
ConfluentSeed<double> constant_seed() {
  return {0.0, [](double x) {
            return SeedSample<double>{1.0, 0.0, -0.5 * x * x, -x};
          }};
}

template <typename Scalar>
double max_diff(const GridFunction<Scalar>& a, const GridFunction<Scalar>& b) {
  return (a.values - b.values).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("wronskian") {
  CHECK(wronskian(0.7, -1.3, 0.7, -1.3) == 0.0);
  CHECK(wronskian(1.0, 1.0, 1.0, -1.0) == -2.0);
  // W(f, h f) = h' f^2 with f = cos x, h = x^2 at x = 1
  const double x = 1.0, f = std::cos(x), fp = -std::sin(x);
  const double g = x * x * f, gp = 2 * x * f + x * x * fp;
  CHECK(wronskian(f, fp, g, gp) == doctest::Approx(2 * x * f * f).epsilon(1e-15));
  const Complex a{1, 2}, b{0.5, -1};
  CHECK(wronskian(a, b, b, a) == a * a - b * b);
}

TEST_CASE("quadrature against Boost Gauss-Kronrod") {
  auto f = [](double x) { return std::exp(-x * x) * std::cos(3 * x); };
  const double ref = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, -2.0, 5.0, 15, 1e-14);
  CHECK(integrate(f, -2.0, 5.0) == doctest::Approx(ref).epsilon(1e-12));
  CHECK(integrate(f, 5.0, -2.0) == doctest::Approx(-ref).epsilon(1e-12));
  CHECK(integrate(f, 1.0, 1.0) == 0.0);

  auto c = [](double x) { return std::exp(Complex(0, 1) * x); };
  const Complex ci = integrate(c, 0.0, 2.0);
  CHECK(std::abs(ci - Complex(std::sin(2.0), 1.0 - std::cos(2.0))) < 1e-12);

  CHECK_THROWS_AS(integrate([](double x) { return 1.0 / ((x - 0.3) * (x - 0.3)); }, 0.0, 1.0, 1e-10, 8),
                  NumericError);

  const Grid grid{-1.0, 3.0, 41};
  const auto I = cumulative_integral([](double x) { return std::exp(2 * x); }, grid, 0.5);
  for (Eigen::Index i = 0; i < grid.n; ++i)
    CHECK(I[i] == doctest::Approx((std::exp(2 * grid[i]) - std::exp(1.0)) / 2).epsilon(1e-12));
}

TEST_CASE("confluent_partner_differential: free particle examples") {
  const auto seed = free_seed(1.0);
  const Grid grid{-10.0, 10.0, 2001};
  const double D = -0.5 * std::exp(6.0);
  const auto r = confluent_partner_differential(seed, D, zero_potential, grid);
  CHECK(r.partner_potential[1300] == doctest::Approx(-2.0).epsilon(1e-12));  // x = 3
  for (Eigen::Index i = 0; i < grid.n; ++i)
    CHECK(r.partner_potential[i] == doctest::Approx(poschl_teller(1.0, 3.0, grid[i])).epsilon(1e-10).scale(1.0));
  CHECK(r.D == D);
  CHECK(r.epsilon1 == -1.0);
  CHECK(trapezoid_norm2(r.bound_state) == doctest::Approx(1.0).epsilon(1e-12));

  SUBCASE("large |D| leaves V nearly unchanged") {
    const Grid g{-5.0, 5.0, 501};
    const auto far = confluent_partner_differential(seed, -1e12, zero_potential, g);
    CHECK(far.partner_potential.values.cwiseAbs().maxCoeff() < 1e-6);
  }
  SUBCASE("D > 0 is singular and names the zero") {
    try {
      confluent_partner_differential(seed, 1.0, zero_potential, grid);
      FAIL("expected SingularTransformError");
    } catch (const SingularTransformError& e) {
      // w = 1 - e^{2x}/2 vanishes at ln(2)/2
      CHECK(e.location() == doctest::Approx(std::log(2.0) / 2).epsilon(1e-9));
      CHECK(std::string(e.what()).find("0.3465") != std::string::npos);
    }
  }
  SUBCASE("non-finite seed values are input errors") {
    ConfluentSeed<double> bad{-1.0, [](double x) {
                                return SeedSample<double>{x > 0 ? NAN : 1.0, 0.0, 0.0, 0.0};
                              }};
    CHECK_THROWS_AS(confluent_partner_differential(bad, -1.0, zero_potential, grid), InputError);
  }
  CHECK_THROWS_AS(confluent_partner_differential(seed, NAN, zero_potential, grid), InputError);
  CHECK_THROWS_AS(confluent_partner_differential(seed, D, zero_potential, Grid{1.0, 0.0, 10}), InputError);
}

TEST_CASE("confluent_partner_integral") {
  const auto seed = free_seed(1.0);
  const Grid grid{-10.0, 10.0, 2001};
  const double x0 = 0.7, w0 = -3.0;
  const auto r = confluent_partner_integral([](double x) { return std::exp(x); },
                                            [](double x) { return std::exp(x); }, w0, x0,
                                            zero_potential, grid, -1.0);
  double worst = 0;
  for (Eigen::Index i = 0; i < grid.n; ++i) {
    const double exact = w0 + (std::exp(2 * x0) - std::exp(2 * grid[i])) / 2;
    worst = std::max(worst, std::abs(r.w_function[i] - exact) / std::max(1.0, std::abs(exact)));
  }
  CHECK(worst < 1e-10);

  SUBCASE("matched constant reproduces the differential route") {
    const double D = -5.0;
    const double anchor = -1.5;
    const double matched = D + seed.evaluate(anchor).parametric_wronskian();
    const auto integral = confluent_partner_integral([](double x) { return std::exp(x); },
                                                     [](double x) { return std::exp(x); }, matched,
                                                     anchor, zero_potential, grid, -1.0);
    const auto diff = confluent_partner_differential(seed, D, zero_potential, grid);
    CHECK(max_diff(integral.partner_potential, diff.partner_potential) < 1e-6);
  }
  SUBCASE("u1 = 1, w0 = 1: singular at x = 1") {
    const auto one = [](double) { return 1.0; };
    const auto nil = [](double) { return 0.0; };
    CHECK_THROWS_AS(confluent_partner_integral(one, nil, 1.0, 0.0, zero_potential, Grid{-2.0, 2.0, 401}),
                    SingularTransformError);
    const auto ok = confluent_partner_integral(one, nil, 1.0, 0.0, zero_potential, Grid{-2.0, 0.5, 251});
    for (Eigen::Index i = 0; i < 251; ++i) {
      const double x = -2.0 + 0.01 * i;
      CHECK(ok.partner_potential[i] == doctest::Approx(2.0 / ((1 - x) * (1 - x))).epsilon(1e-9));
    }
  }
  SUBCASE("the differential route agrees on the same constant seed") {
    const auto cs = constant_seed();
    const auto r2 = confluent_partner_differential(cs, 1.0, zero_potential, Grid{-2.0, 0.5, 251});
    for (Eigen::Index i = 0; i < 251; ++i) {
      const double x = -2.0 + 0.01 * i;
      CHECK(r2.partner_potential[i] == doctest::Approx(2.0 / ((1 - x) * (1 - x))).epsilon(1e-12));
    }
  }
}

TEST_CASE("orthogonal_solution") {
  const auto perp = orthogonal_solution(free_seed(1.0), 0.0);
  for (double x : {-2.0, -0.5, 0.0, 1.0, 3.0}) {
    CHECK(perp.value(x) == doctest::Approx(std::sinh(x)).epsilon(1e-12).scale(1.0));
    CHECK(wronskian(std::exp(x), std::exp(x), perp.value(x), perp.derivative(x)) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  const auto [v, d] = perp.on_grid(Grid{-3.0, 3.0, 61});
  for (Eigen::Index i = 0; i < 61; ++i) {
    CHECK(v[i] == doctest::Approx(std::sinh(-3.0 + 0.1 * i)).epsilon(1e-12).scale(1.0));
    CHECK(d[i] == doctest::Approx(std::cosh(-3.0 + 0.1 * i)).epsilon(1e-12));
  }

  // Generic seed: W(u1, u1_perp) = 1
  const OrthogonalSolution<double> gen([](double x) { return 2 + std::sin(x); },
                                       [](double x) { return std::cos(x); }, 0.3);
  for (double x : {-4.0, 0.0, 2.5})
    CHECK(wronskian(2 + std::sin(x), std::cos(x), gen.value(x), gen.derivative(x)) ==
          doctest::Approx(1.0).epsilon(1e-11));

  const OrthogonalSolution<double> nodes([](double x) { return std::sin(x); },
                                         [](double x) { return std::cos(x); }, 1.0);
  CHECK_THROWS_AS(nodes.value(4.0), DomainError);
  CHECK_THROWS_AS(nodes.on_grid(Grid{0.5, 3.5, 31}), DomainError);
}

TEST_CASE("jordan_chain_u2") {
  const auto seed = free_seed(1.0);
  SUBCASE("C = 0, D = 0 is -x e^x / 2 and solves (H + 1) u2 = u1") {
    const auto u2 = jordan_chain_u2(seed, 0.0, 0.0, 0.0);
    for (double x : {-2.0, 0.0, 1.5}) CHECK(u2.value(x) == doctest::Approx(-x * std::exp(x) / 2).scale(1.0));
    const Grid g{-3.0, 3.0, 6001};
    const auto [v, d] = u2.on_grid(g);
    const auto u1 = sample(g, [](double x) { return std::exp(x); });
    CHECK(jordan_residual(sample(g, zero_potential), v, u1, -1.0) < 1e-6);
  }
  SUBCASE("W(u1, u2) = D - e^{2x}/2 and is independent of C") {
    for (double x : {-1.0, 0.0, 0.8}) {
      const double ref = jordan_chain_u2(seed, 0.0, 1.0, 0.0).wronskian_with_seed(x);
      CHECK(ref == doctest::Approx(1.0 - std::exp(2 * x) / 2).epsilon(1e-12));
      for (double C : {-5.0, 7.0}) {
        const double w = jordan_chain_u2(seed, C, 1.0, 0.0).wronskian_with_seed(x);
        CHECK(std::abs(w - ref) < 1e-12);
      }
    }
  }
  SUBCASE("residual of (H - eps) u2 = u1 is second order in h") {
    const auto u2 = jordan_chain_u2(seed, 2.0, -0.7, 0.0);
    auto residual = [&](Eigen::Index n) {
      const Grid g{-2.0, 2.0, n};
      const auto [v, d] = u2.on_grid(g);
      return jordan_residual(sample(g, zero_potential), v, sample(g, [](double x) { return std::exp(x); }), -1.0);
    };
    const double coarse = residual(201), fine = residual(401);
    CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.05));
  }
}

TEST_CASE("intertwiner_coefficients") {
  const auto seed = free_seed(1.0);
  const Grid g{-4.0, 6.0, 10001};
  const auto r = confluent_partner_differential(seed, -0.5 * std::exp(6.0), zero_potential, g);
  const auto c = intertwiner_coefficients(r, zero_potential);
  CHECK(c.d == -1.0);
  double dv = 0, bern = 0, hcheck = 0;
  for (Eigen::Index i = 1; i + 1 < g.n; ++i) {
    const double gp = (c.g[i + 1] - c.g[i - 1]) / (2 * g.spacing());
    dv = std::max(dv, std::abs(r.partner_potential[i] - 2 * gp));
    bern = std::max(bern, std::abs(gp - c.g[i] * c.g[i] - 2.0 * c.g[i]));  // u1'/u1 = 1
    hcheck = std::max(hcheck, std::abs(c.h[i] - (-gp / 2 + c.g[i] * c.g[i] / 2 - 1.0)));
  }
  CHECK(dv < 1e-6);
  CHECK(bern < 1e-6);
  CHECK(hcheck < 1e-6);

  const auto far = confluent_partner_differential(seed, -1e14, zero_potential, Grid{-3.0, 3.0, 301});
  CHECK(intertwiner_coefficients(far, zero_potential).g.values.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("nonconfluent_partner") {
  const Grid g{-6.0, 6.0, 1201};
  Solution<double> a{-1.0, [](double x) { return std::cosh(x); }, [](double x) { return std::sinh(x); }, {}, {}};
  Solution<double> b{-4.0, [](double x) { return std::sinh(2 * x) / 2; }, [](double x) { return std::cosh(2 * x); },
                     {}, {}};
  const auto vt = nonconfluent_partner(a, b, zero_potential, g);
  // W = cosh x cosh 2x - sinh x sinh(2x)/2 = cosh^3 x, so Vt = -6 sech^2 x
  for (Eigen::Index i = 0; i < g.n; ++i)
    CHECK(vt[i] == doctest::Approx(-6.0 / std::pow(std::cosh(g[i]), 2)).epsilon(1e-12).scale(1.0));

  CHECK_THROWS_AS(nonconfluent_partner(a, a, zero_potential, g), InputError);

  Solution<double> c{-4.0, [](double x) { return std::cosh(2 * x); }, [](double x) { return 2 * std::sinh(2 * x); },
                     {}, {}};
  Solution<double> s{-1.0, [](double x) { return std::sinh(x); }, [](double x) { return std::cosh(x); }, {}, {}};
  // W(sinh x, cosh 2x) = 2 sinh x sinh 2x - cosh x cosh 2x vanishes on the grid
  CHECK_THROWS_AS(nonconfluent_partner(s, c, zero_potential, g), SingularTransformError);

  SUBCASE("Jordan-chain u2 as u_b reproduces the confluent partner") {
    const auto seed = free_seed(1.0);
    const double D = -4.0;
    const auto chain = jordan_chain_u2(seed, 0.3, D, 0.0);
    Solution<double> ua{-1.0, [](double x) { return std::exp(x); }, [](double x) { return std::exp(x); }, {}, {}};
    Solution<double> ub{-1.0, [&](double x) { return chain.value(x); }, [&](double x) { return chain.derivative(x); },
                        [](double x) { return std::exp(x); }, [](double x) { return std::exp(x); }};
    const Grid gg{-5.0, 5.0, 201};
    const auto non = nonconfluent_partner(ua, ub, zero_potential, gg);
    const auto conf = confluent_partner_differential(seed, D, zero_potential, gg);
    CHECK(max_diff(non, conf.partner_potential) < 1e-8);
  }
}

TEST_CASE("singularity_scan") {
  const auto rows = singularity_scan(free_seed(1.0), -5.0, 5.0, 101, Grid{-10.0, 10.0, 2001});
  REQUIRE(rows.size() == 101);
  for (const auto& row : rows) {
    CHECK(row.singular == (row.D >= 0.0));
    if (row.D > 0.0) {
      // the zero of D - e^{2x}/2 is on the grid for these D
      REQUIRE(row.crossing);
      CHECK(*row.crossing == doctest::Approx(std::log(2 * row.D) / 2).epsilon(1e-9));
    }
  }
  CHECK(rows[50].D == 0.0);
  REQUIRE(rows[50].crossing);
  CHECK(*rows[50].crossing == -std::numeric_limits<double>::infinity());

  // decaying seed: W = e^{-2x}/2 > 0, so the nonsingular domain is D > 0
  const auto mirror = singularity_scan(free_seed(1.0, Orientation::decaying), -1.0, 1.0, 3, Grid{-10.0, 10.0, 2001});
  REQUIRE(mirror[0].crossing);
  CHECK(*mirror[0].crossing == doctest::Approx(-std::log(2.0) / 2).epsilon(1e-9));
  REQUIRE(mirror[1].crossing);
  CHECK(*mirror[1].crossing == std::numeric_limits<double>::infinity());
  CHECK_FALSE(mirror[2].singular);

  CHECK_THROWS_AS(singularity_scan(free_seed(1.0), 1.0, -1.0, 5, Grid{-1.0, 1.0, 11}), InputError);
  CHECK_THROWS_AS(singularity_scan(free_seed(1.0), -1.0, 1.0, 0, Grid{-1.0, 1.0, 11}), InputError);
}

TEST_CASE("translated seed") {
  const auto seed = translated(free_seed(1.0), 2.0);
  CHECK(seed.u1(2.0) == 1.0);
  CHECK(seed.du1_deps(3.0) == doctest::Approx(-std::exp(1.0) / 2));
}

TEST_CASE("property: w' = -u1^2 and Riccati residual on a generic seed") {
  // Free seed with kappa = 1.7 and an arbitrary D
  const double kappa = 1.7;
  const auto seed = free_seed(kappa);
  const Grid g{-3.0, 2.0, 10001};
  const auto r = confluent_partner_differential(seed, -2.0, zero_potential, g);
  double worst = 0;
  for (Eigen::Index i = 1; i + 1 < g.n; ++i) {
    const double wp = (r.w_function[i + 1] - r.w_function[i - 1]) / (2 * g.spacing());
    const double u2 = r.seed[i] * r.seed[i];
    worst = std::max(worst, std::abs(wp + u2) / u2);
  }
  CHECK(worst < 1e-6);
  CHECK(schrodinger_residual(r.partner_potential, r.bound_state, seed.epsilon1) < 1e-5);
}
