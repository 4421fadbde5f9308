#include "susyqm/elliptic.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace susyqm {

namespace {

constexpr double pi = std::numbers::pi;
constexpr int max_terms = 500;
constexpr double series_eps = 1e-18;

double agm(double a, double b) {
  for (int it = 0; it < 64; ++it) {
    if (std::abs(a - b) <= 1e-16 * a) break;
    const double next = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = next;
  }
  return 0.5 * (a + b);
}

// z = r + 2a*omega + 2b*omega' with r in the closed cell centered on the origin.
struct Reduced {
  ComplexValue r;
  double a;
  double b;
};

Reduced reduce(ComplexValue z, const LatticeData& lat) {
  const double kp = lat.omega_prime.imag();
  const double a = std::round(z.real() / (2.0 * lat.omega));
  const double b = std::round(z.imag() / (2.0 * kp));
  return {z - 2.0 * a * lat.omega - 2.0 * b * lat.omega_prime, a, b};
}

void check_pole(ComplexValue r, const char* name) {
  if (std::abs(r) < pole_tolerance)
    throw PoleError(std::string(name) + ": argument on the period lattice");
}

// Quantities below take z already reduced to the fundamental cell; they are the
// logarithmic derivatives of the Jacobi theta_1 q-series with nu = pi z / (2 omega).

ComplexValue zeta_cell(ComplexValue r, const LatticeData& lat) {
  const ComplexValue nu = pi * r / (2.0 * lat.omega);
  const double growth = std::exp(2.0 * std::abs(nu.imag()));
  const double q2 = lat.nome * lat.nome;
  ComplexValue sum = std::cos(nu) / std::sin(nu);
  double q2n = 1.0, envelope = 1.0;
  for (int n = 1; n <= max_terms; ++n) {
    q2n *= q2;
    envelope *= growth;
    const double c = q2n / (1.0 - q2n);
    sum += 4.0 * c * std::sin(2.0 * n * nu);
    if (c * envelope < series_eps) break;
  }
  return lat.eta * r / lat.omega + (pi / (2.0 * lat.omega)) * sum;
}

ComplexValue wp_cell(ComplexValue r, const LatticeData& lat) {
  const ComplexValue nu = pi * r / (2.0 * lat.omega);
  const double growth = std::exp(2.0 * std::abs(nu.imag()));
  const double q2 = lat.nome * lat.nome;
  const ComplexValue s = std::sin(nu);
  ComplexValue sum = 1.0 / (s * s);
  double q2n = 1.0, envelope = 1.0;
  for (int n = 1; n <= max_terms; ++n) {
    q2n *= q2;
    envelope *= growth;
    const double c = n * q2n / (1.0 - q2n);
    sum -= 8.0 * c * std::cos(2.0 * n * nu);
    if (c * envelope < series_eps) break;
  }
  const double scale = pi / (2.0 * lat.omega);
  return -lat.eta / lat.omega + scale * scale * sum;
}

ComplexValue wp_prime_cell(ComplexValue r, const LatticeData& lat) {
  const ComplexValue nu = pi * r / (2.0 * lat.omega);
  const double growth = std::exp(2.0 * std::abs(nu.imag()));
  const double q2 = lat.nome * lat.nome;
  const ComplexValue s = std::sin(nu);
  ComplexValue sum = -2.0 * std::cos(nu) / (s * s * s);
  double q2n = 1.0, envelope = 1.0;
  for (int n = 1; n <= max_terms; ++n) {
    q2n *= q2;
    envelope *= growth;
    const double c = static_cast<double>(n) * n * q2n / (1.0 - q2n);
    sum += 16.0 * c * std::sin(2.0 * n * nu);
    if (c * envelope < series_eps) break;
  }
  const double scale = pi / (2.0 * lat.omega);
  return scale * scale * scale * sum;
}

// log sigma(r) = log(2 omega / pi) + eta r^2 / (2 omega) + log theta_1(nu) - log theta_1'(0),
// with theta_1 in product form so every factor stays O(1).
ComplexValue log_sigma_cell(ComplexValue r, const LatticeData& lat) {
  const ComplexValue nu = pi * r / (2.0 * lat.omega);
  const ComplexValue e_plus = std::exp(ComplexValue(0.0, 2.0) * nu);
  const ComplexValue e_minus = 1.0 / e_plus;
  const double growth = std::max(std::abs(e_plus), std::abs(e_minus));
  const double q2 = lat.nome * lat.nome;
  ComplexValue sum = std::log(std::sin(nu));
  double q2n = 1.0;
  for (int n = 1; n <= max_terms; ++n) {
    q2n *= q2;
    sum += std::log(1.0 - q2n * e_plus) + std::log(1.0 - q2n * e_minus) -
           2.0 * std::log1p(-q2n);
    if (q2n * growth < series_eps) break;
  }
  return std::log(2.0 * lat.omega / pi) + lat.eta * r * r / (2.0 * lat.omega) + sum;
}

}  // namespace

double complete_K(double m) {
  if (!(m >= 0.0 && m < 1.0)) throw DomainError("complete_K: require 0 <= m < 1");
  return pi / (2.0 * agm(1.0, std::sqrt(1.0 - m)));
}

JacobiTriple jacobi_sncndn(double x, double m) {
  if (!(m >= 0.0 && m <= 1.0) || !std::isfinite(x))
    throw DomainError("jacobi_sn: require finite x and 0 <= m <= 1");
  if (m == 0.0) return {std::sin(x), std::cos(x), 1.0};
  if (m == 1.0) return {std::tanh(x), 1.0 / std::cosh(x), 1.0 / std::cosh(x)};

  // Descending Landen / AGM sequence, then back substitution.
  constexpr int max_levels = 16;
  double em[max_levels], en[max_levels];
  double emc = 1.0 - m;
  double a = 1.0, c = 1.0, dn = 1.0;
  int levels = 0;
  for (; levels < max_levels; ++levels) {
    em[levels] = a;
    emc = std::sqrt(emc);
    en[levels] = emc;
    c = 0.5 * (a + emc);
    if (std::abs(a - emc) <= 1e-9 * a) break;
    emc *= a;
    a = c;
  }
  if (levels == max_levels) levels = max_levels - 1;
  const double u = x * c;
  double sn = std::sin(u);
  double cn = std::cos(u);
  if (sn != 0.0) {
    a = cn / sn;
    c *= a;
    for (int i = levels; i >= 0; --i) {
      const double b = em[i];
      a *= c;
      c *= dn;
      dn = (en[i] + a) / (b + a);
      a = c / b;
    }
    a = 1.0 / std::sqrt(c * c + 1.0);
    sn = sn >= 0.0 ? a : -a;
    cn = c * sn;
  }
  return {sn, cn, dn};
}

double jacobi_sn(double x, double m) { return jacobi_sncndn(x, m).sn; }

LatticeData build_lattice(double m) {
  if (!(m > 0.0 && m < 1.0)) throw DomainError("build_lattice: require 0 < m < 1");
  LatticeData lat;
  lat.m = m;
  lat.omega = complete_K(m);
  const double kp = complete_K(1.0 - m);
  lat.omega_prime = ComplexValue(0.0, kp);
  lat.nome = std::exp(-pi * kp / lat.omega);

  // With omega = K(m) the lattice is normalized so that e1 - e3 = 1.
  lat.e1 = (2.0 - m) / 3.0;
  lat.e2 = (2.0 * m - 1.0) / 3.0;
  lat.e3 = -(1.0 + m) / 3.0;
  lat.g2 = 2.0 * (lat.e1 * lat.e1 + lat.e2 * lat.e2 + lat.e3 * lat.e3);
  lat.g3 = 4.0 * lat.e1 * lat.e2 * lat.e3;

  double s = 0.0, q2n = 1.0;
  for (int n = 1; n <= max_terms; ++n) {
    q2n *= lat.nome * lat.nome;
    const double term = n * q2n / (1.0 - q2n);
    s += term;
    if (term < series_eps) break;
  }
  lat.eta = pi * pi / (4.0 * lat.omega) * (1.0 / 3.0 - 8.0 * s);
  lat.eta_prime = zeta_cell(lat.omega_prime, lat);
  return lat;
}

ComplexValue wp(ComplexValue z, const LatticeData& lat) {
  const auto red = reduce(z, lat);
  check_pole(red.r, "wp");
  return wp_cell(red.r, lat);
}

ComplexValue wp_prime(ComplexValue z, const LatticeData& lat) {
  const auto red = reduce(z, lat);
  check_pole(red.r, "wp_prime");
  return wp_prime_cell(red.r, lat);
}

ComplexValue wzeta(ComplexValue z, const LatticeData& lat) {
  const auto red = reduce(z, lat);
  check_pole(red.r, "wzeta");
  return zeta_cell(red.r, lat) + 2.0 * red.a * lat.eta + 2.0 * red.b * lat.eta_prime;
}

ComplexValue log_wsigma(ComplexValue z, const LatticeData& lat) {
  const auto red = reduce(z, lat);
  if (red.r == ComplexValue(0.0, 0.0))
    return {-std::numeric_limits<double>::infinity(), 0.0};
  // sigma(r + W) = (-1)^(a+b+ab) exp[(2a eta + 2b eta')(r + W/2)] sigma(r), W = 2a omega + 2b omega'.
  const double a = red.a, b = red.b;
  const ComplexValue shift = 2.0 * a * lat.eta + 2.0 * b * lat.eta_prime;
  const ComplexValue half_period = a * lat.omega + b * lat.omega_prime;
  const bool odd = std::fmod(std::abs(a + b + a * b), 2.0) == 1.0;
  return log_sigma_cell(red.r, lat) + shift * (red.r + half_period) +
         ComplexValue(0.0, odd ? pi : 0.0);
}

ComplexValue wsigma(ComplexValue z, const LatticeData& lat) {
  const auto red = reduce(z, lat);
  if (red.r == ComplexValue(0.0, 0.0)) return {0.0, 0.0};
  return std::exp(log_wsigma(z, lat));
}

}  // namespace susyqm
