#include "susyqm/lame.hpp"

#include <cmath>
#include <numbers>

namespace susyqm {

double lame_potential(double m, double x) {
  if (!(m > 0.0 && m < 1.0)) throw DomainError("lame_potential: require 0 < m < 1");
  const double sn = jacobi_sn(x, m);
  return 2.0 * m * sn * sn;
}

SpectrumBands lame_bands(double m) {
  if (!(m > 0.0 && m < 1.0)) throw DomainError("lame_bands: require 0 < m < 1");
  return SpectrumBands{{m, 1.0, 1.0 + m}};
}

SpectrumBands::Region SpectrumBands::classify(double e) const {
  const auto [lo, mid, hi] = band_edges;
  if (e == lo || e == mid || e == hi) return Region::edge;
  if (e < lo) return Region::infinite_gap;
  if (e < mid) return Region::finite_band;
  if (e < hi) return Region::finite_gap;
  return Region::infinite_band;
}

const char* to_string(SpectrumBands::Region r) {
  switch (r) {
    case SpectrumBands::Region::infinite_gap: return "infinite gap";
    case SpectrumBands::Region::finite_band: return "finite band";
    case SpectrumBands::Region::finite_gap: return "finite gap";
    case SpectrumBands::Region::infinite_band: return "infinite band";
    case SpectrumBands::Region::edge: return "band edge";
  }
  return "?";
}

namespace {

// Re wp along one edge of the rectangle, t in [t_lo, t_hi]; wp is real there.
struct Segment {
  ComplexValue origin;
  double t_lo, t_hi;
};

ComplexValue solve_on_segment(const LatticeData& lat, const Segment& seg, double target) {
  const auto f = [&](double t) { return wp(seg.origin + t, lat).real() - target; };
  double a = seg.t_lo, b = seg.t_hi;
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return seg.origin + a;
  if (fb == 0.0) return seg.origin + b;
  if ((fa < 0.0) == (fb < 0.0)) return {std::nan(""), std::nan("")};
  while (b - a > 1e-12 * lat.omega) {
    const double mid = 0.5 * (a + b);
    const double fm = f(mid);
    if ((fm < 0.0) == (fa < 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  // Newton polish inside the final bracket.
  double t = 0.5 * (a + b);
  for (int it = 0; it < 3; ++it) {
    const double d = wp_prime(seg.origin + t, lat).real();
    if (d == 0.0) break;
    const double next = t - f(t) / d;
    if (!(next >= a - 1e-12 && next <= b + 1e-12)) break;
    t = next;
  }
  return seg.origin + t;
}

}  // namespace

ComplexValue lame_delta_from_energy(const LatticeData& lat, double epsilon1) {
  const auto bands = lame_bands(lat.m);
  if (!bands.in_gap(epsilon1) || !std::isfinite(epsilon1))
    throw DomainError("lame_delta_from_energy: factorization energy must lie strictly inside a gap");
  const double target = 2.0 * (lat.m + 1.0) / 3.0 - epsilon1;
  // wp(t) ~ 1/t^2 near the origin, so t_lo must resolve very large targets.
  const double t_small = std::min(1e-6 * lat.omega, 0.5 / std::sqrt(std::abs(target) + 1.0));
  const Segment candidates[] = {
      {ComplexValue(0.0, 0.0), t_small, lat.omega},
      {lat.omega_prime, 0.0, lat.omega},
  };
  for (const auto& seg : candidates) {
    const auto delta = solve_on_segment(lat, seg, target);
    if (!std::isfinite(delta.real())) continue;
    // Orientation convention: wp'(delta) > 0, i.e. eps1 decreases along delta.
    return wp_prime(delta, lat).real() > 0.0 ? delta : -delta;
  }
  throw NumericError("lame_delta_from_energy: no bracket on the rectangle boundary");
}

ComplexValue lame_delta_from_energy(double m, double epsilon1) {
  return lame_delta_from_energy(build_lattice(m), epsilon1);
}

LameSeed::LameSeed(double m, double epsilon1, BlochBranch branch)
    : lattice_(build_lattice(m)), epsilon1_(epsilon1), branch_(branch) {
  const auto bands = lame_bands(m);
  if (bands.classify(epsilon1) == SpectrumBands::Region::edge)
    throw DegenerateSeedError("lame_seed: factorization energy at a band edge (wp'(delta) = 0)");
  const ComplexValue delta = lame_delta_from_energy(lattice_, epsilon1);
  delta_ = branch == BlochBranch::beta ? delta : -delta;

  const ComplexValue wprime = lattice_.omega_prime;
  log_prefactor_ = log_wsigma(wprime, lattice_) - log_wsigma(delta_ + wprime, lattice_);
  zeta_delta_ = wzeta(delta_, lattice_);
  zeta_delta_shift_ = wzeta(delta_ + wprime, lattice_);
  wp_delta_ = wp(delta_, lattice_);
  wp_prime_delta_ = wp_prime(delta_, lattice_);
  if (std::abs(wp_prime_delta_) < 1e-12)
    throw DegenerateSeedError("lame_seed: wp'(delta) = 0");

  // The segment chosen for delta must give a Bloch solution at eps1 that is
  // not oscillatory: check the Schrodinger residual via the Riccati form and |beta|.
  const double beta_abs = std::abs(bloch_factor().beta);
  if (!(std::abs(std::log(beta_abs)) > 1e-12))
    throw ConsistencyError("lame_seed: |beta| = 1 for a gap energy");
  for (double x : {-1.3, -0.4, 0.25, 0.9, 2.1}) {
    const ComplexValue z1 = x + delta_ + wprime;
    const ComplexValue L = log_derivative(x);
    const ComplexValue Lprime = -wp(z1, lattice_) + wp(x + wprime, lattice_);
    const ComplexValue residual = -(Lprime + L * L) + lame_potential(m, x) - epsilon1;
    if (std::abs(residual) > 1e-8 * (1.0 + std::norm(L)))
      throw ConsistencyError("lame_seed: Bloch function fails the Schrodinger equation");
  }
}

ComplexValue LameSeed::log_derivative(double x) const {
  const ComplexValue wprime = lattice_.omega_prime;
  return wzeta(x + delta_ + wprime, lattice_) - wzeta(x + wprime, lattice_) - zeta_delta_;
}

ComplexValue LameSeed::u1(double x) const {
  const ComplexValue wprime = lattice_.omega_prime;
  return std::exp(log_prefactor_ + log_wsigma(x + delta_ + wprime, lattice_) -
                  log_wsigma(x + wprime, lattice_) - x * zeta_delta_);
}

SeedSample<Complex> LameSeed::evaluate(double x) const {
  const ComplexValue wprime = lattice_.omega_prime;
  const ComplexValue z1 = x + delta_ + wprime;
  const ComplexValue u = u1(x);
  const ComplexValue zeta1 = wzeta(z1, lattice_);
  const ComplexValue du = (zeta1 - wzeta(x + wprime, lattice_) - zeta_delta_) * u;
  // du/d delta = P u, and d eps1 / d delta = -wp'(delta).
  const ComplexValue P = zeta1 - zeta_delta_shift_ + x * wp_delta_;
  const ComplexValue dP = -wp(z1, lattice_) + wp_delta_;
  const ComplexValue due = -P * u / wp_prime_delta_;
  const ComplexValue d2ue = -(dP * u + P * du) / wp_prime_delta_;
  return {u, du, due, d2ue};
}

ComplexValue LameSeed::auxiliary_f(double x) const {
  const ComplexValue z1 = x + delta_ + lattice_.omega_prime;
  return (wp(z1, lattice_) - wp_delta_) / wp_prime_delta_;
}

BlochFactor LameSeed::bloch_factor() const {
  const ComplexValue exponent = 2.0 * delta_ * lattice_.eta - 2.0 * lattice_.omega * zeta_delta_;
  // beta = exp(i kappa)  =>  kappa = -i * exponent, real part taken modulo 2 pi.
  ComplexValue kappa = ComplexValue(0.0, -1.0) * exponent;
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double re = std::remainder(kappa.real(), two_pi);
  if (re <= -std::numbers::pi) re += two_pi;
  kappa = {re, kappa.imag()};
  return {std::exp(exponent), kappa};
}

ComplexValue lame_bloch_u1(const LameSeed& seed, double x) { return seed.u1(x); }
BlochFactor lame_bloch_factor(const LameSeed& seed) { return seed.bloch_factor(); }

ConfluentSeed<Complex> lame_seed(const LameSeed& seed) {
  ConfluentSeed<Complex> out;
  out.epsilon1 = seed.epsilon1();
  out.evaluate = [seed](double x) { return seed.evaluate(x); };
  return out;
}

ConfluentSeed<Complex> lame_seed(double m, double epsilon1, BlochBranch branch) {
  return lame_seed(LameSeed(m, epsilon1, branch));
}

double lame_partner_closed_form(const LameSeed& seed, double D, double x) {
  const ComplexValue u = seed.u1(x);
  const ComplexValue G = D / (u * u) + seed.auxiliary_f(x);
  if (std::abs(G) <= 1e-14 * (std::abs(D / (u * u)) + std::abs(seed.auxiliary_f(x))))
    throw PoleError("lame_partner_closed_form: D u^-2 + f vanishes");
  const ComplexValue L = seed.log_derivative(x);
  const ComplexValue delta = (2.0 + 4.0 * L * G) / (G * G);
  if (std::abs(delta.imag()) > 1e-8 * std::max(1.0, std::abs(delta.real())))
    throw ConsistencyError("lame_partner_closed_form: imaginary part exceeds 1e-8");
  return lame_potential(seed.m(), x) + delta.real();
}

}  // namespace susyqm
