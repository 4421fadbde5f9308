#include "susyqm/free_particle.hpp"

#include <cmath>

namespace susyqm {

ConfluentSeed<double> free_seed(double kappa1, Orientation orientation) {
  if (!(kappa1 > 0.0) || !std::isfinite(kappa1))
    throw DomainError("free_seed: kappa1 must be positive");
  const double s = orientation == Orientation::growing ? 1.0 : -1.0;
  ConfluentSeed<double> seed;
  seed.epsilon1 = -kappa1 * kappa1;
  seed.evaluate = [kappa1, s](double x) {
    const double u = std::exp(s * kappa1 * x);
    const double du = s * kappa1 * u;
    // d kappa / d eps = -1/(2 kappa); d u / d kappa = s x u.
    const double due = -s * x * u / (2.0 * kappa1);
    const double d2ue = -s * (u + x * du) / (2.0 * kappa1);
    return SeedSample<double>{u, du, due, d2ue};
  };
  return seed;
}

ConfluentSeed<double> free_seed(const FreeParticleSeed& s) { return free_seed(s.kappa1, s.orientation); }

double free_kappa_from_energy(double epsilon1) {
  if (!(epsilon1 < 0.0)) throw DomainError("free particle: factorization energy must be negative");
  return std::sqrt(-epsilon1);
}

double free_partner_closed_form(double kappa1, double D, double x) {
  if (!(kappa1 > 0.0)) throw DomainError("free_partner_closed_form: kappa1 must be positive");
  if (D == 0.0) return 0.0;
  // Divided through by e^{4 kappa x} on the right half-line to stay finite.
  const double k3 = kappa1 * kappa1 * kappa1;
  double num, den;
  if (x <= 0.0) {
    const double e = std::exp(2.0 * kappa1 * x);
    num = 16.0 * D * k3 * e;
    den = 2.0 * D * kappa1 - e;
    if (std::abs(den) <= 1e-14 * std::max(std::abs(2.0 * D * kappa1), e))
      throw PoleError("free_partner_closed_form: pole at 2 D kappa = e^{2 kappa x}");
  } else {
    const double e = std::exp(-2.0 * kappa1 * x);
    num = 16.0 * D * k3 * e;
    den = 2.0 * D * kappa1 * e - 1.0;
    if (std::abs(den) <= 1e-14 * std::max(std::abs(2.0 * D * kappa1 * e), 1.0))
      throw PoleError("free_partner_closed_form: pole at 2 D kappa = e^{2 kappa x}");
  }
  return num / (den * den);
}

double poschl_teller(double kappa1, double x0, double x) {
  if (!(kappa1 > 0.0)) throw DomainError("poschl_teller: kappa1 must be positive");
  const double c = std::cosh(kappa1 * (x - x0));
  return -2.0 * kappa1 * kappa1 / (c * c);
}

double free_D_from_x0(double kappa1, double x0, Orientation orientation) {
  if (!(kappa1 > 0.0)) throw DomainError("free_D_from_x0: kappa1 must be positive");
  return orientation == Orientation::growing ? -std::exp(2.0 * kappa1 * x0) / (2.0 * kappa1)
                                             : std::exp(-2.0 * kappa1 * x0) / (2.0 * kappa1);
}

}  // namespace susyqm
