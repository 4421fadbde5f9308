#pragma once

#include "susyqm/susy.hpp"

namespace susyqm {

/// Growing seed e^{kappa x} or decaying seed e^{-kappa x}; one is the mirror
/// image of the other.
enum class Orientation { growing, decaying };

struct FreeParticleSeed {
  double kappa1 = 1.0;
  Orientation orientation = Orientation::growing;

  double epsilon1() const { return -kappa1 * kappa1; }
};

/// u1 = e^{+-kappa x} with du1/deps1 = -+x u1 / (2 kappa) (eps1 = -kappa^2).
/// Throws DomainError for kappa1 <= 0.
ConfluentSeed<double> free_seed(double kappa1, Orientation orientation = Orientation::growing);
ConfluentSeed<double> free_seed(const FreeParticleSeed& s);

/// kappa1 = sqrt(-eps1); throws DomainError unless eps1 < 0.
double free_kappa_from_energy(double epsilon1);

/// Vt = 16 D kappa^3 e^{2 kappa x} / (2 D kappa - e^{2 kappa x})^2 for the growing
/// seed. Throws PoleError at 2 D kappa = e^{2 kappa x}.
double free_partner_closed_form(double kappa1, double D, double x);

/// -2 kappa^2 sech^2[kappa (x - x0)].
double poschl_teller(double kappa1, double x0, double x);

/// D that centres the Poschl-Teller well at x0: -e^{2 kappa x0}/(2 kappa) for the
/// growing seed, e^{-2 kappa x0}/(2 kappa) for the decaying one.
double free_D_from_x0(double kappa1, double x0, Orientation orientation = Orientation::growing);

inline double free_potential(double) { return 0.0; }

}  // namespace susyqm
