#pragma once

#include <complex>

#include "susyqm/errors.hpp"

namespace susyqm {

using ComplexValue = std::complex<double>;

/// Complete elliptic integral of the first kind,
/// K(m) = \int_0^{pi/2} (1 - m sin^2 t)^{-1/2} dt, via the arithmetic-geometric mean.
/// Throws DomainError unless 0 <= m < 1.
double complete_K(double m);

/// Jacobi sn(x|m) for 0 <= m <= 1 by descending Landen transformation.
double jacobi_sn(double x, double m);

/// sn, cn, dn together.
struct JacobiTriple {
  double sn, cn, dn;
};
JacobiTriple jacobi_sncndn(double x, double m);

/// Weierstrass lattice generated by the half-periods omega = K(m) and
/// omega' = i K(1-m). Also carries the theta-series data used by wp/wzeta/wsigma.
struct LatticeData {
  double m = 0.5;
  double omega = 0.0;
  ComplexValue omega_prime;
  double g2 = 0.0;
  double g3 = 0.0;
  double e1 = 0.0, e2 = 0.0, e3 = 0.0;

  double nome = 0.0;         ///< q = exp(i pi omega'/omega), real in (0,1)
  double eta = 0.0;          ///< zeta(omega)
  ComplexValue eta_prime;    ///< zeta(omega'), purely imaginary
};

/// Throws DomainError unless 0 < m < 1.
LatticeData build_lattice(double m);

/// Poles are declared when |z - lattice point| < pole_tolerance.
inline constexpr double pole_tolerance = 1e-8;

ComplexValue wp(ComplexValue z, const LatticeData& lat);
ComplexValue wp_prime(ComplexValue z, const LatticeData& lat);
ComplexValue wzeta(ComplexValue z, const LatticeData& lat);
ComplexValue wsigma(ComplexValue z, const LatticeData& lat);

/// Principal-ish logarithm of sigma: exp(log_wsigma(z)) == wsigma(z), but it
/// stays finite where sigma itself over- or underflows. -inf on the lattice.
ComplexValue log_wsigma(ComplexValue z, const LatticeData& lat);

}  // namespace susyqm
