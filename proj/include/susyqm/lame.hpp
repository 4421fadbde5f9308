#pragma once

#include <array>

#include "susyqm/elliptic.hpp"
#include "susyqm/susy.hpp"

namespace susyqm {

/// V(x) = 2 m sn^2(x|m), the single-gap (n = 1) Lame potential. Period 2K(m).
double lame_potential(double m, double x);

/// Spectrum [m, 1] U [1+m, inf) and its gaps (-inf, m) U (1, 1+m).
struct SpectrumBands {
  enum class Region { infinite_gap, finite_band, finite_gap, infinite_band, edge };

  std::array<double, 3> band_edges{};

  Region classify(double energy) const;
  bool in_gap(double energy) const {
    const auto r = classify(energy);
    return r == Region::infinite_gap || r == Region::finite_gap;
  }
};

const char* to_string(SpectrumBands::Region r);

SpectrumBands lame_bands(double m);

/// Displacement delta with eps1 = 2(m+1)/3 - wp(delta), where wp is real:
/// found on (0, omega) for the infinite gap and on omega' + (0, omega) for the
/// finite gap, then oriented so that wp'(delta) > 0 (the real-segment root is
/// returned as -t, in (-omega, 0)). Throws DomainError unless eps1 lies
/// strictly inside a gap.
ComplexValue lame_delta_from_energy(const LatticeData& lattice, double epsilon1);
ComplexValue lame_delta_from_energy(double m, double epsilon1);

/// The two Bloch solutions u^beta (displacement +delta) and u^{1/beta} (-delta).
enum class BlochBranch { beta, inverse_beta };

struct BlochFactor {
  ComplexValue beta;           ///< u(x + 2K) = beta u(x)
  ComplexValue quasimomentum;  ///< beta = exp(i kappa), Re kappa reduced to (-pi, pi]
};

/// Bloch seed of the n = 1 Lame potential,
///   u(x) = sigma(w')/sigma(d + w') * sigma(x + d + w')/sigma(x + w') * exp(-x zeta(d)),
/// normalized to u(0) = 1, with its x- and eps1-derivatives.
class LameSeed {
public:
  /// Throws DomainError outside the gaps, DegenerateSeedError at a band edge,
  /// ConsistencyError if the constructed u fails its runtime checks.
  LameSeed(double m, double epsilon1, BlochBranch branch = BlochBranch::beta);

  double m() const { return lattice_.m; }
  double epsilon1() const { return epsilon1_; }
  BlochBranch branch() const { return branch_; }
  const LatticeData& lattice() const { return lattice_; }
  /// Displacement of this branch (-delta for inverse_beta).
  ComplexValue delta() const { return delta_; }
  double period() const { return 2.0 * lattice_.omega; }

  ComplexValue u1(double x) const;
  SeedSample<Complex> evaluate(double x) const;

  /// Logarithmic derivative u1'/u1 = zeta(x+d+w') - zeta(x+w') - zeta(d).
  ComplexValue log_derivative(double x) const;

  /// f(x) = [wp(x+d+w') - wp(d)] / wp'(d), so that W(u1, du1/deps1) = f u1^2.
  ComplexValue auxiliary_f(double x) const;

  BlochFactor bloch_factor() const;

private:
  LatticeData lattice_;
  double epsilon1_;
  BlochBranch branch_;
  ComplexValue delta_;
  ComplexValue log_prefactor_;  // log sigma(w') - log sigma(d + w')
  ComplexValue zeta_delta_;
  ComplexValue zeta_delta_shift_;  // zeta(d + w')
  ComplexValue wp_delta_;
  ComplexValue wp_prime_delta_;
};

ComplexValue lame_bloch_u1(const LameSeed& seed, double x);
BlochFactor lame_bloch_factor(const LameSeed& seed);

ConfluentSeed<Complex> lame_seed(const LameSeed& seed);
ConfluentSeed<Complex> lame_seed(double m, double epsilon1, BlochBranch branch = BlochBranch::beta);

/// Lame partner in closed form,
///   Vt = V + {2 + 4 L (D u^-2 + f)} / (D u^-2 + f)^2,  L = u'/u.
/// Throws PoleError where D u^-2 + f vanishes, ConsistencyError if the
/// imaginary part exceeds 1e-8.
double lame_partner_closed_form(const LameSeed& seed, double D, double x);

}  // namespace susyqm
