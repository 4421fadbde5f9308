#pragma once

#include <string>
#include <vector>

namespace susyqm {

/// Outcome of one named check: `value` is compared against `tolerance`.
struct CheckResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// Identity suite for sigma/zeta/wp, Legendre relation, Lame representation.
std::vector<CheckResult> elliptic_suite();
/// Free particle: differential = integral = closed form = Poschl-Teller, bound state, D scan.
std::vector<CheckResult> free_suite();
/// Lame n = 1: Bloch seed validity, closed form vs generic partner, gap state, band edges.
std::vector<CheckResult> lame_suite();

/// "elliptic", "free", "lame" or "all". Throws InputError on an unknown name.
std::vector<CheckResult> run_suite(const std::string& name);

}  // namespace susyqm
