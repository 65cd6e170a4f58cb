#pragma once
// Verification suites.  Each check records the two sides it compared as
// exact strings so that reports can show the computed values.

#include <string>
#include <vector>

#include "cs/skein.hpp"

namespace cs {

using Checks = std::vector<IdentityCheck>;

struct SuiteReport {
  std::string name;
  Checks checks;
  bool pass() const;
  /// One line per check: `PASS name: lhs == rhs` or `FAIL ...`.
  std::string text() const;
};

// A2 with Lambda(e1*, e2*) = 1.
Checks a2_completion_checks();
Checks a2_theta_checks();

// Annulus.
Checks annulus_mutation_checks();
Checks annulus_product_checks(unsigned order = 6);
Checks annulus_chebyshev_checks(unsigned order = 8);
Checks annulus_bracelet_checks(unsigned order = 8);
Checks annulus_skein_checks();

/// Once-punctured torus at t = 1 with principal coefficients, exponents
/// projected to the arc coordinates.
Checks torus_checks(unsigned order = 6);

/// Cyclic A3 with principal coefficients folded along its rotation.
Checks folding_checks(unsigned order = 6);

/// DT transformation of the quantum A2 diagram.
Checks dt_checks(unsigned order = 6);

/// Randomized property checks; each property runs at least `instances`
/// times.  One check per property, its sides give the instance count.
Checks property_checks(unsigned seed = 20261016, size_t instances = 100);

/// Named suites: a2, annulus, torus, folding, dt, properties.
std::vector<std::string> suite_names();
/// Throws ParseError for an unknown name.
SuiteReport run_suite(const std::string& name);

}  // namespace cs
