#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace csbm {

/// Numeric verification suites behind the `verify` CLI subcommand:
///   map        sign(propagate_nonlinear) vs brute-force MAP on random stars
///   moments    closed-form message moments vs Monte Carlo (CSV table)
///   gradients  analytic trainer gradients vs central finite differences
///   phi        phi/psi property suite on randomized inputs
/// `checks` empty = run everything. `inject_phi_sign_flip` is a test fixture
/// that corrupts the propagation side of the map check; a healthy build must
/// report that corruption as a failure.
struct VerifyReport {
  bool all_passed = false;
  std::string text;
};

VerifyReport run_verification(const std::vector<std::string>& checks, std::uint64_t seed, int threads,
                              bool inject_phi_sign_flip = false);

}  // namespace csbm
