#pragma once

#include <stdexcept>

namespace qe {

// State-level identity tolerance: two orders above double-epsilon
// accumulation for sums of at most 16 terms.
inline constexpr double kStateTol = 1e-12;

// Below this an outcome is treated as impossible and renormalization is
// refused.
inline constexpr double kProbabilityFloor = 1e-15;

// Below this a pattern's (max + min) makes contrast undefined.
inline constexpr double kContrastFloor = 1e-30;

enum class Photon { a, b };
enum class Path { slit1, slit2 };
enum class Outcome { first, second };

/// Violated precondition or physical invariant (non-unitary slit element,
/// unpopulated path, impossible outcome, ...).
struct contract_error : std::logic_error {
  using std::logic_error::logic_error;
};

/// Malformed or inconsistent user-supplied configuration.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Ledger does not belong to the run it is being compared against.
struct mismatch_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace qe
