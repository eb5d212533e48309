#pragma once

#include <array>
#include <complex>
#include <string>

#include "qe/common.hpp"

namespace qe {

using Complex = std::complex<double>;

/// Ordered pair of orthonormal polarization analyzer directions.
///
/// Kets are stored by their H/V components with the conventions
///   HV        : first = (1, 0),        second = (0, 1)
///   Diagonal  : first = (1, 1)/sqrt2,  second = (1, -1)/sqrt2
///   Circular  : first = R = (1, i)/sqrt2, second = L = (1, -i)/sqrt2
///   Linear(t) : first = (cos t, sin t), second = (-sin t, cos t)
///
/// Linear(0) measures the same rays as HV, and Linear(pi/4) the same rays as
/// Diagonal; the kets themselves may differ by a phase, which no outcome
/// probability can see (equivalent_to checks the ray-level identity).
class PolarizationBasis {
 public:
  enum class Kind { hv, diagonal, circular, linear };

  /// Defaults to the H/V basis.
  PolarizationBasis() : kind_(Kind::hv), angle_(0.0) {}

  static PolarizationBasis hv() { return {Kind::hv, 0.0}; }
  static PolarizationBasis diagonal() { return {Kind::diagonal, 0.0}; }
  static PolarizationBasis circular() { return {Kind::circular, 0.0}; }
  static PolarizationBasis linear(double angle_rad) {
    return {Kind::linear, angle_rad};
  }

  Kind kind() const { return kind_; }

  /// Analyzer angle in radians; meaningful for Kind::linear only.
  double angle() const { return angle_; }

  /// H/V components of the requested analyzer ket.
  std::array<Complex, 2> ket(Outcome which) const;

  /// True when both analyzer rays coincide (outcome-by-outcome, phase-free).
  bool equivalent_to(const PolarizationBasis& other,
                     double tol = kStateTol) const;

  /// Serialized form: "HV", "DIAG", "CIRC", or "LIN:<angle_rad>".
  std::string label() const;

  /// Inverse of label(). Throws config_error on anything unrecognized.
  static PolarizationBasis parse(const std::string& text);

  /// Exact identity of the stored representation (kind and angle), used for
  /// schedule bookkeeping; use equivalent_to for the physical comparison.
  bool operator==(const PolarizationBasis& other) const = default;

 private:
  PolarizationBasis(Kind kind, double angle) : kind_(kind), angle_(angle) {}

  Kind kind_;
  double angle_;
};

/// "first" / "second".
std::string outcome_label(Outcome which);

/// Inverse of outcome_label. Throws config_error on anything unrecognized.
Outcome parse_outcome(const std::string& text);

}  // namespace qe
