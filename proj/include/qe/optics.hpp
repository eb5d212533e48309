#pragma once

#include <array>

#include "qe/basis.hpp"
#include "qe/common.hpp"
#include "qe/state.hpp"

namespace qe {

/// 2x2 complex operator on a single polarization, in H/V coordinates.
class JonesOperator {
 public:
  JonesOperator() : m_{1.0, 0.0, 0.0, 1.0} {}

  static JonesOperator identity() { return {}; }
  static JonesOperator from_rows(Complex m00, Complex m01, Complex m10,
                                 Complex m11) {
    return JonesOperator({m00, m01, m10, m11});
  }

  const Complex& operator()(int row, int col) const {
    return m_[static_cast<std::size_t>(row) * 2 + static_cast<std::size_t>(col)];
  }

  const std::array<Complex, 4>& elements() const { return m_; }

  JonesOperator adjoint() const;
  JonesOperator operator*(const JonesOperator& rhs) const;
  std::array<Complex, 2> apply(const std::array<Complex, 2>& ket) const;

  bool is_unitary(double tol = kStateTol) const;

  /// Hermitian and idempotent within tol.
  bool is_projector(double tol = kStateTol) const;

 private:
  explicit JonesOperator(std::array<Complex, 4> m) : m_(m) {}

  std::array<Complex, 4> m_;  // row-major
};

/// Largest element-wise absolute difference; phase-sensitive.
double max_abs_diff(const JonesOperator& lhs, const JonesOperator& rhs);

/// Wave plate with retardance `delta` and fast axis at `fast_axis_angle`
/// from horizontal: R(theta) diag(1, e^{i delta}) R(-theta). The fast axis
/// is transmitted unchanged; the slow axis picks up the phase e^{i delta}.
JonesOperator retarder(double fast_axis_angle, double retardance);

/// Quarter-wave plate: retarder(fast_axis_angle, pi/2), so qwp(0) =
/// diag(1, i). With the fast axis at +-45 deg it converts linear H/V light
/// to circular: qwp(+pi/4) maps V to R and H to L (up to phase), qwp(-pi/4)
/// the reverse.
JonesOperator qwp(double fast_axis_angle);

/// Rank-1 projector |e><e| onto one analyzer outcome of a basis.
JonesOperator polarizer(const PolarizationBasis& basis, Outcome which);

/// Per-slit optical elements tagging photon a's path. Construction enforces
/// unitarity of both elements: the markers must not absorb.
struct SlitElementPair {
  SlitElementPair(const JonesOperator& s1, const JonesOperator& s2);

  JonesOperator slit1_op;
  JonesOperator slit2_op;
};

/// Applies elements.slit1_op to photon a's polarization on the slit1 branch
/// and elements.slit2_op on the slit2 branch. Requires path_populated;
/// preserves the norm and the basis labels.
TwoPhotonState mark_paths(const TwoPhotonState& state,
                          const SlitElementPair& elements);

}  // namespace qe
