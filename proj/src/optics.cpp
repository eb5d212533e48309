#include "qe/optics.hpp"

#include <cmath>
#include <numbers>

namespace qe {

namespace {

using Mat2 = std::array<Complex, 4>;

Mat2 raw_multiply(const Mat2& l, const Mat2& r) {
  return {l[0] * r[0] + l[1] * r[2], l[0] * r[1] + l[1] * r[3],
          l[2] * r[0] + l[3] * r[2], l[2] * r[1] + l[3] * r[3]};
}

/// Acts with a 2x2 matrix on photon a's stored components of one path
/// branch only.
void transform_branch(TwoPhotonState& state, Path path, const Mat2& m) {
  for (int pb = 0; pb < 2; ++pb) {
    const Complex c0 = state.at(path, 0, pb);
    const Complex c1 = state.at(path, 1, pb);
    state.at(path, 0, pb) = m[0] * c0 + m[1] * c1;
    state.at(path, 1, pb) = m[2] * c0 + m[3] * c1;
  }
}

Mat2 basis_matrix(const PolarizationBasis& basis) {
  const auto e1 = basis.ket(Outcome::first);
  const auto e2 = basis.ket(Outcome::second);
  return {e1[0], e2[0], e1[1], e2[1]};
}

Mat2 raw_adjoint(const Mat2& m) {
  return {std::conj(m[0]), std::conj(m[2]), std::conj(m[1]), std::conj(m[3])};
}

}  // namespace

JonesOperator JonesOperator::adjoint() const {
  return from_rows(std::conj(m_[0]), std::conj(m_[2]), std::conj(m_[1]),
                   std::conj(m_[3]));
}

JonesOperator JonesOperator::operator*(const JonesOperator& rhs) const {
  const Mat2 p = raw_multiply(m_, rhs.m_);
  return from_rows(p[0], p[1], p[2], p[3]);
}

std::array<Complex, 2> JonesOperator::apply(
    const std::array<Complex, 2>& ket) const {
  return {m_[0] * ket[0] + m_[1] * ket[1], m_[2] * ket[0] + m_[3] * ket[1]};
}

bool JonesOperator::is_unitary(double tol) const {
  const JonesOperator g = adjoint() * *this;
  return max_abs_diff(g, identity()) <= tol;
}

bool JonesOperator::is_projector(double tol) const {
  if (max_abs_diff(adjoint(), *this) > tol) return false;
  return max_abs_diff(*this * *this, *this) <= tol;
}

double max_abs_diff(const JonesOperator& lhs, const JonesOperator& rhs) {
  double worst = 0.0;
  for (std::size_t i = 0; i < 4; ++i)
    worst = std::max(worst, std::abs(lhs.elements()[i] - rhs.elements()[i]));
  return worst;
}

JonesOperator retarder(double fast_axis_angle, double retardance) {
  const double c = std::cos(fast_axis_angle);
  const double s = std::sin(fast_axis_angle);
  const Complex slow = std::exp(Complex(0.0, retardance));
  // R(theta) diag(1, slow) R(-theta), expanded.
  return JonesOperator::from_rows(c * c + slow * s * s, (1.0 - slow) * s * c,
                                  (1.0 - slow) * s * c, s * s + slow * c * c);
}

JonesOperator qwp(double fast_axis_angle) {
  return retarder(fast_axis_angle, std::numbers::pi / 2.0);
}

JonesOperator polarizer(const PolarizationBasis& basis, Outcome which) {
  const auto e = basis.ket(which);
  return JonesOperator::from_rows(e[0] * std::conj(e[0]), e[0] * std::conj(e[1]),
                                  e[1] * std::conj(e[0]),
                                  e[1] * std::conj(e[1]));
}

SlitElementPair::SlitElementPair(const JonesOperator& s1,
                                 const JonesOperator& s2)
    : slit1_op(s1), slit2_op(s2) {
  if (!slit1_op.is_unitary() || !slit2_op.is_unitary())
    throw contract_error("slit elements must be unitary");
}

TwoPhotonState mark_paths(const TwoPhotonState& state,
                          const SlitElementPair& elements) {
  if (!state.path_populated)
    throw contract_error("mark_paths requires a path-populated state");

  // The elements act in H/V coordinates; conjugate by the basis map when the
  // state is stored in another basis.
  const Mat2 m = basis_matrix(state.basis_a);
  const Mat2 m_dag = raw_adjoint(m);
  TwoPhotonState out = state;
  transform_branch(out, Path::slit1,
                   raw_multiply(m_dag, raw_multiply(elements.slit1_op.elements(), m)));
  transform_branch(out, Path::slit2,
                   raw_multiply(m_dag, raw_multiply(elements.slit2_op.elements(), m)));
  return out;
}

}  // namespace qe
