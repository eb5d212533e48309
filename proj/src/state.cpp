#include "qe/state.hpp"

#include <cmath>

namespace qe {

namespace {

using Mat2 = std::array<Complex, 4>;  // row-major 2x2

constexpr double kInvSqrt2 = 0.7071067811865475244;

/// Matrix whose columns are the basis kets, i.e. the map from components in
/// `basis` to H/V components.
Mat2 basis_matrix(const PolarizationBasis& basis) {
  const auto e1 = basis.ket(Outcome::first);
  const auto e2 = basis.ket(Outcome::second);
  return {e1[0], e2[0], e1[1], e2[1]};
}

Mat2 adjoint(const Mat2& m) {
  return {std::conj(m[0]), std::conj(m[2]), std::conj(m[1]), std::conj(m[3])};
}

Mat2 multiply(const Mat2& l, const Mat2& r) {
  return {l[0] * r[0] + l[1] * r[2], l[0] * r[1] + l[1] * r[3],
          l[2] * r[0] + l[3] * r[2], l[2] * r[1] + l[3] * r[3]};
}

/// Acts with a 2x2 matrix directly on the stored components of one photon,
/// on every path branch.
TwoPhotonState transform_components(const TwoPhotonState& state, Photon photon,
                                    const Mat2& m) {
  TwoPhotonState out = state;
  for (Path path : {Path::slit1, Path::slit2}) {
    if (photon == Photon::a) {
      for (int pb = 0; pb < 2; ++pb) {
        const Complex c0 = state.at(path, 0, pb);
        const Complex c1 = state.at(path, 1, pb);
        out.at(path, 0, pb) = m[0] * c0 + m[1] * c1;
        out.at(path, 1, pb) = m[2] * c0 + m[3] * c1;
      }
    } else {
      for (int pa = 0; pa < 2; ++pa) {
        const Complex c0 = state.at(path, pa, 0);
        const Complex c1 = state.at(path, pa, 1);
        out.at(path, pa, 0) = m[0] * c0 + m[1] * c1;
        out.at(path, pa, 1) = m[2] * c0 + m[3] * c1;
      }
    }
  }
  return out;
}

/// Components, in the photon's current basis, of the analyzer ket requested
/// by `spec` (the ket itself is defined by its H/V components).
std::array<Complex, 2> analyzer_in_current_basis(const TwoPhotonState& state,
                                                 const ProjectorSpec& spec) {
  const PolarizationBasis& current =
      spec.photon == Photon::a ? state.basis_a : state.basis_b;
  const auto e_hv = spec.basis.ket(spec.outcome);
  const Mat2 m_dag = adjoint(basis_matrix(current));
  return {m_dag[0] * e_hv[0] + m_dag[1] * e_hv[1],
          m_dag[2] * e_hv[0] + m_dag[3] * e_hv[1]};
}

}  // namespace

double TwoPhotonState::norm_squared() const {
  double total = 0.0;
  for (const Complex& c : amps) total += std::norm(c);
  return total;
}

void TwoPhotonState::normalize() {
  const double n2 = norm_squared();
  if (n2 < kProbabilityFloor)
    throw contract_error("cannot normalize a state with (near-)zero norm");
  const double scale = 1.0 / std::sqrt(n2);
  for (Complex& c : amps) c *= scale;
}

TwoPhotonState make_entangled_source(PhaseConvention convention) {
  TwoPhotonState state;
  const double sign = convention == PhaseConvention::singlet ? -1.0 : 1.0;
  state.at(Path::slit1, 0, 1) = kInvSqrt2;         // |H>_a |V>_b
  state.at(Path::slit1, 1, 0) = sign * kInvSqrt2;  // |V>_a |H>_b
  return state;
}

TwoPhotonState split_through_double_slit(const TwoPhotonState& state) {
  if (state.path_populated)
    throw contract_error("state has already passed the double slit");
  TwoPhotonState out = state;
  out.path_populated = true;
  for (int pa = 0; pa < 2; ++pa) {
    for (int pb = 0; pb < 2; ++pb) {
      const Complex c = state.at(Path::slit1, pa, pb) * kInvSqrt2;
      out.at(Path::slit1, pa, pb) = c;
      out.at(Path::slit2, pa, pb) = c;
    }
  }
  return out;
}

ProjectionResult project(const TwoPhotonState& state,
                         const ProjectorSpec& spec) {
  if (std::abs(state.norm_squared() - 1.0) > 1e-9)
    throw contract_error("project requires a normalized state");

  const auto e = analyzer_in_current_basis(state, spec);

  // Partial inner product <e| over the projected photon; v is indexed by
  // (path, other photon's polarization).
  std::array<Complex, 4> v{};
  for (Path path : {Path::slit1, Path::slit2}) {
    for (int other = 0; other < 2; ++other) {
      Complex sum = 0.0;
      for (int own = 0; own < 2; ++own) {
        const Complex& amp = spec.photon == Photon::a
                                 ? state.at(path, own, other)
                                 : state.at(path, other, own);
        sum += std::conj(e[own]) * amp;
      }
      v[static_cast<std::size_t>(path) * 2 + other] = sum;
    }
  }

  double probability = 0.0;
  for (const Complex& c : v) probability += std::norm(c);
  if (probability < kProbabilityFloor)
    throw contract_error("projection onto a (near-)impossible outcome");

  ProjectionResult result;
  result.probability = probability;
  result.state = state;
  const double scale = 1.0 / std::sqrt(probability);
  for (Path path : {Path::slit1, Path::slit2}) {
    for (int other = 0; other < 2; ++other) {
      const Complex collapsed =
          v[static_cast<std::size_t>(path) * 2 + other] * scale;
      for (int own = 0; own < 2; ++own) {
        Complex& amp = spec.photon == Photon::a
                           ? result.state.at(path, own, other)
                           : result.state.at(path, other, own);
        amp = e[own] * collapsed;
      }
    }
  }
  return result;
}

double outcome_probability(const TwoPhotonState& state,
                           const ProjectorSpec& spec) {
  const auto e = analyzer_in_current_basis(state, spec);
  double probability = 0.0;
  for (Path path : {Path::slit1, Path::slit2}) {
    for (int other = 0; other < 2; ++other) {
      Complex sum = 0.0;
      for (int own = 0; own < 2; ++own) {
        const Complex& amp = spec.photon == Photon::a
                                 ? state.at(path, own, other)
                                 : state.at(path, other, own);
        sum += std::conj(e[own]) * amp;
      }
      probability += std::norm(sum);
    }
  }
  return probability;
}

TwoPhotonState change_basis(const TwoPhotonState& state, Photon photon,
                            const PolarizationBasis& target) {
  const PolarizationBasis& current =
      photon == Photon::a ? state.basis_a : state.basis_b;
  const Mat2 a = multiply(adjoint(basis_matrix(target)), basis_matrix(current));
  TwoPhotonState out = transform_components(state, photon, a);
  (photon == Photon::a ? out.basis_a : out.basis_b) = target;
  return out;
}

TwoPhotonState apply_one_photon_matrix(const TwoPhotonState& state,
                                       Photon photon,
                                       const std::array<Complex, 4>& op_hv) {
  const PolarizationBasis& current =
      photon == Photon::a ? state.basis_a : state.basis_b;
  const Mat2 m = basis_matrix(current);
  return transform_components(state, photon,
                              multiply(adjoint(m), multiply(op_hv, m)));
}

}  // namespace qe
