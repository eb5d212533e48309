#pragma once

#include <array>
#include <cstddef>

#include "qe/basis.hpp"
#include "qe/common.hpp"

namespace qe {

/// Sign convention of the entangled source: singlet = (|HV> - |VH>)/sqrt2,
/// triplet = (|HV> + |VH>)/sqrt2.
enum class PhaseConvention { singlet, triplet };

/// Which outcome of which basis to project which photon onto.
struct ProjectorSpec {
  Photon photon = Photon::b;
  PolarizationBasis basis{};
  Outcome outcome = Outcome::first;
};

/// Pure joint state of photons a and b, with an optional path degree of
/// freedom for photon a.
///
/// Amplitudes are components along the kets of basis_a (photon a) and
/// basis_b (photon b), indexed by (path, pol_a, pol_b). Before the double
/// slit (path_populated == false) only the slit1 block is meaningful and the
/// slit2 block is identically zero; split_through_double_slit moves the
/// state into an equal coherent superposition of the two path branches.
struct TwoPhotonState {
  std::array<Complex, 8> amps{};
  bool path_populated = false;
  PolarizationBasis basis_a{};
  PolarizationBasis basis_b{};

  static std::size_t index(Path path, int pol_a, int pol_b) {
    return static_cast<std::size_t>(path) * 4 +
           static_cast<std::size_t>(pol_a) * 2 + static_cast<std::size_t>(pol_b);
  }

  Complex& at(Path path, int pol_a, int pol_b) {
    return amps[index(path, pol_a, pol_b)];
  }
  const Complex& at(Path path, int pol_a, int pol_b) const {
    return amps[index(path, pol_a, pol_b)];
  }

  double norm_squared() const;

  /// Rescales to unit norm. Throws contract_error when the norm is below
  /// kProbabilityFloor.
  void normalize();
};

struct ProjectionResult {
  TwoPhotonState state{};
  double probability = 0.0;
};

/// Polarization-entangled pair before the slits: basis_a = basis_b = HV,
/// path not yet populated.
TwoPhotonState make_entangled_source(
    PhaseConvention convention = PhaseConvention::singlet);

/// Sends photon a through the double slit: each polarization amplitude is
/// split coherently and symmetrically over slit1 and slit2 (factor
/// 1/sqrt2 each). Requires path_populated == false.
TwoPhotonState split_through_double_slit(const TwoPhotonState& state);

/// Projects one photon onto an analyzer outcome and renormalizes.
///
/// Requires a normalized input state. The outcome probability is returned
/// alongside the collapsed state; an outcome with probability below
/// kProbabilityFloor throws contract_error instead of renormalizing.
ProjectionResult project(const TwoPhotonState& state, const ProjectorSpec& spec);

/// Probability of the analyzer outcome without collapsing. Unlike project,
/// never throws for an (almost) impossible outcome.
double outcome_probability(const TwoPhotonState& state,
                           const ProjectorSpec& spec);

/// Re-expresses one photon's amplitudes in another basis. Physically a
/// no-op: norm and all outcome probabilities are preserved; round trips
/// restore the original components.
TwoPhotonState change_basis(const TwoPhotonState& state, Photon photon,
                            const PolarizationBasis& target);

/// Applies a 2x2 operator, given in H/V coordinates (row-major), to one
/// photon's polarization on every path branch. The result keeps the input's
/// basis labels and is not renormalized.
TwoPhotonState apply_one_photon_matrix(const TwoPhotonState& state,
                                       Photon photon,
                                       const std::array<Complex, 4>& op_hv);

}  // namespace qe
