#pragma once

#include <optional>
#include <vector>

#include "qe/common.hpp"
#include "qe/state.hpp"

namespace qe {

/// Double-slit and detection-screen geometry, SI units. Far-field
/// (Fraunhofer) treatment throughout: transverse wavenumber k_x = 2 pi x /
/// (lambda L) at screen position x.
struct ScreenGeometry {
  double slit_width = 2.0e-4;       // each slit's opening, meters
  double slit_separation = 4.0e-4;  // center-to-center distance, meters
  double screen_distance = 1.0;     // slits to screen, meters
  double wavelength = 7.02e-7;      // meters

  bool operator==(const ScreenGeometry&) const = default;

  /// Throws contract_error unless all lengths are positive, finite, and
  /// slit_separation >= slit_width (slits must not overlap).
  void validate() const;

  /// Center-to-center fringe spacing lambda L / d.
  double fringe_period() const;

  /// First zero of the single-slit envelope, lambda L / w.
  double envelope_zero() const;
};

/// Screen-position amplitude contributed by one slit for unit illumination:
/// sinc(pi w x / (lambda L)) * exp(+- i pi d x / (lambda L)), with + for
/// slit1 and - for slit2. The two differ in phase by the full fringe phase
/// 2 pi d x / (lambda L).
Complex slit_amplitude(double x, Path slit, const ScreenGeometry& geometry);

/// Probability density of photon a's screen position on a uniform grid.
/// `normalization` is the trapezoidal integral of density over the grid
/// (the total probability captured by the window, times any conditioning
/// weight the caller tracked separately).
struct Pattern {
  std::vector<double> x_grid;
  std::vector<double> density;
  double normalization = 0.0;
};

/// Uniform symmetric screen grid: step = fringe_period/128 (so fringe
/// extrema at multiples of a quarter period land exactly on grid points),
/// spanning at least +-4 envelope zeros, with x = 0 in the center.
std::vector<double> default_grid(const ScreenGeometry& geometry);

/// Detection-probability density of photon a across the screen, optionally
/// conditioned on a polarization analyzer outcome (typically photon b's).
///
/// With a condition, photon b is projected first and the post-measurement
/// state renormalized; the conditioning probability is not folded in. The
/// density is in envelope units (both slits contribute amplitude 1 at x = 0),
/// not a unit-integral probability density: consumers normalize with the
/// carried `normalization` when they need probabilities. Requires
/// path_populated.
/// Each grid point is evaluated independently: the density values are
/// bitwise-reproducible regardless of evaluation order.
Pattern pattern_conditional(const TwoPhotonState& state,
                            const std::optional<ProjectorSpec>& condition,
                            const ScreenGeometry& geometry,
                            const std::vector<double>& x_grid);

/// Structureless single-slit reference |f1|^2 + |f2|^2: what the screen
/// would record with the path coherence fully destroyed. Used to divide out
/// the envelope when measuring fringe contrast.
Pattern incoherent_reference(const ScreenGeometry& geometry,
                             const std::vector<double>& x_grid);

/// Raw extremal contrast (max - min) / (max + min) of density samples with
/// x_lo <= x <= x_hi. Throws contract_error when fewer than two samples fall
/// in the window or max + min < kContrastFloor.
double visibility(const Pattern& pattern, double x_lo, double x_hi);

/// As above, but first checks the window against an expected fringe period:
/// the window must cover at least one full period sampled finer than
/// period/64, so the extrema cannot be missed.
double visibility(const Pattern& pattern, double x_lo, double x_hi,
                  double expected_period);

/// Fringe visibility with the single-slit envelope divided out: the raw
/// contrast of density / incoherent_reference over the window. This is the
/// quantity bounded by sqrt(1 - D^2); the plain contrast of an enveloped
/// pattern is not. Window requirements as for the period-checked visibility,
/// with period = geometry.fringe_period().
double fringe_visibility(const Pattern& pattern, const ScreenGeometry& geometry,
                         double x_lo, double x_hi);

/// Which-path distinguishability D = sqrt(1 - |<m1|m2>|^2) between the
/// normalized joint polarization states riding the two path branches.
/// A branch with (near-)zero weight is perfectly distinguishable from any
/// other: returns 1. Requires path_populated.
double distinguishability(const TwoPhotonState& state);

}  // namespace qe
