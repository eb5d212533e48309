#include "qe/screen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qe {

namespace {

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    total += 0.5 * (y[i] + y[i + 1]) * (x[i + 1] - x[i]);
  return total;
}

/// Indices of grid points with x_lo <= x <= x_hi (tiny slack for rounding).
std::vector<std::size_t> window_indices(const std::vector<double>& x_grid,
                                        double x_lo, double x_hi) {
  const double slack = 1e-12 * std::max(std::abs(x_lo), std::abs(x_hi));
  std::vector<std::size_t> indices;
  for (std::size_t i = 0; i < x_grid.size(); ++i)
    if (x_grid[i] >= x_lo - slack && x_grid[i] <= x_hi + slack)
      indices.push_back(i);
  return indices;
}

void check_fringe_window(const std::vector<double>& x_grid,
                         const std::vector<std::size_t>& indices, double x_lo,
                         double x_hi, double expected_period) {
  if (!(expected_period > 0.0) || !std::isfinite(expected_period))
    throw contract_error("expected fringe period must be positive");
  if (x_hi - x_lo < expected_period * (1.0 - 1e-9))
    throw contract_error("window shorter than one fringe period");
  for (std::size_t k = 0; k + 1 < indices.size(); ++k) {
    const double step = x_grid[indices[k + 1]] - x_grid[indices[k]];
    if (step >= expected_period / 64.0)
      throw contract_error("grid too coarse to resolve the fringe period");
  }
}

double contrast(const std::vector<double>& values) {
  if (values.size() < 2)
    throw contract_error("fewer than two samples in the visibility window");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (hi + lo < kContrastFloor)
    throw contract_error("contrast undefined: pattern vanishes in the window");
  return (hi - lo) / (hi + lo);
}

}  // namespace

void ScreenGeometry::validate() const {
  const auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(slit_width)) throw contract_error("slit_width must be positive");
  if (!positive(slit_separation))
    throw contract_error("slit_separation must be positive");
  if (!positive(screen_distance))
    throw contract_error("screen_distance must be positive");
  if (!positive(wavelength)) throw contract_error("wavelength must be positive");
  if (slit_separation < slit_width)
    throw contract_error("slits overlap: slit_separation < slit_width");
}

double ScreenGeometry::fringe_period() const {
  return wavelength * screen_distance / slit_separation;
}

double ScreenGeometry::envelope_zero() const {
  return wavelength * screen_distance / slit_width;
}

Complex slit_amplitude(double x, Path slit, const ScreenGeometry& geometry) {
  const double scale =
      std::numbers::pi * x / (geometry.wavelength * geometry.screen_distance);
  const double u = scale * geometry.slit_width;
  const double envelope = u == 0.0 ? 1.0 : std::sin(u) / u;
  const double phase =
      (slit == Path::slit1 ? 1.0 : -1.0) * scale * geometry.slit_separation;
  return envelope * std::exp(Complex(0.0, phase));
}

std::vector<double> default_grid(const ScreenGeometry& geometry) {
  geometry.validate();
  const double step = geometry.fringe_period() / 128.0;
  const double half_span = 4.0 * geometry.envelope_zero();
  const auto half_count =
      static_cast<long>(std::ceil(half_span / step - 1e-9));
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(2 * half_count + 1));
  for (long i = -half_count; i <= half_count; ++i)
    grid.push_back(static_cast<double>(i) * step);
  return grid;
}

Pattern pattern_conditional(const TwoPhotonState& state,
                            const std::optional<ProjectorSpec>& condition,
                            const ScreenGeometry& geometry,
                            const std::vector<double>& x_grid) {
  geometry.validate();
  if (!state.path_populated)
    throw contract_error("pattern requires a path-populated state");
  if (std::abs(state.norm_squared() - 1.0) > 1e-9)
    throw contract_error("pattern requires a normalized state");

  const TwoPhotonState working =
      condition ? project(state, *condition).state : state;

  Pattern pattern;
  pattern.x_grid = x_grid;
  pattern.density.resize(x_grid.size());
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    const Complex f1 = slit_amplitude(x_grid[i], Path::slit1, geometry);
    const Complex f2 = slit_amplitude(x_grid[i], Path::slit2, geometry);
    double density = 0.0;
    for (int pa = 0; pa < 2; ++pa) {
      for (int pb = 0; pb < 2; ++pb) {
        density += std::norm(f1 * working.at(Path::slit1, pa, pb) +
                             f2 * working.at(Path::slit2, pa, pb));
      }
    }
    pattern.density[i] = density;
  }
  pattern.normalization = trapezoid(pattern.x_grid, pattern.density);
  return pattern;
}

Pattern incoherent_reference(const ScreenGeometry& geometry,
                             const std::vector<double>& x_grid) {
  geometry.validate();
  Pattern pattern;
  pattern.x_grid = x_grid;
  pattern.density.resize(x_grid.size());
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    pattern.density[i] =
        std::norm(slit_amplitude(x_grid[i], Path::slit1, geometry)) +
        std::norm(slit_amplitude(x_grid[i], Path::slit2, geometry));
  }
  pattern.normalization = trapezoid(pattern.x_grid, pattern.density);
  return pattern;
}

double visibility(const Pattern& pattern, double x_lo, double x_hi) {
  const auto indices = window_indices(pattern.x_grid, x_lo, x_hi);
  std::vector<double> values;
  values.reserve(indices.size());
  for (std::size_t i : indices) values.push_back(pattern.density[i]);
  return contrast(values);
}

double visibility(const Pattern& pattern, double x_lo, double x_hi,
                  double expected_period) {
  const auto indices = window_indices(pattern.x_grid, x_lo, x_hi);
  check_fringe_window(pattern.x_grid, indices, x_lo, x_hi, expected_period);
  std::vector<double> values;
  values.reserve(indices.size());
  for (std::size_t i : indices) values.push_back(pattern.density[i]);
  return contrast(values);
}

double fringe_visibility(const Pattern& pattern, const ScreenGeometry& geometry,
                         double x_lo, double x_hi) {
  geometry.validate();
  const auto indices = window_indices(pattern.x_grid, x_lo, x_hi);
  check_fringe_window(pattern.x_grid, indices, x_lo, x_hi,
                      geometry.fringe_period());

  // Envelope per selected point, and its maximum for the degeneracy cutoff.
  std::vector<double> reference(indices.size());
  double reference_peak = 0.0;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const double x = pattern.x_grid[indices[k]];
    reference[k] = std::norm(slit_amplitude(x, Path::slit1, geometry)) +
                   std::norm(slit_amplitude(x, Path::slit2, geometry));
    reference_peak = std::max(reference_peak, reference[k]);
  }

  std::vector<double> normalized;
  normalized.reserve(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    // Skip points sitting on an envelope zero: 0/0 carries no information.
    if (reference[k] < 1e-12 * reference_peak) continue;
    normalized.push_back(pattern.density[indices[k]] / reference[k]);
  }
  return contrast(normalized);
}

double distinguishability(const TwoPhotonState& state) {
  if (!state.path_populated)
    throw contract_error("distinguishability requires a path-populated state");

  double w1 = 0.0;
  double w2 = 0.0;
  Complex overlap = 0.0;
  for (int pa = 0; pa < 2; ++pa) {
    for (int pb = 0; pb < 2; ++pb) {
      const Complex m1 = state.at(Path::slit1, pa, pb);
      const Complex m2 = state.at(Path::slit2, pa, pb);
      w1 += std::norm(m1);
      w2 += std::norm(m2);
      overlap += std::conj(m1) * m2;
    }
  }
  if (w1 < kProbabilityFloor || w2 < kProbabilityFloor) return 1.0;
  const double overlap_sq =
      std::min(1.0, std::norm(overlap) / (w1 * w2));
  return std::sqrt(1.0 - overlap_sq);
}

}  // namespace qe
