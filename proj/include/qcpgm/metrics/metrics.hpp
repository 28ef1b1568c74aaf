#pragma once

#include <cstdint>

#include "qcpgm/core/grid.hpp"
#include "qcpgm/optics/geometry.hpp"
#include "qcpgm/optics/target.hpp"
#include "qcpgm/recon/integrate.hpp"

namespace qcpgm::metrics {

/// Normalized RMSE: sqrt(mean((observed - expected)^2)) / mean(expected),
/// both taken over the masked region. Throws NumericError when the expected
/// mean vanishes and std::invalid_argument on shape mismatch or empty mask.
double nrmse(const core::Grid2D<double>& observed, const core::Grid2D<double>& expected,
             const core::Grid2D<std::uint8_t>& mask);

/// Singles signal-to-background ratio P / B. Throws NumericError for B <= 0.
double sbr_singles(double signal_flux, double background_flux);

/// Expected accidental coincidences in a window of width tau over time T
/// between two streams of eta (P + B) detections each:
/// C_B = tau eta^2 (P + B)^2 / T.
double coincidence_background(double pairs, double background, double acquisition_time_s,
                              double window_s, double efficiency);

/// Coincidence signal-to-background ratio eta^2 P / C_B = P T / (tau (P+B)^2).
double sbr_coincidence(double pairs, double background, double acquisition_time_s,
                       double window_s);

/// Signal level above which coincidence detection stops suppressing
/// background relative to singles: P > sqrt(B T / tau) - B.
double suppression_threshold(double background, double acquisition_time_s, double window_s);

struct PhaseStep {
  double step = 0.0;    // mean(high) - mean(low), rad
  double stddev = 0.0;  // propagated from the per-region sample variances
};

/// Measures a two-level phase step between the masked regions. Masks must be
/// disjoint and non-empty.
PhaseStep phase_step_measure(const recon::PhaseMap& phase,
                             const core::Grid2D<std::uint8_t>& high_mask,
                             const core::Grid2D<std::uint8_t>& low_mask);

/// Morphological erosion (8-neighborhood) applied `iterations` times.
core::Grid2D<std::uint8_t> erode(const core::Grid2D<std::uint8_t>& mask, int iterations);

struct StepMasks {
  core::Grid2D<std::uint8_t> high;
  core::Grid2D<std::uint8_t> low;
};

/// Ground-truth feature masks resampled onto the nf pixel grid, eroded to
/// exclude edge transients.
StepMasks step_masks(const optics::ComplexTarget& target, const optics::OpticalGeometry& geometry,
                     int erosion_px);

/// Ground-truth phase resampled onto the nf pixel grid.
core::Grid2D<double> truth_phase_on_nf(const optics::ComplexTarget& target,
                                       const optics::OpticalGeometry& geometry);

}  // namespace qcpgm::metrics
