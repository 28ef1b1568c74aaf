#pragma once

#include <complex>
#include <cstdint>

#include "qcpgm/core/grid.hpp"

namespace qcpgm::optics {

enum class TargetKind : std::uint8_t {
  flat,           // A = 1, phi = 0
  star,           // annulus of alternating flat/raised spokes
  usaf_bars,      // binary phase bars, vertical, 50% duty cycle
  gaussian_bump,  // smooth phase bump
  linear_ramp,    // phi = gx * x + gy * y
  cell_like,      // smooth blobs with weak absorption rims
};

struct TargetSpec {
  TargetKind kind = TargetKind::flat;
  int rows = 0;
  int cols = 0;
  double pitch = 0.0;  // m per sample

  double step_phase = 0.0;  // rad; star and usaf_bars
  int star_spokes = 8;      // total spokes, alternating low/high; must be even
  double star_r_inner = 0.0;
  double star_r_outer = 0.0;
  double bar_period = 0.0;  // m, one low+high line pair
  double bump_sigma = 0.0;
  double bump_peak = 0.0;              // rad
  double ramp_grad_x = 0.0;            // rad/m
  double ramp_grad_y = 0.0;            // rad/m
  std::uint64_t cell_seed = 0;
};

/// Complex transmission sampled on a centered grid. Sample (r, c) sits at
/// x = (c + 0.5 - cols/2) * pitch, y = (r + 0.5 - rows/2) * pitch.
/// The labels grid marks feature regions for ground-truth masks:
/// 0 background, 1 low feature level, 2 high feature level.
struct ComplexTarget {
  core::Grid2D<double> amplitude;  // in [0, 1]
  core::Grid2D<double> phase;      // rad
  core::Grid2D<std::uint8_t> labels;
  double pitch = 0.0;
  double width = 0.0;   // cols * pitch
  double height = 0.0;  // rows * pitch

  double x_of(int c) const { return (c + 0.5 - 0.5 * amplitude.cols()) * pitch; }
  double y_of(int r) const { return (r + 0.5 - 0.5 * amplitude.rows()) * pitch; }

  /// Nearest-sample lookup; positions outside the grid are clear aperture
  /// (A = 1, phi = 0).
  std::complex<double> value_at(double x, double y) const;
  /// Unwrapped phase at the nearest sample, unlike arg(value_at(x, y)).
  double phase_at(double x, double y) const;
  std::uint8_t label_at(double x, double y) const;
};

/// Builds a target from a spec. Throws std::invalid_argument on non-positive
/// dimensions or pitch, amplitude outside [0, 1] is impossible by
/// construction, and kind-specific parameter violations.
ComplexTarget gen_target(const TargetSpec& spec);

}  // namespace qcpgm::optics
