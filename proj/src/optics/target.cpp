#include "qcpgm/optics/target.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qcpgm/core/rng.hpp"

namespace qcpgm::optics {

namespace {

using std::numbers::pi;

void fill_star(ComplexTarget& t, const TargetSpec& spec) {
  if (spec.star_spokes < 2 || spec.star_spokes % 2 != 0) {
    throw std::invalid_argument("gen_target: star spoke count must be even and >= 2");
  }
  if (!(spec.star_r_outer > spec.star_r_inner) || spec.star_r_inner < 0.0) {
    throw std::invalid_argument("gen_target: star radii must satisfy 0 <= inner < outer");
  }
  double sector_width = 2.0 * pi / spec.star_spokes;
  for (int r = 0; r < t.phase.rows(); ++r) {
    for (int c = 0; c < t.phase.cols(); ++c) {
      double x = t.x_of(c), y = t.y_of(r);
      double rad = std::hypot(x, y);
      if (rad < spec.star_r_inner || rad > spec.star_r_outer) continue;
      double theta = std::atan2(y, x);
      int sector = static_cast<int>(std::floor((theta + pi) / sector_width));
      if (sector >= spec.star_spokes) sector = spec.star_spokes - 1;
      if (sector % 2 == 1) {
        t.phase(r, c) = spec.step_phase;
        t.labels(r, c) = 2;
      } else {
        t.labels(r, c) = 1;
      }
    }
  }
}

void fill_usaf_bars(ComplexTarget& t, const TargetSpec& spec) {
  if (spec.bar_period <= 0.0) throw std::invalid_argument("gen_target: bar period must be > 0");
  for (int r = 0; r < t.phase.rows(); ++r) {
    for (int c = 0; c < t.phase.cols(); ++c) {
      double x = t.x_of(c);
      double frac = x / spec.bar_period - std::floor(x / spec.bar_period);
      if (frac < 0.5) {
        t.labels(r, c) = 1;
      } else {
        t.phase(r, c) = spec.step_phase;
        t.labels(r, c) = 2;
      }
    }
  }
}

void fill_gaussian_bump(ComplexTarget& t, const TargetSpec& spec) {
  if (spec.bump_sigma <= 0.0) throw std::invalid_argument("gen_target: bump sigma must be > 0");
  for (int r = 0; r < t.phase.rows(); ++r) {
    for (int c = 0; c < t.phase.cols(); ++c) {
      double x = t.x_of(c), y = t.y_of(r);
      double v = spec.bump_peak * std::exp(-(x * x + y * y) / (2.0 * spec.bump_sigma * spec.bump_sigma));
      t.phase(r, c) = v;
      if (std::abs(v) >= 0.5 * std::abs(spec.bump_peak)) t.labels(r, c) = 2;
    }
  }
}

void fill_linear_ramp(ComplexTarget& t, const TargetSpec& spec) {
  for (int r = 0; r < t.phase.rows(); ++r) {
    for (int c = 0; c < t.phase.cols(); ++c) {
      t.phase(r, c) = spec.ramp_grad_x * t.x_of(c) + spec.ramp_grad_y * t.y_of(r);
    }
  }
}

void fill_cell_like(ComplexTarget& t, const TargetSpec& spec) {
  auto rng = core::substream(spec.cell_seed, core::fnv1a64("cell-like"));
  int blobs = 3 + static_cast<int>(rng() % 3);
  double w = t.width;
  for (int b = 0; b < blobs; ++b) {
    double cx = (core::u01(rng) - 0.5) * 0.6 * w;
    double cy = (core::u01(rng) - 0.5) * 0.6 * w;
    double sigma = (0.06 + 0.08 * core::u01(rng)) * w;
    double peak = 1.0 + core::u01(rng);
    for (int r = 0; r < t.phase.rows(); ++r) {
      for (int c = 0; c < t.phase.cols(); ++c) {
        double dx = t.x_of(c) - cx, dy = t.y_of(r) - cy;
        double d = std::hypot(dx, dy);
        t.phase(r, c) += peak * std::exp(-d * d / (2.0 * sigma * sigma));
        // Weak absorption rim standing in for a membrane.
        double rim = 0.08 * std::exp(-(d - sigma) * (d - sigma) / (2.0 * 0.15 * sigma * 0.15 * sigma));
        t.amplitude(r, c) = std::max(0.0, std::min(1.0, t.amplitude(r, c) - rim));
      }
    }
  }
}

}  // namespace

std::complex<double> ComplexTarget::value_at(double x, double y) const {
  int c = static_cast<int>(std::lround(x / pitch - 0.5 + 0.5 * amplitude.cols()));
  int r = static_cast<int>(std::lround(y / pitch - 0.5 + 0.5 * amplitude.rows()));
  if (!amplitude.in_bounds(r, c)) return {1.0, 0.0};
  return std::polar(amplitude(r, c), phase(r, c));
}

double ComplexTarget::phase_at(double x, double y) const {
  int c = static_cast<int>(std::lround(x / pitch - 0.5 + 0.5 * amplitude.cols()));
  int r = static_cast<int>(std::lround(y / pitch - 0.5 + 0.5 * amplitude.rows()));
  if (!phase.in_bounds(r, c)) return 0.0;
  return phase(r, c);
}

std::uint8_t ComplexTarget::label_at(double x, double y) const {
  int c = static_cast<int>(std::lround(x / pitch - 0.5 + 0.5 * amplitude.cols()));
  int r = static_cast<int>(std::lround(y / pitch - 0.5 + 0.5 * amplitude.rows()));
  if (!labels.in_bounds(r, c)) return 0;
  return labels(r, c);
}

ComplexTarget gen_target(const TargetSpec& spec) {
  if (spec.rows <= 0 || spec.cols <= 0) {
    throw std::invalid_argument("gen_target: dimensions must be positive");
  }
  if (spec.pitch <= 0.0) throw std::invalid_argument("gen_target: pitch must be > 0");
  if (spec.step_phase < 0.0) throw std::invalid_argument("gen_target: step phase must be >= 0");

  ComplexTarget t;
  t.amplitude = core::Grid2D<double>(spec.rows, spec.cols, 1.0);
  t.phase = core::Grid2D<double>(spec.rows, spec.cols, 0.0);
  t.labels = core::Grid2D<std::uint8_t>(spec.rows, spec.cols, 0);
  t.pitch = spec.pitch;
  t.width = spec.cols * spec.pitch;
  t.height = spec.rows * spec.pitch;

  switch (spec.kind) {
    case TargetKind::flat:
      break;
    case TargetKind::star:
      fill_star(t, spec);
      break;
    case TargetKind::usaf_bars:
      fill_usaf_bars(t, spec);
      break;
    case TargetKind::gaussian_bump:
      fill_gaussian_bump(t, spec);
      break;
    case TargetKind::linear_ramp:
      fill_linear_ramp(t, spec);
      break;
    case TargetKind::cell_like:
      fill_cell_like(t, spec);
      break;
  }
  return t;
}

}  // namespace qcpgm::optics
