#include "qcpgm/metrics/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "qcpgm/core/errors.hpp"

namespace qcpgm::metrics {

double nrmse(const core::Grid2D<double>& observed, const core::Grid2D<double>& expected,
             const core::Grid2D<std::uint8_t>& mask) {
  if (!observed.same_shape(expected) || observed.rows() != mask.rows() ||
      observed.cols() != mask.cols()) {
    throw std::invalid_argument("nrmse: shape mismatch");
  }
  double sq = 0.0;
  double mean = 0.0;
  std::int64_t n = 0;
  for (int r = 0; r < observed.rows(); ++r) {
    for (int c = 0; c < observed.cols(); ++c) {
      if (!mask(r, c)) continue;
      const double d = observed(r, c) - expected(r, c);
      sq += d * d;
      mean += expected(r, c);
      ++n;
    }
  }
  if (n == 0) throw std::invalid_argument("nrmse: empty mask");
  mean /= static_cast<double>(n);
  if (mean == 0.0) throw core::NumericError("nrmse: expected mean is zero");
  return std::sqrt(sq / static_cast<double>(n)) / std::abs(mean);
}

double sbr_singles(double signal_flux, double background_flux) {
  if (background_flux <= 0.0) throw core::NumericError("sbr_singles: background must be positive");
  return signal_flux / background_flux;
}

double coincidence_background(double pairs, double background, double acquisition_time_s,
                              double window_s, double efficiency) {
  if (acquisition_time_s <= 0.0 || window_s <= 0.0) {
    throw std::invalid_argument("coincidence_background: time and window must be positive");
  }
  const double singles = efficiency * (pairs + background);
  return window_s * singles * singles / acquisition_time_s;
}

double sbr_coincidence(double pairs, double background, double acquisition_time_s,
                       double window_s) {
  const double cb =
      coincidence_background(pairs, background, acquisition_time_s, window_s, 1.0);
  if (cb <= 0.0) throw core::NumericError("sbr_coincidence: zero accidental rate");
  // Detection efficiency cancels between true coincidences eta^2 P and
  // accidentals tau (eta (P+B))^2 / T.
  return pairs / cb;
}

double suppression_threshold(double background, double acquisition_time_s, double window_s) {
  if (background <= 0.0 || acquisition_time_s <= 0.0 || window_s <= 0.0) {
    throw std::invalid_argument("suppression_threshold: arguments must be positive");
  }
  return std::sqrt(background * acquisition_time_s / window_s) - background;
}

PhaseStep phase_step_measure(const recon::PhaseMap& phase,
                             const core::Grid2D<std::uint8_t>& high_mask,
                             const core::Grid2D<std::uint8_t>& low_mask) {
  if (!phase.phase.same_shape(high_mask) || !phase.phase.same_shape(low_mask)) {
    throw std::invalid_argument("phase_step_measure: shape mismatch");
  }
  double sum_h = 0.0, sum_l = 0.0, sq_h = 0.0, sq_l = 0.0;
  std::int64_t n_h = 0, n_l = 0;
  for (int r = 0; r < phase.phase.rows(); ++r) {
    for (int c = 0; c < phase.phase.cols(); ++c) {
      if (high_mask(r, c) && low_mask(r, c)) {
        throw std::invalid_argument("phase_step_measure: masks overlap");
      }
      const double v = phase.phase(r, c);
      if (high_mask(r, c)) {
        sum_h += v;
        sq_h += v * v;
        ++n_h;
      } else if (low_mask(r, c)) {
        sum_l += v;
        sq_l += v * v;
        ++n_l;
      }
    }
  }
  if (n_h == 0 || n_l == 0) throw std::invalid_argument("phase_step_measure: empty mask");
  const double mh = sum_h / static_cast<double>(n_h);
  const double ml = sum_l / static_cast<double>(n_l);
  // unbiased sample variances; single-sample regions contribute no spread
  const double var_h =
      n_h > 1 ? std::max(0.0, sq_h - static_cast<double>(n_h) * mh * mh) / (n_h - 1.0) : 0.0;
  const double var_l =
      n_l > 1 ? std::max(0.0, sq_l - static_cast<double>(n_l) * ml * ml) / (n_l - 1.0) : 0.0;
  PhaseStep out;
  out.step = mh - ml;
  out.stddev = std::sqrt(var_h / static_cast<double>(n_h) + var_l / static_cast<double>(n_l));
  return out;
}

core::Grid2D<std::uint8_t> erode(const core::Grid2D<std::uint8_t>& mask, int iterations) {
  if (iterations < 0) throw std::invalid_argument("erode: negative iteration count");
  core::Grid2D<std::uint8_t> cur = mask;
  for (int it = 0; it < iterations; ++it) {
    core::Grid2D<std::uint8_t> next(cur.rows(), cur.cols(), 0);
    for (int r = 0; r < cur.rows(); ++r) {
      for (int c = 0; c < cur.cols(); ++c) {
        if (!cur(r, c)) continue;
        bool keep = true;
        for (int dr = -1; dr <= 1 && keep; ++dr) {
          for (int dc = -1; dc <= 1 && keep; ++dc) {
            const int rr = r + dr;
            const int cc = c + dc;
            if (!cur.in_bounds(rr, cc) || !cur(rr, cc)) keep = false;
          }
        }
        next(r, c) = keep ? 1 : 0;
      }
    }
    cur = std::move(next);
  }
  return cur;
}

StepMasks step_masks(const optics::ComplexTarget& target, const optics::OpticalGeometry& geometry,
                     int erosion_px) {
  StepMasks out;
  out.high = core::Grid2D<std::uint8_t>(geometry.nf_pixels, geometry.nf_pixels, 0);
  out.low = core::Grid2D<std::uint8_t>(geometry.nf_pixels, geometry.nf_pixels, 0);
  for (int iy = 0; iy < geometry.nf_pixels; ++iy) {
    for (int ix = 0; ix < geometry.nf_pixels; ++ix) {
      const int label = target.label_at(geometry.nf_x(ix), geometry.nf_y(iy));
      if (label == 2) out.high(iy, ix) = 1;
      if (label == 1) out.low(iy, ix) = 1;
    }
  }
  out.high = erode(out.high, erosion_px);
  out.low = erode(out.low, erosion_px);
  return out;
}

core::Grid2D<double> truth_phase_on_nf(const optics::ComplexTarget& target,
                                       const optics::OpticalGeometry& geometry) {
  core::Grid2D<double> out(geometry.nf_pixels, geometry.nf_pixels, 0.0);
  for (int iy = 0; iy < geometry.nf_pixels; ++iy) {
    for (int ix = 0; ix < geometry.nf_pixels; ++ix) {
      out(iy, ix) = target.phase_at(geometry.nf_x(ix), geometry.nf_y(iy));
    }
  }
  return out;
}

}  // namespace qcpgm::metrics
