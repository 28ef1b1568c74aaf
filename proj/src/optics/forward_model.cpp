#include "qcpgm/optics/forward_model.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "qcpgm/core/errors.hpp"
#include "qcpgm/core/fft.hpp"
#include "qcpgm/core/parallel.hpp"

namespace qcpgm::optics {

namespace {

using std::numbers::pi;

constexpr double kWindowHalfWidthInDeltaR = 4.0;

// Cell assignment of one wavenumber component. A value exactly on a cell
// boundary (the k = 0 bin of an even grid always is) splits evenly between
// the neighbors; that keeps mirror-symmetric spectra binned symmetrically.
struct AxisBins {
  int idx[2];
  double w[2];
  int n = 0;
};

AxisBins ff_axis_bins(double k, double half_aperture, double cell, int count) {
  AxisBins out;
  double pos = (k + half_aperture) / cell;
  double nearest = std::round(pos);
  if (std::abs(pos - nearest) < 1e-9) {
    int b = static_cast<int>(nearest);
    if (b - 1 >= 0 && b - 1 < count) {
      out.idx[out.n] = b - 1;
      out.w[out.n] = 0.5;
      ++out.n;
    }
    if (b >= 0 && b < count) {
      out.idx[out.n] = b;
      out.w[out.n] = 0.5;
      ++out.n;
    }
    return out;
  }
  int j = static_cast<int>(std::floor(pos));
  if (j >= 0 && j < count) {
    out.idx[0] = j;
    out.w[0] = 1.0;
    out.n = 1;
  }
  return out;
}

// Signed FFT bin frequency for index m of an N-point transform.
inline int signed_index(int m, int n) { return m < n - m ? m : m - n; }

}  // namespace

ConditionalDistribution conditional_ff_distribution(const ComplexTarget& target,
                                                    const BiphotonParams& params,
                                                    const OpticalGeometry& geometry, int nf_ix,
                                                    int nf_iy, EnvelopeMode mode,
                                                    int bins_per_ff_pixel) {
  if (nf_ix < 0 || nf_ix >= geometry.nf_pixels || nf_iy < 0 || nf_iy >= geometry.nf_pixels) {
    throw std::invalid_argument("conditional_ff_distribution: nf pixel out of range");
  }
  if (bins_per_ff_pixel < 1) {
    throw std::invalid_argument("conditional_ff_distribution: bins_per_ff_pixel must be >= 1");
  }
  double pitch = target.pitch;
  if (!(pitch <= 0.5 * params.delta_r)) {
    throw std::invalid_argument(
        "conditional_ff_distribution: target pitch does not resolve the correlation width");
  }
  if (pi / pitch < geometry.ff_half_aperture) {
    throw std::invalid_argument(
        "conditional_ff_distribution: ff aperture exceeds the target grid Nyquist range");
  }

  const int hw = static_cast<int>(std::ceil(kWindowHalfWidthInDeltaR * params.delta_r / pitch));
  const int m_window = 2 * hw + 1;
  const double cell = geometry.ff_pixel_bandwidth();
  const int n_min = static_cast<int>(std::ceil(2.0 * pi * bins_per_ff_pixel / (cell * pitch)));
  const int n = core::next_fast_fft_size(std::max(2 * m_window, n_min));

  const double xs = geometry.nf_x(nf_ix);
  const double ys = geometry.nf_y(nf_iy);
  const double inv_2dr2 = 1.0 / (2.0 * params.delta_r * params.delta_r);
  const double env_coeff = 2.0 * params.delta_k * params.delta_k;

  std::vector<std::complex<double>> buf(static_cast<std::size_t>(n) * n);
  for (int wy = 0; wy < m_window; ++wy) {
    double dy = (wy - hw) * pitch;
    double y = ys + dy;
    for (int wx = 0; wx < m_window; ++wx) {
      double dx = (wx - hw) * pitch;
      double x = xs + dx;
      std::complex<double> t = target.value_at(x, y);
      if (t == std::complex<double>(0.0, 0.0)) continue;
      double g = std::exp(-(dx * dx + dy * dy) * inv_2dr2);
      if (mode == EnvelopeMode::full) {
        double sx = x + xs, sy = y + ys;
        g *= std::exp(-env_coeff * (sx * sx + sy * sy));
      }
      buf[static_cast<std::size_t>(wy) * n + wx] = t * g;
    }
  }

  core::fft2(buf.data(), n, n, core::kFftForward);

  const int count = geometry.ff_pixels;
  ConditionalDistribution out;
  out.prob = core::Grid2D<double>(count, count, 0.0);
  const double dk = 2.0 * pi / (n * pitch);

  std::vector<AxisBins> bins_of(n);
  for (int m = 0; m < n; ++m) {
    bins_of[m] = ff_axis_bins(signed_index(m, n) * dk, geometry.ff_half_aperture, cell, count);
  }

  double total = 0.0;
  double accepted = 0.0;
  for (int by = 0; by < n; ++by) {
    const AxisBins& vb = bins_of[by];
    for (int bx = 0; bx < n; ++bx) {
      double mass = std::norm(buf[static_cast<std::size_t>(by) * n + bx]);
      total += mass;
      if (mass == 0.0) continue;
      const AxisBins& ub = bins_of[bx];
      for (int a = 0; a < vb.n; ++a) {
        for (int b = 0; b < ub.n; ++b) {
          double w = vb.w[a] * ub.w[b];
          out.prob(vb.idx[a], ub.idx[b]) += mass * w;
          accepted += mass * w;
        }
      }
    }
  }

  if (total <= 0.0 || accepted <= 0.0) {
    out.empty = true;
    out.aperture_transmission = 0.0;
    out.accepted_mass = 0.0;
    std::fill(out.prob.data().begin(), out.prob.data().end(), 0.0);
    return out;
  }
  out.aperture_transmission = accepted / total;
  out.accepted_mass = accepted;
  double inv = 1.0 / accepted;
  for (double& v : out.prob.data()) v *= inv;
  return out;
}

ForwardModel build_forward_model(const ComplexTarget& target, const BiphotonParams& params,
                                 const OpticalGeometry& geometry, EnvelopeMode mode,
                                 int bins_per_ff_pixel) {
  ForwardModel model;
  model.geometry = geometry;
  model.params = params;
  model.mode = mode;
  int npx = geometry.nf_pixels;
  model.conditionals.resize(static_cast<std::size_t>(npx) * npx);
  model.marginal = core::Grid2D<double>(npx, npx, 0.0);

  core::parallel_for(model.conditionals.size(), [&](std::size_t i) {
    int ix = static_cast<int>(i) % npx;
    int iy = static_cast<int>(i) / npx;
    model.conditionals[i] =
        conditional_ff_distribution(target, params, geometry, ix, iy, mode, bins_per_ff_pixel);
  });

  double sum = 0.0;
  for (int iy = 0; iy < npx; ++iy) {
    for (int ix = 0; ix < npx; ++ix) {
      std::complex<double> t = target.value_at(geometry.nf_x(ix), geometry.nf_y(iy));
      double w = std::norm(t) * model.conditionals[static_cast<std::size_t>(iy) * npx + ix].accepted_mass;
      model.marginal(iy, ix) = w;
      sum += w;
    }
  }
  if (sum <= 0.0) throw core::NumericError("nf_marginal: total transmitted weight is zero");
  for (double& v : model.marginal.data()) v /= sum;
  return model;
}

core::Grid2D<double> nf_marginal(const ComplexTarget& target, const BiphotonParams& params,
                                 const OpticalGeometry& geometry, EnvelopeMode mode,
                                 int bins_per_ff_pixel) {
  return build_forward_model(target, params, geometry, mode, bins_per_ff_pixel).marginal;
}

core::Vec2 distribution_centroid(const core::Grid2D<double>& prob,
                                 const OpticalGeometry& geometry) {
  double su = 0.0, sv = 0.0, sw = 0.0;
  for (int r = 0; r < prob.rows(); ++r) {
    for (int c = 0; c < prob.cols(); ++c) {
      double w = prob(r, c);
      su += w * geometry.ff_u(c);
      sv += w * geometry.ff_v(r);
      sw += w;
    }
  }
  if (sw <= 0.0) return {0.0, 0.0};
  return {su / sw, sv / sw};
}

}  // namespace qcpgm::optics
