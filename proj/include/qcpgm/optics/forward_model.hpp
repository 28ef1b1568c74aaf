#pragma once

#include <vector>

#include "qcpgm/core/grid.hpp"
#include "qcpgm/core/vec.hpp"
#include "qcpgm/optics/biphoton.hpp"
#include "qcpgm/optics/geometry.hpp"
#include "qcpgm/optics/target.hpp"

namespace qcpgm::optics {

/// The pump envelope factor of the pair amplitude. `constant` replaces the
/// exp(-2 delta_k^2 |r_s + r_i|^2) factor by 1, valid when the field of view
/// is small against the pump width; `full` keeps it.
enum class EnvelopeMode { constant, full };

/// Far-field detection probabilities conditioned on the signal photon
/// arriving at one near-field pixel: the binned |FT of T(r_i) psi(r_s, r_i)|^2
/// over the ff wavenumber grid.
struct ConditionalDistribution {
  core::Grid2D<double> prob;          // ff_pixels x ff_pixels, sums to 1 unless empty
  double aperture_transmission = 0.0; // spectral mass inside the aperture / total
  double accepted_mass = 0.0;         // unnormalized in-aperture mass, comparable across pixels
  bool empty = false;                 // nothing transmitted near this pixel
};

/// Computes the conditional ff distribution for the nf pixel (nf_ix, nf_iy).
///
/// The transform over r_i runs on a window of half-width 4 delta_r centered
/// on the pixel, sampled at the target pitch and zero-padded until the FFT
/// bin spacing is at least bins_per_ff_pixel bins per ff pixel; FFT bins are
/// then accumulated into ff pixel cells (bins exactly on a cell boundary
/// split evenly, so symmetric inputs give symmetric output). Spectral mass
/// outside the aperture square is dropped and reported via
/// aperture_transmission.
///
/// Preconditions (std::invalid_argument): pixel indices in range, target
/// pitch <= delta_r / 2, aperture within the target grid's Nyquist range,
/// bins_per_ff_pixel >= 1.
ConditionalDistribution conditional_ff_distribution(const ComplexTarget& target,
                                                    const BiphotonParams& params,
                                                    const OpticalGeometry& geometry, int nf_ix,
                                                    int nf_iy,
                                                    EnvelopeMode mode = EnvelopeMode::constant,
                                                    int bins_per_ff_pixel = 4);

/// Probability that a detected pair has its signal photon at each nf pixel:
/// |T(r_s)|^2 times the pixel's in-aperture spectral mass, normalized to
/// sum 1. Throws NumericError if the total weight is zero.
core::Grid2D<double> nf_marginal(const ComplexTarget& target, const BiphotonParams& params,
                                 const OpticalGeometry& geometry,
                                 EnvelopeMode mode = EnvelopeMode::constant,
                                 int bins_per_ff_pixel = 4);

/// Cached sampling model: the nf marginal plus every pixel's conditional
/// distribution. Conditionals are independent and built in parallel.
struct ForwardModel {
  OpticalGeometry geometry;
  BiphotonParams params;
  EnvelopeMode mode = EnvelopeMode::constant;
  core::Grid2D<double> marginal;
  std::vector<ConditionalDistribution> conditionals;  // nf row-major (iy * nf_pixels + ix)

  const ConditionalDistribution& conditional(int ix, int iy) const {
    return conditionals[static_cast<std::size_t>(iy) * geometry.nf_pixels + ix];
  }
};

ForwardModel build_forward_model(const ComplexTarget& target, const BiphotonParams& params,
                                 const OpticalGeometry& geometry,
                                 EnvelopeMode mode = EnvelopeMode::constant,
                                 int bins_per_ff_pixel = 4);

/// Mean wavenumber of a distribution over the ff grid.
core::Vec2 distribution_centroid(const core::Grid2D<double>& prob,
                                 const OpticalGeometry& geometry);

}  // namespace qcpgm::optics
