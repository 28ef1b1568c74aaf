#pragma once

#include <cstdint>

#include "qcpgm/core/grid.hpp"
#include "qcpgm/recon/gradient.hpp"

namespace qcpgm::recon {

/// Integrated phase on the nf grid, mean-zero over the valid region.
struct PhaseMap {
  core::Grid2D<double> phase;  // rad
  core::Grid2D<std::uint8_t> valid;
  double pitch = 0.0;
};

/// Least-squares integration of a gradient field in the Fourier domain:
///   phi_hat(u, v) = (u p_hat + v q_hat) / (i (u^2 + v^2)),
/// with the zero-frequency component set to 0. Among all Fourier-representable
/// fields the result minimizes the summed squared deviation of its spectral
/// gradient from (p, q).
///
/// Invalid samples are pre-filled from their nearest valid neighbor and the
/// validity mask is reapplied afterwards. With mirror_pad (default) the field
/// is reflected to twice its size before the transform, which suppresses
/// periodic wrap-around; disable it to integrate exact grid-periodic modes.
///
/// Throws std::invalid_argument for grids smaller than 2x2.
PhaseMap frankot_chellappa(const GradientField& gradient, bool mirror_pad = true);

}  // namespace qcpgm::recon
