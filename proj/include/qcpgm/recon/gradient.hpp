#pragma once

#include <cstdint>

#include "qcpgm/core/grid.hpp"
#include "qcpgm/recon/centroids.hpp"

namespace qcpgm::recon {

/// Sampled phase gradient (p, q) = (dphi/dx, dphi/dy) in rad/m on the nf
/// pixel grid.
struct GradientField {
  core::Grid2D<double> p;
  core::Grid2D<double> q;
  core::Grid2D<std::uint8_t> valid;
  double pitch = 0.0;  // m between nf samples
};

/// Phase gradient from centroid shifts: p = U - U0, q = V - V0 against the
/// reference (no-target) centroids. Pixels invalid in either map stay
/// invalid. Throws std::invalid_argument on shape mismatch or pitch <= 0.
GradientField gradient_from_centroids(const CentroidMap& measured, const CentroidMap& reference,
                                      double pitch);

/// Replaces invalid samples by the value of the nearest valid sample
/// (multi-source BFS, 4-neighborhood; ties resolved toward smaller index).
/// Throws std::invalid_argument if no sample is valid.
GradientField fill_invalid_nearest(const GradientField& field);

}  // namespace qcpgm::recon
