#pragma once

#include <cstdint>
#include <vector>

#include "qcpgm/coincidence/pairing.hpp"
#include "qcpgm/core/grid.hpp"
#include "qcpgm/optics/geometry.hpp"

namespace qcpgm::recon {

/// Per-nf-pixel far-field centroid accumulator in wavenumber units.
/// A pixel is valid when its (possibly background-corrected) count is > 0.
struct CentroidMap {
  core::Grid2D<double> sum_u;          // rad/m, summed over pairs
  core::Grid2D<double> sum_v;
  core::Grid2D<std::int64_t> count;

  bool valid(int r, int c) const { return count(r, c) > 0; }
  double u(int r, int c) const { return sum_u(r, c) / static_cast<double>(count(r, c)); }
  double v(int r, int c) const { return sum_v(r, c) / static_cast<double>(count(r, c)); }
};

/// Accumulates pairs into per-nf-pixel centroid sums; the ff pixel of each
/// pair contributes its center wavenumber. Throws std::invalid_argument when
/// a pair indexes outside either grid.
CentroidMap centroid_map(const std::vector<coincidence::CoincidencePair>& pairs,
                         const optics::OpticalGeometry& geometry);

/// Background-corrected centroid statistics: per pixel, sums and counts of
/// the shifted-window sample are subtracted from the in-window sample.
/// Pixels where the corrected count would be <= 0 are marked invalid.
CentroidMap background_corrected_centroids(
    const std::vector<coincidence::CoincidencePair>& in_window,
    const std::vector<coincidence::CoincidencePair>& shifted_window,
    const optics::OpticalGeometry& geometry);

}  // namespace qcpgm::recon
