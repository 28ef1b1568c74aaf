#pragma once

#include <cstdint>
#include <vector>

#include "qcpgm/coincidence/pairing.hpp"
#include "qcpgm/core/grid.hpp"
#include "qcpgm/sim/events.hpp"

namespace qcpgm::recon {

/// Count scaling of the amplitude estimate. Coincidence counts scale as
/// |T|^4 (the target acts on both the detected pixel and the transform),
/// singles counts as |T|^2.
enum class AmplitudeMode { coincidence, singles };

struct AmplitudeImage {
  core::Grid2D<double> amplitude;  // clipped to [0, 1]
  core::Grid2D<std::uint8_t> valid;
};

/// Per-nf-pixel pair counts.
core::Grid2D<double> pair_nf_counts(const std::vector<coincidence::CoincidencePair>& pairs,
                                    int nf_pixels);

/// Per-pixel counts of nf singles.
core::Grid2D<double> singles_nf_counts(const sim::EventStream& nf, int nf_pixels);

/// Amplitude from the count ratio against a clear-aperture reference run:
/// (counts/ref)^(1/4) in coincidence mode, ^(1/2) in singles mode, clipped to
/// [0, 1]. Pixels with zero or negative reference counts are invalid.
AmplitudeImage amplitude_image(const core::Grid2D<double>& counts,
                               const core::Grid2D<double>& reference_counts, AmplitudeMode mode);

}  // namespace qcpgm::recon
