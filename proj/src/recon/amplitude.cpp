#include "qcpgm/recon/amplitude.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qcpgm::recon {

core::Grid2D<double> pair_nf_counts(const std::vector<coincidence::CoincidencePair>& pairs,
                                    int nf_pixels) {
  core::Grid2D<double> counts(nf_pixels, nf_pixels, 0.0);
  for (const auto& p : pairs) {
    if (p.nf.x >= nf_pixels || p.nf.y >= nf_pixels) {
      throw std::invalid_argument("pair_nf_counts: pair indexes outside the nf grid");
    }
    counts(p.nf.y, p.nf.x) += 1.0;
  }
  return counts;
}

core::Grid2D<double> singles_nf_counts(const sim::EventStream& nf, int nf_pixels) {
  core::Grid2D<double> counts(nf_pixels, nf_pixels, 0.0);
  for (const auto& e : nf) {
    if (e.x >= nf_pixels || e.y >= nf_pixels) {
      throw std::invalid_argument("singles_nf_counts: event indexes outside the nf grid");
    }
    counts(e.y, e.x) += 1.0;
  }
  return counts;
}

AmplitudeImage amplitude_image(const core::Grid2D<double>& counts,
                               const core::Grid2D<double>& reference_counts, AmplitudeMode mode) {
  if (!counts.same_shape(reference_counts)) {
    throw std::invalid_argument("amplitude_image: count grids differ in shape");
  }
  double exponent = mode == AmplitudeMode::coincidence ? 0.25 : 0.5;
  AmplitudeImage out;
  out.amplitude = core::Grid2D<double>(counts.rows(), counts.cols(), 0.0);
  out.valid = core::Grid2D<std::uint8_t>(counts.rows(), counts.cols(), 0);
  for (int r = 0; r < counts.rows(); ++r) {
    for (int c = 0; c < counts.cols(); ++c) {
      double ref = reference_counts(r, c);
      if (ref <= 0.0) continue;
      double n = std::max(counts(r, c), 0.0);
      out.amplitude(r, c) = std::clamp(std::pow(n / ref, exponent), 0.0, 1.0);
      out.valid(r, c) = 1;
    }
  }
  return out;
}

}  // namespace qcpgm::recon
