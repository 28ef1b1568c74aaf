#include "qcpgm/recon/centroids.hpp"

#include <stdexcept>

namespace qcpgm::recon {

namespace {

CentroidMap make_empty(const optics::OpticalGeometry& geometry) {
  CentroidMap m;
  m.sum_u = core::Grid2D<double>(geometry.nf_pixels, geometry.nf_pixels, 0.0);
  m.sum_v = core::Grid2D<double>(geometry.nf_pixels, geometry.nf_pixels, 0.0);
  m.count = core::Grid2D<std::int64_t>(geometry.nf_pixels, geometry.nf_pixels, 0);
  return m;
}

void accumulate(CentroidMap& m, const std::vector<coincidence::CoincidencePair>& pairs,
                const optics::OpticalGeometry& geometry) {
  for (const auto& p : pairs) {
    if (p.nf.x >= geometry.nf_pixels || p.nf.y >= geometry.nf_pixels ||
        p.ff.x >= geometry.ff_pixels || p.ff.y >= geometry.ff_pixels) {
      throw std::invalid_argument("centroid_map: pair indexes outside the pixel grids");
    }
    m.sum_u(p.nf.y, p.nf.x) += geometry.ff_u(p.ff.x);
    m.sum_v(p.nf.y, p.nf.x) += geometry.ff_v(p.ff.y);
    ++m.count(p.nf.y, p.nf.x);
  }
}

}  // namespace

CentroidMap centroid_map(const std::vector<coincidence::CoincidencePair>& pairs,
                         const optics::OpticalGeometry& geometry) {
  CentroidMap m = make_empty(geometry);
  accumulate(m, pairs, geometry);
  return m;
}

CentroidMap background_corrected_centroids(
    const std::vector<coincidence::CoincidencePair>& in_window,
    const std::vector<coincidence::CoincidencePair>& shifted_window,
    const optics::OpticalGeometry& geometry) {
  CentroidMap sig = centroid_map(in_window, geometry);
  CentroidMap bg = centroid_map(shifted_window, geometry);
  CentroidMap out = make_empty(geometry);
  for (int r = 0; r < out.count.rows(); ++r) {
    for (int c = 0; c < out.count.cols(); ++c) {
      std::int64_t n = sig.count(r, c) - bg.count(r, c);
      if (n <= 0) continue;  // background estimate swamps the pixel: invalid
      out.count(r, c) = n;
      out.sum_u(r, c) = sig.sum_u(r, c) - bg.sum_u(r, c);
      out.sum_v(r, c) = sig.sum_v(r, c) - bg.sum_v(r, c);
    }
  }
  return out;
}

}  // namespace qcpgm::recon
