#include "qcpgm/recon/gradient.hpp"

#include <queue>
#include <stdexcept>

namespace qcpgm::recon {

GradientField gradient_from_centroids(const CentroidMap& measured, const CentroidMap& reference,
                                      double pitch) {
  if (!measured.count.same_shape(reference.count)) {
    throw std::invalid_argument("gradient_from_centroids: centroid maps differ in shape");
  }
  if (pitch <= 0.0) throw std::invalid_argument("gradient_from_centroids: pitch must be > 0");

  int rows = measured.count.rows(), cols = measured.count.cols();
  GradientField g;
  g.p = core::Grid2D<double>(rows, cols, 0.0);
  g.q = core::Grid2D<double>(rows, cols, 0.0);
  g.valid = core::Grid2D<std::uint8_t>(rows, cols, 0);
  g.pitch = pitch;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (!measured.valid(r, c) || !reference.valid(r, c)) continue;
      g.p(r, c) = measured.u(r, c) - reference.u(r, c);
      g.q(r, c) = measured.v(r, c) - reference.v(r, c);
      g.valid(r, c) = 1;
    }
  }
  return g;
}

GradientField fill_invalid_nearest(const GradientField& field) {
  int rows = field.p.rows(), cols = field.p.cols();
  GradientField out = field;

  std::queue<std::pair<int, int>> frontier;
  core::Grid2D<std::uint8_t> seen(rows, cols, 0);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (field.valid(r, c)) {
        frontier.emplace(r, c);
        seen(r, c) = 1;
      }
    }
  }
  if (frontier.empty()) {
    throw std::invalid_argument("fill_invalid_nearest: no valid samples to propagate");
  }

  constexpr int dr[4] = {-1, 0, 0, 1};
  constexpr int dc[4] = {0, -1, 1, 0};
  while (!frontier.empty()) {
    auto [r, c] = frontier.front();
    frontier.pop();
    for (int k = 0; k < 4; ++k) {
      int nr = r + dr[k], nc = c + dc[k];
      if (nr < 0 || nr >= rows || nc < 0 || nc >= cols || seen(nr, nc)) continue;
      seen(nr, nc) = 1;
      out.p(nr, nc) = out.p(r, c);
      out.q(nr, nc) = out.q(r, c);
      frontier.emplace(nr, nc);
    }
  }
  return out;
}

}  // namespace qcpgm::recon
