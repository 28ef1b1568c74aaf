#pragma once

#include <cstdint>

#include "qcpgm/optics/forward_model.hpp"
#include "qcpgm/sim/detector.hpp"
#include "qcpgm/sim/events.hpp"

namespace qcpgm::sim {

/// Uncorrelated stray-light model. Each arm receives an independent Poisson
/// stream at rate_fraction x pair_rate x arm efficiency. Photons land in a
/// Gaussian spot whose center is redrawn once per reposition period from the
/// central box of the pixel grid.
struct BackgroundModel {
  double rate_fraction = 0.0;
  double reposition_period_s = 100.0;
  double nf_sigma_px = 5.0;
  double ff_sigma_px = 5.0;
  double center_margin = 0.25;  // fraction of each grid edge excluded for centers
};

struct SimMetadata {
  std::uint64_t generated_pairs = 0;
  std::uint64_t detected_pairs = 0;  // both photons survived thinning
  std::uint64_t nf_events = 0;
  std::uint64_t ff_events = 0;
  bool rate_cap_exceeded = false;
};

struct SimResult {
  EventStream nf;
  EventStream ff;
  SimMetadata meta;
};

/// Samples photon-pair detections from the forward model.
///
/// Pair birth times form a Poisson process of the given rate over the
/// acquisition window. Each pair draws its nf pixel from the marginal and
/// its ff pixel from that pixel's conditional distribution, then each photon
/// independently survives with its arm efficiency and receives Gaussian
/// jitter followed by floor quantization.
///
/// Identical (model, detector, pair_rate, seed) give byte-identical streams;
/// per-pixel RNG substreams make the result independent of thread count.
SimResult simulate_pairs(const optics::ForwardModel& model, const DetectorModel& detector,
                         double pair_rate_hz, std::uint64_t seed);

/// Samples the uncorrelated background streams for both arms.
SimResult simulate_background(const BackgroundModel& background, const DetectorModel& detector,
                              double pair_rate_hz, const optics::OpticalGeometry& geometry,
                              std::uint64_t seed);

}  // namespace qcpgm::sim
