#pragma once

namespace qcpgm::sim {

/// Detection chain model shared by both camera regions.
struct DetectorModel {
  double efficiency_nf = 1.0;     // detection probability per signal photon
  double efficiency_ff = 1.0;     // detection probability per idler photon
  double time_quantum_ns = 8.0;   // timestamp granularity; floor quantization
  double jitter_sigma_ns = 3.0;   // Gaussian timing jitter per detection
  double acquisition_time_s = 1.0;
  double rate_cap_hz = 1e7;       // soft per-region event rate limit
};

/// Throws std::invalid_argument when efficiencies leave [0, 1], the time
/// quantum or acquisition time is not positive, or the jitter is negative.
void validate_detector(const DetectorModel& d);

}  // namespace qcpgm::sim
