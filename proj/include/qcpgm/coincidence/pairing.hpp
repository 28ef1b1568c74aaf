#pragma once

#include <cstdint>
#include <vector>

#include "qcpgm/sim/events.hpp"

namespace qcpgm::coincidence {

/// Acceptance window on dt = t_ff - t_nf. A pair is accepted when
/// offset - width/2 <= dt < offset + width/2 (half-open, so the window
/// measure is exactly `width` for quantized timestamps aligned with it).
struct CoincidenceWindow {
  double offset_ns = 0.0;
  double width_ns = 20.0;
};

struct CoincidencePair {
  sim::PhotonEvent nf;
  sim::PhotonEvent ff;
  std::int64_t dt_ns = 0;  // t_ff - t_nf
  bool background = false; // true when harvested from a shifted window
};

struct DtHistogram {
  double bin_width_ns = 0.0;
  double range_ns = 0.0;  // bins cover [-range, +range)
  std::vector<std::uint64_t> counts;

  double bin_center(std::size_t i) const { return -range_ns + (i + 0.5) * bin_width_ns; }
};

/// Histogram of all nf/ff time differences with |dt| within range, built with
/// one sorted two-pointer sweep (never an all-pairs scan). 2*range must be an
/// integer multiple of the bin width. Inputs must be sorted.
DtHistogram dt_histogram(const sim::EventStream& nf, const sim::EventStream& ff,
                         double bin_width_ns, double range_ns);

/// All nf/ff pairs whose dt falls in the window, ordered by nf event (ties by
/// ff order). Every qualifying combination is produced, so one event may
/// appear in several pairs. Inputs must be sorted by timestamp.
std::vector<CoincidencePair> find_coincidences(const sim::EventStream& nf,
                                               const sim::EventStream& ff,
                                               const CoincidenceWindow& window);

struct AccidentalSample {
  std::vector<CoincidencePair> pairs;  // tagged background = true
  bool shift_warning = false;          // |shift| < 3x the coincidence peak width
};

/// Samples accidental coincidences in a window displaced by shift_ns.
/// peak_width_ns is the expected true-coincidence peak sigma; shifts smaller
/// than three times it contaminate the estimate and only raise the warning.
AccidentalSample accidental_coincidences(const sim::EventStream& nf, const sim::EventStream& ff,
                                         const CoincidenceWindow& window, double shift_ns,
                                         double peak_width_ns = 8.0);

}  // namespace qcpgm::coincidence
