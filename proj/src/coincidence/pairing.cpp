#include "qcpgm/coincidence/pairing.hpp"

#include <cmath>
#include <stdexcept>

namespace qcpgm::coincidence {

namespace {

void require_sorted(const sim::EventStream& nf, const sim::EventStream& ff) {
  if (!sim::stream_is_sorted(nf) || !sim::stream_is_sorted(ff)) {
    throw std::invalid_argument("coincidence: input streams must be sorted by timestamp");
  }
}

// Shared sweep: for each nf event, visit the contiguous run of ff events with
// dt in [lo_off, hi_off). Both cursors only move forward.
template <typename Visit>
void sweep(const sim::EventStream& nf, const sim::EventStream& ff, double lo_off, double hi_off,
           Visit&& visit) {
  std::size_t lo = 0, hi = 0;
  for (const sim::PhotonEvent& a : nf) {
    double t = static_cast<double>(a.t_ns);
    while (lo < ff.size() && static_cast<double>(ff[lo].t_ns) < t + lo_off) ++lo;
    if (hi < lo) hi = lo;
    while (hi < ff.size() && static_cast<double>(ff[hi].t_ns) < t + hi_off) ++hi;
    for (std::size_t j = lo; j < hi; ++j) visit(a, ff[j]);
  }
}

}  // namespace

DtHistogram dt_histogram(const sim::EventStream& nf, const sim::EventStream& ff,
                         double bin_width_ns, double range_ns) {
  if (bin_width_ns <= 0.0 || range_ns <= 0.0) {
    throw std::invalid_argument("dt_histogram: bin width and range must be > 0");
  }
  double bins_exact = 2.0 * range_ns / bin_width_ns;
  auto n_bins = static_cast<std::size_t>(std::llround(bins_exact));
  if (n_bins == 0 || std::abs(bins_exact - static_cast<double>(n_bins)) > 1e-9) {
    throw std::invalid_argument("dt_histogram: bins must cover the range exactly");
  }
  require_sorted(nf, ff);

  DtHistogram h;
  h.bin_width_ns = bin_width_ns;
  h.range_ns = range_ns;
  h.counts.assign(n_bins, 0);
  sweep(nf, ff, -range_ns, range_ns, [&](const sim::PhotonEvent& a, const sim::PhotonEvent& b) {
    double dt = static_cast<double>(b.t_ns) - static_cast<double>(a.t_ns);
    auto bin = static_cast<std::size_t>(std::floor((dt + range_ns) / bin_width_ns));
    if (bin < n_bins) ++h.counts[bin];
  });
  return h;
}

std::vector<CoincidencePair> find_coincidences(const sim::EventStream& nf,
                                               const sim::EventStream& ff,
                                               const CoincidenceWindow& window) {
  if (window.width_ns <= 0.0) throw std::invalid_argument("find_coincidences: width must be > 0");
  require_sorted(nf, ff);

  std::vector<CoincidencePair> out;
  double lo_off = window.offset_ns - 0.5 * window.width_ns;
  double hi_off = window.offset_ns + 0.5 * window.width_ns;
  sweep(nf, ff, lo_off, hi_off, [&](const sim::PhotonEvent& a, const sim::PhotonEvent& b) {
    CoincidencePair p;
    p.nf = a;
    p.ff = b;
    p.dt_ns = static_cast<std::int64_t>(b.t_ns) - static_cast<std::int64_t>(a.t_ns);
    out.push_back(p);
  });
  return out;
}

AccidentalSample accidental_coincidences(const sim::EventStream& nf, const sim::EventStream& ff,
                                         const CoincidenceWindow& window, double shift_ns,
                                         double peak_width_ns) {
  AccidentalSample sample;
  sample.shift_warning = std::abs(shift_ns) < 3.0 * peak_width_ns;
  CoincidenceWindow shifted = window;
  shifted.offset_ns += shift_ns;
  sample.pairs = find_coincidences(nf, ff, shifted);
  for (CoincidencePair& p : sample.pairs) p.background = true;
  return sample;
}

}  // namespace qcpgm::coincidence
