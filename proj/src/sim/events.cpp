#include "qcpgm/sim/events.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

namespace qcpgm::sim {

bool stream_is_sorted(const EventStream& s) {
  return std::is_sorted(s.begin(), s.end(),
                        [](const PhotonEvent& a, const PhotonEvent& b) { return a.t_ns < b.t_ns; });
}

EventStream merge_streams(std::span<const EventStream> streams) {
  for (const EventStream& s : streams) {
    if (!stream_is_sorted(s)) throw std::invalid_argument("merge_streams: input stream not sorted");
  }

  struct Head {
    std::uint64_t t;
    std::size_t stream;
    std::size_t pos;
  };
  auto later = [](const Head& a, const Head& b) {
    return a.t > b.t || (a.t == b.t && a.stream > b.stream);
  };
  std::priority_queue<Head, std::vector<Head>, decltype(later)> heads(later);

  std::size_t total = 0;
  for (std::size_t i = 0; i < streams.size(); ++i) {
    total += streams[i].size();
    if (!streams[i].empty()) heads.push({streams[i][0].t_ns, i, 0});
  }

  EventStream out;
  out.reserve(total);
  while (!heads.empty()) {
    Head h = heads.top();
    heads.pop();
    out.push_back(streams[h.stream][h.pos]);
    if (h.pos + 1 < streams[h.stream].size()) {
      heads.push({streams[h.stream][h.pos + 1].t_ns, h.stream, h.pos + 1});
    }
  }
  return out;
}

}  // namespace qcpgm::sim
