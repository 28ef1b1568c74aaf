#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace qcpgm::sim {

enum class Region : std::uint8_t { nf = 0, ff = 1 };

/// One time-tagged detection. x, y are pixel indices within the event's
/// camera region; t_ns is nanoseconds from acquisition start.
struct PhotonEvent {
  std::uint64_t t_ns = 0;
  std::uint16_t x = 0;
  std::uint16_t y = 0;
  Region region = Region::nf;

  friend bool operator==(const PhotonEvent&, const PhotonEvent&) = default;
};

/// Events ordered by nondecreasing timestamp.
using EventStream = std::vector<PhotonEvent>;

bool stream_is_sorted(const EventStream& s);

/// k-way merge of sorted streams into one sorted stream. Events with equal
/// timestamps keep the order of their source streams. Throws
/// std::invalid_argument if any input is unsorted.
EventStream merge_streams(std::span<const EventStream> streams);

}  // namespace qcpgm::sim
