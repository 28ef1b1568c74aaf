#pragma once

#include <filesystem>

#include "qcpgm/sim/events.hpp"

namespace qcpgm::io {

/// Binary event stream: 16-byte header (magic "QCPG", u16 format version,
/// u64 record count, u16 reserved) followed by 13-byte little-endian records
/// (u8 region, u16 x, u16 y, u64 timestamp in ns).
void save_events_binary(const std::filesystem::path& path, const sim::EventStream& events);
sim::EventStream load_events_binary(const std::filesystem::path& path);

/// Plain-text mirror of the binary format: `region,x,y,t_ns` per line.
void save_events_csv(const std::filesystem::path& path, const sim::EventStream& events);
sim::EventStream load_events_csv(const std::filesystem::path& path);

}  // namespace qcpgm::io
