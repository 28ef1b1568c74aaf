#include "qcpgm/io/event_io.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "qcpgm/core/errors.hpp"

namespace qcpgm::io {

namespace {

constexpr char kMagic[4] = {'Q', 'C', 'P', 'G'};
constexpr std::uint16_t kFormatVersion = 1;
constexpr std::size_t kHeaderBytes = 16;
constexpr std::size_t kRecordBytes = 13;

void store_u16(char* dst, std::uint16_t v) {
  dst[0] = static_cast<char>(v & 0xff);
  dst[1] = static_cast<char>((v >> 8) & 0xff);
}

void store_u64(char* dst, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) dst[i] = static_cast<char>((v >> (8 * i)) & 0xff);
}

std::uint16_t load_u16(const char* src) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(src[0]) |
                                    (static_cast<unsigned char>(src[1]) << 8));
}

std::uint64_t load_u64(const char* src) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(src[i]);
  return v;
}

void ensure_parent(const std::filesystem::path& path) {
  const auto parent = path.parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

}  // namespace

void save_events_binary(const std::filesystem::path& path, const sim::EventStream& events) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::out | std::ios::binary);
  if (!out) throw core::IoError("cannot open for writing: " + path.string());
  std::array<char, kHeaderBytes> header{};
  std::memcpy(header.data(), kMagic, 4);
  store_u16(header.data() + 4, kFormatVersion);
  store_u64(header.data() + 6, events.size());
  store_u16(header.data() + 14, 0);
  out.write(header.data(), header.size());
  std::array<char, kRecordBytes> rec{};
  for (const auto& e : events) {
    rec[0] = static_cast<char>(e.region);
    store_u16(rec.data() + 1, e.x);
    store_u16(rec.data() + 3, e.y);
    store_u64(rec.data() + 5, e.t_ns);
    out.write(rec.data(), rec.size());
  }
  if (!out) throw core::IoError("write failed: " + path.string());
}

sim::EventStream load_events_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::in | std::ios::binary);
  if (!in) throw core::IoError("cannot open for reading: " + path.string());
  std::array<char, kHeaderBytes> header{};
  if (!in.read(header.data(), header.size())) {
    throw core::IoError("truncated event header in " + path.string());
  }
  if (std::memcmp(header.data(), kMagic, 4) != 0) {
    throw core::IoError("bad event-file magic in " + path.string());
  }
  const std::uint16_t version = load_u16(header.data() + 4);
  if (version == 0 || version > kFormatVersion) {
    throw core::IoError("unsupported event-file version in " + path.string());
  }
  const std::uint64_t count = load_u64(header.data() + 6);
  sim::EventStream events;
  events.reserve(count);
  std::array<char, kRecordBytes> rec{};
  for (std::uint64_t i = 0; i < count; ++i) {
    if (!in.read(rec.data(), rec.size())) {
      throw core::IoError("truncated event record in " + path.string());
    }
    const auto region = static_cast<unsigned char>(rec[0]);
    if (region > 1) throw core::IoError("bad region byte in " + path.string());
    sim::PhotonEvent e;
    e.region = static_cast<sim::Region>(region);
    e.x = load_u16(rec.data() + 1);
    e.y = load_u16(rec.data() + 3);
    e.t_ns = load_u64(rec.data() + 5);
    events.push_back(e);
  }
  char extra = 0;
  if (in.read(&extra, 1)) throw core::IoError("trailing bytes in " + path.string());
  return events;
}

void save_events_csv(const std::filesystem::path& path, const sim::EventStream& events) {
  ensure_parent(path);
  std::ofstream out(path);
  if (!out) throw core::IoError("cannot open for writing: " + path.string());
  out << "region,x,y,t_ns\n";
  for (const auto& e : events) {
    out << static_cast<int>(e.region) << ',' << e.x << ',' << e.y << ',' << e.t_ns << '\n';
  }
  if (!out) throw core::IoError("write failed: " + path.string());
}

sim::EventStream load_events_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw core::IoError("cannot open for reading: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "region,x,y,t_ns") {
    throw core::IoError("bad event CSV header in " + path.string());
  }
  sim::EventStream events;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string token;
    unsigned long long fields[4] = {0, 0, 0, 0};
    int i = 0;
    try {
      while (std::getline(ss, token, ',')) {
        if (i >= 4) throw core::IoError("row too long");
        fields[i++] = std::stoull(token);
      }
    } catch (const core::IoError&) {
      throw core::IoError("bad event row in " + path.string());
    } catch (const std::exception&) {
      throw core::IoError("bad event row in " + path.string());
    }
    if (i != 4 || fields[0] > 1 || fields[1] > 0xffff || fields[2] > 0xffff) {
      throw core::IoError("bad event row in " + path.string());
    }
    sim::PhotonEvent e;
    e.region = static_cast<sim::Region>(fields[0]);
    e.x = static_cast<std::uint16_t>(fields[1]);
    e.y = static_cast<std::uint16_t>(fields[2]);
    e.t_ns = fields[3];
    events.push_back(e);
  }
  return events;
}

}  // namespace qcpgm::io
