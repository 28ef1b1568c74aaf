#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace qcpgm::io {

/// FNV-1a over the raw file bytes; used to fingerprint run outputs.
std::uint64_t file_checksum(const std::filesystem::path& path);

/// 16 lowercase hex digits.
std::string checksum_hex(std::uint64_t checksum);

}  // namespace qcpgm::io
