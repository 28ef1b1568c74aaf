#pragma once

namespace qcpgm::core {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace qcpgm::core
