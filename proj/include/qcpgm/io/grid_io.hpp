#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "qcpgm/core/grid.hpp"
#include "qcpgm/optics/target.hpp"

namespace qcpgm::io {

struct NamedGrid {
  core::Grid2D<double> values;
  double pitch = 0.0;  // m, 0 when the file carries no scale
  std::string name;
};

/// Comma-separated values preceded by `# rows/cols/pitch/name` comment lines.
/// Values are written with enough digits to round-trip doubles exactly.
void save_grid_csv(const std::filesystem::path& path, const core::Grid2D<double>& grid,
                   double pitch, std::string_view name);
NamedGrid load_grid_csv(const std::filesystem::path& path);

/// 16-bit big-endian binary PGM; the value range is kept in a `# range` comment
/// so the quantized image can be mapped back to physical units.
void save_grid_pgm16(const std::filesystem::path& path, const core::Grid2D<double>& grid);
core::Grid2D<double> load_grid_pgm16(const std::filesystem::path& path);

/// Complex transmission target as three stacked CSV sections
/// (amplitude, phase, labels) sharing one geometry header.
void save_target(const std::filesystem::path& path, const optics::ComplexTarget& target);
optics::ComplexTarget load_target(const std::filesystem::path& path);

}  // namespace qcpgm::io
