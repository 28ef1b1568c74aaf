#pragma once

#include <filesystem>
#include <vector>

#include "qcpgm/coincidence/pairing.hpp"

namespace qcpgm::io {

/// Coincidence pair table: `nf_x,nf_y,nf_t_ns,ff_x,ff_y,ff_t_ns,dt_ns,tag`
/// with tag `true` for signal-window pairs and `background` for
/// shifted-window accidentals.
void save_pairs_csv(const std::filesystem::path& path,
                    const std::vector<coincidence::CoincidencePair>& pairs);
std::vector<coincidence::CoincidencePair> load_pairs_csv(const std::filesystem::path& path);

}  // namespace qcpgm::io
