#include "qcpgm/io/pair_io.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include "qcpgm/core/errors.hpp"

namespace qcpgm::io {

void save_pairs_csv(const std::filesystem::path& path,
                    const std::vector<coincidence::CoincidencePair>& pairs) {
  const auto parent = path.parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path);
  if (!out) throw core::IoError("cannot open for writing: " + path.string());
  out << "nf_x,nf_y,nf_t_ns,ff_x,ff_y,ff_t_ns,dt_ns,tag\n";
  for (const auto& p : pairs) {
    out << p.nf.x << ',' << p.nf.y << ',' << p.nf.t_ns << ',' << p.ff.x << ',' << p.ff.y << ','
        << p.ff.t_ns << ',' << p.dt_ns << ',' << (p.background ? "background" : "true") << '\n';
  }
  if (!out) throw core::IoError("write failed: " + path.string());
}

std::vector<coincidence::CoincidencePair> load_pairs_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw core::IoError("cannot open for reading: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "nf_x,nf_y,nf_t_ns,ff_x,ff_y,ff_t_ns,dt_ns,tag") {
    throw core::IoError("bad pair CSV header in " + path.string());
  }
  std::vector<coincidence::CoincidencePair> pairs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string token[8];
    int i = 0;
    while (i < 8 && std::getline(ss, token[i], ',')) ++i;
    std::string extra;
    if (i != 8 || std::getline(ss, extra, ',')) {
      throw core::IoError("bad pair row in " + path.string());
    }
    coincidence::CoincidencePair p;
    try {
      p.nf.region = sim::Region::nf;
      p.nf.x = static_cast<std::uint16_t>(std::stoul(token[0]));
      p.nf.y = static_cast<std::uint16_t>(std::stoul(token[1]));
      p.nf.t_ns = std::stoull(token[2]);
      p.ff.region = sim::Region::ff;
      p.ff.x = static_cast<std::uint16_t>(std::stoul(token[3]));
      p.ff.y = static_cast<std::uint16_t>(std::stoul(token[4]));
      p.ff.t_ns = std::stoull(token[5]);
      p.dt_ns = std::stoll(token[6]);
    } catch (const std::exception&) {
      throw core::IoError("bad pair row in " + path.string());
    }
    if (token[7] == "true") p.background = false;
    else if (token[7] == "background") p.background = true;
    else throw core::IoError("bad pair tag in " + path.string());
    pairs.push_back(p);
  }
  return pairs;
}

}  // namespace qcpgm::io
