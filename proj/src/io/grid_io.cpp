#include "qcpgm/io/grid_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qcpgm/core/errors.hpp"

namespace qcpgm::io {

namespace {

void ensure_parent(const std::filesystem::path& path) {
  const auto parent = path.parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
  ensure_parent(path);
  std::ofstream out(path, mode);
  if (!out) throw core::IoError("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ifstream in(path, mode);
  if (!in) throw core::IoError("cannot open for reading: " + path.string());
  return in;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& token, const std::filesystem::path& path) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(token, &pos);
    while (pos < token.size() && std::isspace(static_cast<unsigned char>(token[pos]))) ++pos;
    if (pos != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw core::IoError("bad numeric field '" + token + "' in " + path.string());
  }
}

void write_rows(std::ofstream& out, const core::Grid2D<double>& grid) {
  for (int r = 0; r < grid.rows(); ++r) {
    for (int c = 0; c < grid.cols(); ++c) {
      if (c) out << ',';
      out << format_double(grid(r, c));
    }
    out << '\n';
  }
}

core::Grid2D<double> read_rows(std::ifstream& in, int rows, int cols,
                               const std::filesystem::path& path) {
  core::Grid2D<double> grid(rows, cols);
  std::string line;
  int r = 0;
  while (r < rows && std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string token;
    int c = 0;
    while (std::getline(ss, token, ',')) {
      if (c >= cols) throw core::IoError("row too long in " + path.string());
      grid(r, c) = parse_double(token, path);
      ++c;
    }
    if (c != cols) throw core::IoError("row too short in " + path.string());
    ++r;
  }
  if (r != rows) throw core::IoError("missing rows in " + path.string());
  return grid;
}

struct Header {
  int rows = 0;
  int cols = 0;
  double pitch = 0.0;
  std::string name;
};

Header read_header(std::ifstream& in, const std::filesystem::path& path) {
  Header h;
  while (in.peek() == '#') {
    std::string line;
    std::getline(in, line);
    std::stringstream ss(line);
    std::string hash, key;
    ss >> hash >> key;
    if (key == "rows") ss >> h.rows;
    else if (key == "cols") ss >> h.cols;
    else if (key == "pitch") {
      std::string v;
      ss >> v;
      h.pitch = parse_double(v, path);
    } else if (key == "name") {
      std::getline(ss, h.name);
      const auto first = h.name.find_first_not_of(' ');
      h.name = first == std::string::npos ? "" : h.name.substr(first);
    }
  }
  if (h.rows <= 0 || h.cols <= 0) throw core::IoError("bad grid header in " + path.string());
  return h;
}

}  // namespace

void save_grid_csv(const std::filesystem::path& path, const core::Grid2D<double>& grid,
                   double pitch, std::string_view name) {
  auto out = open_out(path, std::ios::out);
  out << "# rows " << grid.rows() << '\n';
  out << "# cols " << grid.cols() << '\n';
  out << "# pitch " << format_double(pitch) << '\n';
  out << "# name " << name << '\n';
  write_rows(out, grid);
  if (!out) throw core::IoError("write failed: " + path.string());
}

NamedGrid load_grid_csv(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::in);
  const Header h = read_header(in, path);
  NamedGrid g;
  g.pitch = h.pitch;
  g.name = h.name;
  g.values = read_rows(in, h.rows, h.cols, path);
  return g;
}

void save_grid_pgm16(const std::filesystem::path& path, const core::Grid2D<double>& grid) {
  double lo = grid[0], hi = grid[0];
  for (const double v : grid.data()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double scale = hi > lo ? 65535.0 / (hi - lo) : 0.0;
  auto out = open_out(path, std::ios::out | std::ios::binary);
  out << "P5\n";
  out << "# range " << format_double(lo) << ' ' << format_double(hi) << '\n';
  out << grid.cols() << ' ' << grid.rows() << "\n65535\n";
  for (const double v : grid.data()) {
    const auto q = static_cast<unsigned>(std::lround((v - lo) * scale));
    const char bytes[2] = {static_cast<char>((q >> 8) & 0xff), static_cast<char>(q & 0xff)};
    out.write(bytes, 2);
  }
  if (!out) throw core::IoError("write failed: " + path.string());
}

core::Grid2D<double> load_grid_pgm16(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::in | std::ios::binary);
  std::string magic;
  in >> magic;
  if (magic != "P5") throw core::IoError("not a binary PGM: " + path.string());
  double lo = 0.0, hi = 0.0;
  bool have_range = false;
  in >> std::ws;
  while (in.peek() == '#') {
    std::string line;
    std::getline(in, line);
    std::stringstream ss(line);
    std::string hash, key, a, b;
    ss >> hash >> key >> a >> b;
    if (key == "range") {
      lo = parse_double(a, path);
      hi = parse_double(b, path);
      have_range = true;
    }
    in >> std::ws;
  }
  int cols = 0, rows = 0, maxval = 0;
  in >> cols >> rows >> maxval;
  if (!in || cols <= 0 || rows <= 0 || maxval != 65535) {
    throw core::IoError("bad PGM header in " + path.string());
  }
  in.get();  // single whitespace before raster
  if (!have_range) {
    lo = 0.0;
    hi = 65535.0;
  }
  const double scale = (hi - lo) / 65535.0;
  core::Grid2D<double> grid(rows, cols);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    char bytes[2];
    if (!in.read(bytes, 2)) throw core::IoError("truncated PGM raster in " + path.string());
    const unsigned q = (static_cast<unsigned char>(bytes[0]) << 8) |
                       static_cast<unsigned char>(bytes[1]);
    grid[i] = lo + q * scale;
  }
  return grid;
}

void save_target(const std::filesystem::path& path, const optics::ComplexTarget& target) {
  auto out = open_out(path, std::ios::out);
  out << "# rows " << target.amplitude.rows() << '\n';
  out << "# cols " << target.amplitude.cols() << '\n';
  out << "# pitch " << format_double(target.pitch) << '\n';
  out << "# section amplitude\n";
  write_rows(out, target.amplitude);
  out << "# section phase\n";
  write_rows(out, target.phase);
  out << "# section labels\n";
  for (int r = 0; r < target.labels.rows(); ++r) {
    for (int c = 0; c < target.labels.cols(); ++c) {
      if (c) out << ',';
      out << static_cast<int>(target.labels(r, c));
    }
    out << '\n';
  }
  if (!out) throw core::IoError("write failed: " + path.string());
}

optics::ComplexTarget load_target(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::in);
  int rows = 0, cols = 0;
  double pitch = 0.0;
  std::string line;
  while (in.peek() == '#') {
    std::getline(in, line);
    std::stringstream ss(line);
    std::string hash, key, value;
    ss >> hash >> key >> value;
    if (key == "rows") rows = std::stoi(value);
    else if (key == "cols") cols = std::stoi(value);
    else if (key == "pitch") pitch = parse_double(value, path);
    else if (key == "section") break;
  }
  if (rows <= 0 || cols <= 0 || pitch <= 0.0) {
    throw core::IoError("bad target header in " + path.string());
  }
  optics::ComplexTarget target;
  target.pitch = pitch;
  target.width = cols * pitch;
  target.height = rows * pitch;
  target.amplitude = read_rows(in, rows, cols, path);
  std::getline(in, line);  // section marker
  target.phase = read_rows(in, rows, cols, path);
  std::getline(in, line);
  const auto labels = read_rows(in, rows, cols, path);
  target.labels = core::Grid2D<std::uint8_t>(rows, cols);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    target.labels[i] = static_cast<std::uint8_t>(std::lround(labels[i]));
  }
  return target;
}

}  // namespace qcpgm::io
