#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "qcpgm/core/errors.hpp"
#include "qcpgm/core/rng.hpp"
#include "qcpgm/io/checksum.hpp"
#include "qcpgm/io/event_io.hpp"
#include "qcpgm/io/grid_io.hpp"
#include "qcpgm/io/pair_io.hpp"

using namespace qcpgm;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("qcpgm_io_test_" + std::to_string(static_cast<unsigned>(::getpid())));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

}  // namespace

TEST_CASE("grid csv round-trips values, pitch, and name exactly") {
  TempDir tmp;
  core::Grid2D<double> g(3, 4, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = 0.1 * static_cast<double>(i) - 0.7;
  g(0, 0) = 1.0 / 3.0;
  g(2, 3) = -2.5e-17;
  const auto p = tmp.path / "grid.csv";
  io::save_grid_csv(p, g, 8e-6 / 3.0, "phase");

  const auto back = io::load_grid_csv(p);
  REQUIRE(back.values.rows() == 3);
  REQUIRE(back.values.cols() == 4);
  CHECK(back.pitch == 8e-6 / 3.0);
  CHECK(back.name == "phase");
  for (std::size_t i = 0; i < g.size(); ++i) REQUIRE(back.values[i] == g[i]);
}

TEST_CASE("pgm16 round-trips within quantization of the stored range") {
  TempDir tmp;
  core::Grid2D<double> g(5, 7, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::sin(0.37 * static_cast<double>(i));
  const auto p = tmp.path / "img.pgm";
  io::save_grid_pgm16(p, g);
  const auto back = io::load_grid_pgm16(p);
  REQUIRE(back.rows() == 5);
  REQUIRE(back.cols() == 7);
  double lo = g[0], hi = g[0];
  for (const double v : g.data()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double step = (hi - lo) / 65535.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    REQUIRE(std::abs(back[i] - g[i]) <= 0.51 * step);
  }
}

TEST_CASE("constant pgm image survives the degenerate range") {
  TempDir tmp;
  core::Grid2D<double> g(2, 2, 3.25);
  const auto p = tmp.path / "flat.pgm";
  io::save_grid_pgm16(p, g);
  const auto back = io::load_grid_pgm16(p);
  for (const double v : back.data()) CHECK(v == doctest::Approx(3.25));
}

TEST_CASE("target file restores all three sections") {
  TempDir tmp;
  optics::TargetSpec spec;
  spec.kind = optics::TargetKind::star;
  spec.rows = spec.cols = 64;
  spec.pitch = 3e-6;
  spec.step_phase = 0.8;
  spec.star_spokes = 6;
  spec.star_r_inner = 20e-6;
  spec.star_r_outer = 80e-6;
  const auto target = optics::gen_target(spec);
  const auto p = tmp.path / "target.csv";
  io::save_target(p, target);
  const auto back = io::load_target(p);
  CHECK(back.pitch == target.pitch);
  CHECK(back.width == doctest::Approx(target.width));
  CHECK(back.height == doctest::Approx(target.height));
  REQUIRE(back.amplitude.rows() == 64);
  REQUIRE(back.amplitude == target.amplitude);
  REQUIRE(back.phase == target.phase);
  REQUIRE(back.labels == target.labels);
}

TEST_CASE("binary events round-trip byte-exactly and reject corruption") {
  TempDir tmp;
  sim::EventStream events = {{0, 0, 0, sim::Region::nf},
                             {123456789012345ull, 47, 12, sim::Region::ff},
                             {18446744073709551615ull, 65535, 65535, sim::Region::nf}};
  const auto p = tmp.path / "events.bin";
  io::save_events_binary(p, events);
  const auto back = io::load_events_binary(p);
  REQUIRE(back == events);

  // truncated payload
  {
    std::ofstream f(tmp.path / "trunc.bin", std::ios::binary);
    std::ifstream src(p, std::ios::binary);
    std::string all((std::istreambuf_iterator<char>(src)), std::istreambuf_iterator<char>());
    f.write(all.data(), static_cast<std::streamsize>(all.size() - 5));
  }
  CHECK_THROWS_AS(io::load_events_binary(tmp.path / "trunc.bin"), core::IoError);

  // wrong magic
  {
    std::ofstream f(tmp.path / "magic.bin", std::ios::binary);
    f << "NOPE" << std::string(12, '\0');
  }
  CHECK_THROWS_AS(io::load_events_binary(tmp.path / "magic.bin"), core::IoError);
  CHECK_THROWS_AS(io::load_events_binary(tmp.path / "does_not_exist.bin"), core::IoError);
}

TEST_CASE("csv events mirror the binary stream") {
  TempDir tmp;
  sim::EventStream events = {{10, 1, 2, sim::Region::nf}, {20, 3, 4, sim::Region::ff}};
  const auto p = tmp.path / "events.csv";
  io::save_events_csv(p, events);
  CHECK(io::load_events_csv(p) == events);
}

TEST_CASE("pair table round-trips events, dt, and tags") {
  TempDir tmp;
  std::vector<coincidence::CoincidencePair> pairs(2);
  pairs[0].nf = {100, 1, 2, sim::Region::nf};
  pairs[0].ff = {104, 3, 4, sim::Region::ff};
  pairs[0].dt_ns = 4;
  pairs[1].nf = {500, 5, 6, sim::Region::nf};
  pairs[1].ff = {480, 7, 8, sim::Region::ff};
  pairs[1].dt_ns = -20;
  pairs[1].background = true;
  const auto p = tmp.path / "pairs.csv";
  io::save_pairs_csv(p, pairs);
  const auto back = io::load_pairs_csv(p);
  REQUIRE(back.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back[i].nf == pairs[i].nf);
    CHECK(back[i].ff == pairs[i].ff);
    CHECK(back[i].dt_ns == pairs[i].dt_ns);
    CHECK(back[i].background == pairs[i].background);
  }
  // regions are fixed by the column, not the tag
  CHECK(back[1].nf.region == sim::Region::nf);
  CHECK(back[1].ff.region == sim::Region::ff);

  CHECK_THROWS_AS(io::load_pairs_csv(tmp.path / "missing.csv"), core::IoError);
}

TEST_CASE("file checksum is fnv1a over the raw bytes") {
  TempDir tmp;
  const auto p = tmp.path / "abc.txt";
  {
    std::ofstream f(p, std::ios::binary);
    f << "abc";
  }
  CHECK(io::file_checksum(p) == core::fnv1a64("abc"));
  CHECK(io::checksum_hex(0xcbf29ce484222325ull) == "cbf29ce484222325");
  CHECK(io::checksum_hex(0x85944171f73967e8ull) == "85944171f73967e8");
  CHECK_THROWS_AS(io::file_checksum(tmp.path / "nope.bin"), core::IoError);
}

TEST_CASE("grid loaders reject malformed files") {
  TempDir tmp;
  const auto p = tmp.path / "bad.csv";
  {
    std::ofstream f(p);
    f << "# rows 2\n# cols 2\n# pitch 1e-6\n# name x\n1,2\n3\n";
  }
  CHECK_THROWS_AS(io::load_grid_csv(p), core::IoError);
  CHECK_THROWS_AS(io::load_grid_csv(tmp.path / "missing.csv"), core::IoError);
  const auto pg = tmp.path / "bad.pgm";
  {
    std::ofstream f(pg, std::ios::binary);
    f << "P5\n2 2\n255\n";
  }
  CHECK_THROWS_AS(io::load_grid_pgm16(pg), core::IoError);
}
