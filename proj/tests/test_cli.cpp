#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("qcpgm_cli_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Runs the installed CLI with the given argument string, capturing streams.
RunResult run_cli(const std::string& args, const TempDir& dir) {
  const fs::path out_file = dir.path / "stdout.txt";
  const fs::path err_file = dir.path / "stderr.txt";
  const std::string cmd = std::string(QCPGM_CLI_PATH) + " " + args + " > " +
                          out_file.string() + " 2> " + err_file.string();
  const int status = std::system(cmd.c_str());
  RunResult r;
  if (WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
  r.out = slurp(out_file);
  r.err = slurp(err_file);
  return r;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

/// Small flat-target run that finishes in well under a second.
std::string tiny_config_json(const fs::path&) {
  return R"({
    "name": "cli-tiny",
    "seed": 11,
    "target": {"kind": "flat", "rows": 60, "cols": 60},
    "geometry": {"nf_pixels": 8, "ff_pixels": 24},
    "detector": {"acquisition_time_s": 0.02},
    "source": {"pair_rate_hz": 3e5}
  })";
}

}  // namespace

TEST_CASE("version flag reports the library version and exits cleanly") {
  TempDir dir;
  auto r = run_cli("--version", dir);
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("1.0.0") != std::string::npos);
}

TEST_CASE("bad invocations exit with the configuration error code") {
  TempDir dir;
  SUBCASE("unknown flag") {
    auto r = run_cli("simulate --definitely-not-a-flag", dir);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("\"error\":\"config\"") != std::string::npos);
  }
  SUBCASE("missing subcommand") {
    auto r = run_cli("--seed 4", dir);
    CHECK(r.exit_code == 2);
  }
  SUBCASE("unknown preset") {
    auto r = run_cli("gen-target --preset star-75nm --out " + dir.path.string(), dir);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("\"error\":\"config\"") != std::string::npos);
  }
  SUBCASE("config that fails validation") {
    write_file(dir.path / "bad.json", R"({"detector": {"efficiency": 2.0}})");
    auto r = run_cli("simulate --config " + (dir.path / "bad.json").string() + " --out " +
                         dir.path.string(),
                     dir);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("\"error\":\"config\"") != std::string::npos);
  }
  SUBCASE("config that is not JSON") {
    write_file(dir.path / "bad.json", "not json at all");
    auto r = run_cli("simulate --config " + (dir.path / "bad.json").string() + " --out " +
                         dir.path.string(),
                     dir);
    CHECK(r.exit_code == 2);
  }
}

TEST_CASE("missing inputs exit with the i/o error code") {
  TempDir dir;
  SUBCASE("absent config file") {
    auto r = run_cli("simulate --config " + (dir.path / "nope.json").string(), dir);
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("\"error\":\"io\"") != std::string::npos);
  }
  SUBCASE("coincidences without event files") {
    auto r = run_cli("coincidences --preset flat --out " + dir.path.string(), dir);
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("\"error\":\"io\"") != std::string::npos);
  }
}

TEST_CASE("gen-target writes the files it reports") {
  TempDir dir;
  auto r = run_cli("gen-target --preset star-200nm --out " + dir.path.string(), dir);
  CHECK(r.exit_code == 0);
  std::istringstream lines(r.out);
  std::string line;
  int reported = 0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    ++reported;
    CHECK(fs::exists(line));
  }
  CHECK(reported >= 1);
}

TEST_CASE("staged commands consume the previous stage's outputs") {
  TempDir dir;
  const fs::path cfg = dir.path / "cfg.json";
  write_file(cfg, tiny_config_json(dir.path));
  const std::string common = " --config " + cfg.string() + " --out " + dir.path.string();

  auto sim = run_cli("simulate --csv" + common, dir);
  CHECK(sim.exit_code == 0);
  CHECK(fs::exists(dir.path / "events.bin"));
  CHECK(fs::exists(dir.path / "events.csv"));

  auto coin = run_cli("coincidences" + common, dir);
  CHECK(coin.exit_code == 0);
  CHECK(fs::exists(dir.path / "pairs.csv"));

  auto rec = run_cli("reconstruct" + common, dir);
  CHECK(rec.exit_code == 0);
  CHECK(fs::exists(dir.path / "phase.csv"));

  auto ev = run_cli("evaluate" + common, dir);
  CHECK(ev.exit_code == 0);
}

TEST_CASE("pipeline produces a manifest and is reproducible byte for byte") {
  TempDir dir;
  const fs::path cfg = dir.path / "cfg.json";
  write_file(cfg, tiny_config_json(dir.path));
  const fs::path run_a = dir.path / "a";
  const fs::path run_b = dir.path / "b";

  auto a = run_cli("pipeline --config " + cfg.string() + " --out " + run_a.string(), dir);
  CHECK(a.exit_code == 0);
  CHECK(fs::exists(run_a / "manifest.json"));

  auto b = run_cli("pipeline --config " + cfg.string() + " --out " + run_b.string(), dir);
  CHECK(b.exit_code == 0);

  for (const char* name : {"events.bin", "pairs.csv", "phase.csv"}) {
    CAPTURE(name);
    REQUIRE(fs::exists(run_a / name));
    CHECK(slurp(run_a / name) == slurp(run_b / name));
  }
}

TEST_CASE("seed flag changes the event stream") {
  TempDir dir;
  const fs::path cfg = dir.path / "cfg.json";
  write_file(cfg, tiny_config_json(dir.path));
  const fs::path run_a = dir.path / "a";
  const fs::path run_b = dir.path / "b";
  auto a = run_cli(
      "simulate --config " + cfg.string() + " --seed 5 --out " + run_a.string(), dir);
  auto b = run_cli(
      "simulate --config " + cfg.string() + " --seed 6 --out " + run_b.string(), dir);
  CHECK(a.exit_code == 0);
  CHECK(b.exit_code == 0);
  CHECK(slurp(run_a / "events.bin") != slurp(run_b / "events.bin"));
}
