#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qcpgm/core/errors.hpp"
#include "qcpgm/core/version.hpp"
#include "qcpgm/pipeline/config.hpp"
#include "qcpgm/pipeline/run.hpp"
#include "qcpgm/shcompare/shcompare.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string preset;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<double> window_ns;
  std::optional<double> shift_ns;
  bool no_background_correction = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_correction_flag = true) {
  cmd->add_option("--config", opts.config_path, "JSON config file");
  cmd->add_option("--preset", opts.preset, "named preset configuration");
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--seed", opts.seed, "override the configured seed");
  cmd->add_option("--window-ns", opts.window_ns, "coincidence window width in ns");
  cmd->add_option("--shift-ns", opts.shift_ns, "accidental-estimation shift in ns");
  if (with_correction_flag) {
    cmd->add_flag("--no-background-correction", opts.no_background_correction,
                  "skip subtracting the shifted-window centroid estimate");
  }
}

qcpgm::pipeline::ResolvedConfig resolve_opts(const CommonOpts& opts) {
  qcpgm::pipeline::PipelineConfig cfg;
  if (!opts.preset.empty()) cfg = qcpgm::pipeline::preset_config(opts.preset);
  if (!opts.config_path.empty()) cfg = qcpgm::pipeline::load_config(opts.config_path, cfg);
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.window_ns) cfg.coincidence.window_ns = *opts.window_ns;
  if (opts.shift_ns) cfg.coincidence.shift_ns = *opts.shift_ns;
  if (opts.no_background_correction) cfg.reconstruction.background_correction = false;
  return qcpgm::pipeline::resolve(cfg);
}

void report_files(const std::vector<std::filesystem::path>& files) {
  for (const auto& f : files) std::printf("%s\n", f.generic_string().c_str());
}

void report_error(const char* kind, const std::string& message) {
  std::fprintf(stderr, "{\"error\":\"%s\",\"message\":\"%s\"}\n", kind, message.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum-correlation phase gradient microscopy toolkit"};
  app.set_version_flag("--version", qcpgm::core::kVersion);
  app.require_subcommand(1);

  CommonOpts gen_opts, sim_opts, coin_opts, cent_opts, rec_opts, eval_opts, pipe_opts;
  bool sim_csv = false;

  auto* gen = app.add_subcommand("gen-target", "write the configured transmission target");
  add_common(gen, gen_opts, false);
  auto* sim = app.add_subcommand("simulate", "synthesize time-tagged detection events");
  add_common(sim, sim_opts, false);
  sim->add_flag("--csv", sim_csv, "also write events as CSV");
  auto* coin = app.add_subcommand("coincidences", "pair events from an existing events.bin");
  add_common(coin, coin_opts, false);
  auto* cent = app.add_subcommand("centroids", "per-pixel centroids from an existing pairs.csv");
  add_common(cent, cent_opts);
  auto* rec = app.add_subcommand("reconstruct", "phase and amplitude from an existing pairs.csv");
  add_common(rec, rec_opts);
  auto* eval = app.add_subcommand("evaluate", "score a reconstructed phase against the target");
  add_common(eval, eval_opts, false);
  auto* pipe = app.add_subcommand("pipeline", "run simulate through evaluate in one pass");
  add_common(pipe, pipe_opts);

  qcpgm::shcompare::ComparisonConfig cmp_cfg;
  std::string cmp_out = "out";
  auto* cmp = app.add_subcommand("compare-sh",
                                 "wavefront-sensing comparison against a lenslet array");
  cmp->add_option("--photons", cmp_cfg.photons_per_pixel, "detected photons per sensing pixel");
  cmp->add_option("--repeats", cmp_cfg.repeats, "noise realizations per configuration");
  cmp->add_option("--seed", cmp_cfg.seed, "random seed");
  cmp->add_option("--out", cmp_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    report_error("config", e.what());
    return 2;
  }

  try {
    if (gen->parsed()) {
      report_files(qcpgm::pipeline::run_gen_target(resolve_opts(gen_opts), gen_opts.out_dir));
    } else if (sim->parsed()) {
      report_files(
          qcpgm::pipeline::run_simulate(resolve_opts(sim_opts), sim_opts.out_dir, sim_csv));
    } else if (coin->parsed()) {
      report_files(
          qcpgm::pipeline::run_coincidences(resolve_opts(coin_opts), coin_opts.out_dir));
    } else if (cent->parsed()) {
      const auto rc = resolve_opts(cent_opts);
      report_files(qcpgm::pipeline::run_centroids(rc, cent_opts.out_dir,
                                                  rc.cfg.reconstruction.background_correction));
    } else if (rec->parsed()) {
      const auto rc = resolve_opts(rec_opts);
      report_files(qcpgm::pipeline::run_reconstruct(rc, rec_opts.out_dir,
                                                    rc.cfg.reconstruction.background_correction));
    } else if (eval->parsed()) {
      report_files(qcpgm::pipeline::run_evaluate(resolve_opts(eval_opts), eval_opts.out_dir));
    } else if (cmp->parsed()) {
      qcpgm::shcompare::validate_comparison_config(cmp_cfg);
      report_files(qcpgm::pipeline::run_compare_sh(cmp_cfg, cmp_out));
    } else if (pipe->parsed()) {
      const auto rc = resolve_opts(pipe_opts);
      report_files(qcpgm::pipeline::run_pipeline(rc, pipe_opts.out_dir,
                                                 rc.cfg.reconstruction.background_correction));
    }
  } catch (const qcpgm::core::ConfigError& e) {
    report_error("config", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    report_error("config", e.what());
    return 2;
  } catch (const qcpgm::core::IoError& e) {
    report_error("io", e.what());
    return 3;
  } catch (const qcpgm::core::NumericError& e) {
    report_error("numeric", e.what());
    return 4;
  } catch (const std::exception& e) {
    report_error("internal", e.what());
    return 1;
  }
  return 0;
}
