#include "qcpgm/pipeline/run.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "qcpgm/core/errors.hpp"
#include "qcpgm/core/rng.hpp"
#include "qcpgm/core/version.hpp"
#include "qcpgm/io/checksum.hpp"
#include "qcpgm/io/event_io.hpp"
#include "qcpgm/io/grid_io.hpp"
#include "qcpgm/io/pair_io.hpp"
#include "qcpgm/metrics/metrics.hpp"

namespace qcpgm::pipeline {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::uint64_t kTagReference = core::fnv1a64("reference-acquisition");
constexpr std::uint64_t kTagClassical = core::fnv1a64("classical-association");

void write_text(const fs::path& path, const std::string& text) {
  const auto parent = path.parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  std::ofstream out(path);
  if (!out) throw core::IoError("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw core::IoError("write failed: " + path.string());
}

void write_json_file(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

core::Grid2D<double> counts_as_double(const core::Grid2D<std::int64_t>& counts) {
  core::Grid2D<double> out(counts.rows(), counts.cols());
  for (std::size_t i = 0; i < counts.size(); ++i) out[i] = static_cast<double>(counts[i]);
  return out;
}

core::Grid2D<double> amplitude_counts(const ResolvedConfig& rc,
                                      const recon::CentroidMap& measured,
                                      const sim::EventStream& nf_merged) {
  if (rc.cfg.reconstruction.amplitude_mode == recon::AmplitudeMode::coincidence) {
    return counts_as_double(measured.count);
  }
  return recon::singles_nf_counts(nf_merged, rc.geometry.nf_pixels);
}

}  // namespace

optics::ComplexTarget build_target(const ResolvedConfig& rc) {
  try {
    return optics::gen_target(rc.cfg.target);
  } catch (const std::invalid_argument& e) {
    throw core::ConfigError(e.what());
  }
}

optics::ForwardModel build_model(const ResolvedConfig& rc, const optics::ComplexTarget& target) {
  try {
    return optics::build_forward_model(target, rc.biphoton, rc.geometry,
                                       rc.cfg.reconstruction.envelope,
                                       rc.cfg.reconstruction.bins_per_ff_pixel);
  } catch (const std::invalid_argument& e) {
    throw core::ConfigError(e.what());
  }
}

ResolvedConfig reference_variant(const ResolvedConfig& rc) {
  PipelineConfig cfg = rc.cfg;
  cfg.name += "-reference";
  cfg.target.kind = optics::TargetKind::flat;
  cfg.target.step_phase = 0.0;
  cfg.step_height = 0.0;
  cfg.background.rate_fraction = 0.0;
  return resolve(cfg);
}

Acquisition acquire(const ResolvedConfig& rc, const optics::ForwardModel& model,
                    std::uint64_t seed) {
  Acquisition a;
  sim::SimResult pairs =
      sim::simulate_pairs(model, rc.cfg.detector, rc.cfg.source.pair_rate_hz, seed);
  a.signal_nf = std::move(pairs.nf);
  a.signal_ff = std::move(pairs.ff);
  a.pair_meta = pairs.meta;
  if (rc.cfg.background.rate_fraction > 0.0) {
    sim::SimResult bg = sim::simulate_background(rc.cfg.background, rc.cfg.detector,
                                                 rc.cfg.source.pair_rate_hz, rc.geometry, seed);
    a.background_nf = std::move(bg.nf);
    a.background_ff = std::move(bg.ff);
  }
  {
    const std::array<sim::EventStream, 2> streams = {a.signal_nf, a.background_nf};
    a.nf = sim::merge_streams(streams);
  }
  {
    const std::array<sim::EventStream, 2> streams = {a.signal_ff, a.background_ff};
    a.ff = sim::merge_streams(streams);
  }
  return a;
}

CoincidenceResult pair_events(const ResolvedConfig& rc, const sim::EventStream& nf,
                              const sim::EventStream& ff) {
  CoincidenceResult r;
  const coincidence::CoincidenceWindow window{0.0, rc.cfg.coincidence.window_ns};
  r.in_window = coincidence::find_coincidences(nf, ff, window);
  auto acc = coincidence::accidental_coincidences(nf, ff, window, rc.cfg.coincidence.shift_ns,
                                                  rc.cfg.coincidence.peak_width_ns);
  r.shifted = std::move(acc.pairs);
  r.shift_warning = acc.shift_warning;
  r.histogram = coincidence::dt_histogram(nf, ff, rc.cfg.coincidence.histogram_bin_ns,
                                          rc.cfg.coincidence.histogram_range_ns);
  return r;
}

recon::CentroidMap measured_centroids(const ResolvedConfig& rc, const CoincidenceResult& coin,
                                      bool background_correction) {
  if (background_correction) {
    return recon::background_corrected_centroids(coin.in_window, coin.shifted, rc.geometry);
  }
  return recon::centroid_map(coin.in_window, rc.geometry);
}

ReferenceData make_reference(const ResolvedConfig& rc, const optics::ForwardModel& flat_model,
                             double measured_total) {
  ReferenceData ref;
  const int n = rc.geometry.nf_pixels;
  if (rc.cfg.reconstruction.reference_mode == ReferenceMode::analytic) {
    // A clear aperture diffracts symmetrically, so every reference centroid
    // is exactly zero; expected counts follow the flat-target marginal.
    ref.centroids.sum_u = core::Grid2D<double>(n, n, 0.0);
    ref.centroids.sum_v = core::Grid2D<double>(n, n, 0.0);
    ref.centroids.count = core::Grid2D<std::int64_t>(n, n, 1);
    ref.amp_counts = core::Grid2D<double>(n, n, 0.0);
    for (std::size_t i = 0; i < ref.amp_counts.size(); ++i) {
      ref.amp_counts[i] = flat_model.marginal[i] * measured_total;
    }
    return ref;
  }
  const ResolvedConfig flat_rc = reference_variant(rc);
  const Acquisition acq = acquire(flat_rc, flat_model, rc.cfg.seed ^ kTagReference);
  const CoincidenceResult coin = pair_events(flat_rc, acq.nf, acq.ff);
  ref.centroids = measured_centroids(flat_rc, coin, rc.cfg.reconstruction.background_correction);
  ref.amp_counts = amplitude_counts(rc, ref.centroids, acq.nf);
  return ref;
}

Reconstruction reconstruct(const ResolvedConfig& rc, const CoincidenceResult& coin,
                           const sim::EventStream& nf_merged, const ReferenceData& ref,
                           bool background_correction) {
  Reconstruction out;
  out.measured = measured_centroids(rc, coin, background_correction);
  out.gradient =
      recon::gradient_from_centroids(out.measured, ref.centroids, rc.geometry.nf_pitch());
  out.phase = recon::frankot_chellappa(out.gradient, rc.cfg.reconstruction.mirror_pad);
  const auto counts = amplitude_counts(rc, out.measured, nf_merged);
  out.amplitude =
      recon::amplitude_image(counts, ref.amp_counts, rc.cfg.reconstruction.amplitude_mode);
  return out;
}

namespace {

double measured_amp_total(const ResolvedConfig& rc, const CoincidenceResult& coin,
                          const sim::EventStream& nf_merged) {
  if (rc.cfg.reconstruction.amplitude_mode == recon::AmplitudeMode::coincidence) {
    const double raw = static_cast<double>(coin.in_window.size());
    if (rc.cfg.reconstruction.background_correction) {
      return std::max(0.0, raw - static_cast<double>(coin.shifted.size()));
    }
    return raw;
  }
  return static_cast<double>(nf_merged.size());
}

}  // namespace

ExperimentResult run_experiment(const ResolvedConfig& rc) {
  ExperimentResult r;
  r.target = build_target(rc);
  const optics::ForwardModel model = build_model(rc, r.target);
  r.acquisition = acquire(rc, model, rc.cfg.seed);
  r.coincidences = pair_events(rc, r.acquisition.nf, r.acquisition.ff);

  const ResolvedConfig flat_rc = reference_variant(rc);
  const optics::ComplexTarget flat_target = build_target(flat_rc);
  const optics::ForwardModel flat_model = build_model(flat_rc, flat_target);
  r.reference = make_reference(
      rc, flat_model, measured_amp_total(rc, r.coincidences, r.acquisition.nf));
  r.recon = reconstruct(rc, r.coincidences, r.acquisition.nf, r.reference,
                        rc.cfg.reconstruction.background_correction);
  return r;
}

Evaluation evaluate_phase(const ResolvedConfig& rc, const optics::ComplexTarget& target,
                          const recon::PhaseMap& phase) {
  if (phase.phase.rows() != rc.geometry.nf_pixels ||
      phase.phase.cols() != rc.geometry.nf_pixels) {
    throw std::invalid_argument("evaluate_phase: phase grid does not match the nf grid");
  }
  Evaluation ev;
  ev.expected_step = rc.cfg.target.step_phase;

  const auto masks = metrics::step_masks(target, rc.geometry, rc.cfg.evaluation.erosion_px);
  std::int64_t n_high = 0, n_low = 0;
  for (const auto v : masks.high.data()) n_high += v;
  for (const auto v : masks.low.data()) n_low += v;
  if (n_high > 0 && n_low > 0) {
    const auto step = metrics::phase_step_measure(phase, masks.high, masks.low);
    ev.step = step.step;
    ev.step_stddev = step.stddev;
    ev.has_step = true;
    if (ev.expected_step != 0.0) ev.contrast = ev.step / ev.expected_step;
  }

  const auto mask = metrics::erode(phase.valid, rc.cfg.evaluation.erosion_px);
  const auto truth = metrics::truth_phase_on_nf(target, rc.geometry);
  double mean_obs = 0.0, mean_truth = 0.0;
  std::int64_t n = 0;
  for (int r = 0; r < mask.rows(); ++r) {
    for (int c = 0; c < mask.cols(); ++c) {
      if (!mask(r, c)) continue;
      mean_obs += phase.phase(r, c);
      mean_truth += truth(r, c);
      ++n;
    }
  }
  if (n == 0) throw core::NumericError("evaluate_phase: empty evaluation mask");
  mean_obs /= static_cast<double>(n);
  mean_truth /= static_cast<double>(n);
  const double align = mean_truth - mean_obs;
  double sq = 0.0, truth_sq = 0.0;
  for (int r = 0; r < mask.rows(); ++r) {
    for (int c = 0; c < mask.cols(); ++c) {
      if (!mask(r, c)) continue;
      const double d = phase.phase(r, c) + align - truth(r, c);
      sq += d * d;
      truth_sq += truth(r, c) * truth(r, c);
    }
  }
  const double rms_err = std::sqrt(sq / static_cast<double>(n));
  const double rms_truth = std::sqrt(truth_sq / static_cast<double>(n));
  if (std::abs(mean_truth) > 1e-12 * std::max(1.0, rms_truth)) {
    ev.nrmse = rms_err / std::abs(mean_truth);
  } else {
    ev.nrmse = rms_err;
    ev.absolute_error = true;
  }
  ev.mask_pixels = n;
  return ev;
}

recon::CentroidMap classical_mixture_centroids(const ResolvedConfig& rc, const Acquisition& acq) {
  const int n = rc.geometry.nf_pixels;
  const int nff = rc.geometry.ff_pixels;
  const coincidence::CoincidenceWindow window{0.0, rc.cfg.coincidence.window_ns};
  const auto signal_pairs =
      coincidence::find_coincidences(acq.signal_nf, acq.signal_ff, window);
  recon::CentroidMap map = recon::centroid_map(signal_pairs, rc.geometry);

  double total = static_cast<double>(acq.ff.size());
  if (total > 0.0 && !acq.background_nf.empty()) {
    // empirical global far-field distribution, what a time-insensitive
    // read-out associates with any near-field detection of unpaired light
    std::vector<double> cdf(static_cast<std::size_t>(nff) * nff, 0.0);
    for (const auto& e : acq.ff) {
      cdf[static_cast<std::size_t>(e.y) * nff + e.x] += 1.0;
    }
    double run = 0.0;
    for (auto& v : cdf) {
      run += v / total;
      v = run;
    }
    auto rng = core::substream(rc.cfg.seed, kTagClassical);
    for (const auto& e : acq.background_nf) {
      if (e.y >= n || e.x >= n) continue;
      const double u = core::u01(rng);
      const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      const auto idx = static_cast<std::size_t>(
          std::min<std::ptrdiff_t>(it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
      const int fy = static_cast<int>(idx) / nff;
      const int fx = static_cast<int>(idx) % nff;
      map.sum_u(e.y, e.x) += rc.geometry.ff_u(fx);
      map.sum_v(e.y, e.x) += rc.geometry.ff_v(fy);
      ++map.count(e.y, e.x);
    }
  }
  return map;
}

BackgroundStudy run_background_study(const ResolvedConfig& rc) {
  if (rc.cfg.background.rate_fraction <= 0.0) {
    throw core::ConfigError("background study requires background.rate_fraction > 0");
  }
  const optics::ComplexTarget target = build_target(rc);
  const optics::ForwardModel model = build_model(rc, target);
  const ResolvedConfig flat_rc = reference_variant(rc);
  const optics::ComplexTarget flat_target = build_target(flat_rc);
  const optics::ForwardModel flat_model = build_model(flat_rc, flat_target);

  const Acquisition acq = acquire(rc, model, rc.cfg.seed);
  const CoincidenceResult coin = pair_events(rc, acq.nf, acq.ff);
  const ReferenceData ref =
      make_reference(rc, flat_model, measured_amp_total(rc, coin, acq.nf));

  BackgroundStudy out;
  out.accidental_fraction =
      coin.in_window.empty()
          ? 0.0
          : static_cast<double>(coin.shifted.size()) / static_cast<double>(coin.in_window.size());

  const auto corrected = reconstruct(rc, coin, acq.nf, ref, true);
  out.nrmse_corrected = evaluate_phase(rc, target, corrected.phase).nrmse;

  const auto uncorrected = reconstruct(rc, coin, acq.nf, ref, false);
  out.nrmse_coincidence_only = evaluate_phase(rc, target, uncorrected.phase).nrmse;

  const auto classical = classical_mixture_centroids(rc, acq);
  const auto classical_gradient =
      recon::gradient_from_centroids(classical, ref.centroids, rc.geometry.nf_pitch());
  const auto classical_phase =
      recon::frankot_chellappa(classical_gradient, rc.cfg.reconstruction.mirror_pad);
  out.nrmse_singles_style = evaluate_phase(rc, target, classical_phase).nrmse;

  const CoincidenceResult baseline_coin = pair_events(rc, acq.signal_nf, acq.signal_ff);
  const auto baseline = reconstruct(rc, baseline_coin, acq.signal_nf, ref, true);
  out.nrmse_baseline = evaluate_phase(rc, target, baseline.phase).nrmse;
  return out;
}

namespace {

json evaluation_json(const Evaluation& ev) {
  json j;
  j["nrmse"] = ev.nrmse;
  j["absolute_error"] = ev.absolute_error;
  j["mask_pixels"] = ev.mask_pixels;
  j["has_step"] = ev.has_step;
  j["step"] = ev.step;
  j["step_stddev"] = ev.step_stddev;
  j["expected_step"] = ev.expected_step;
  j["contrast"] = ev.contrast;
  return j;
}

void save_histogram(const fs::path& path, const coincidence::DtHistogram& hist) {
  std::string text = "dt_ns,count\n";
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    char line[64];
    std::snprintf(line, sizeof line, "%.17g,%llu\n", hist.bin_center(i),
                  static_cast<unsigned long long>(hist.counts[i]));
    text += line;
  }
  write_text(path, text);
}

core::Grid2D<double> centroid_means(const recon::CentroidMap& map, bool vertical) {
  core::Grid2D<double> out(map.count.rows(), map.count.cols(), 0.0);
  for (int r = 0; r < out.rows(); ++r) {
    for (int c = 0; c < out.cols(); ++c) {
      if (map.valid(r, c)) out(r, c) = vertical ? map.v(r, c) : map.u(r, c);
    }
  }
  return out;
}

core::Grid2D<double> mask_as_double(const core::Grid2D<std::uint8_t>& mask) {
  core::Grid2D<double> out(mask.rows(), mask.cols());
  for (std::size_t i = 0; i < mask.size(); ++i) out[i] = mask[i];
  return out;
}

std::vector<coincidence::CoincidencePair> concat_pairs(
    const std::vector<coincidence::CoincidencePair>& a,
    const std::vector<coincidence::CoincidencePair>& b) {
  std::vector<coincidence::CoincidencePair> out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

void split_pairs(const std::vector<coincidence::CoincidencePair>& all,
                 std::vector<coincidence::CoincidencePair>& in_window,
                 std::vector<coincidence::CoincidencePair>& shifted) {
  for (const auto& p : all) {
    (p.background ? shifted : in_window).push_back(p);
  }
}

void split_events(const sim::EventStream& all, sim::EventStream& nf, sim::EventStream& ff) {
  for (const auto& e : all) {
    (e.region == sim::Region::nf ? nf : ff).push_back(e);
  }
}

std::vector<fs::path> save_centroid_files(const ResolvedConfig& rc,
                                          const recon::CentroidMap& map, const fs::path& dir) {
  const double pitch = rc.geometry.nf_pitch();
  io::save_grid_csv(dir / "centroid_u.csv", centroid_means(map, false), pitch, "centroid_u");
  io::save_grid_csv(dir / "centroid_v.csv", centroid_means(map, true), pitch, "centroid_v");
  io::save_grid_csv(dir / "centroid_n.csv", counts_as_double(map.count), pitch, "centroid_n");
  return {dir / "centroid_u.csv", dir / "centroid_v.csv", dir / "centroid_n.csv"};
}

std::vector<fs::path> save_reconstruction(const ResolvedConfig& rc, const Reconstruction& rec,
                                          const fs::path& dir, bool background_correction,
                                          bool shift_warning) {
  const double pitch = rc.geometry.nf_pitch();
  std::vector<fs::path> files;
  io::save_grid_csv(dir / "phase.csv", rec.phase.phase, pitch, "phase");
  files.push_back(dir / "phase.csv");
  io::save_grid_csv(dir / "phase_valid.csv", mask_as_double(rec.phase.valid), pitch,
                    "phase_valid");
  files.push_back(dir / "phase_valid.csv");
  io::save_grid_pgm16(dir / "phase.pgm", rec.phase.phase);
  files.push_back(dir / "phase.pgm");
  io::save_grid_csv(dir / "amplitude.csv", rec.amplitude.amplitude, pitch, "amplitude");
  files.push_back(dir / "amplitude.csv");
  io::save_grid_pgm16(dir / "amplitude.pgm", rec.amplitude.amplitude);
  files.push_back(dir / "amplitude.pgm");
  io::save_grid_csv(dir / "gradient_p.csv", rec.gradient.p, pitch, "gradient_p");
  files.push_back(dir / "gradient_p.csv");
  io::save_grid_csv(dir / "gradient_q.csv", rec.gradient.q, pitch, "gradient_q");
  files.push_back(dir / "gradient_q.csv");
  json meta;
  meta["background_correction"] = background_correction;
  meta["shift_warning"] = shift_warning;
  meta["valid_pixels"] = [&] {
    std::int64_t n = 0;
    for (const auto v : rec.phase.valid.data()) n += v;
    return n;
  }();
  write_json_file(dir / "recon_meta.json", meta);
  files.push_back(dir / "recon_meta.json");
  return files;
}

}  // namespace

std::vector<fs::path> run_gen_target(const ResolvedConfig& rc, const fs::path& dir) {
  const auto target = build_target(rc);
  io::save_target(dir / "target.csv", target);
  io::save_grid_pgm16(dir / "target_phase.pgm", target.phase);
  io::save_grid_pgm16(dir / "target_amplitude.pgm", target.amplitude);
  return {dir / "target.csv", dir / "target_phase.pgm", dir / "target_amplitude.pgm"};
}

std::vector<fs::path> run_simulate(const ResolvedConfig& rc, const fs::path& dir,
                                   bool write_csv) {
  const auto target = build_target(rc);
  const auto model = build_model(rc, target);
  const Acquisition acq = acquire(rc, model, rc.cfg.seed);
  const std::array<sim::EventStream, 2> regions = {acq.nf, acq.ff};
  const sim::EventStream all = sim::merge_streams(regions);
  std::vector<fs::path> files;
  io::save_events_binary(dir / "events.bin", all);
  files.push_back(dir / "events.bin");
  if (write_csv) {
    io::save_events_csv(dir / "events.csv", all);
    files.push_back(dir / "events.csv");
  }
  json meta;
  meta["generated_pairs"] = acq.pair_meta.generated_pairs;
  meta["detected_pairs"] = acq.pair_meta.detected_pairs;
  meta["nf_events"] = acq.nf.size();
  meta["ff_events"] = acq.ff.size();
  meta["background_nf_events"] = acq.background_nf.size();
  meta["background_ff_events"] = acq.background_ff.size();
  meta["rate_cap_exceeded"] = acq.pair_meta.rate_cap_exceeded;
  write_json_file(dir / "sim_meta.json", meta);
  files.push_back(dir / "sim_meta.json");
  return files;
}

std::vector<fs::path> run_coincidences(const ResolvedConfig& rc, const fs::path& dir) {
  const sim::EventStream all = io::load_events_binary(dir / "events.bin");
  sim::EventStream nf, ff;
  split_events(all, nf, ff);
  const CoincidenceResult coin = pair_events(rc, nf, ff);
  std::vector<fs::path> files;
  io::save_pairs_csv(dir / "pairs.csv", concat_pairs(coin.in_window, coin.shifted));
  files.push_back(dir / "pairs.csv");
  save_histogram(dir / "dt_histogram.csv", coin.histogram);
  files.push_back(dir / "dt_histogram.csv");
  json meta;
  meta["in_window_pairs"] = coin.in_window.size();
  meta["accidental_pairs"] = coin.shifted.size();
  meta["shift_warning"] = coin.shift_warning;
  meta["window_ns"] = rc.cfg.coincidence.window_ns;
  meta["shift_ns"] = rc.cfg.coincidence.shift_ns;
  write_json_file(dir / "coincidence_meta.json", meta);
  files.push_back(dir / "coincidence_meta.json");
  return files;
}

std::vector<fs::path> run_centroids(const ResolvedConfig& rc, const fs::path& dir,
                                    bool background_correction) {
  const auto all = io::load_pairs_csv(dir / "pairs.csv");
  CoincidenceResult coin;
  split_pairs(all, coin.in_window, coin.shifted);
  const auto map = measured_centroids(rc, coin, background_correction);
  return save_centroid_files(rc, map, dir);
}

std::vector<fs::path> run_reconstruct(const ResolvedConfig& rc, const fs::path& dir,
                                      bool background_correction) {
  const auto all = io::load_pairs_csv(dir / "pairs.csv");
  CoincidenceResult coin;
  split_pairs(all, coin.in_window, coin.shifted);
  sim::EventStream nf_merged;
  if (rc.cfg.reconstruction.amplitude_mode == recon::AmplitudeMode::singles) {
    sim::EventStream ff_unused;
    split_events(io::load_events_binary(dir / "events.bin"), nf_merged, ff_unused);
  }
  const ResolvedConfig flat_rc = reference_variant(rc);
  const auto flat_target = build_target(flat_rc);
  const auto flat_model = build_model(flat_rc, flat_target);
  const ReferenceData ref =
      make_reference(rc, flat_model, measured_amp_total(rc, coin, nf_merged));
  const Reconstruction rec = reconstruct(rc, coin, nf_merged, ref, background_correction);
  return save_reconstruction(rc, rec, dir, background_correction, false);
}

std::vector<fs::path> run_evaluate(const ResolvedConfig& rc, const fs::path& dir) {
  const auto phase_grid = io::load_grid_csv(dir / "phase.csv");
  const auto valid_grid = io::load_grid_csv(dir / "phase_valid.csv");
  recon::PhaseMap phase;
  phase.phase = phase_grid.values;
  phase.pitch = phase_grid.pitch;
  phase.valid = core::Grid2D<std::uint8_t>(valid_grid.values.rows(), valid_grid.values.cols());
  for (std::size_t i = 0; i < valid_grid.values.size(); ++i) {
    phase.valid[i] = valid_grid.values[i] > 0.5 ? 1 : 0;
  }
  const auto target = build_target(rc);
  const Evaluation ev = evaluate_phase(rc, target, phase);
  write_json_file(dir / "evaluation.json", evaluation_json(ev));
  return {dir / "evaluation.json"};
}

std::vector<fs::path> run_compare_sh(const shcompare::ComparisonConfig& cfg,
                                     const fs::path& dir) {
  const shcompare::ComparisonResult result = shcompare::run_comparison(cfg);
  json j;
  j["ff_pixel_counts"] = result.ff_pixel_counts;
  j["truth"] = result.truth;
  j["rms_normalized"] = result.rms_normalized;
  const auto curve_json = [](const shcompare::MethodCurve& c) {
    json m;
    m["nrmse"] = c.nrmse;
    m["uncertainty"] = c.uncertainty;
    m["spot_fwhm"] = c.spot_fwhm;
    m["span"] = c.span;
    return m;
  };
  j["correlation"] = curve_json(result.correlation);
  j["shack_hartmann"] = curve_json(result.shack_hartmann);

  const std::vector<int> probes = {10, 15, 20, 25, 30};
  const bool have_probes = std::all_of(probes.begin(), probes.end(), [&](int p) {
    return std::find(result.ff_pixel_counts.begin(), result.ff_pixel_counts.end(), p) !=
           result.ff_pixel_counts.end();
  });
  if (have_probes) {
    j["knee_correlation"] =
        shcompare::knee_count(result.ff_pixel_counts, result.correlation.nrmse, probes);
    j["knee_shack_hartmann"] =
        shcompare::knee_count(result.ff_pixel_counts, result.shack_hartmann.nrmse, probes);
  }
  const auto index_of = [&](int count) -> int {
    const auto it =
        std::find(result.ff_pixel_counts.begin(), result.ff_pixel_counts.end(), count);
    return it == result.ff_pixel_counts.end()
               ? -1
               : static_cast<int>(it - result.ff_pixel_counts.begin());
  };
  const int i_sh = index_of(11);
  const int i_corr = index_of(100);
  if (i_sh >= 0 && i_corr >= 0 &&
      result.correlation.uncertainty[static_cast<std::size_t>(i_corr)] > 0.0) {
    j["uncertainty_ratio_sh11_to_corr100"] =
        result.shack_hartmann.uncertainty[static_cast<std::size_t>(i_sh)] /
        result.correlation.uncertainty[static_cast<std::size_t>(i_corr)];
  }
  write_json_file(dir / "comparison.json", j);
  return {dir / "comparison.json"};
}

std::vector<fs::path> run_pipeline(const ResolvedConfig& rc, const fs::path& dir,
                                   bool background_correction) {
  std::vector<fs::path> files = run_gen_target(rc, dir);

  const auto target = build_target(rc);
  const auto model = build_model(rc, target);
  const Acquisition acq = acquire(rc, model, rc.cfg.seed);
  const std::array<sim::EventStream, 2> regions = {acq.nf, acq.ff};
  io::save_events_binary(dir / "events.bin", sim::merge_streams(regions));
  files.push_back(dir / "events.bin");

  const CoincidenceResult coin = pair_events(rc, acq.nf, acq.ff);
  io::save_pairs_csv(dir / "pairs.csv", concat_pairs(coin.in_window, coin.shifted));
  files.push_back(dir / "pairs.csv");
  save_histogram(dir / "dt_histogram.csv", coin.histogram);
  files.push_back(dir / "dt_histogram.csv");

  const ResolvedConfig flat_rc = reference_variant(rc);
  const auto flat_target = build_target(flat_rc);
  const auto flat_model = build_model(flat_rc, flat_target);
  const ReferenceData ref =
      make_reference(rc, flat_model, measured_amp_total(rc, coin, acq.nf));
  const Reconstruction rec = reconstruct(rc, coin, acq.nf, ref, background_correction);

  const auto map_files = save_centroid_files(rc, rec.measured, dir);
  files.insert(files.end(), map_files.begin(), map_files.end());

  const auto rec_files =
      save_reconstruction(rc, rec, dir, background_correction, coin.shift_warning);
  files.insert(files.end(), rec_files.begin(), rec_files.end());

  const Evaluation ev = evaluate_phase(rc, target, rec.phase);
  write_json_file(dir / "evaluation.json", evaluation_json(ev));
  files.push_back(dir / "evaluation.json");

  write_text(dir / "config.json", config_to_json(rc.cfg));
  files.push_back(dir / "config.json");

  write_manifest(rc, dir, files);
  files.push_back(dir / "manifest.json");
  return files;
}

void write_manifest(const ResolvedConfig& rc, const fs::path& dir,
                    const std::vector<fs::path>& files) {
  json j;
  j["tool"] = "qcpgm";
  j["version"] = core::kVersion;
  j["config_name"] = rc.cfg.name;
  j["seed"] = rc.cfg.seed;
  json list = json::array();
  for (const auto& f : files) {
    json entry;
    entry["path"] = fs::relative(f, dir).generic_string();
    entry["bytes"] = fs::file_size(f);
    entry["fnv1a64"] = io::checksum_hex(io::file_checksum(f));
    list.push_back(entry);
  }
  j["files"] = list;
  write_json_file(dir / "manifest.json", j);
}

}  // namespace qcpgm::pipeline
