#include "qcpgm/pipeline/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "qcpgm/core/errors.hpp"

namespace qcpgm::pipeline {

namespace {

using nlohmann::json;

void check_keys(const json& j, const char* where,
                std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw core::ConfigError(std::string(where) + ": expected a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const auto& key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw core::ConfigError(std::string("unknown key '") + item.key() + "' in " + where);
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& into) {
  if (const auto it = j.find(key); it != j.end()) into = it->get<T>();
}

constexpr std::string_view kTargetKinds[] = {"flat",          "star",        "usaf_bars",
                                             "gaussian_bump", "linear_ramp", "cell_like"};

std::string target_kind_name(optics::TargetKind kind) {
  return std::string(kTargetKinds[static_cast<int>(kind)]);
}

optics::TargetKind target_kind_from(const std::string& name) {
  for (int i = 0; i < 6; ++i) {
    if (name == kTargetKinds[i]) return static_cast<optics::TargetKind>(i);
  }
  throw core::ConfigError("unknown target kind '" + name + "'");
}

std::string amplitude_mode_name(recon::AmplitudeMode m) {
  return m == recon::AmplitudeMode::coincidence ? "coincidence" : "singles";
}

recon::AmplitudeMode amplitude_mode_from(const std::string& name) {
  if (name == "coincidence") return recon::AmplitudeMode::coincidence;
  if (name == "singles") return recon::AmplitudeMode::singles;
  throw core::ConfigError("unknown amplitude mode '" + name + "'");
}

std::string envelope_name(optics::EnvelopeMode m) {
  return m == optics::EnvelopeMode::constant ? "constant" : "full";
}

optics::EnvelopeMode envelope_from(const std::string& name) {
  if (name == "constant") return optics::EnvelopeMode::constant;
  if (name == "full") return optics::EnvelopeMode::full;
  throw core::ConfigError("unknown envelope mode '" + name + "'");
}

std::string reference_mode_name(ReferenceMode m) {
  return m == ReferenceMode::simulated ? "simulated" : "analytic";
}

ReferenceMode reference_mode_from(const std::string& name) {
  if (name == "simulated") return ReferenceMode::simulated;
  if (name == "analytic") return ReferenceMode::analytic;
  throw core::ConfigError("unknown reference mode '" + name + "'");
}

void parse_target(const json& j, PipelineConfig& cfg) {
  check_keys(j, "target",
             {"kind", "rows", "cols", "pitch", "step_phase", "step_height", "medium_index",
              "star_spokes", "star_r_inner", "star_r_outer", "bar_period", "bump_sigma",
              "bump_peak", "ramp_grad_x", "ramp_grad_y", "cell_seed"});
  if (const auto it = j.find("kind"); it != j.end()) {
    cfg.target.kind = target_kind_from(it->get<std::string>());
  }
  read(j, "rows", cfg.target.rows);
  read(j, "cols", cfg.target.cols);
  read(j, "pitch", cfg.target.pitch);
  read(j, "step_phase", cfg.target.step_phase);
  read(j, "step_height", cfg.step_height);
  read(j, "medium_index", cfg.medium_index);
  read(j, "star_spokes", cfg.target.star_spokes);
  read(j, "star_r_inner", cfg.target.star_r_inner);
  read(j, "star_r_outer", cfg.target.star_r_outer);
  read(j, "bar_period", cfg.target.bar_period);
  read(j, "bump_sigma", cfg.target.bump_sigma);
  read(j, "bump_peak", cfg.target.bump_peak);
  read(j, "ramp_grad_x", cfg.target.ramp_grad_x);
  read(j, "ramp_grad_y", cfg.target.ramp_grad_y);
  read(j, "cell_seed", cfg.target.cell_seed);
}

}  // namespace

PipelineConfig config_from_json(const std::string& text, const PipelineConfig& base) {
  PipelineConfig cfg = base;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw core::ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    check_keys(j, "config",
               {"name", "seed", "target", "biphoton", "geometry", "detector", "source",
                "background", "coincidence", "reconstruction", "evaluation"});
    read(j, "name", cfg.name);
    read(j, "seed", cfg.seed);
    if (j.contains("target")) parse_target(j["target"], cfg);
    if (j.contains("biphoton")) {
      const auto& b = j["biphoton"];
      check_keys(b, "biphoton", {"pump_wavelength", "pump_width", "crystal_length", "alpha"});
      read(b, "pump_wavelength", cfg.biphoton.pump_wavelength);
      read(b, "pump_width", cfg.biphoton.pump_width);
      read(b, "crystal_length", cfg.biphoton.crystal_length);
      read(b, "alpha", cfg.biphoton.alpha);
    }
    if (j.contains("geometry")) {
      const auto& g = j["geometry"];
      check_keys(g, "geometry",
                 {"nf_pixels", "ff_pixels", "camera_pixel_pitch", "nf_magnification",
                  "ff_focal_length"});
      read(g, "nf_pixels", cfg.geometry.nf_pixels);
      read(g, "ff_pixels", cfg.geometry.ff_pixels);
      read(g, "camera_pixel_pitch", cfg.geometry.camera_pixel_pitch);
      read(g, "nf_magnification", cfg.geometry.nf_magnification);
      read(g, "ff_focal_length", cfg.geometry.ff_focal_length);
    }
    if (j.contains("detector")) {
      const auto& d = j["detector"];
      check_keys(d, "detector",
                 {"efficiency_nf", "efficiency_ff", "time_quantum_ns", "jitter_sigma_ns",
                  "acquisition_time_s", "rate_cap_hz"});
      read(d, "efficiency_nf", cfg.detector.efficiency_nf);
      read(d, "efficiency_ff", cfg.detector.efficiency_ff);
      read(d, "time_quantum_ns", cfg.detector.time_quantum_ns);
      read(d, "jitter_sigma_ns", cfg.detector.jitter_sigma_ns);
      read(d, "acquisition_time_s", cfg.detector.acquisition_time_s);
      read(d, "rate_cap_hz", cfg.detector.rate_cap_hz);
    }
    if (j.contains("source")) {
      const auto& s = j["source"];
      check_keys(s, "source", {"pair_rate_hz"});
      read(s, "pair_rate_hz", cfg.source.pair_rate_hz);
    }
    if (j.contains("background")) {
      const auto& b = j["background"];
      check_keys(b, "background",
                 {"rate_fraction", "reposition_period_s", "nf_sigma_px", "ff_sigma_px",
                  "center_margin"});
      read(b, "rate_fraction", cfg.background.rate_fraction);
      read(b, "reposition_period_s", cfg.background.reposition_period_s);
      read(b, "nf_sigma_px", cfg.background.nf_sigma_px);
      read(b, "ff_sigma_px", cfg.background.ff_sigma_px);
      read(b, "center_margin", cfg.background.center_margin);
    }
    if (j.contains("coincidence")) {
      const auto& c = j["coincidence"];
      check_keys(c, "coincidence",
                 {"window_ns", "shift_ns", "peak_width_ns", "histogram_bin_ns",
                  "histogram_range_ns"});
      read(c, "window_ns", cfg.coincidence.window_ns);
      read(c, "shift_ns", cfg.coincidence.shift_ns);
      read(c, "peak_width_ns", cfg.coincidence.peak_width_ns);
      read(c, "histogram_bin_ns", cfg.coincidence.histogram_bin_ns);
      read(c, "histogram_range_ns", cfg.coincidence.histogram_range_ns);
    }
    if (j.contains("reconstruction")) {
      const auto& r = j["reconstruction"];
      check_keys(r, "reconstruction",
                 {"bins_per_ff_pixel", "background_correction", "amplitude_mode", "mirror_pad",
                  "envelope", "reference_mode"});
      read(r, "bins_per_ff_pixel", cfg.reconstruction.bins_per_ff_pixel);
      read(r, "background_correction", cfg.reconstruction.background_correction);
      if (const auto it = r.find("amplitude_mode"); it != r.end()) {
        cfg.reconstruction.amplitude_mode = amplitude_mode_from(it->get<std::string>());
      }
      read(r, "mirror_pad", cfg.reconstruction.mirror_pad);
      if (const auto it = r.find("envelope"); it != r.end()) {
        cfg.reconstruction.envelope = envelope_from(it->get<std::string>());
      }
      if (const auto it = r.find("reference_mode"); it != r.end()) {
        cfg.reconstruction.reference_mode = reference_mode_from(it->get<std::string>());
      }
    }
    if (j.contains("evaluation")) {
      const auto& e = j["evaluation"];
      check_keys(e, "evaluation", {"erosion_px"});
      read(e, "erosion_px", cfg.evaluation.erosion_px);
    }
  } catch (const json::exception& e) {
    throw core::ConfigError(std::string("bad config value: ") + e.what());
  }
  return cfg;
}

std::string config_to_json(const PipelineConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  j["seed"] = cfg.seed;
  json t;
  t["kind"] = target_kind_name(cfg.target.kind);
  t["rows"] = cfg.target.rows;
  t["cols"] = cfg.target.cols;
  t["pitch"] = cfg.target.pitch;
  t["step_phase"] = cfg.target.step_phase;
  t["step_height"] = cfg.step_height;
  t["medium_index"] = cfg.medium_index;
  t["star_spokes"] = cfg.target.star_spokes;
  t["star_r_inner"] = cfg.target.star_r_inner;
  t["star_r_outer"] = cfg.target.star_r_outer;
  t["bar_period"] = cfg.target.bar_period;
  t["bump_sigma"] = cfg.target.bump_sigma;
  t["bump_peak"] = cfg.target.bump_peak;
  t["ramp_grad_x"] = cfg.target.ramp_grad_x;
  t["ramp_grad_y"] = cfg.target.ramp_grad_y;
  t["cell_seed"] = cfg.target.cell_seed;
  j["target"] = t;
  j["biphoton"] = {{"pump_wavelength", cfg.biphoton.pump_wavelength},
                   {"pump_width", cfg.biphoton.pump_width},
                   {"crystal_length", cfg.biphoton.crystal_length},
                   {"alpha", cfg.biphoton.alpha}};
  j["geometry"] = {{"nf_pixels", cfg.geometry.nf_pixels},
                   {"ff_pixels", cfg.geometry.ff_pixels},
                   {"camera_pixel_pitch", cfg.geometry.camera_pixel_pitch},
                   {"nf_magnification", cfg.geometry.nf_magnification},
                   {"ff_focal_length", cfg.geometry.ff_focal_length}};
  j["detector"] = {{"efficiency_nf", cfg.detector.efficiency_nf},
                   {"efficiency_ff", cfg.detector.efficiency_ff},
                   {"time_quantum_ns", cfg.detector.time_quantum_ns},
                   {"jitter_sigma_ns", cfg.detector.jitter_sigma_ns},
                   {"acquisition_time_s", cfg.detector.acquisition_time_s},
                   {"rate_cap_hz", cfg.detector.rate_cap_hz}};
  j["source"] = {{"pair_rate_hz", cfg.source.pair_rate_hz}};
  j["background"] = {{"rate_fraction", cfg.background.rate_fraction},
                     {"reposition_period_s", cfg.background.reposition_period_s},
                     {"nf_sigma_px", cfg.background.nf_sigma_px},
                     {"ff_sigma_px", cfg.background.ff_sigma_px},
                     {"center_margin", cfg.background.center_margin}};
  j["coincidence"] = {{"window_ns", cfg.coincidence.window_ns},
                      {"shift_ns", cfg.coincidence.shift_ns},
                      {"peak_width_ns", cfg.coincidence.peak_width_ns},
                      {"histogram_bin_ns", cfg.coincidence.histogram_bin_ns},
                      {"histogram_range_ns", cfg.coincidence.histogram_range_ns}};
  j["reconstruction"] = {{"bins_per_ff_pixel", cfg.reconstruction.bins_per_ff_pixel},
                         {"background_correction", cfg.reconstruction.background_correction},
                         {"amplitude_mode", amplitude_mode_name(cfg.reconstruction.amplitude_mode)},
                         {"mirror_pad", cfg.reconstruction.mirror_pad},
                         {"envelope", envelope_name(cfg.reconstruction.envelope)},
                         {"reference_mode", reference_mode_name(cfg.reconstruction.reference_mode)}};
  j["evaluation"] = {{"erosion_px", cfg.evaluation.erosion_px}};
  return j.dump(2) + "\n";
}

PipelineConfig load_config(const std::filesystem::path& path, const PipelineConfig& base) {
  std::ifstream in(path);
  if (!in) throw core::IoError("cannot open config: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return config_from_json(buffer.str(), base);
}

namespace {

PipelineConfig base_preset() {
  PipelineConfig cfg;
  cfg.detector.time_quantum_ns = 1.0;  // keeps the dt lattice fine against the window
  cfg.detector.jitter_sigma_ns = 3.0;
  cfg.detector.acquisition_time_s = 5.0;
  cfg.detector.rate_cap_hz = 1e7;
  cfg.source.pair_rate_hz = 3e5;
  cfg.background.rate_fraction = 0.0;
  return cfg;
}

double default_correlation_width(const PipelineConfig& cfg) {
  return std::sqrt(2.0 * cfg.biphoton.alpha * cfg.biphoton.crystal_length *
                   cfg.biphoton.pump_wavelength / M_PI);
}

PipelineConfig star_preset(double height_m, const std::string& name) {
  PipelineConfig cfg = base_preset();
  cfg.name = name;
  cfg.target.kind = optics::TargetKind::star;
  // 6 spokes keep every surviving mask arc wider than the 3 px erosion depth
  // over the annulus, so the step statistics have pixels to work with.
  cfg.target.star_spokes = 6;
  cfg.target.star_r_inner = 60e-6;
  cfg.target.star_r_outer = 170e-6;
  cfg.step_height = height_m;
  cfg.medium_index = 1.5;
  return cfg;
}

PipelineConfig bars_preset(double period_m, const std::string& name) {
  PipelineConfig cfg = base_preset();
  cfg.name = name;
  cfg.target.kind = optics::TargetKind::usaf_bars;
  cfg.target.bar_period = period_m;
  cfg.step_height = 200e-9;
  cfg.medium_index = 1.5;
  cfg.evaluation.erosion_px = 0;  // sub-pixel bars leave nothing after erosion
  return cfg;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"flat",        "star-50nm",  "star-100nm", "star-150nm",
          "star-200nm",  "star-250nm", "star-300nm", "star-350nm",
          "bars-wide",   "bars-narrow", "background", "cell"};
}

PipelineConfig preset_config(const std::string& name) {
  if (name == "flat") {
    PipelineConfig cfg = base_preset();
    cfg.name = "flat";
    return cfg;
  }
  if (name == "star-50nm") return star_preset(50e-9, name);
  if (name == "star-100nm") return star_preset(100e-9, name);
  if (name == "star-150nm") return star_preset(150e-9, name);
  if (name == "star-200nm") return star_preset(200e-9, name);
  if (name == "star-250nm") return star_preset(250e-9, name);
  if (name == "star-300nm") return star_preset(300e-9, name);
  if (name == "star-350nm") return star_preset(350e-9, name);
  if (name == "bars-wide" || name == "bars-narrow") {
    PipelineConfig probe = base_preset();
    const double width = default_correlation_width(probe);
    return bars_preset(name == "bars-wide" ? 4.0 * width : width, name);
  }
  if (name == "background") {
    PipelineConfig cfg = star_preset(200e-9, "background");
    cfg.source.pair_rate_hz = 5e6;
    cfg.detector.acquisition_time_s = 0.5;
    cfg.background.rate_fraction = 0.67;
    cfg.background.reposition_period_s = 100.0;  // static spot within one run
    cfg.background.nf_sigma_px = 5.0;
    cfg.background.ff_sigma_px = 5.0;
    cfg.background.center_margin = 0.25;
    return cfg;
  }
  if (name == "cell") {
    PipelineConfig cfg = base_preset();
    cfg.name = "cell";
    cfg.target.kind = optics::TargetKind::cell_like;
    cfg.target.cell_seed = 7;
    return cfg;
  }
  throw core::ConfigError("unknown preset '" + name + "'");
}

ResolvedConfig resolve(const PipelineConfig& cfg) {
  ResolvedConfig r;
  r.cfg = cfg;
  try {
    r.biphoton = optics::make_biphoton_params(cfg.biphoton.pump_wavelength,
                                              cfg.biphoton.pump_width,
                                              cfg.biphoton.crystal_length, cfg.biphoton.alpha);
    r.geometry = optics::make_geometry(cfg.geometry.ff_focal_length,
                                       cfg.geometry.camera_pixel_pitch,
                                       cfg.geometry.nf_magnification, cfg.geometry.nf_pixels,
                                       cfg.geometry.ff_pixels, r.biphoton.photon_wavelength);
    if (!(cfg.target.pitch > 0.0)) {
      throw core::ConfigError("target.pitch must be > 0");
    }
    if (cfg.target.pitch > 0.5 * r.biphoton.delta_r) {
      throw core::ConfigError("target.pitch must not exceed half the correlation width");
    }
    if (cfg.step_height > 0.0) {
      r.cfg.target.step_phase = optics::target_phase_from_height(
          cfg.step_height, cfg.medium_index, r.biphoton.photon_wavelength);
    } else if (cfg.step_height < 0.0) {
      throw core::ConfigError("target.step_height must be >= 0");
    }
    sim::validate_detector(cfg.detector);
    if (!(cfg.source.pair_rate_hz > 0.0)) {
      throw core::ConfigError("source.pair_rate_hz must be > 0");
    }
    if (!(cfg.coincidence.window_ns > 0.0)) {
      throw core::ConfigError("coincidence.window_ns must be > 0");
    }
    if (!(cfg.coincidence.peak_width_ns > 0.0)) {
      throw core::ConfigError("coincidence.peak_width_ns must be > 0");
    }
    if (!(cfg.coincidence.histogram_bin_ns > 0.0) ||
        !(cfg.coincidence.histogram_range_ns > 0.0)) {
      throw core::ConfigError("coincidence histogram bin and range must be > 0");
    }
    const double hist_bins =
        2.0 * cfg.coincidence.histogram_range_ns / cfg.coincidence.histogram_bin_ns;
    if (std::abs(hist_bins - std::round(hist_bins)) > 1e-9) {
      throw core::ConfigError("coincidence histogram bin must divide twice the range");
    }
    if (cfg.reconstruction.bins_per_ff_pixel < 1) {
      throw core::ConfigError("reconstruction.bins_per_ff_pixel must be >= 1");
    }
    if (cfg.evaluation.erosion_px < 0) {
      throw core::ConfigError("evaluation.erosion_px must be >= 0");
    }
    if (cfg.background.rate_fraction < 0.0) {
      throw core::ConfigError("background.rate_fraction must be >= 0");
    }
    if (cfg.background.rate_fraction > 0.0) {
      if (!(cfg.background.reposition_period_s > 0.0)) {
        throw core::ConfigError("background.reposition_period_s must be > 0");
      }
      if (!(cfg.background.nf_sigma_px > 0.0) || !(cfg.background.ff_sigma_px > 0.0)) {
        throw core::ConfigError("background spot sigmas must be > 0");
      }
      if (cfg.background.center_margin < 0.0 || cfg.background.center_margin >= 0.5) {
        throw core::ConfigError("background.center_margin must lie in [0, 0.5)");
      }
    }
  } catch (const core::ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw core::ConfigError(e.what());
  }
  return r;
}

}  // namespace qcpgm::pipeline
