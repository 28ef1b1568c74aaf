#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qcpgm/optics/biphoton.hpp"
#include "qcpgm/optics/forward_model.hpp"
#include "qcpgm/optics/geometry.hpp"
#include "qcpgm/optics/target.hpp"
#include "qcpgm/recon/amplitude.hpp"
#include "qcpgm/sim/detector.hpp"
#include "qcpgm/sim/simulate.hpp"

namespace qcpgm::pipeline {

struct BiphotonSettings {
  double pump_wavelength = 405e-9;  // m
  double pump_width = 500e-6;       // m
  double crystal_length = 1e-3;     // m
  double alpha = 0.455;
};

struct GeometrySettings {
  int nf_pixels = 48;
  int ff_pixels = 48;
  double camera_pixel_pitch = 55e-6;  // m
  double nf_magnification = 6.875;    // nf sample pitch = 8 um
  // Sets ff_half_aperture = (2 pi / lambda)(ff_pixels/2 * pitch)/f ~ 2.8e5
  // rad/m, about 4 sigma of the clear-aperture conditional spot. A phase step
  // diffracts light into 1/k tails; the collected fraction of that light sets
  // how far below the true step the recovered step lands, and this aperture
  // maximizes the linearity of the response.
  double ff_focal_length = 0.037;     // m
};

struct SourceSettings {
  double pair_rate_hz = 3e5;  // emitted pair rate
};

struct CoincidenceSettings {
  double window_ns = 20.0;
  double shift_ns = -50.0;  // accidental-sampling window displacement
  double peak_width_ns = 8.0;
  double histogram_bin_ns = 2.0;
  double histogram_range_ns = 100.0;
};

/// Reference (clear-aperture) centroids: `simulated` runs the full chain on a
/// flat target with an independent seed; `analytic` uses the exact zeros of
/// the symmetric clear-aperture distribution.
enum class ReferenceMode { simulated, analytic };

struct ReconSettings {
  int bins_per_ff_pixel = 4;
  bool background_correction = true;
  recon::AmplitudeMode amplitude_mode = recon::AmplitudeMode::coincidence;
  bool mirror_pad = true;
  optics::EnvelopeMode envelope = optics::EnvelopeMode::constant;
  ReferenceMode reference_mode = ReferenceMode::simulated;
};

struct EvaluationSettings {
  // Feature-mask erosion before step/error statistics. Eroding 3 px (24 um at
  // the default nf pitch) keeps mask pixels ~3 correlation half-widths clear
  // of phase boundaries, where plateau mixing is below a percent.
  int erosion_px = 3;
};

struct PipelineConfig {
  std::string name = "custom";
  std::uint64_t seed = 1;
  optics::TargetSpec target{optics::TargetKind::flat, 144, 144, 8e-6 / 3.0};
  double step_height = 0.0;   // m; when > 0 resolves target.step_phase
  double medium_index = 1.5;  // refractive index of stepped features
  BiphotonSettings biphoton;
  GeometrySettings geometry;
  sim::DetectorModel detector;
  SourceSettings source;
  sim::BackgroundModel background;  // rate_fraction 0 disables stray light
  CoincidenceSettings coincidence;
  ReconSettings reconstruction;
  EvaluationSettings evaluation;
};

/// Parses a config JSON document on top of `base`. Every key is optional and
/// falls back to the base value; unknown keys are rejected. Throws
/// core::ConfigError.
PipelineConfig config_from_json(const std::string& text,
                                const PipelineConfig& base = PipelineConfig{});
std::string config_to_json(const PipelineConfig& cfg);
PipelineConfig load_config(const std::filesystem::path& path,
                           const PipelineConfig& base = PipelineConfig{});

std::vector<std::string> preset_names();
/// Throws core::ConfigError for unknown names.
PipelineConfig preset_config(const std::string& name);

/// Config with physical parameters validated and derived quantities resolved.
struct ResolvedConfig {
  PipelineConfig cfg;  // target.step_phase resolved from step_height
  optics::BiphotonParams biphoton;
  optics::OpticalGeometry geometry;
};

/// Throws core::ConfigError with the offending field on any invalid value.
ResolvedConfig resolve(const PipelineConfig& cfg);

}  // namespace qcpgm::pipeline
