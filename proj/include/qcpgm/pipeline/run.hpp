#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qcpgm/coincidence/pairing.hpp"
#include "qcpgm/pipeline/config.hpp"
#include "qcpgm/recon/amplitude.hpp"
#include "qcpgm/recon/centroids.hpp"
#include "qcpgm/recon/gradient.hpp"
#include "qcpgm/recon/integrate.hpp"
#include "qcpgm/shcompare/shcompare.hpp"

namespace qcpgm::pipeline {

optics::ComplexTarget build_target(const ResolvedConfig& rc);
optics::ForwardModel build_model(const ResolvedConfig& rc, const optics::ComplexTarget& target);

/// A clear-aperture variant of the config: flat target, no background.
/// Used for the reference arm and as the background-free baseline chain.
ResolvedConfig reference_variant(const ResolvedConfig& rc);

/// One acquisition: correlated pairs plus stray light, per-arm streams merged
/// and also kept split by origin for diagnostics and classical comparisons.
struct Acquisition {
  sim::EventStream nf;  // merged, sorted
  sim::EventStream ff;
  sim::EventStream signal_nf, signal_ff;
  sim::EventStream background_nf, background_ff;
  sim::SimMetadata pair_meta;
};

Acquisition acquire(const ResolvedConfig& rc, const optics::ForwardModel& model,
                    std::uint64_t seed);

struct CoincidenceResult {
  std::vector<coincidence::CoincidencePair> in_window;
  std::vector<coincidence::CoincidencePair> shifted;  // accidental sample, tagged background
  coincidence::DtHistogram histogram;
  bool shift_warning = false;
};

CoincidenceResult pair_events(const ResolvedConfig& rc, const sim::EventStream& nf,
                              const sim::EventStream& ff);

/// Measured centroids, optionally with the shifted-window sample subtracted.
recon::CentroidMap measured_centroids(const ResolvedConfig& rc, const CoincidenceResult& coin,
                                      bool background_correction);

/// Reference (no-sample) data for gradient and amplitude normalization.
struct ReferenceData {
  recon::CentroidMap centroids;
  core::Grid2D<double> amp_counts;  // per-pixel counts matching the amplitude mode
};

/// `simulated` mode runs the clear-aperture chain on a decorrelated seed;
/// `analytic` mode uses exact zero centroids and expected flat-target counts
/// scaled to `measured_total` (sum of the measured amplitude counts).
ReferenceData make_reference(const ResolvedConfig& rc, const optics::ForwardModel& flat_model,
                             double measured_total);

struct Reconstruction {
  recon::CentroidMap measured;
  recon::GradientField gradient;
  recon::PhaseMap phase;
  recon::AmplitudeImage amplitude;
};

/// Gradient, phase and amplitude from paired events against a reference.
Reconstruction reconstruct(const ResolvedConfig& rc, const CoincidenceResult& coin,
                           const sim::EventStream& nf_merged, const ReferenceData& ref,
                           bool background_correction);

struct ExperimentResult {
  optics::ComplexTarget target;
  Acquisition acquisition;
  CoincidenceResult coincidences;
  ReferenceData reference;
  Reconstruction recon;
};

/// Full chain: target, forward model, acquisition, pairing, reference,
/// reconstruction. Deterministic for a fixed config.
ExperimentResult run_experiment(const ResolvedConfig& rc);

struct Evaluation {
  double nrmse = 0.0;          // mean-aligned phase error over the eroded valid mask
  bool absolute_error = false; // true when the truth mean vanishes (error in rad)
  double step = 0.0;           // measured high-low phase difference
  double step_stddev = 0.0;
  double expected_step = 0.0;
  double contrast = 0.0;       // step / expected_step, 0 when expected_step is 0
  std::int64_t mask_pixels = 0;
  bool has_step = false;       // feature masks were non-empty
};

Evaluation evaluate_phase(const ResolvedConfig& rc, const optics::ComplexTarget& target,
                          const recon::PhaseMap& phase);

/// Classical (time-insensitive) per-pixel association: every true pair keeps
/// its far-field sample, while each background near-field detection draws a
/// far-field pixel from the observed global far-field distribution.
recon::CentroidMap classical_mixture_centroids(const ResolvedConfig& rc, const Acquisition& acq);

/// Four read-outs of one background-contaminated acquisition. The baseline
/// strips the background streams and reruns the corrected chain, so all
/// variants share the same signal realization.
struct BackgroundStudy {
  double nrmse_baseline = 0.0;
  double nrmse_singles_style = 0.0;
  double nrmse_coincidence_only = 0.0;
  double nrmse_corrected = 0.0;
  double accidental_fraction = 0.0;  // shifted-window pairs / in-window pairs
};

BackgroundStudy run_background_study(const ResolvedConfig& rc);

/// File-producing runners shared by the command-line tool. All return the
/// files they wrote (absolute or dir-relative as given).
std::vector<std::filesystem::path> run_gen_target(const ResolvedConfig& rc,
                                                  const std::filesystem::path& dir);
std::vector<std::filesystem::path> run_simulate(const ResolvedConfig& rc,
                                                const std::filesystem::path& dir,
                                                bool write_csv);
std::vector<std::filesystem::path> run_coincidences(const ResolvedConfig& rc,
                                                    const std::filesystem::path& dir);
std::vector<std::filesystem::path> run_centroids(const ResolvedConfig& rc,
                                                 const std::filesystem::path& dir,
                                                 bool background_correction);
std::vector<std::filesystem::path> run_reconstruct(const ResolvedConfig& rc,
                                                   const std::filesystem::path& dir,
                                                   bool background_correction);
std::vector<std::filesystem::path> run_evaluate(const ResolvedConfig& rc,
                                                const std::filesystem::path& dir);
std::vector<std::filesystem::path> run_compare_sh(const shcompare::ComparisonConfig& cfg,
                                                  const std::filesystem::path& dir);
/// Full chain in one process, then a manifest with checksums of every output.
std::vector<std::filesystem::path> run_pipeline(const ResolvedConfig& rc,
                                                const std::filesystem::path& dir,
                                                bool background_correction);

void write_manifest(const ResolvedConfig& rc, const std::filesystem::path& dir,
                    const std::vector<std::filesystem::path>& files);

}  // namespace qcpgm::pipeline
