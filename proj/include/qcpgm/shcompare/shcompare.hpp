#pragma once

#include <cstdint>
#include <vector>

namespace qcpgm::shcompare {

/// One-dimensional pure-phase profile sampled at cell centers across a field.
struct Profile1D {
  std::vector<double> phase;  // rad
  double pitch = 0.0;         // m per sample

  double x_of(int i) const { return (static_cast<double>(i) + 0.5) * pitch; }
};

/// Two gaussian phase bumps (0.8 rad at 65 um, 1.0 rad at 135 um, sigma 22 um
/// for the default 200 um field; positions and widths scale with the field).
Profile1D two_bump_profile(int samples, double field_width);
Profile1D flat_profile(int samples, double field_width);

/// Gradient sensors compared at matched spatial resolution: a correlation
/// sensor with a gaussian sampling window and a Shack-Hartmann lenslet array
/// with hard apertures.
enum class SensorKind { correlation, shack_hartmann };

struct ComparisonConfig {
  int nf_pixels = 10;              // gradient samples across the field
  double field_width = 200e-6;     // m
  double correlation_fwhm = 20e-6; // real-space fwhm of the gaussian window
  double lenslet_width = 20e-6;    // hard aperture width per lenslet
  double photons_per_pixel = 1e5;  // detected photons per gradient sample
  int repeats = 200;
  std::vector<int> ff_pixel_counts = {10, 11, 15, 20, 25, 30, 50, 75, 100};
  double span_fwhm_mult = 20.0;    // ff span as a multiple of the sensor's spot fwhm
  int fine_bins = 4096;            // quadrature resolution in k before pixel binning
  int profile_samples = 2000;
  std::uint64_t seed = 1;
};

void validate_comparison_config(const ComparisonConfig& cfg);

/// fwhm of |FT[window]|^2 in k (rad/m): gaussian window of real-space fwhm w
/// gives 2 sqrt(ln 2) * 2.3548 / w; a hard aperture of width a gives 5.5663 / a.
double correlation_spot_fwhm(double window_fwhm);
double shack_hartmann_spot_fwhm(double lenslet_width);

/// Far-field intensity |FT[W T]|^2 of the windowed profile for the sensor
/// window centered on gradient sample `pixel_index`, evaluated on `n_bins`
/// uniform k bins covering [-span/2, span/2). Unnormalized.
std::vector<double> windowed_ff_intensity(const Profile1D& profile, SensorKind kind,
                                          const ComparisonConfig& cfg, int pixel_index,
                                          double span, int n_bins);

/// Accumulates fine k bins into n_px equal detector pixels over the same span.
std::vector<double> bin_to_pixels(const std::vector<double>& fine, int n_px);

/// Centroid of a binned distribution over pixel centers of [-span/2, span/2).
double binned_centroid(const std::vector<double>& prob, double span);

/// Least-squares spectral integration of a sampled gradient. Mirror extension
/// (odd across the seam) suppresses periodic wrap; output is mean-zero.
std::vector<double> integrate_gradient_1d(const std::vector<double>& gradient, double pitch,
                                          bool mirror_pad = true);

/// Block means of the profile over n_blocks equal segments.
std::vector<double> block_mean(const Profile1D& profile, int n_blocks);

struct MethodCurve {
  std::vector<double> nrmse;        // per ff pixel count, mean over repeats
  std::vector<double> uncertainty;  // per count: across-repeat std, mean over pixels
  double spot_fwhm = 0.0;           // rad/m
  double span = 0.0;                // rad/m
};

struct ComparisonResult {
  std::vector<int> ff_pixel_counts;
  MethodCurve correlation;
  MethodCurve shack_hartmann;
  std::vector<double> truth;   // mean-zero block-mean phase, rad
  bool rms_normalized = false; // nrmse denominator fell back to the truth rms
};

/// Probe count whose second divided difference of nrmse(count) is largest,
/// i.e. where the error curve turns from steep descent to flat. Probes must
/// be an increasing subsequence of counts with at least three entries.
int knee_count(const std::vector<int>& counts, const std::vector<double>& nrmse,
               const std::vector<int>& probes);

/// Monte Carlo sweep over ff pixel counts for both sensors on the two-bump
/// profile. Deterministic for a fixed config (independent of thread count).
ComparisonResult run_comparison(const ComparisonConfig& cfg);

}  // namespace qcpgm::shcompare
