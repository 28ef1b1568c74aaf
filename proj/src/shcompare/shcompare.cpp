#include "qcpgm/shcompare/shcompare.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "qcpgm/core/errors.hpp"
#include "qcpgm/core/fft.hpp"
#include "qcpgm/core/parallel.hpp"
#include "qcpgm/core/rng.hpp"

namespace qcpgm::shcompare {

namespace {

constexpr double kFwhmPerSigma = 2.3548200450309493;  // 2 sqrt(2 ln 2)
constexpr double kSincHalfMax = 1.3915573782533881;   // sinc^2(x) = 1/2
constexpr std::uint64_t kTagDraw = core::fnv1a64("shcompare-draw");

std::uint64_t encode_task(int count_index, int method, int pixel) {
  return (static_cast<std::uint64_t>(count_index) << 20) |
         (static_cast<std::uint64_t>(method) << 10) | static_cast<std::uint64_t>(pixel);
}

std::vector<std::int64_t> multinomial(std::mt19937_64& rng, std::int64_t n,
                                      const std::vector<double>& prob) {
  std::vector<std::int64_t> out(prob.size(), 0);
  double remaining_mass = std::accumulate(prob.begin(), prob.end(), 0.0);
  std::int64_t remaining = n;
  for (std::size_t j = 0; j + 1 < prob.size() && remaining > 0; ++j) {
    if (remaining_mass <= 0.0) break;
    const double q = std::clamp(prob[j] / remaining_mass, 0.0, 1.0);
    std::binomial_distribution<std::int64_t> draw(remaining, q);
    const std::int64_t k = draw(rng);
    out[j] = k;
    remaining -= k;
    remaining_mass -= prob[j];
  }
  if (remaining > 0) out.back() += remaining;
  return out;
}

}  // namespace

Profile1D two_bump_profile(int samples, double field_width) {
  if (samples < 2 || field_width <= 0.0) {
    throw std::invalid_argument("two_bump_profile: bad sampling");
  }
  Profile1D p;
  p.pitch = field_width / samples;
  p.phase.resize(static_cast<std::size_t>(samples));
  const double x1 = 0.325 * field_width;
  const double x2 = 0.675 * field_width;
  const double sigma = 0.11 * field_width;
  for (int i = 0; i < samples; ++i) {
    const double x = p.x_of(i);
    const double d1 = (x - x1) / sigma;
    const double d2 = (x - x2) / sigma;
    p.phase[static_cast<std::size_t>(i)] =
        0.8 * std::exp(-0.5 * d1 * d1) + 1.0 * std::exp(-0.5 * d2 * d2);
  }
  return p;
}

Profile1D flat_profile(int samples, double field_width) {
  if (samples < 2 || field_width <= 0.0) {
    throw std::invalid_argument("flat_profile: bad sampling");
  }
  Profile1D p;
  p.pitch = field_width / samples;
  p.phase.assign(static_cast<std::size_t>(samples), 0.0);
  return p;
}

void validate_comparison_config(const ComparisonConfig& cfg) {
  if (cfg.nf_pixels < 2) throw std::invalid_argument("comparison: nf_pixels must be >= 2");
  if (cfg.field_width <= 0.0) throw std::invalid_argument("comparison: field_width must be > 0");
  if (cfg.correlation_fwhm <= 0.0 || cfg.lenslet_width <= 0.0) {
    throw std::invalid_argument("comparison: window widths must be > 0");
  }
  if (cfg.lenslet_width > cfg.field_width) {
    throw std::invalid_argument("comparison: lenslet wider than the field");
  }
  if (cfg.photons_per_pixel < 1.0) {
    throw std::invalid_argument("comparison: photons_per_pixel must be >= 1");
  }
  if (cfg.repeats < 2) throw std::invalid_argument("comparison: repeats must be >= 2");
  if (cfg.ff_pixel_counts.empty()) {
    throw std::invalid_argument("comparison: ff_pixel_counts is empty");
  }
  for (const int n : cfg.ff_pixel_counts) {
    if (n < 2) throw std::invalid_argument("comparison: ff pixel counts must be >= 2");
    if (n > cfg.fine_bins) {
      throw std::invalid_argument("comparison: ff pixel count exceeds quadrature bins");
    }
  }
  if (cfg.span_fwhm_mult <= 0.0) throw std::invalid_argument("comparison: span_fwhm_mult <= 0");
  if (cfg.fine_bins < 16) throw std::invalid_argument("comparison: fine_bins must be >= 16");
  if (cfg.profile_samples < cfg.nf_pixels) {
    throw std::invalid_argument("comparison: profile coarser than gradient sampling");
  }
}

double correlation_spot_fwhm(double window_fwhm) {
  if (window_fwhm <= 0.0) throw std::invalid_argument("correlation_spot_fwhm: width <= 0");
  const double sigma = window_fwhm / kFwhmPerSigma;
  return 2.0 * std::sqrt(std::log(2.0)) / sigma;
}

double shack_hartmann_spot_fwhm(double lenslet_width) {
  if (lenslet_width <= 0.0) throw std::invalid_argument("shack_hartmann_spot_fwhm: width <= 0");
  return 4.0 * kSincHalfMax / lenslet_width;
}

std::vector<double> windowed_ff_intensity(const Profile1D& profile, SensorKind kind,
                                          const ComparisonConfig& cfg, int pixel_index,
                                          double span, int n_bins) {
  if (pixel_index < 0 || pixel_index >= cfg.nf_pixels) {
    throw std::invalid_argument("windowed_ff_intensity: pixel out of range");
  }
  if (span <= 0.0 || n_bins < 2) {
    throw std::invalid_argument("windowed_ff_intensity: bad k sampling");
  }
  const double nf_pitch = cfg.field_width / cfg.nf_pixels;
  const double xc = (static_cast<double>(pixel_index) + 0.5) * nf_pitch;
  const double dk = span / n_bins;
  const double k0 = -0.5 * span + 0.5 * dk;
  const double sigma = cfg.correlation_fwhm / kFwhmPerSigma;

  std::vector<std::complex<double>> field(static_cast<std::size_t>(n_bins), {0.0, 0.0});
  const int samples = static_cast<int>(profile.phase.size());
  for (int i = 0; i < samples; ++i) {
    const double x = profile.x_of(i);
    double w = 0.0;
    if (kind == SensorKind::correlation) {
      const double d = (x - xc) / sigma;
      w = std::exp(-0.5 * d * d);
      if (w < 1e-8) continue;
    } else {
      if (std::abs(x - xc) > 0.5 * cfg.lenslet_width) continue;
      w = 1.0;
    }
    const std::complex<double> amp =
        std::polar(w * profile.pitch, profile.phase[static_cast<std::size_t>(i)]);
    std::complex<double> phasor = std::polar(1.0, -k0 * x);
    const std::complex<double> step = std::polar(1.0, -dk * x);
    for (int b = 0; b < n_bins; ++b) {
      field[static_cast<std::size_t>(b)] += amp * phasor;
      phasor *= step;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(n_bins));
  for (int b = 0; b < n_bins; ++b) {
    out[static_cast<std::size_t>(b)] = std::norm(field[static_cast<std::size_t>(b)]);
  }
  return out;
}

std::vector<double> bin_to_pixels(const std::vector<double>& fine, int n_px) {
  if (n_px < 1 || fine.empty()) throw std::invalid_argument("bin_to_pixels: bad arguments");
  std::vector<double> out(static_cast<std::size_t>(n_px), 0.0);
  const double scale = static_cast<double>(n_px) / static_cast<double>(fine.size());
  for (std::size_t b = 0; b < fine.size(); ++b) {
    int px = static_cast<int>(std::floor((static_cast<double>(b) + 0.5) * scale));
    px = std::clamp(px, 0, n_px - 1);
    out[static_cast<std::size_t>(px)] += fine[b];
  }
  return out;
}

double binned_centroid(const std::vector<double>& prob, double span) {
  const int n = static_cast<int>(prob.size());
  if (n < 1 || span <= 0.0) throw std::invalid_argument("binned_centroid: bad arguments");
  const double w = span / n;
  double mass = 0.0;
  double first = 0.0;
  for (int j = 0; j < n; ++j) {
    const double c = -0.5 * span + (static_cast<double>(j) + 0.5) * w;
    mass += prob[static_cast<std::size_t>(j)];
    first += prob[static_cast<std::size_t>(j)] * c;
  }
  if (mass <= 0.0) return 0.0;
  return first / mass;
}

std::vector<double> integrate_gradient_1d(const std::vector<double>& gradient, double pitch,
                                          bool mirror_pad) {
  const int n = static_cast<int>(gradient.size());
  if (n < 2) throw std::invalid_argument("integrate_gradient_1d: need at least two samples");
  if (pitch <= 0.0) throw std::invalid_argument("integrate_gradient_1d: pitch must be > 0");
  const int ext = mirror_pad ? 2 * n : n;
  std::vector<std::complex<double>> buf(static_cast<std::size_t>(ext), {0.0, 0.0});
  for (int j = 0; j < n; ++j) buf[static_cast<std::size_t>(j)] = gradient[static_cast<std::size_t>(j)];
  if (mirror_pad) {
    // odd across the half-sample seam so the extension stays a periodic gradient
    for (int j = 0; j < n; ++j) {
      buf[static_cast<std::size_t>(2 * n - 1 - j)] = -gradient[static_cast<std::size_t>(j)];
    }
  }
  core::fft1(buf.data(), ext, core::kFftForward);
  for (int idx = 0; idx < ext; ++idx) {
    const int f = (idx <= ext / 2) ? idx : idx - ext;
    if (f == 0) {
      buf[static_cast<std::size_t>(idx)] = {0.0, 0.0};
      continue;
    }
    const double u = 2.0 * M_PI * static_cast<double>(f) / (static_cast<double>(ext) * pitch);
    const std::complex<double> g = buf[static_cast<std::size_t>(idx)];
    buf[static_cast<std::size_t>(idx)] = {g.imag() / u, -g.real() / u};
  }
  core::fft1(buf.data(), ext, core::kFftBackward);
  std::vector<double> out(static_cast<std::size_t>(n));
  double mean = 0.0;
  for (int j = 0; j < n; ++j) {
    out[static_cast<std::size_t>(j)] = buf[static_cast<std::size_t>(j)].real() / ext;
    mean += out[static_cast<std::size_t>(j)];
  }
  mean /= n;
  for (double& v : out) v -= mean;
  return out;
}

std::vector<double> block_mean(const Profile1D& profile, int n_blocks) {
  const int n = static_cast<int>(profile.phase.size());
  if (n_blocks < 1 || n < n_blocks) throw std::invalid_argument("block_mean: bad block count");
  std::vector<double> sum(static_cast<std::size_t>(n_blocks), 0.0);
  std::vector<std::int64_t> cnt(static_cast<std::size_t>(n_blocks), 0);
  for (int i = 0; i < n; ++i) {
    int b = static_cast<int>(
        std::floor((static_cast<double>(i) + 0.5) * n_blocks / static_cast<double>(n)));
    b = std::clamp(b, 0, n_blocks - 1);
    sum[static_cast<std::size_t>(b)] += profile.phase[static_cast<std::size_t>(i)];
    ++cnt[static_cast<std::size_t>(b)];
  }
  for (int b = 0; b < n_blocks; ++b) {
    sum[static_cast<std::size_t>(b)] /= static_cast<double>(cnt[static_cast<std::size_t>(b)]);
  }
  return sum;
}

int knee_count(const std::vector<int>& counts, const std::vector<double>& nrmse,
               const std::vector<int>& probes) {
  if (counts.size() != nrmse.size()) throw std::invalid_argument("knee_count: size mismatch");
  if (probes.size() < 3) throw std::invalid_argument("knee_count: need at least three probes");
  if (!std::is_sorted(probes.begin(), probes.end(), std::less_equal<int>())) {
    throw std::invalid_argument("knee_count: probes must be strictly increasing");
  }
  std::vector<double> x, y;
  for (const int p : probes) {
    const auto it = std::find(counts.begin(), counts.end(), p);
    if (it == counts.end()) throw std::invalid_argument("knee_count: probe not in counts");
    x.push_back(static_cast<double>(p));
    y.push_back(nrmse[static_cast<std::size_t>(it - counts.begin())]);
  }
  int best = -1;
  double best_curvature = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    const double left = (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
    const double right = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    const double curvature = right - left;
    if (curvature > best_curvature) {
      best_curvature = curvature;
      best = static_cast<int>(std::lround(x[i]));
    }
  }
  return best;
}

ComparisonResult run_comparison(const ComparisonConfig& cfg) {
  validate_comparison_config(cfg);
  const Profile1D profile = two_bump_profile(cfg.profile_samples, cfg.field_width);
  const int n_nf = cfg.nf_pixels;
  const double nf_pitch = cfg.field_width / n_nf;
  const std::int64_t photons = std::llround(cfg.photons_per_pixel);

  ComparisonResult result;
  result.ff_pixel_counts = cfg.ff_pixel_counts;
  result.truth = block_mean(profile, n_nf);
  double truth_mean = std::accumulate(result.truth.begin(), result.truth.end(), 0.0) / n_nf;
  for (double& v : result.truth) v -= truth_mean;
  double truth_rms = 0.0;
  for (const double v : result.truth) truth_rms += v * v;
  truth_rms = std::sqrt(truth_rms / n_nf);
  if (truth_rms <= 0.0) throw core::NumericError("run_comparison: truth profile is constant");
  result.rms_normalized = true;  // a gradient sensor recovers phase up to a constant

  struct MethodSetup {
    SensorKind kind;
    MethodCurve* curve;
  };
  result.correlation.spot_fwhm = correlation_spot_fwhm(cfg.correlation_fwhm);
  result.shack_hartmann.spot_fwhm = shack_hartmann_spot_fwhm(cfg.lenslet_width);
  result.correlation.span = cfg.span_fwhm_mult * result.correlation.spot_fwhm;
  result.shack_hartmann.span = cfg.span_fwhm_mult * result.shack_hartmann.spot_fwhm;
  const MethodSetup methods[2] = {{SensorKind::correlation, &result.correlation},
                                  {SensorKind::shack_hartmann, &result.shack_hartmann}};

  // fine-grained conditional far-field distribution per gradient sample
  std::vector<std::vector<double>> fine(2ul * static_cast<std::size_t>(n_nf));
  core::parallel_for(2 * n_nf, [&](int task) {
    const int m = task / n_nf;
    const int px = task % n_nf;
    fine[static_cast<std::size_t>(task)] = windowed_ff_intensity(
        profile, methods[m].kind, cfg, px, methods[m].curve->span, cfg.fine_bins);
  });

  const int n_counts = static_cast<int>(cfg.ff_pixel_counts.size());
  for (int m = 0; m < 2; ++m) {
    methods[m].curve->nrmse.assign(static_cast<std::size_t>(n_counts), 0.0);
    methods[m].curve->uncertainty.assign(static_cast<std::size_t>(n_counts), 0.0);
  }

  std::vector<double> recon(2ul * static_cast<std::size_t>(cfg.repeats) *
                            static_cast<std::size_t>(n_nf));
  for (int ci = 0; ci < n_counts; ++ci) {
    const int n_px = cfg.ff_pixel_counts[static_cast<std::size_t>(ci)];
    std::vector<std::vector<double>> prob(2ul * static_cast<std::size_t>(n_nf));
    for (int task = 0; task < 2 * n_nf; ++task) {
      prob[static_cast<std::size_t>(task)] =
          bin_to_pixels(fine[static_cast<std::size_t>(task)], n_px);
    }
    core::parallel_for(cfg.repeats, [&](int rep) {
      std::vector<double> gradient(static_cast<std::size_t>(n_nf));
      for (int m = 0; m < 2; ++m) {
        const double span = methods[m].curve->span;
        for (int px = 0; px < n_nf; ++px) {
          auto rng = core::substream(cfg.seed, kTagDraw, static_cast<std::uint64_t>(rep),
                                     encode_task(ci, m, px));
          const auto counts =
              multinomial(rng, photons, prob[static_cast<std::size_t>(m * n_nf + px)]);
          const double w = span / n_px;
          double first = 0.0;
          for (int j = 0; j < n_px; ++j) {
            const double c = -0.5 * span + (static_cast<double>(j) + 0.5) * w;
            first += c * static_cast<double>(counts[static_cast<std::size_t>(j)]);
          }
          gradient[static_cast<std::size_t>(px)] = first / static_cast<double>(photons);
        }
        const auto phi = integrate_gradient_1d(gradient, nf_pitch, true);
        double* dst = recon.data() + (static_cast<std::size_t>(m) * cfg.repeats + rep) *
                                         static_cast<std::size_t>(n_nf);
        std::copy(phi.begin(), phi.end(), dst);
      }
    });
    for (int m = 0; m < 2; ++m) {
      double nrmse_sum = 0.0;
      for (int rep = 0; rep < cfg.repeats; ++rep) {
        const double* v = recon.data() + (static_cast<std::size_t>(m) * cfg.repeats + rep) *
                                             static_cast<std::size_t>(n_nf);
        double sq = 0.0;
        for (int px = 0; px < n_nf; ++px) {
          const double d = v[px] - result.truth[static_cast<std::size_t>(px)];
          sq += d * d;
        }
        nrmse_sum += std::sqrt(sq / n_nf) / truth_rms;
      }
      methods[m].curve->nrmse[static_cast<std::size_t>(ci)] = nrmse_sum / cfg.repeats;
      double std_sum = 0.0;
      for (int px = 0; px < n_nf; ++px) {
        double mean = 0.0, sq = 0.0;
        for (int rep = 0; rep < cfg.repeats; ++rep) {
          const double v = recon[(static_cast<std::size_t>(m) * cfg.repeats + rep) *
                                     static_cast<std::size_t>(n_nf) +
                                 static_cast<std::size_t>(px)];
          mean += v;
          sq += v * v;
        }
        mean /= cfg.repeats;
        std_sum += std::sqrt(std::max(0.0, sq / cfg.repeats - mean * mean));
      }
      methods[m].curve->uncertainty[static_cast<std::size_t>(ci)] = std_sum / n_nf;
    }
  }
  return result;
}

}  // namespace qcpgm::shcompare
