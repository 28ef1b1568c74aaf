#include "qcpgm/sim/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "qcpgm/core/parallel.hpp"
#include "qcpgm/core/rng.hpp"

namespace qcpgm::sim {

namespace {

constexpr std::uint64_t kTagPairsMaster = core::fnv1a64("pairs-master");
constexpr std::uint64_t kTagPairsPixel = core::fnv1a64("pairs-pixel");
constexpr std::uint64_t kTagBgArm = core::fnv1a64("bg-arm");
constexpr std::uint64_t kTagBgCenter = core::fnv1a64("bg-center");

std::uint64_t quantize_ns(double t_ns, double quantum_ns, double t_max_ns) {
  if (t_ns < 0.0) t_ns = 0.0;
  if (t_ns > t_max_ns) t_ns = t_max_ns;
  double q = std::floor(t_ns / quantum_ns) * quantum_ns;
  return static_cast<std::uint64_t>(std::llround(q));
}

std::size_t draw_from_cdf(const std::vector<double>& cdf, double u) {
  double x = u * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
  if (it == cdf.end()) --it;
  return static_cast<std::size_t>(it - cdf.begin());
}

void sort_stream(EventStream& s) {
  std::stable_sort(s.begin(), s.end(),
                   [](const PhotonEvent& a, const PhotonEvent& b) { return a.t_ns < b.t_ns; });
}

}  // namespace

void validate_detector(const DetectorModel& d) {
  if (d.efficiency_nf < 0.0 || d.efficiency_nf > 1.0 || d.efficiency_ff < 0.0 ||
      d.efficiency_ff > 1.0) {
    throw std::invalid_argument("detector: efficiencies must be in [0, 1]");
  }
  if (d.time_quantum_ns <= 0.0) throw std::invalid_argument("detector: time quantum must be > 0");
  if (d.jitter_sigma_ns < 0.0) throw std::invalid_argument("detector: jitter must be >= 0");
  if (d.acquisition_time_s <= 0.0) {
    throw std::invalid_argument("detector: acquisition time must be > 0");
  }
  if (d.rate_cap_hz <= 0.0) throw std::invalid_argument("detector: rate cap must be > 0");
}

SimResult simulate_pairs(const optics::ForwardModel& model, const DetectorModel& detector,
                         double pair_rate_hz, std::uint64_t seed) {
  validate_detector(detector);
  if (pair_rate_hz <= 0.0) throw std::invalid_argument("simulate_pairs: pair rate must be > 0");

  const int npx = model.geometry.nf_pixels;
  const int ffpx = model.geometry.ff_pixels;
  const double t_total_s = detector.acquisition_time_s;
  const double t_total_ns = t_total_s * 1e9;

  SimResult result;
  result.meta.rate_cap_exceeded =
      pair_rate_hz * std::max(detector.efficiency_nf, detector.efficiency_ff) >
      detector.rate_cap_hz;

  auto master = core::substream(seed, kTagPairsMaster);
  std::poisson_distribution<std::uint64_t> pair_count(pair_rate_hz * t_total_s);
  const std::uint64_t n_pairs = pair_count(master);
  result.meta.generated_pairs = n_pairs;
  if (n_pairs == 0) return result;

  std::vector<double> marginal_cdf;
  marginal_cdf.reserve(model.marginal.size());
  double acc = 0.0;
  for (double w : model.marginal.data()) {
    acc += w;
    marginal_cdf.push_back(acc);
  }

  std::vector<double> birth_ns(n_pairs);
  std::vector<std::uint32_t> pixel_of(n_pairs);
  for (std::uint64_t i = 0; i < n_pairs; ++i) {
    birth_ns[i] = core::u01(master) * t_total_ns;
    pixel_of[i] = static_cast<std::uint32_t>(draw_from_cdf(marginal_cdf, core::u01(master)));
  }

  // Group pair indices by nf pixel (counting sort keeps index order within
  // each pixel, which fixes the per-pixel substream consumption order).
  const std::size_t n_pixels = static_cast<std::size_t>(npx) * npx;
  std::vector<std::uint64_t> counts(n_pixels + 1, 0);
  for (std::uint64_t i = 0; i < n_pairs; ++i) ++counts[pixel_of[i] + 1];
  for (std::size_t p = 0; p < n_pixels; ++p) counts[p + 1] += counts[p];
  std::vector<std::uint64_t> by_pixel(n_pairs);
  {
    std::vector<std::uint64_t> cursor(counts.begin(), counts.end() - 1);
    for (std::uint64_t i = 0; i < n_pairs; ++i) by_pixel[cursor[pixel_of[i]]++] = i;
  }

  struct PairDraw {
    double t_nf = 0.0, t_ff = 0.0;
    std::uint32_t ff_bin = 0;
    bool nf_alive = false, ff_alive = false;
  };
  std::vector<PairDraw> draws(n_pairs);

  core::parallel_for(n_pixels, [&](std::size_t p) {
    std::uint64_t begin = counts[p], end = counts[p + 1];
    if (begin == end) return;
    const auto& cond = model.conditionals[p];
    if (cond.empty) {
      throw std::logic_error("simulate_pairs: pair assigned to an empty conditional");
    }
    std::vector<double> cdf;
    cdf.reserve(cond.prob.size());
    double s = 0.0;
    for (double w : cond.prob.data()) {
      s += w;
      cdf.push_back(s);
    }
    auto rng = core::substream(seed, kTagPairsPixel, p);
    std::normal_distribution<double> jitter(0.0, std::max(detector.jitter_sigma_ns, 1e-300));
    const bool has_jitter = detector.jitter_sigma_ns > 0.0;
    for (std::uint64_t slot = begin; slot < end; ++slot) {
      std::uint64_t i = by_pixel[slot];
      PairDraw& d = draws[i];
      d.ff_bin = static_cast<std::uint32_t>(draw_from_cdf(cdf, core::u01(rng)));
      d.nf_alive = core::u01(rng) < detector.efficiency_nf;
      d.ff_alive = core::u01(rng) < detector.efficiency_ff;
      double j_nf = has_jitter ? jitter(rng) : 0.0;
      double j_ff = has_jitter ? jitter(rng) : 0.0;
      d.t_nf = birth_ns[i] + j_nf;
      d.t_ff = birth_ns[i] + j_ff;
    }
  });

  result.nf.reserve(n_pairs);
  result.ff.reserve(n_pairs);
  for (std::uint64_t i = 0; i < n_pairs; ++i) {
    const PairDraw& d = draws[i];
    if (d.nf_alive) {
      PhotonEvent ev;
      ev.t_ns = quantize_ns(d.t_nf, detector.time_quantum_ns, t_total_ns);
      ev.x = static_cast<std::uint16_t>(pixel_of[i] % npx);
      ev.y = static_cast<std::uint16_t>(pixel_of[i] / npx);
      ev.region = Region::nf;
      result.nf.push_back(ev);
    }
    if (d.ff_alive) {
      PhotonEvent ev;
      ev.t_ns = quantize_ns(d.t_ff, detector.time_quantum_ns, t_total_ns);
      ev.x = static_cast<std::uint16_t>(d.ff_bin % ffpx);
      ev.y = static_cast<std::uint16_t>(d.ff_bin / ffpx);
      ev.region = Region::ff;
      result.ff.push_back(ev);
    }
    if (d.nf_alive && d.ff_alive) ++result.meta.detected_pairs;
  }
  sort_stream(result.nf);
  sort_stream(result.ff);
  result.meta.nf_events = result.nf.size();
  result.meta.ff_events = result.ff.size();
  return result;
}

SimResult simulate_background(const BackgroundModel& background, const DetectorModel& detector,
                              double pair_rate_hz, const optics::OpticalGeometry& geometry,
                              std::uint64_t seed) {
  validate_detector(detector);
  if (pair_rate_hz <= 0.0) throw std::invalid_argument("simulate_background: pair rate must be > 0");
  if (background.rate_fraction < 0.0) {
    throw std::invalid_argument("simulate_background: rate fraction must be >= 0");
  }
  if (background.reposition_period_s <= 0.0) {
    throw std::invalid_argument("simulate_background: reposition period must be > 0");
  }
  if (background.nf_sigma_px <= 0.0 || background.ff_sigma_px <= 0.0) {
    throw std::invalid_argument("simulate_background: spot sigma must be > 0");
  }
  if (background.center_margin < 0.0 || background.center_margin >= 0.5) {
    throw std::invalid_argument("simulate_background: center margin must be in [0, 0.5)");
  }

  SimResult result;
  const double t_total_s = detector.acquisition_time_s;
  const double t_total_ns = t_total_s * 1e9;
  if (background.rate_fraction == 0.0) return result;

  const std::size_t n_epochs =
      static_cast<std::size_t>(std::ceil(t_total_s / background.reposition_period_s));

  for (int arm = 0; arm < 2; ++arm) {
    const bool is_nf = arm == 0;
    const double eff = is_nf ? detector.efficiency_nf : detector.efficiency_ff;
    const int dim = is_nf ? geometry.nf_pixels : geometry.ff_pixels;
    const double sigma = is_nf ? background.nf_sigma_px : background.ff_sigma_px;
    const double rate = background.rate_fraction * pair_rate_hz * eff;
    if (rate <= 0.0) continue;
    if (rate > detector.rate_cap_hz) result.meta.rate_cap_exceeded = true;

    // Spot centers per reposition epoch, drawn from the central box.
    std::vector<double> cx(n_epochs), cy(n_epochs);
    for (std::size_t e = 0; e < n_epochs; ++e) {
      auto rng_e = core::substream(seed, kTagBgCenter, static_cast<std::uint64_t>(arm), e);
      double lo = background.center_margin * dim;
      double span = (1.0 - 2.0 * background.center_margin) * dim;
      cx[e] = lo + core::u01(rng_e) * span;
      cy[e] = lo + core::u01(rng_e) * span;
    }

    auto rng = core::substream(seed, kTagBgArm, static_cast<std::uint64_t>(arm));
    std::poisson_distribution<std::uint64_t> event_count(rate * t_total_s);
    const std::uint64_t n_events = event_count(rng);
    std::normal_distribution<double> unit_normal(0.0, 1.0);
    std::normal_distribution<double> jitter(0.0, std::max(detector.jitter_sigma_ns, 1e-300));
    const bool has_jitter = detector.jitter_sigma_ns > 0.0;

    EventStream& stream = is_nf ? result.nf : result.ff;
    stream.reserve(n_events);
    for (std::uint64_t i = 0; i < n_events; ++i) {
      double t_raw = core::u01(rng) * t_total_ns;
      std::size_t epoch = static_cast<std::size_t>(t_raw * 1e-9 / background.reposition_period_s);
      if (epoch >= n_epochs) epoch = n_epochs - 1;
      int px = 0, py = 0;
      for (int attempt = 0;; ++attempt) {
        double x = cx[epoch] + sigma * unit_normal(rng);
        double y = cy[epoch] + sigma * unit_normal(rng);
        px = static_cast<int>(std::floor(x));
        py = static_cast<int>(std::floor(y));
        if (px >= 0 && px < dim && py >= 0 && py < dim) break;
        if (attempt > 1000) {  // degenerate spot far outside the grid
          px = std::clamp(px, 0, dim - 1);
          py = std::clamp(py, 0, dim - 1);
          break;
        }
      }
      PhotonEvent ev;
      double j = has_jitter ? jitter(rng) : 0.0;
      ev.t_ns = quantize_ns(t_raw + j, detector.time_quantum_ns, t_total_ns);
      ev.x = static_cast<std::uint16_t>(px);
      ev.y = static_cast<std::uint16_t>(py);
      ev.region = is_nf ? Region::nf : Region::ff;
      stream.push_back(ev);
    }
    sort_stream(stream);
  }
  result.meta.nf_events = result.nf.size();
  result.meta.ff_events = result.ff.size();
  return result;
}

}  // namespace qcpgm::sim
