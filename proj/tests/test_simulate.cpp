#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "qcpgm/coincidence/pairing.hpp"
#include "qcpgm/optics/forward_model.hpp"
#include "qcpgm/sim/simulate.hpp"

using namespace qcpgm;

namespace {

const optics::ForwardModel& flat_model() {
  static const optics::ForwardModel model = [] {
    optics::TargetSpec spec;
    spec.kind = optics::TargetKind::flat;
    spec.rows = spec.cols = 36;
    spec.pitch = 8e-6 / 3.0;
    const auto t = optics::gen_target(spec);
    const auto p = optics::make_biphoton_params(405e-9, 500e-6, 1e-3, 0.455);
    const auto g = optics::make_geometry(0.0186, 55e-6, 6.875, 12, 48, 810e-9);
    return optics::build_forward_model(t, p, g);
  }();
  return model;
}

sim::DetectorModel fast_detector() {
  sim::DetectorModel d;
  d.time_quantum_ns = 1.0;
  d.jitter_sigma_ns = 3.0;
  d.acquisition_time_s = 0.05;
  d.rate_cap_hz = 1e7;
  return d;
}

}  // namespace

TEST_CASE("pair simulation is reproducible for a fixed seed") {
  const auto a = sim::simulate_pairs(flat_model(), fast_detector(), 2e5, 42);
  const auto b = sim::simulate_pairs(flat_model(), fast_detector(), 2e5, 42);
  CHECK(a.nf == b.nf);
  CHECK(a.ff == b.ff);
  CHECK(a.meta.generated_pairs == b.meta.generated_pairs);

  const auto c = sim::simulate_pairs(flat_model(), fast_detector(), 2e5, 43);
  CHECK(!(a.nf == c.nf));
}

TEST_CASE("pair counts follow the poisson rate and thinning efficiencies") {
  auto det = fast_detector();
  det.efficiency_nf = 0.8;
  det.efficiency_ff = 0.5;
  det.acquisition_time_s = 0.5;
  const double rate = 2e5;
  const auto r = sim::simulate_pairs(flat_model(), det, rate, 7);

  const double mean = rate * det.acquisition_time_s;  // 1e5
  CHECK(std::abs(static_cast<double>(r.meta.generated_pairs) - mean) < 4.0 * std::sqrt(mean));

  const double g = static_cast<double>(r.meta.generated_pairs);
  CHECK(std::abs(static_cast<double>(r.nf.size()) - 0.8 * g) <
        4.0 * std::sqrt(0.8 * 0.2 * g));
  CHECK(std::abs(static_cast<double>(r.ff.size()) - 0.5 * g) <
        4.0 * std::sqrt(0.5 * 0.5 * g));
  // both-detected pairs: product of the efficiencies
  CHECK(std::abs(static_cast<double>(r.meta.detected_pairs) - 0.4 * g) <
        4.0 * std::sqrt(0.4 * 0.6 * g));
  CHECK(r.meta.nf_events == r.nf.size());
  CHECK(r.meta.ff_events == r.ff.size());
  CHECK(!r.meta.rate_cap_exceeded);
}

TEST_CASE("streams are sorted and confined to the acquisition window") {
  const auto r = sim::simulate_pairs(flat_model(), fast_detector(), 3e5, 11);
  CHECK(sim::stream_is_sorted(r.nf));
  CHECK(sim::stream_is_sorted(r.ff));
  const std::uint64_t limit =
      static_cast<std::uint64_t>(fast_detector().acquisition_time_s * 1e9) + 1000;
  for (const auto& e : r.nf) {
    REQUIRE(e.t_ns <= limit);
    REQUIRE(e.region == sim::Region::nf);
    REQUIRE(e.x < 12);
    REQUIRE(e.y < 12);
  }
  for (const auto& e : r.ff) {
    REQUIRE(e.region == sim::Region::ff);
    REQUIRE(e.x < 48);
    REQUIRE(e.y < 48);
  }
}

TEST_CASE("timestamps land on the quantization lattice when jitter is off") {
  auto det = fast_detector();
  det.jitter_sigma_ns = 0.0;
  det.time_quantum_ns = 8.0;
  const auto r = sim::simulate_pairs(flat_model(), det, 2e5, 3);
  REQUIRE(!r.nf.empty());
  for (const auto& e : r.nf) REQUIRE(e.t_ns % 8 == 0);
  for (const auto& e : r.ff) REQUIRE(e.t_ns % 8 == 0);
}

TEST_CASE("near-field pixel frequencies match the sampling marginal") {
  auto det = fast_detector();
  det.acquisition_time_s = 1.0;
  const auto& model = flat_model();
  const auto r = sim::simulate_pairs(model, det, 3e5, 5);

  core::Grid2D<double> hist(12, 12, 0.0);
  for (const auto& e : r.nf) hist(e.y, e.x) += 1.0;
  const double n = static_cast<double>(r.nf.size());
  double chi2 = 0.0;
  for (int y = 0; y < 12; ++y) {
    for (int x = 0; x < 12; ++x) {
      const double expect = model.marginal(y, x) * n;
      REQUIRE(expect > 20.0);
      const double d = hist(y, x) - expect;
      chi2 += d * d / expect;
    }
  }
  // 143 dof: mean 143, sd ~17; generous 6-sigma band
  CHECK(chi2 > 143.0 - 6.0 * 17.0);
  CHECK(chi2 < 143.0 + 6.0 * 17.0);
}

TEST_CASE("far-field pixel frequencies match the mixture of conditionals") {
  auto det = fast_detector();
  det.acquisition_time_s = 1.0;
  const auto& model = flat_model();
  const auto r = sim::simulate_pairs(model, det, 3e5, 9);

  core::Grid2D<double> expect(48, 48, 0.0);
  for (int iy = 0; iy < 12; ++iy) {
    for (int ix = 0; ix < 12; ++ix) {
      const auto& cond = model.conditional(ix, iy);
      const double w = model.marginal(iy, ix);
      for (std::size_t i = 0; i < cond.prob.size(); ++i) {
        expect[i] += w * cond.prob[i];
      }
    }
  }
  core::Grid2D<double> hist(48, 48, 0.0);
  for (const auto& e : r.ff) hist(e.y, e.x) += 1.0;
  const double n = static_cast<double>(r.ff.size());

  // chi-square over the well-populated pixels
  double chi2 = 0.0;
  int dof = 0;
  for (std::size_t i = 0; i < expect.size(); ++i) {
    const double e = expect[i] * n;
    if (e < 25.0) continue;
    const double d = hist[i] - e;
    chi2 += d * d / e;
    ++dof;
  }
  REQUIRE(dof > 100);
  CHECK(chi2 > dof - 6.0 * std::sqrt(2.0 * dof));
  CHECK(chi2 < dof + 6.0 * std::sqrt(2.0 * dof));
}

TEST_CASE("pair time differences carry the jitter and quantization width") {
  auto det = fast_detector();
  det.acquisition_time_s = 0.5;
  const auto r = sim::simulate_pairs(flat_model(), det, 1e5, 21);
  const auto pairs = coincidence::find_coincidences(r.nf, r.ff, {0.0, 40.0});
  REQUIRE(pairs.size() > 10000);
  double sum = 0.0, sq = 0.0;
  for (const auto& p : pairs) {
    sum += static_cast<double>(p.dt_ns);
    sq += static_cast<double>(p.dt_ns) * static_cast<double>(p.dt_ns);
  }
  const double n = static_cast<double>(pairs.size());
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  // two independent 3 ns jitters plus two uniform 1 ns quantizers
  const double expect_sd = std::sqrt(2.0 * 9.0 + 2.0 / 12.0);
  CHECK(std::abs(mean) < 0.2);
  CHECK(sd == doctest::Approx(expect_sd).epsilon(0.05));
}

TEST_CASE("background streams form a repositioning gaussian spot") {
  sim::BackgroundModel bg;
  bg.rate_fraction = 0.5;
  bg.reposition_period_s = 0.05;
  bg.nf_sigma_px = 1.5;
  bg.ff_sigma_px = 2.0;
  bg.center_margin = 0.25;
  auto det = fast_detector();
  det.acquisition_time_s = 0.3;
  const auto g = optics::make_geometry(0.0186, 55e-6, 6.875, 48, 48, 810e-9);
  const auto r = sim::simulate_background(bg, det, 2e5, g, 13);

  const double mean = 0.5 * 2e5 * 0.3;
  CHECK(std::abs(static_cast<double>(r.nf.size()) - mean) < 4.0 * std::sqrt(mean));
  CHECK(std::abs(static_cast<double>(r.ff.size()) - mean) < 4.0 * std::sqrt(mean));
  CHECK(sim::stream_is_sorted(r.nf));
  CHECK(sim::stream_is_sorted(r.ff));

  // epoch means wander (the spot repositions), but stay inside the margin box
  std::map<std::uint64_t, std::pair<double, int>> epochs;
  for (const auto& e : r.nf) {
    auto& [sx, n] = epochs[e.t_ns / 50'000'000ull];
    sx += e.x;
    n += 1;
  }
  REQUIRE(epochs.size() >= 5);
  double lo = 1e9, hi = -1e9;
  for (const auto& [k, v] : epochs) {
    const double m = v.first / v.second;
    lo = std::min(lo, m);
    hi = std::max(hi, m);
    CHECK(m > 0.25 * 48 - 4.0);
    CHECK(m < 0.75 * 48 + 4.0);
  }
  CHECK(hi - lo > 1.0);  // at least two distinct spot centers

  // reproducible
  const auto r2 = sim::simulate_background(bg, det, 2e5, g, 13);
  CHECK(r.nf == r2.nf);
  CHECK(r.ff == r2.ff);
}

TEST_CASE("background spot width tracks the configured sigma") {
  sim::BackgroundModel bg;
  bg.rate_fraction = 1.0;
  bg.reposition_period_s = 100.0;  // single epoch
  bg.nf_sigma_px = 3.0;
  bg.ff_sigma_px = 5.0;
  auto det = fast_detector();
  det.acquisition_time_s = 0.5;
  const auto g = optics::make_geometry(0.0186, 55e-6, 6.875, 48, 48, 810e-9);
  const auto r = sim::simulate_background(bg, det, 2e5, g, 99);

  const auto sd_of = [](const sim::EventStream& s, bool use_x) {
    double sum = 0.0, sq = 0.0;
    for (const auto& e : s) {
      const double v = use_x ? e.x : e.y;
      sum += v;
      sq += v * v;
    }
    const double n = static_cast<double>(s.size());
    const double m = sum / n;
    return std::sqrt(sq / n - m * m);
  };
  CHECK(sd_of(r.nf, true) == doctest::Approx(3.0).epsilon(0.1));
  CHECK(sd_of(r.nf, false) == doctest::Approx(3.0).epsilon(0.1));
  CHECK(sd_of(r.ff, true) == doctest::Approx(5.0).epsilon(0.1));
}

TEST_CASE("rate cap flag trips on overload") {
  auto det = fast_detector();
  det.rate_cap_hz = 1e5;
  const auto r = sim::simulate_pairs(flat_model(), det, 2e5, 1);
  CHECK(r.meta.rate_cap_exceeded);
}

TEST_CASE("detector validation") {
  sim::DetectorModel d;
  CHECK_NOTHROW(sim::validate_detector(d));
  d.efficiency_nf = 1.5;
  CHECK_THROWS_AS(sim::validate_detector(d), std::invalid_argument);
  d = {};
  d.time_quantum_ns = 0.0;
  CHECK_THROWS_AS(sim::validate_detector(d), std::invalid_argument);
  d = {};
  d.jitter_sigma_ns = -1.0;
  CHECK_THROWS_AS(sim::validate_detector(d), std::invalid_argument);
  d = {};
  d.acquisition_time_s = 0.0;
  CHECK_THROWS_AS(sim::validate_detector(d), std::invalid_argument);
}

TEST_CASE("merge interleaves sorted streams stably") {
  sim::EventStream a = {{10, 1, 1, sim::Region::nf}, {30, 2, 2, sim::Region::nf}};
  sim::EventStream b = {{10, 3, 3, sim::Region::ff}, {20, 4, 4, sim::Region::ff}};
  const std::array<sim::EventStream, 2> streams = {a, b};
  const auto m = sim::merge_streams(streams);
  REQUIRE(m.size() == 4);
  CHECK(m[0].x == 1);  // equal timestamps keep source order
  CHECK(m[1].x == 3);
  CHECK(m[2].x == 4);
  CHECK(m[3].x == 2);
  CHECK(sim::stream_is_sorted(m));

  sim::EventStream bad = {{30, 0, 0, sim::Region::nf}, {10, 0, 0, sim::Region::nf}};
  const std::array<sim::EventStream, 2> bad_streams = {a, bad};
  CHECK_THROWS_AS(sim::merge_streams(bad_streams), std::invalid_argument);
}
