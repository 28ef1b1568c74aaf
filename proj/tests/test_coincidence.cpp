#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "qcpgm/coincidence/pairing.hpp"
#include "qcpgm/sim/events.hpp"

using namespace qcpgm;

namespace {

sim::EventStream random_stream(std::mt19937_64& rng, std::size_t n, std::uint64_t span_ns,
                               sim::Region region) {
  sim::EventStream s;
  s.reserve(n);
  std::uniform_int_distribution<std::uint64_t> t(0, span_ns);
  std::uniform_int_distribution<int> px(0, 47);
  for (std::size_t i = 0; i < n; ++i) {
    s.push_back({t(rng), static_cast<std::uint16_t>(px(rng)),
                 static_cast<std::uint16_t>(px(rng)), region});
  }
  std::sort(s.begin(), s.end(),
            [](const auto& a, const auto& b) { return a.t_ns < b.t_ns; });
  return s;
}

/// Quadratic reference pairer: emits every (nf, ff) combination whose dt lies
/// in the half-open window, nf-major with ties in ff order — the same
/// contract as find_coincidences, checked by exhaustive scan.
std::vector<coincidence::CoincidencePair> brute_force(const sim::EventStream& nf,
                                                      const sim::EventStream& ff,
                                                      coincidence::CoincidenceWindow w) {
  std::vector<coincidence::CoincidencePair> out;
  const double lo = w.offset_ns - w.width_ns / 2.0;
  const double hi = w.offset_ns + w.width_ns / 2.0;
  for (const auto& a : nf) {
    for (const auto& b : ff) {
      const double dt = static_cast<double>(b.t_ns) - static_cast<double>(a.t_ns);
      if (dt >= lo && dt < hi) {
        coincidence::CoincidencePair p;
        p.nf = a;
        p.ff = b;
        p.dt_ns = static_cast<std::int64_t>(b.t_ns) - static_cast<std::int64_t>(a.t_ns);
        out.push_back(p);
      }
    }
  }
  return out;
}

bool same_pairs(const std::vector<coincidence::CoincidencePair>& a,
                const std::vector<coincidence::CoincidencePair>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i].nf == b[i].nf) || !(a[i].ff == b[i].ff) || a[i].dt_ns != b[i].dt_ns) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("two-pointer pairing matches the exhaustive reference") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n_nf = 1 + rng() % 300;
    const std::size_t n_ff = 1 + rng() % 300;
    // dense spans exercise heavy window overlap; sparse spans exercise gaps
    const std::uint64_t span = (trial % 2 == 0) ? 2000 : 200000;
    const auto nf = random_stream(rng, n_nf, span, sim::Region::nf);
    const auto ff = random_stream(rng, n_ff, span, sim::Region::ff);
    coincidence::CoincidenceWindow w;
    w.offset_ns = static_cast<double>(static_cast<int>(rng() % 41)) - 20.0;
    w.width_ns = 2.0 * static_cast<double>(1 + rng() % 25);
    const auto fast = coincidence::find_coincidences(nf, ff, w);
    const auto slow = brute_force(nf, ff, w);
    REQUIRE_MESSAGE(same_pairs(fast, slow), "trial ", trial, " nf=", n_nf, " ff=", n_ff,
                    " offset=", w.offset_ns, " width=", w.width_ns);
  }
}

TEST_CASE("window interval is half-open") {
  // width 10 around offset 0: dt in [-5, +5)
  sim::EventStream nf = {{100, 0, 0, sim::Region::nf},
                         {200, 0, 0, sim::Region::nf},
                         {300, 0, 0, sim::Region::nf}};
  sim::EventStream ff = {{95, 0, 0, sim::Region::ff},    // dt -5: in
                         {205, 0, 0, sim::Region::ff},   // dt +5: out
                         {304, 0, 0, sim::Region::ff}};  // dt +4: in
  const auto pairs = coincidence::find_coincidences(nf, ff, {0.0, 10.0});
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].dt_ns == -5);
  CHECK(pairs[1].dt_ns == 4);
}

TEST_CASE("every qualifying combination appears, nf-major") {
  sim::EventStream nf = {{100, 1, 0, sim::Region::nf}, {104, 2, 0, sim::Region::nf}};
  sim::EventStream ff = {{101, 3, 0, sim::Region::ff}, {102, 4, 0, sim::Region::ff}};
  // window dt in [-10, +10): all four combinations qualify
  const auto pairs = coincidence::find_coincidences(nf, ff, {0.0, 20.0});
  REQUIRE(pairs.size() == 4);
  CHECK(pairs[0].nf.x == 1);
  CHECK(pairs[0].ff.x == 3);
  CHECK(pairs[1].nf.x == 1);
  CHECK(pairs[1].ff.x == 4);
  CHECK(pairs[2].nf.x == 2);
  CHECK(pairs[2].ff.x == 3);
  CHECK(pairs[2].dt_ns == -3);
  CHECK(pairs[3].nf.x == 2);
  CHECK(pairs[3].ff.x == 4);
}

TEST_CASE("pairing validates inputs") {
  sim::EventStream ok = {{10, 0, 0, sim::Region::nf}};
  sim::EventStream unsorted = {{20, 0, 0, sim::Region::ff}, {10, 0, 0, sim::Region::ff}};
  CHECK_THROWS_AS(coincidence::find_coincidences(ok, unsorted, {0.0, 10.0}),
                  std::invalid_argument);
  sim::EventStream ff = {{10, 0, 0, sim::Region::ff}};
  CHECK_THROWS_AS(coincidence::find_coincidences(ok, ff, {0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(coincidence::find_coincidences(ok, ff, {0.0, -4.0}), std::invalid_argument);
  CHECK(coincidence::find_coincidences({}, ff, {0.0, 10.0}).empty());
}

TEST_CASE("shifted-window accidentals reuse the pairing on displaced times") {
  std::mt19937_64 rng(77);
  const auto nf = random_stream(rng, 400, 100000, sim::Region::nf);
  const auto ff = random_stream(rng, 400, 100000, sim::Region::ff);
  coincidence::CoincidenceWindow w{0.0, 12.0};
  const double shift = 500.0;

  const auto acc = coincidence::accidental_coincidences(nf, ff, w, shift, 6.0);
  coincidence::CoincidenceWindow displaced{w.offset_ns + shift, w.width_ns};
  const auto direct = coincidence::find_coincidences(nf, ff, displaced);
  REQUIRE(acc.pairs.size() == direct.size());
  REQUIRE(!acc.pairs.empty());
  for (std::size_t i = 0; i < acc.pairs.size(); ++i) {
    CHECK(acc.pairs[i].nf == direct[i].nf);
    CHECK(acc.pairs[i].ff == direct[i].ff);
    CHECK(acc.pairs[i].dt_ns == direct[i].dt_ns);
    CHECK(acc.pairs[i].background);
  }
  CHECK(!acc.shift_warning);

  // a shift inside 3 peak widths of zero raises the warning
  const auto close = coincidence::accidental_coincidences(nf, ff, w, 10.0, 6.0);
  CHECK(close.shift_warning);
}

TEST_CASE("signal pairs are not tagged background") {
  sim::EventStream nf = {{100, 0, 0, sim::Region::nf}};
  sim::EventStream ff = {{101, 0, 0, sim::Region::ff}};
  const auto pairs = coincidence::find_coincidences(nf, ff, {0.0, 10.0});
  REQUIRE(pairs.size() == 1);
  CHECK(!pairs[0].background);
}

TEST_CASE("time-difference histogram matches direct counting") {
  std::mt19937_64 rng(5150);
  const auto nf = random_stream(rng, 800, 50000, sim::Region::nf);
  const auto ff = random_stream(rng, 800, 50000, sim::Region::ff);
  const double bin = 4.0;
  const double range = 40.0;
  const auto h = coincidence::dt_histogram(nf, ff, bin, range);
  REQUIRE(h.counts.size() == 20);
  CHECK(h.bin_width_ns == doctest::Approx(bin));
  CHECK(h.range_ns == doctest::Approx(range));
  CHECK(h.bin_center(0) == doctest::Approx(-38.0));
  CHECK(h.bin_center(19) == doctest::Approx(38.0));

  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    const double lo = -range + static_cast<double>(b) * bin;
    std::uint64_t expect = 0;
    for (const auto& en : nf) {
      for (const auto& ef : ff) {
        const double dt = static_cast<double>(ef.t_ns) - static_cast<double>(en.t_ns);
        if (dt >= lo && dt < lo + bin) ++expect;
      }
    }
    REQUIRE(h.counts[b] == expect);
  }
}

TEST_CASE("histogram validates its binning") {
  sim::EventStream nf = {{10, 0, 0, sim::Region::nf}};
  sim::EventStream ff = {{12, 0, 0, sim::Region::ff}};
  CHECK_THROWS_AS(coincidence::dt_histogram(nf, ff, 3.0, 40.0), std::invalid_argument);
  CHECK_THROWS_AS(coincidence::dt_histogram(nf, ff, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(coincidence::dt_histogram(nf, ff, 0.0, 40.0), std::invalid_argument);
  CHECK_NOTHROW(coincidence::dt_histogram(nf, ff, 5.0, 40.0));
}
