#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qcpgm/core/errors.hpp"
#include "qcpgm/optics/forward_model.hpp"

using namespace qcpgm;
using std::numbers::pi;

namespace {

optics::BiphotonParams params() {
  return optics::make_biphoton_params(405e-9, 500e-6, 1e-3, 0.455);
}

// Reduced near-field grid for speed; the far field keeps all 48 pixels so
// the aperture still passes the whole spot (half-aperture ~8 sigma of it).
optics::OpticalGeometry small_geometry() {
  return optics::make_geometry(0.0186, 55e-6, 6.875, 12, 48, 810e-9);
}

optics::TargetSpec base_spec() {
  optics::TargetSpec spec;
  spec.kind = optics::TargetKind::flat;
  spec.rows = spec.cols = 36;
  spec.pitch = 8e-6 / 3.0;
  return spec;
}

double prob_sum(const core::Grid2D<double>& g) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g[i];
  return s;
}

}  // namespace

TEST_CASE("clear aperture: symmetric conditional with centroid zero") {
  const auto t = optics::gen_target(base_spec());
  const auto g = small_geometry();
  const auto d = optics::conditional_ff_distribution(t, params(), g, 5, 5);

  CHECK(!d.empty);
  CHECK(prob_sum(d.prob) == doctest::Approx(1.0).epsilon(1e-12));
  // nearly all of the gaussian spectrum fits in the aperture
  CHECK(d.aperture_transmission > 0.999);
  CHECK(d.aperture_transmission <= 1.0 + 1e-12);
  CHECK(d.accepted_mass > 0.0);

  // inversion symmetry of |FT|^2 for a real symmetric window
  double max_asym = 0.0;
  for (int r = 0; r < 48; ++r) {
    for (int c = 0; c < 48; ++c) {
      max_asym = std::max(max_asym, std::abs(d.prob(r, c) - d.prob(47 - r, 47 - c)));
    }
  }
  CHECK(max_asym <= 1e-12);
  const auto centroid = optics::distribution_centroid(d.prob, g);
  CHECK(std::abs(centroid.x) < 1e-7);
  CHECK(std::abs(centroid.y) < 1e-7);
}

TEST_CASE("phase ramp shifts the conditional by its gradient") {
  auto spec = base_spec();
  spec.kind = optics::TargetKind::linear_ramp;
  spec.ramp_grad_x = 3.0e4;   // rad/m, ~1.3 ff pixels
  spec.ramp_grad_y = -2.0e4;
  const auto t = optics::gen_target(spec);
  const auto g = small_geometry();

  // central pixel: the window sees a pure ramp, so the far-field spot moves
  // to exactly the local gradient (shift theorem)
  const auto d = optics::conditional_ff_distribution(t, params(), g, 6, 6);
  const auto centroid = optics::distribution_centroid(d.prob, g);
  CHECK(centroid.x == doctest::Approx(3.0e4).epsilon(0.03));
  CHECK(centroid.y == doctest::Approx(-2.0e4).epsilon(0.03));
}

TEST_CASE("smooth phase: centroid equals the window-weighted mean gradient") {
  auto spec = base_spec();
  spec.kind = optics::TargetKind::gaussian_bump;
  spec.rows = spec.cols = 72;  // off-center windows must stay on the grid
  spec.bump_sigma = 30e-6;
  spec.bump_peak = 1.0;
  const auto t = optics::gen_target(spec);
  const auto g = small_geometry();
  const auto p = params();

  for (const int ix : {4, 6, 8}) {
    const int iy = 5;
    const auto d = optics::conditional_ff_distribution(t, p, g, ix, iy);
    const auto centroid = optics::distribution_centroid(d.prob, g);

    // independent quadrature of grad phi weighted by the squared window, on
    // a 4x finer grid than the model uses
    const double x0 = g.nf_x(ix), y0 = g.nf_y(iy);
    const double h = spec.pitch / 4.0;
    const double half = 4.0 * p.delta_r;
    const int n = static_cast<int>(std::ceil(half / h));
    double wsum = 0.0, gx = 0.0, gy = 0.0;
    for (int j = -n; j <= n; ++j) {
      for (int i = -n; i <= n; ++i) {
        const double x = x0 + i * h, y = y0 + j * h;
        const double w = std::exp(-((x - x0) * (x - x0) + (y - y0) * (y - y0)) /
                                  (2.0 * p.delta_r * p.delta_r));
        const double s2 = spec.bump_sigma * spec.bump_sigma;
        const double phi = std::exp(-(x * x + y * y) / (2.0 * s2));
        const double w2 = w * w;
        wsum += w2;
        gx += w2 * (-x / s2) * phi;
        gy += w2 * (-y / s2) * phi;
      }
    }
    const double expect_u = gx / wsum, expect_v = gy / wsum;
    CHECK(centroid.x == doctest::Approx(expect_u).epsilon(0.03));
    CHECK(centroid.y == doctest::Approx(expect_v).epsilon(0.03));
  }
}

TEST_CASE("uniform absorption scales the accepted mass quadratically") {
  const auto g = small_geometry();
  const auto p = params();
  auto spec = base_spec();
  spec.rows = spec.cols = 72;  // keep the window on the grid
  const auto t1 = optics::gen_target(spec);
  auto t2 = optics::gen_target(spec);
  for (std::size_t i = 0; i < t2.amplitude.size(); ++i) t2.amplitude[i] = 0.5;

  const auto d1 = optics::conditional_ff_distribution(t1, p, g, 6, 6);
  const auto d2 = optics::conditional_ff_distribution(t2, p, g, 6, 6);
  CHECK(d2.accepted_mass / d1.accepted_mass == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(d2.aperture_transmission == doctest::Approx(d1.aperture_transmission).epsilon(1e-9));
  double max_diff = 0.0;
  for (std::size_t i = 0; i < d1.prob.size(); ++i) {
    max_diff = std::max(max_diff, std::abs(d2.prob[i] - d1.prob[i]));
  }
  CHECK(max_diff <= 1e-12);
}

TEST_CASE("opaque region yields an empty conditional") {
  auto spec = base_spec();
  spec.rows = spec.cols = 72;  // keep the window on the opaque grid
  auto t = optics::gen_target(spec);
  for (std::size_t i = 0; i < t.amplitude.size(); ++i) t.amplitude[i] = 0.0;
  const auto d = optics::conditional_ff_distribution(t, params(), small_geometry(), 6, 6);
  CHECK(d.empty);
  CHECK(d.accepted_mass == 0.0);
}

TEST_CASE("clear-aperture marginal is uniform") {
  const auto t = optics::gen_target(base_spec());
  const auto m = optics::nf_marginal(t, params(), small_geometry());
  CHECK(prob_sum(m) == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 0; i < m.size(); ++i) {
    CHECK(m[i] == doctest::Approx(1.0 / 144.0).epsilon(1e-9));
  }
}

TEST_CASE("marginal weights detection by |T|^2 twice (pixel and spectrum)") {
  auto spec = base_spec();
  spec.rows = spec.cols = 72;  // margin keeps edge-pixel windows on the grid
  auto t = optics::gen_target(spec);
  const double a = 0.6;
  for (int r = 0; r < t.amplitude.rows(); ++r) {
    for (int c = t.amplitude.cols() / 2; c < t.amplitude.cols(); ++c) {
      t.amplitude(r, c) = a;
    }
  }
  const auto m = optics::nf_marginal(t, params(), small_geometry());
  // nf pixel 1 sits deep in the clear half, pixel 11 deep in the absorbing
  // half; both windows see uniform amplitude to ~5 sigma
  const double ratio = m(6, 11) / m(6, 1);
  CHECK(ratio == doctest::Approx(a * a * a * a).epsilon(1e-6));
}

TEST_CASE("cached model matches per-pixel evaluation") {
  auto spec = base_spec();
  spec.kind = optics::TargetKind::gaussian_bump;
  spec.bump_sigma = 40e-6;
  spec.bump_peak = 0.8;
  const auto t = optics::gen_target(spec);
  const auto g = small_geometry();
  const auto p = params();
  const auto model = optics::build_forward_model(t, p, g);

  CHECK(model.marginal == optics::nf_marginal(t, p, g));
  for (const auto [ix, iy] : {std::pair{0, 0}, std::pair{7, 3}, std::pair{11, 11}}) {
    const auto direct = optics::conditional_ff_distribution(t, p, g, ix, iy);
    const auto& cached = model.conditional(ix, iy);
    CHECK(cached.prob == direct.prob);
    CHECK(cached.accepted_mass == direct.accepted_mass);
  }
}

TEST_CASE("distribution centroid of a point mass sits at the pixel center") {
  const auto g = small_geometry();
  core::Grid2D<double> prob(48, 48, 0.0);
  prob(3, 9) = 1.0;
  const auto c = optics::distribution_centroid(prob, g);
  CHECK(c.x == doctest::Approx(g.ff_u(9)).epsilon(1e-12));
  CHECK(c.y == doctest::Approx(g.ff_v(3)).epsilon(1e-12));
}

TEST_CASE("forward model rejects unusable discretizations") {
  const auto g = small_geometry();
  const auto p = params();

  auto coarse = base_spec();
  coarse.rows = coarse.cols = 12;
  coarse.pitch = 8e-6;  // > delta_r / 2, cannot sample the window
  const auto tc = optics::gen_target(coarse);
  CHECK_THROWS_AS(optics::conditional_ff_distribution(tc, p, g, 6, 6),
                  std::invalid_argument);

  const auto t = optics::gen_target(base_spec());
  CHECK_THROWS_AS(optics::conditional_ff_distribution(t, p, g, -1, 6),
                  std::invalid_argument);
  CHECK_THROWS_AS(optics::conditional_ff_distribution(t, p, g, 6, 12),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      optics::conditional_ff_distribution(t, p, g, 6, 6, optics::EnvelopeMode::constant, 0),
      std::invalid_argument);

  // aperture beyond the target Nyquist range
  const auto wide = optics::make_geometry(0.0015, 55e-6, 6.875, 12, 48, 810e-9);
  CHECK_THROWS_AS(optics::conditional_ff_distribution(t, p, wide, 6, 6),
                  std::invalid_argument);

  auto opaque = optics::gen_target(base_spec());
  for (std::size_t i = 0; i < opaque.amplitude.size(); ++i) opaque.amplitude[i] = 0.0;
  CHECK_THROWS_AS(optics::nf_marginal(opaque, p, small_geometry()), core::NumericError);
}

TEST_CASE("envelope mode full tilts nothing but reweights the window") {
  const auto t = optics::gen_target(base_spec());
  const auto g = small_geometry();
  const auto p = params();
  const auto full = optics::conditional_ff_distribution(t, p, g, 6, 6,
                                                        optics::EnvelopeMode::full);
  CHECK(!full.empty);
  CHECK(prob_sum(full.prob) == doctest::Approx(1.0).epsilon(1e-12));
  const auto c = optics::distribution_centroid(full.prob, g);
  // the envelope is symmetric about the optical axis; a centered pixel keeps
  // centroid zero
  CHECK(std::abs(c.x) < 1e-7);
  CHECK(std::abs(c.y) < 1e-7);
}
