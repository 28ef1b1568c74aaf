#include "qcpgm/recon/integrate.hpp"

#include <algorithm>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qcpgm/core/fft.hpp"

namespace qcpgm::recon {

namespace {

inline int signed_index(int m, int n) { return m < n - m ? m : m - n; }

}  // namespace

PhaseMap frankot_chellappa(const GradientField& gradient, bool mirror_pad) {
  const int rows = gradient.p.rows(), cols = gradient.p.cols();
  if (rows < 2 || cols < 2) {
    throw std::invalid_argument("frankot_chellappa: grid must be at least 2x2");
  }
  if (gradient.pitch <= 0.0) throw std::invalid_argument("frankot_chellappa: pitch must be > 0");

  bool any_invalid = std::any_of(gradient.valid.data().begin(), gradient.valid.data().end(),
                                 [](std::uint8_t v) { return v == 0; });
  GradientField filled = any_invalid ? fill_invalid_nearest(gradient) : gradient;

  const int r_ext = mirror_pad ? 2 * rows : rows;
  const int c_ext = mirror_pad ? 2 * cols : cols;
  std::vector<std::complex<double>> ph(static_cast<std::size_t>(r_ext) * c_ext);
  std::vector<std::complex<double>> qh(static_cast<std::size_t>(r_ext) * c_ext);

  // Even reflection of phi makes p odd across the x seam and q odd across
  // the y seam; the signs below encode that.
  for (int r = 0; r < r_ext; ++r) {
    int sr = r < rows ? r : 2 * rows - 1 - r;
    double sign_y = r < rows ? 1.0 : -1.0;
    for (int c = 0; c < c_ext; ++c) {
      int sc = c < cols ? c : 2 * cols - 1 - c;
      double sign_x = c < cols ? 1.0 : -1.0;
      std::size_t i = static_cast<std::size_t>(r) * c_ext + c;
      ph[i] = filled.p(sr, sc) * sign_x;
      qh[i] = filled.q(sr, sc) * sign_y;
    }
  }

  core::fft2(ph.data(), r_ext, c_ext, core::kFftForward);
  core::fft2(qh.data(), r_ext, c_ext, core::kFftForward);

  const double du = 2.0 * std::numbers::pi / (c_ext * gradient.pitch);
  const double dv = 2.0 * std::numbers::pi / (r_ext * gradient.pitch);
  std::vector<std::complex<double>>& phi = ph;  // reuse the p buffer
  for (int r = 0; r < r_ext; ++r) {
    double v = signed_index(r, r_ext) * dv;
    for (int c = 0; c < c_ext; ++c) {
      double u = signed_index(c, c_ext) * du;
      std::size_t i = static_cast<std::size_t>(r) * c_ext + c;
      double denom = u * u + v * v;
      if (denom == 0.0) {
        phi[i] = 0.0;
      } else {
        // (u p_hat + v q_hat) / (i denom) = -i (u p_hat + v q_hat) / denom
        std::complex<double> num = u * ph[i] + v * qh[i];
        phi[i] = std::complex<double>(num.imag(), -num.real()) / denom;
      }
    }
  }

  core::fft2(phi.data(), r_ext, c_ext, core::kFftBackward);
  const double norm = 1.0 / (static_cast<double>(r_ext) * c_ext);

  PhaseMap out;
  out.phase = core::Grid2D<double>(rows, cols, 0.0);
  out.valid = gradient.valid;
  out.pitch = gradient.pitch;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      out.phase(r, c) = phi[static_cast<std::size_t>(r) * c_ext + c].real() * norm;
    }
  }

  double mean = 0.0;
  std::size_t n_valid = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (out.valid(r, c)) {
        mean += out.phase(r, c);
        ++n_valid;
      }
    }
  }
  if (n_valid > 0) {
    mean /= static_cast<double>(n_valid);
    for (double& v : out.phase.data()) v -= mean;
  }
  return out;
}

}  // namespace qcpgm::recon
