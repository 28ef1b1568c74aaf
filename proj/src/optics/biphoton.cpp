#include "qcpgm/optics/biphoton.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qcpgm::optics {

BiphotonParams make_biphoton_params(double pump_wavelength, double pump_width,
                                    double crystal_length, double alpha) {
  if (pump_wavelength <= 0.0) throw std::invalid_argument("biphoton: pump wavelength must be > 0");
  if (pump_width <= 0.0) throw std::invalid_argument("biphoton: pump width must be > 0");
  if (crystal_length <= 0.0) throw std::invalid_argument("biphoton: crystal length must be > 0");
  if (alpha <= 0.0 || alpha > 1.0) throw std::invalid_argument("biphoton: alpha must be in (0, 1]");

  BiphotonParams p;
  p.pump_wavelength = pump_wavelength;
  p.pump_width = pump_width;
  p.crystal_length = crystal_length;
  p.alpha = alpha;
  p.photon_wavelength = 2.0 * pump_wavelength;
  p.delta_r = std::sqrt(2.0 * alpha * crystal_length * pump_wavelength / std::numbers::pi);
  p.delta_k = 1.0 / (2.0 * pump_width);
  if (!(p.delta_r < 1.0 / (2.0 * p.delta_k))) {
    throw std::invalid_argument("biphoton: no transverse correlation, delta_r >= 1/(2 delta_k)");
  }
  return p;
}

double biphoton_amplitude(core::Vec2 r_s, core::Vec2 r_i, const BiphotonParams& params) {
  double d2 = norm2(r_s - r_i);
  double s2 = norm2(r_s + r_i);
  return std::exp(-d2 / (2.0 * params.delta_r * params.delta_r)) *
         std::exp(-2.0 * params.delta_k * params.delta_k * s2);
}

double target_phase_from_height(double height, double refractive_index, double wavelength) {
  if (wavelength <= 0.0) throw std::invalid_argument("target phase: wavelength must be > 0");
  if (refractive_index < 1.0) throw std::invalid_argument("target phase: refractive index < 1");
  if (height < 0.0) throw std::invalid_argument("target phase: height must be >= 0");
  return 2.0 * std::numbers::pi * (refractive_index - 1.0) * height / wavelength;
}

}  // namespace qcpgm::optics
