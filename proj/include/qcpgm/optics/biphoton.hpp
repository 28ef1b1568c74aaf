#pragma once

#include "qcpgm/core/vec.hpp"

namespace qcpgm::optics {

/// Source parameters of the degenerate photon-pair state together with the
/// derived transverse correlation scales.
///
/// delta_r is the near-field correlation width, delta_k the far-field
/// (anti-)correlation width. The state is only pair-correlated when
/// delta_r < 1/(2 delta_k); construction rejects parameter sets outside
/// that regime.
struct BiphotonParams {
  double pump_wavelength = 0.0;    // m
  double pump_width = 0.0;         // m, transverse pump amplitude width sigma_p
  double crystal_length = 0.0;     // m
  double alpha = 0.0;              // phase-matching Gaussian approximation factor
  double photon_wavelength = 0.0;  // m, degenerate pairs: 2 x pump wavelength
  double delta_r = 0.0;            // m
  double delta_k = 0.0;            // rad/m
};

/// Derives delta_r = sqrt(2 alpha L lambda_p / pi) and delta_k = 1/(2 sigma_p).
/// Throws std::invalid_argument for non-positive inputs, alpha outside (0, 1],
/// or a parameter set without near-field correlation.
BiphotonParams make_biphoton_params(double pump_wavelength, double pump_width,
                                    double crystal_length, double alpha);

/// Unnormalized pair amplitude
///   psi(r_s, r_i) = exp(-|r_s - r_i|^2 / (2 delta_r^2))
///                 * exp(-2 delta_k^2 |r_s + r_i|^2),
/// peak value 1 at r_s = r_i = 0. Symmetric under signal/idler exchange.
double biphoton_amplitude(core::Vec2 r_s, core::Vec2 r_i, const BiphotonParams& params);

/// Phase imparted by a feature of the given height: 2 pi (n - 1) h / lambda.
/// height = 0 maps to phase 0. Throws for non-positive wavelength or
/// refractive index < 1.
double target_phase_from_height(double height, double refractive_index, double wavelength);

}  // namespace qcpgm::optics
