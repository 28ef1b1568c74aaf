#pragma once

namespace qcpgm::optics {

/// Imaging geometry of the two camera regions.
///
/// Near-field pixels index positions in the sample plane; pixel (ix, iy) is
/// centered at ((ix + 0.5 - nf_pixels/2) * nf_pitch, same for iy), so the
/// grid is symmetric about the optical axis.
///
/// Far-field pixels index transverse wavenumber. A pixel at physical offset
/// d from the axis in the focal plane collects wavenumber
/// k = (2 pi / lambda) d / f, so the ff grid maps bijectively onto the
/// centered square |u|, |v| <= ff_half_aperture with
/// ff_half_aperture = (2 pi / lambda) (ff_pixels/2 * camera_pixel_pitch) / f.
struct OpticalGeometry {
  double ff_focal_length = 0.0;    // m
  double camera_pixel_pitch = 0.0; // m, physical pixel size
  double nf_magnification = 0.0;   // sample -> camera magnification
  int nf_pixels = 0;               // per axis
  int ff_pixels = 0;               // per axis
  double photon_wavelength = 0.0;  // m
  double ff_half_aperture = 0.0;   // rad/m, derived

  double nf_pitch() const { return camera_pixel_pitch / nf_magnification; }
  double ff_pixel_bandwidth() const { return 2.0 * ff_half_aperture / ff_pixels; }

  double nf_x(int ix) const { return (ix + 0.5 - 0.5 * nf_pixels) * nf_pitch(); }
  double nf_y(int iy) const { return (iy + 0.5 - 0.5 * nf_pixels) * nf_pitch(); }

  double ff_u(int ix) const { return (ix + 0.5 - 0.5 * ff_pixels) * ff_pixel_bandwidth(); }
  double ff_v(int iy) const { return (iy + 0.5 - 0.5 * ff_pixels) * ff_pixel_bandwidth(); }
};

/// Validates and derives the aperture. Throws std::invalid_argument for
/// non-positive values or pixel counts < 2.
OpticalGeometry make_geometry(double ff_focal_length, double camera_pixel_pitch,
                              double nf_magnification, int nf_pixels, int ff_pixels,
                              double photon_wavelength);

}  // namespace qcpgm::optics
