#include "qcpgm/optics/geometry.hpp"

#include <numbers>
#include <stdexcept>

namespace qcpgm::optics {

OpticalGeometry make_geometry(double ff_focal_length, double camera_pixel_pitch,
                              double nf_magnification, int nf_pixels, int ff_pixels,
                              double photon_wavelength) {
  if (ff_focal_length <= 0.0) throw std::invalid_argument("geometry: focal length must be > 0");
  if (camera_pixel_pitch <= 0.0) throw std::invalid_argument("geometry: pixel pitch must be > 0");
  if (nf_magnification <= 0.0) throw std::invalid_argument("geometry: magnification must be > 0");
  if (nf_pixels < 2 || ff_pixels < 2) throw std::invalid_argument("geometry: pixel counts must be >= 2");
  if (photon_wavelength <= 0.0) throw std::invalid_argument("geometry: wavelength must be > 0");

  OpticalGeometry g;
  g.ff_focal_length = ff_focal_length;
  g.camera_pixel_pitch = camera_pixel_pitch;
  g.nf_magnification = nf_magnification;
  g.nf_pixels = nf_pixels;
  g.ff_pixels = ff_pixels;
  g.photon_wavelength = photon_wavelength;
  g.ff_half_aperture = (2.0 * std::numbers::pi / photon_wavelength) *
                       (0.5 * ff_pixels * camera_pixel_pitch) / ff_focal_length;
  return g;
}

}  // namespace qcpgm::optics
