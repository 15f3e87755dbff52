#pragma once

#include <cmath>
#include <complex>

namespace qplasm {

using complexd = std::complex<double>;

inline constexpr double c_light = 299792458.0;  // m/s
inline constexpr double pi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / pi; }

// Angular frequency (rad/s) of light with vacuum wavelength in nm.
inline double omega_from_lambda_nm(double lambda_nm) {
    return 2.0 * pi * c_light / (lambda_nm * 1e-9);
}

inline double lambda_nm_from_omega(double omega) {
    return 2.0 * pi * c_light / omega * 1e9;
}

// Principal square root folded onto the Re >= 0, then Im >= 0 branch.
// Used for normal wavevector components so evanescent fields decay.
inline complexd branch_sqrt(complexd z) {
    complexd w = std::sqrt(z);
    if (w.real() < 0.0) w = -w;
    if (w.real() == 0.0 && w.imag() < 0.0) w = -w;
    return w;
}

}  // namespace qplasm
