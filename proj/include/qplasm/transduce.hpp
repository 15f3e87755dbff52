#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qplasm/errors.hpp"
#include "qplasm/material.hpp"
#include "qplasm/units.hpp"

namespace qplasm::transduce {

// Kretschmann three-layer system: prism / metal film / analyte.
struct LayerStack {
    double prism_permittivity = 0.0;   // eps_p, real > 1
    MaterialModel metal;               // eps_m(omega)
    double metal_thickness_nm = 0.0;   // d > 0
    double analyte_permittivity = 1.0; // eps_a, real >= 1

    void validate() const {
        if (!(prism_permittivity > 1.0))
            throw domain_error("LayerStack: prism permittivity must be > 1");
        if (!(metal_thickness_nm > 0.0))
            throw domain_error("LayerStack: metal thickness must be > 0");
        if (!(analyte_permittivity >= 1.0))
            throw domain_error("LayerStack: analyte permittivity must be >= 1");
        if (!(prism_permittivity > analyte_permittivity))
            throw domain_error(
                "LayerStack: evanescent coupling needs eps_p > eps_a "
                "(prism denser than analyte)");
        metal.validate();
    }

    double prism_index() const { return std::sqrt(prism_permittivity); }
    double analyte_index() const { return std::sqrt(analyte_permittivity); }
};

// Bound SPP mode at a single metal-dielectric interface.
struct SppMode {
    complexd parallel_wavenumber;  // k_par, 1/m
    complexd kappa_dielectric;     // decay constant, dielectric side, 1/m
    complexd kappa_metal;          // decay constant, metal side, 1/m
};

// k_par = (omega/c) sqrt(eps_d eps_m / (eps_d + eps_m)),
// kappa_j = sqrt(k_par^2 - k0^2 eps_j), Re >= 0 branch.
inline SppMode spp_dispersion(double omega, double eps_d, const MaterialModel& m) {
    if (!(omega > 0.0)) throw domain_error("spp_dispersion: omega must be > 0");
    if (!(eps_d > 0.0)) throw domain_error("spp_dispersion: eps_d must be > 0");
    const complexd eps_m = permittivity_at(omega, m);
    const complexd sum = eps_d + eps_m;
    if (sum == complexd(0.0, 0.0))
        throw pole_error("spp_dispersion: eps_d + eps_m = 0 (surface plasma resonance)");
    const double k0 = omega / c_light;
    const complexd kpar = k0 * branch_sqrt(eps_d * eps_m / sum);
    SppMode mode;
    mode.parallel_wavenumber = kpar;
    mode.kappa_dielectric = branch_sqrt(kpar * kpar - k0 * k0 * eps_d);
    mode.kappa_metal = branch_sqrt(kpar * kpar - k0 * k0 * eps_m);
    return mode;
}

struct Reflectance {
    complexd r;  // amplitude reflection coefficient
    double R;    // |r|^2
    bool clamped = false;  // exp(i 2 k2 d) magnitude was clamped
};

namespace detail {

inline complexd fresnel_p(complexd ku, complexd eu, complexd kv, complexd ev) {
    const complexd a = ku / eu;
    const complexd b = kv / ev;
    return (a - b) / (a + b);
}

}  // namespace detail

// p-polarized three-layer reflection coefficient,
//   r = (e^{i 2 k2 d} r23 + r12) / (e^{i 2 k2 d} r23 r12 + 1),
// with k_u = sqrt(eps_u) k0 [1 - (eps_1/eps_u) sin^2 theta]^{1/2}.
inline Reflectance kretschmann_reflectance(double theta_in_deg, double lambda_nm,
                                           const LayerStack& stack) {
    if (!(theta_in_deg >= 0.0 && theta_in_deg < 90.0))
        throw domain_error("kretschmann_reflectance: theta must be in [0, 90)");
    if (!(lambda_nm > 0.0))
        throw domain_error("kretschmann_reflectance: lambda must be > 0");
    stack.validate();

    const double omega = omega_from_lambda_nm(lambda_nm);
    const double k0 = omega / c_light;
    const double s2 = std::pow(std::sin(deg_to_rad(theta_in_deg)), 2);
    const complexd eps1 = stack.prism_permittivity;
    const complexd eps2 = permittivity_at(omega, stack.metal);
    const complexd eps3 = stack.analyte_permittivity;

    auto kz = [&](complexd eps_u) {
        return std::sqrt(eps_u) * k0 * branch_sqrt(1.0 - (eps1 / eps_u) * s2);
    };
    const complexd k1 = kz(eps1);
    const complexd k2 = kz(eps2);
    const complexd k3 = kz(eps3);

    const complexd r12 = detail::fresnel_p(k1, eps1, k2, eps2);
    const complexd r23 = detail::fresnel_p(k2, eps2, k3, eps3);

    Reflectance out;
    complexd arg = complexd(0.0, 2.0) * k2 * (stack.metal_thickness_nm * 1e-9);
    if (arg.real() > 700.0) {  // would overflow exp(); decaying branch never does
        arg = complexd(700.0, arg.imag());
        out.clamped = true;
    }
    const complexd phase = std::exp(arg);
    out.r = (phase * r23 + r12) / (phase * r23 * r12 + 1.0);
    out.R = std::norm(out.r);
    return out;
}

// Resonance angle from the matching condition
//   k0 n_p sin(theta_res) = k0 sqrt(n_a^2 eps_m' / (n_a^2 + eps_m')).
inline double resonance_angle_deg(double n_p, double n_a, double eps_m_prime) {
    if (!(eps_m_prime < -n_a * n_a))
        throw domain_error("resonance_angle_deg: need eps_m' < -n_a^2 for a bound SPP");
    const double q =
        std::sqrt(n_a * n_a * eps_m_prime / (n_a * n_a + eps_m_prime)) / n_p;
    if (!(q <= 1.0))
        throw domain_error("resonance_angle_deg: SPP wavenumber exceeds prism light line");
    return rad_to_deg(std::asin(q));
}

enum class ResonanceMode { AngularAtFixedLambda, SpectralAtFixedTheta };

struct ResonanceResult {
    double location;  // theta_res (deg) or lambda_res (nm)
    double R_min;
};

namespace detail {

// Golden-section minimization of a unimodal scalar function.
inline double golden_min(const std::function<double(double)>& f, double a, double b,
                         double tol) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    return (a + b) / 2.0;
}

}  // namespace detail

// Locate the single reflectance dip inside [window_lo, window_hi].
// Coarse grid then golden-section refinement. A local minimum counts
// as a dip only when it sits at least `prominence` below the smaller
// of its flanking maxima; sub-percent thin-film interference ripple
// (and rounding noise on flat R = 1 plateaus) does not register.
inline ResonanceResult find_resonance(const LayerStack& stack, ResonanceMode mode,
                                      double fixed_value, double window_lo,
                                      double window_hi, int grid_points = 2000,
                                      double tol = 1e-6, double prominence = 0.01) {
    if (!(window_hi > window_lo))
        throw domain_error("find_resonance: empty search window");
    if (grid_points < 16) throw domain_error("find_resonance: grid too coarse");

    auto R_at = [&](double x) {
        return mode == ResonanceMode::AngularAtFixedLambda
                   ? kretschmann_reflectance(x, fixed_value, stack).R
                   : kretschmann_reflectance(fixed_value, x, stack).R;
    };

    std::vector<double> xs(grid_points), Rs(grid_points);
    for (int i = 0; i < grid_points; ++i) {
        xs[i] = window_lo + (window_hi - window_lo) * i / (grid_points - 1);
        Rs[i] = R_at(xs[i]);
    }

    std::vector<int> dips;
    for (int i = 1; i + 1 < grid_points; ++i) {
        if (!(Rs[i] <= Rs[i - 1] && Rs[i] < Rs[i + 1])) continue;
        double left_max = Rs[i], right_max = Rs[i];
        for (int j = i; j >= 0; --j) left_max = std::max(left_max, Rs[j]);
        for (int j = i; j < grid_points; ++j) right_max = std::max(right_max, Rs[j]);
        if (std::min(left_max, right_max) - Rs[i] > prominence) dips.push_back(i);
    }

    if (dips.size() != 1) {
        std::vector<double> cands;
        std::string where;
        for (int i : dips) {
            cands.push_back(xs[i]);
            where += " " + std::to_string(xs[i]);
        }
        throw ambiguity_error("find_resonance: window contains " +
                                  std::to_string(dips.size()) +
                                  " dips, expected exactly one; candidates:" +
                                  (where.empty() ? " none" : where),
                              cands);
    }

    const int i = dips[0];
    const double lo = xs[i > 0 ? i - 1 : 0];
    const double hi = xs[i + 1 < grid_points ? i + 1 : grid_points - 1];
    const double xmin = detail::golden_min(R_at, lo, hi, tol);
    return {xmin, R_at(xmin)};
}

enum class SensitivityKind { Angular, Spectral };

// Closed-form resonance-shift sensitivities.
//   angular : |d theta_res / d n_a| in deg/RIU
//   spectral: |d lambda_res / d n_a| in nm/RIU
// deps_dlambda and dnp_dlambda are per nm; only the spectral kind uses them.
inline double sensitivity_closed_form(SensitivityKind kind, double n_a, double n_p,
                                      double eps_m_prime, double deps_dlambda = 0.0,
                                      double dnp_dlambda = 0.0) {
    if (!(eps_m_prime < 0.0))
        throw domain_error("sensitivity_closed_form: eps_m' must be negative");
    const double na2 = n_a * n_a;
    const double np2 = n_p * n_p;
    if (kind == SensitivityKind::Angular) {
        const double under = eps_m_prime * (na2 - np2) - np2 * na2;
        if (!(under > 0.0)) {
            const double pole = np2 * na2 / (na2 - np2);
            throw singularity_error(
                "sensitivity_closed_form: angular formula singular; pole at eps_m' = " +
                std::to_string(pole));
        }
        // The printed numerator eps_m' sqrt(-eps_m') is negative for
        // eps_m' < 0; the |dy/dx| definition makes it |eps_m'|^{3/2}.
        const double s_rad =
            std::pow(-eps_m_prime, 1.5) /
            (std::fabs(eps_m_prime + na2) * std::sqrt(under));
        return rad_to_deg(s_rad);
    }
    const double den = (na2 * n_a / 2.0) * std::fabs(deps_dlambda) +
                       (eps_m_prime + na2) * eps_m_prime * dnp_dlambda * (n_a / n_p);
    if (den == 0.0)
        throw singularity_error("sensitivity_closed_form: spectral denominator is zero");
    return std::fabs(eps_m_prime * eps_m_prime / den);
}

// LSP resonance of a small sphere, omega_l = wp [l / (eps_d(l+1) + l)]^{1/2}.
// Pass l <= 0 for the l -> infinity limit wp (1 + eps_d)^{-1/2}.
inline double lsp_resonance(long l, double eps_d, const MaterialModel& m) {
    m.validate();
    if (eps_d < 0.0) throw domain_error("lsp_resonance: eps_d must be >= 0");
    if (l <= 0) return m.plasma_frequency / std::sqrt(1.0 + eps_d);
    const double ld = static_cast<double>(l);
    return m.plasma_frequency * std::sqrt(ld / (eps_d * (ld + 1.0) + ld));
}

struct CrossSections {
    double sigma_sca;  // m^2
    double sigma_abs;  // m^2
};

// Quasi-static scattering/absorption cross sections of a sphere of volume V.
inline CrossSections lsp_cross_sections(double omega, double eps_d,
                                        const MaterialModel& m, double volume_m3) {
    if (!(omega > 0.0 && eps_d > 0.0 && volume_m3 > 0.0))
        throw domain_error("lsp_cross_sections: omega, eps_d, V must be > 0");
    const complexd eps = permittivity_at(omega, m);
    const double er = eps.real(), ei = eps.imag();
    const double denom = (er + 2.0 * eps_d) * (er + 2.0 * eps_d) + ei * ei;
    CrossSections cs;
    cs.sigma_sca = 2.0 * std::pow(omega, 4) * eps_d * eps_d * volume_m3 * volume_m3 /
                   std::pow(c_light, 4) *
                   (((er - eps_d) * (er - eps_d) + ei * ei) / denom);
    cs.sigma_abs = 9.0 * omega * std::pow(eps_d, 1.5) * volume_m3 / c_light * (ei / denom);
    return cs;
}

struct FigureOfMerit {
    double sensitivity = 0.0;             // per RIU
    std::optional<double> linewidth_nm;   // Gamma_lambda
    std::optional<double> fom;            // 1/RIU
    std::optional<double> fom_star;       // 1/RIU
    double lod = 0.0;                     // RIU
};

// LOD = dy_min / S; FOM = S / Gamma.
inline FigureOfMerit figures_of_merit(double sensitivity, double linewidth_nm,
                                      double dy_min) {
    if (!(sensitivity > 0.0)) throw domain_error("figures_of_merit: S must be > 0");
    if (!(linewidth_nm > 0.0))
        throw domain_error("figures_of_merit: linewidth must be > 0");
    FigureOfMerit f;
    f.sensitivity = sensitivity;
    f.linewidth_nm = linewidth_nm;
    f.fom = sensitivity / linewidth_nm;
    f.lod = dy_min / sensitivity;
    return f;
}

struct SampledSpectrum {
    std::vector<double> lambda_nm;
    std::vector<double> intensity;
};

// Spectrum-based variant for linewidth-free (relative-intensity)
// interrogation: sensitivity is FOM* itself and dy_min is the minimum
// resolvable relative intensity change.
inline FigureOfMerit figures_of_merit(const SampledSpectrum& at_minus,
                                      const SampledSpectrum& at_plus, double dn,
                                      double dy_min);

// FOM* = max over lambda of |dI/dn_a| / I, symmetric difference between
// two spectra sampled at n_a -/+ dn on a common wavelength grid.
inline double fom_star(const SampledSpectrum& at_minus, const SampledSpectrum& at_plus,
                       double dn) {
    if (!(dn > 0.0)) throw domain_error("fom_star: dn must be > 0");
    if (at_minus.lambda_nm.size() != at_plus.lambda_nm.size() ||
        at_minus.lambda_nm.empty())
        throw domain_error("fom_star: spectra must share a non-empty grid");
    double best = -1.0;
    bool skipped_zero = false;
    for (std::size_t i = 0; i < at_minus.lambda_nm.size(); ++i) {
        const double mid = 0.5 * (at_minus.intensity[i] + at_plus.intensity[i]);
        if (mid <= 0.0) {
            skipped_zero = true;
            continue;
        }
        const double dI = (at_plus.intensity[i] - at_minus.intensity[i]) / (2.0 * dn);
        best = std::max(best, std::fabs(dI) / mid);
    }
    if (best < 0.0)
        throw domain_error(skipped_zero
                               ? "fom_star: intensity vanished across the whole grid"
                               : "fom_star: empty grid");
    return best;
}

inline FigureOfMerit figures_of_merit(const SampledSpectrum& at_minus,
                                      const SampledSpectrum& at_plus, double dn,
                                      double dy_min) {
    FigureOfMerit f;
    f.fom_star = fom_star(at_minus, at_plus, dn);
    f.sensitivity = *f.fom_star;
    f.lod = dy_min / f.sensitivity;
    return f;
}

}  // namespace qplasm::transduce
