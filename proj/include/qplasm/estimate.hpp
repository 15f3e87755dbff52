#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qplasm/errors.hpp"
#include "qplasm/fock.hpp"
#include "qplasm/gaussian.hpp"
#include "qplasm/units.hpp"

namespace qplasm::estimate {

using states::FockState;
using states::GaussianState;

// --- Classical Fisher information -------------------------------------

// Discrete outcome model p(y | x).
struct OutcomeModel {
    int num_outcomes = 0;
    std::function<double(int, double)> probability;
};

namespace detail {

inline void check_normalized(const OutcomeModel& model, double x) {
    double sum = 0.0;
    for (int y = 0; y < model.num_outcomes; ++y) {
        const double p = model.probability(y, x);
        if (p < -1e-12) throw model_error("OutcomeModel: negative probability");
        sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
        throw model_error("OutcomeModel: probabilities sum to " + std::to_string(sum));
}

// Richardson pair for an O(h^2)-accurate estimator.
inline double richardson(const std::function<double(double)>& f, double h) {
    return (4.0 * f(h / 2.0) - f(h)) / 3.0;
}

}  // namespace detail

// F(x) = sum_y (d_x p)^2 / p, symmetric differences, Richardson pair
// (step, step/2). Outcomes with p < 1e-15 are dropped; their mass is
// accumulated into *dropped_mass when given.
inline double fisher_information(const OutcomeModel& model, double x, double step = 1e-4,
                                 double* dropped_mass = nullptr) {
    if (!(step > 0.0)) throw domain_error("fisher_information: step must be > 0");
    detail::check_normalized(model, x);
    double dropped = 0.0;
    auto F_at = [&](double h) {
        detail::check_normalized(model, x + h);
        detail::check_normalized(model, x - h);
        double F = 0.0;
        dropped = 0.0;
        for (int y = 0; y < model.num_outcomes; ++y) {
            const double p = model.probability(y, x);
            if (p < 1e-15) {
                dropped += p;
                continue;
            }
            const double dp =
                (model.probability(y, x + h) - model.probability(y, x - h)) / (2.0 * h);
            F += dp * dp / p;
        }
        return F;
    };
    const double F = detail::richardson(F_at, step);
    if (dropped_mass) *dropped_mass = dropped;
    return F;
}

// --- QFI, pure states --------------------------------------------------

// H = 4 [ <d psi | d psi> + <d psi | psi>^2 ] with amplitude finite
// differences; Richardson pair on the step.
inline double qfi_pure(const std::function<FockState(double)>& family, double x,
                       double step = 1e-4) {
    if (!(step > 0.0)) throw domain_error("qfi_pure: step must be > 0");
    auto H_at = [&](double h) {
        const FockState sp = family(x + h);
        const FockState sm = family(x - h);
        const FockState s0 = family(x);
        if (sp.rep() != FockState::Rep::Pure || s0.rep() != FockState::Rep::Pure)
            throw differentiation_error("qfi_pure: family must produce pure states");
        if (sp.dims() != sm.dims() || sp.dims() != s0.dims())
            throw differentiation_error("qfi_pure: family dims change across the stencil");
        for (const FockState* s : {&sp, &sm, &s0})
            if (std::fabs(s->norm() - 1.0) > 1e-8)
                throw differentiation_error("qfi_pure: norm drift across the stencil");
        const std::size_t n = s0.total_dim();
        complexd dpsi_psi(0.0, 0.0);
        double dpsi_dpsi = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const complexd d = (sp.amp(i) - sm.amp(i)) / (2.0 * h);
            dpsi_dpsi += std::norm(d);
            dpsi_psi += std::conj(d) * s0.amp(i);
        }
        return 4.0 * (dpsi_dpsi + (dpsi_psi * dpsi_psi).real());
    };
    return detail::richardson(H_at, step);
}

// --- QFI, mixed states (spectral SLD) -----------------------------------

// L = 2 sum_{n,m} <m| d rho |n> / (p_n + p_m) |m><n|, summed over pairs
// with p_n + p_m >= 1e-12; H = Tr(rho L^2).
inline double qfi_mixed(const std::function<Eigen::MatrixXcd(double)>& family, double x,
                        double step = 1e-4, double spectral_floor = 1e-12) {
    if (!(step > 0.0)) throw domain_error("qfi_mixed: step must be > 0");
    auto H_at = [&](double h) {
        const Eigen::MatrixXcd rho = family(x);
        if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
            throw domain_error("qfi_mixed: density matrix not Hermitian");
        const Eigen::MatrixXcd drho = (family(x + h) - family(x - h)) / (2.0 * h);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
        const Eigen::VectorXd p = es.eigenvalues();
        const Eigen::MatrixXcd U = es.eigenvectors();
        const Eigen::MatrixXcd A = U.adjoint() * drho * U;
        const int n = static_cast<int>(p.size());
        Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(n, n);
        for (int m = 0; m < n; ++m)
            for (int k = 0; k < n; ++k) {
                const double denom = p(m) + p(k);
                if (denom >= spectral_floor) L(m, k) = 2.0 * A(m, k) / denom;
            }
        // Tr(rho L^2) in the eigenbasis
        double H = 0.0;
        for (int m = 0; m < n; ++m)
            for (int k = 0; k < n; ++k) H += std::max(p(m), 0.0) * std::norm(L(m, k));
        return H;
    };
    return detail::richardson(H_at, step);
}

// --- Gaussian fidelity and QFI -------------------------------------------

// Uhlmann fidelity of two (up to two-mode) Gaussian states,
//   F = exp[-1/2 dd^T (V1+V2)^{-1} dd] / (W - sqrt(W^2 - Delta)),
//   W = sqrt(Gamma) + sqrt(Lambda),
//   Delta = det(V1+V2), Gamma = 16 det(Om V1 Om V2 - I/4),
//   Lambda = 16 det(V1 + i Om/2) det(V2 + i Om/2).
// Single-mode inputs are padded with a vacuum mode (multiplicative).
inline double gaussian_fidelity(const GaussianState& s1_in, const GaussianState& s2_in) {
    GaussianState s1 = s1_in, s2 = s2_in;
    if (s1.modes() == 1) s1 = s1.tensor(GaussianState::vacuum(1));
    if (s2.modes() == 1) s2 = s2.tensor(GaussianState::vacuum(1));
    if (s1.modes() != 2 || s2.modes() != 2)
        throw domain_error("gaussian_fidelity: supports one- and two-mode states");
    s1.check_physical();
    s2.check_physical();

    const Eigen::MatrixXd Om = states::symplectic_form(2);
    const Eigen::MatrixXd Vsum = s1.V + s2.V;
    const Eigen::VectorXd dd = s2.d - s1.d;

    const double Delta = Vsum.determinant();
    const double Gamma =
        16.0 * (Om * s1.V * Om * s2.V - Eigen::MatrixXd::Identity(4, 4) / 4.0)
                   .determinant();
    const Eigen::MatrixXcd iOm2 = complexd(0.0, 0.5) * Om.cast<complexd>();
    const double Lambda = 16.0 * ((s1.V.cast<complexd>() + iOm2).determinant() *
                                  (s2.V.cast<complexd>() + iOm2).determinant())
                                     .real();

    const double W = std::sqrt(std::max(Gamma, 0.0)) + std::sqrt(std::max(Lambda, 0.0));
    double disc = W * W - Delta;
    // For (near-)pure pairs the discriminant is analytically zero but
    // carries O(eps) determinant noise whose square root would swamp
    // 1 - F; floor it at the noise scale.
    const double scale = std::max({W * W, std::fabs(Delta), 1.0});
    if (disc < 64.0 * 1e-16 * scale) disc = 0.0;
    const double denom = Delta / (W + std::sqrt(disc));

    const double expo = -0.5 * dd.dot(Vsum.llt().solve(dd));
    const double F = std::exp(expo) / denom;
    return std::min(std::max(F, 0.0), 1.0);
}

struct GaussianQfiResult {
    double value = 0.0;
    bool no_information = false;  // fidelity pinned at 1 across the stencil
    double step_spread = 0.0;     // |H(dx/2) - H(dx)| / max(|H|, 1)
};

// H = 8 [1 - sqrt(F(rho_{x-h/2}, rho_{x+h/2}))] / h^2, Richardson over
// (dx, dx/2). Steps below ~1e-2 start to see fidelity round-off for
// O(1) QFIs; the default keeps the truncation and round-off balanced.
inline GaussianQfiResult gaussian_qfi(const std::function<GaussianState(double)>& family,
                                      double x, double dx = 0.05) {
    if (!(dx > 0.0)) throw domain_error("gaussian_qfi: dx must be > 0");
    bool pinned = true;
    auto H_at = [&](double h) {
        const double F = gaussian_fidelity(family(x - h / 2.0), family(x + h / 2.0));
        if (F < 1.0 - 1e-14) pinned = false;
        return 8.0 * (1.0 - std::sqrt(F)) / (h * h);
    };
    const double H1 = H_at(dx);
    const double H2 = H_at(dx / 2.0);
    GaussianQfiResult out;
    if (pinned) {
        out.no_information = true;
        return out;
    }
    out.value = (4.0 * H2 - H1) / 3.0;
    out.step_spread = std::fabs(H2 - H1) / std::max(std::fabs(out.value), 1.0);
    if (out.step_spread > 0.2)
        throw differentiation_error(
            "gaussian_qfi: estimate not stationary across the step pair; adjust dx");
    return out;
}

// --- Homodyne Fisher information -----------------------------------------

struct HomodyneResult {
    double fisher = 0.0;
    double angle = 0.0;
};

namespace detail {

inline double homodyne_fisher_at(const std::function<GaussianState(double)>& family,
                                 double x, double angle, int mode, double step) {
    auto moments = [&](double xx) -> std::pair<double, double> {
        const GaussianState s = family(xx).marginal_mode(mode);
        Eigen::Vector2d u(std::cos(angle), std::sin(angle));
        return {u.dot(s.d.head<2>()), u.dot(s.V.topLeftCorner<2, 2>() * u)};
    };
    const auto [mu0, s0] = moments(x);
    if (!(s0 > 1e-12))
        throw domain_error("homodyne_fisher: measured quadrature variance degenerate");
    auto F_at = [&](double h) {
        const auto [mup, sp] = moments(x + h);
        const auto [mum, sm] = moments(x - h);
        const double dmu = (mup - mum) / (2.0 * h);
        const double ds = (sp - sm) / (2.0 * h);
        return dmu * dmu / s0 + 0.5 * (ds / s0) * (ds / s0);
    };
    return richardson(F_at, step);
}

}  // namespace detail

// FI of a homodyne measurement at a fixed angle on one mode's Gaussian
// marginal: F = (d mu)^2 / s + (1/2)(d s / s)^2.
inline HomodyneResult homodyne_fisher(const std::function<GaussianState(double)>& family,
                                      double x, double angle, int mode = 0,
                                      double step = 1e-4) {
    return {detail::homodyne_fisher_at(family, x, angle, mode, step), angle};
}

// Grid search plus golden refinement over the half-period [0, pi).
inline HomodyneResult homodyne_fisher_optimal(
    const std::function<GaussianState(double)>& family, double x, int mode = 0,
    double step = 1e-4, int grid = 180) {
    double best_f = -1.0, best_a = 0.0;
    for (int i = 0; i < grid; ++i) {
        const double a = pi * i / grid;
        const double f = detail::homodyne_fisher_at(family, x, a, mode, step);
        if (f > best_f) {
            best_f = f;
            best_a = a;
        }
    }
    double lo = best_a - pi / grid, hi = best_a + pi / grid;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = detail::homodyne_fisher_at(family, x, c, mode, step);
    double fd = detail::homodyne_fisher_at(family, x, d, mode, step);
    while (hi - lo > 1e-7) {
        if (fc > fd) {
            hi = d; d = c; fd = fc;
            c = hi - gr * (hi - lo);
            fc = detail::homodyne_fisher_at(family, x, c, mode, step);
        } else {
            lo = c; c = d; fc = fd;
            d = lo + gr * (hi - lo);
            fd = detail::homodyne_fisher_at(family, x, d, mode, step);
        }
    }
    const double a = (lo + hi) / 2.0;
    return {detail::homodyne_fisher_at(family, x, a, mode, step), a};
}

// --- Closed-form bound catalog -------------------------------------------

using Params = std::map<std::string, double>;

struct BoundResult {
    std::string name;
    double value = 0.0;   // standard deviation of the estimated parameter
    double nu = 1.0;
    Params inputs;
};

namespace detail {

inline double req(const Params& p, const std::string& key, const std::string& entry) {
    auto it = p.find(key);
    if (it == p.end())
        throw catalog_error("bound_catalog[" + entry + "]: missing parameter '" + key +
                            "'");
    return it->second;
}

inline double opt(const Params& p, const std::string& key, double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

inline void check_range(bool ok, const std::string& entry, const std::string& what) {
    if (!ok) throw domain_error("bound_catalog[" + entry + "]: " + what);
}

}  // namespace detail

inline const std::vector<std::string>& bound_catalog_entries() {
    static const std::vector<std::string> names = {
        "snl_intensity",     "fock_intensity", "sil",
        "mzi_lossless_cs_sv", "mzi_lossy_cs_sv", "sm_squeezed_phase",
        "noon",              "two_smsv_optimal", "homodyne_lossy",
        "su11_external",     "su11_internal"};
    return names;
}

// Every entry returns a standard deviation carrying the explicit
// nu^{-1/2} repetition factor ("nu" parameter, default 1).
inline BoundResult bound_catalog(const std::string& name, const Params& p) {
    using namespace detail;
    const double nu = opt(p, "nu", 1.0);
    check_range(nu >= 1.0, name, "nu must be >= 1");
    const double rnu = std::sqrt(nu);
    double v = 0.0;

    if (name == "snl_intensity") {
        const double T = req(p, "T", name), eta = req(p, "eta", name),
                     N = req(p, "N", name);
        check_range(T > 0.0 && T <= 1.0, name, "T in (0,1]");
        check_range(eta > 0.0 && eta <= 1.0, name, "eta in (0,1]");
        check_range(N > 0.0, name, "N > 0");
        v = std::sqrt(T / (eta * N)) / rnu;
    } else if (name == "fock_intensity") {
        const double T = req(p, "T", name), eta = req(p, "eta", name),
                     N = req(p, "N", name);
        check_range(T > 0.0 && T <= 1.0, name, "T in (0,1]");
        check_range(eta > 0.0 && eta <= 1.0, name, "eta in (0,1]");
        check_range(N > 0.0, name, "N > 0");
        v = std::sqrt(T * (1.0 - eta * T) / (eta * N)) / rnu;
    } else if (name == "sil") {
        const double N = req(p, "N", name), ea = req(p, "eta_a", name),
                     eb = req(p, "eta_b", name);
        check_range(N > 0.0, name, "N > 0");
        check_range(ea > 0.0 && ea <= 1.0 && eb > 0.0 && eb <= 1.0, name,
                    "eta_a, eta_b in (0,1]");
        v = (std::sqrt(ea) + std::sqrt(eb)) / (2.0 * std::sqrt(ea * eb)) /
            std::sqrt(N) / rnu;
    } else if (name == "mzi_lossless_cs_sv") {
        const double a2 = req(p, "alpha_sq", name), r = req(p, "r", name);
        check_range(a2 >= 0.0 && r >= 0.0, name, "alpha_sq, r >= 0");
        v = 1.0 / std::sqrt(a2 * std::exp(2.0 * r) + std::pow(std::sinh(r), 2)) / rnu;
    } else if (name == "mzi_lossy_cs_sv") {
        const double a2 = req(p, "alpha_sq", name), r = req(p, "r", name),
                     eta = req(p, "eta", name);
        check_range(eta > 0.0 && eta <= 1.0, name, "eta in (0,1]");
        const double H = a2 * eta / ((1.0 - eta) + std::exp(-2.0 * r) * eta) +
                         eta * std::pow(std::sinh(r), 2);
        v = 1.0 / std::sqrt(H) / rnu;
    } else if (name == "sm_squeezed_phase") {
        const double N = req(p, "N", name);
        check_range(N > 0.0, name, "N > 0");
        v = 1.0 / std::sqrt(8.0 * (N + N * N)) / rnu;
    } else if (name == "noon") {
        const double N = req(p, "N", name);
        check_range(N >= 1.0, name, "N >= 1");
        v = 1.0 / (rnu * N);
    } else if (name == "two_smsv_optimal") {
        const double N = req(p, "N", name);
        check_range(N > 0.0, name, "N > 0");
        v = 1.0 / std::sqrt(N * (N + 1.0)) / rnu;
    } else if (name == "homodyne_lossy") {
        const double a2 = req(p, "alpha_sq", name), r = req(p, "r", name),
                     eta = req(p, "eta", name);
        check_range(a2 > 0.0, name, "alpha_sq > 0");
        check_range(eta > 0.0 && eta <= 1.0, name, "eta in (0,1]");
        v = std::sqrt(1.0 / (a2 * std::exp(2.0 * r)) + (1.0 - eta) / (eta * a2)) / rnu;
    } else if (name == "su11_external") {
        const double base = req(p, "delta_phi", name), ee = req(p, "eta_e", name);
        check_range(base > 0.0, name, "delta_phi > 0");
        check_range(ee > 0.0 && ee <= 1.0, name, "eta_e in (0,1]");
        v = base / std::sqrt(ee) / rnu;
    } else if (name == "su11_internal") {
        const double base = req(p, "delta_phi", name), ei = req(p, "eta_i", name);
        const double Ni = req(p, "N_i", name), a2 = req(p, "alpha_sq", name),
                     b2 = req(p, "beta_sq", name);
        check_range(base > 0.0, name, "delta_phi > 0");
        check_range(ei > 0.0 && ei <= 1.0, name, "eta_i in (0,1]");
        check_range(a2 + b2 > 0.0, name, "alpha_sq + beta_sq > 0");
        v = std::sqrt(1.0 + (1.0 - ei) / ei * Ni / (a2 + b2)) * base / rnu;
    } else {
        std::string all;
        for (const auto& n : bound_catalog_entries()) all += " " + n;
        throw catalog_error("bound_catalog: unknown entry '" + name +
                            "'; available:" + all);
    }
    return {name, v, nu, p};
}

// --- NOON coincidence statistics -------------------------------------------

struct NoonCoincidence {
    double p_coin = 0.0;
    double delta_phi = 0.0;      // CR bound for the coincidence scheme, nu = 1
    bool infinite_bound = false; // sin(N phi) = 0
    double v_threshold = 0.0;
    bool super_sensitive = false;
};

// p = f_N [1 + V_N cos(N phi)]/2; threshold visibility
// V_th = sqrt(eta_tilde / (f_N^2 N)) with
// eta_tilde = [2 sqrt(eta_a eta_b) / (sqrt(eta_a) + sqrt(eta_b))]^2.
inline NoonCoincidence noon_coincidence(double phi, double f_N, double V_N, int N,
                                        double eta_a = 1.0, double eta_b = 1.0) {
    if (!(f_N >= 0.0 && f_N <= 1.0) || !(V_N >= 0.0 && V_N <= 1.0))
        throw domain_error("noon_coincidence: f_N, V_N must be in [0,1]");
    if (N < 1) throw domain_error("noon_coincidence: N must be >= 1");
    if (!(eta_a > 0.0 && eta_a <= 1.0 && eta_b > 0.0 && eta_b <= 1.0))
        throw domain_error("noon_coincidence: eta_a, eta_b must be in (0,1]");
    NoonCoincidence out;
    out.p_coin = f_N * (1.0 + V_N * std::cos(N * phi)) / 2.0;
    const double s = std::fabs(std::sin(N * phi));
    if (s < 1e-15 || V_N == 0.0 || f_N == 0.0) {
        out.infinite_bound = true;
        out.delta_phi = std::numeric_limits<double>::infinity();
    } else {
        out.delta_phi = 2.0 * std::sqrt(out.p_coin * (1.0 - out.p_coin)) /
                        (f_N * V_N * N * s);
    }
    const double eta_tilde = std::pow(
        2.0 * std::sqrt(eta_a * eta_b) / (std::sqrt(eta_a) + std::sqrt(eta_b)), 2);
    out.v_threshold = f_N > 0.0
                          ? std::sqrt(eta_tilde / (f_N * f_N * N))
                          : std::numeric_limits<double>::infinity();
    out.super_sensitive = V_N > out.v_threshold;
    return out;
}

// --- Differential intensity detection figures ------------------------------

enum class DifferentialProbe { TwinFock, Tmsv, Tmsd, ProductCoherent };

struct DifferentialFigures {
    double sigma_out = 0.0;
    std::optional<double> snr;
    std::optional<double> r_snr;
    bool zero_signal = false;  // T eta_a = eta_b

    double require_snr() const {
        if (!snr)
            throw asymmetric_probe_error(
                "SNR formula applies to symmetric probes only (TF, TMSV, PC)");
        return *snr;
    }
};

struct DifferentialParams {
    double N = 0.0;         // per-mode mean photons (TF, PC)
    double G = 1.0;         // gain (TMSV, TMSD)
    double alpha_sq = 0.0;  // printed-formula seed parameter (TMSV), 0 for pure TMSV
};

// Output NRFs of the gain/loss input-output relations, evaluated as
// printed, plus the SNR and the SNR ratio against the balanced
// product-coherent benchmark. The SNR block requires a symmetric probe.
inline DifferentialFigures differential_intensity_figures(DifferentialProbe probe,
                                                          double T, double eta_a,
                                                          double eta_b,
                                                          const DifferentialParams& pr) {
    if (!(T >= 0.0 && T <= 1.0)) throw domain_error("differential: T outside [0,1]");
    if (!(eta_a > 0.0 && eta_a <= 1.0 && eta_b > 0.0 && eta_b <= 1.0))
        throw domain_error("differential: eta_a, eta_b outside (0,1]");

    const double Tea = T * eta_a, eb = eta_b;
    DifferentialFigures out;
    out.zero_signal = std::fabs(Tea - eb) < 1e-15;

    double Q_M = 0.0, sigma_in = 1.0, N = pr.N;
    bool symmetric = true;
    switch (probe) {
        case DifferentialProbe::TwinFock:
            if (!(pr.N > 0.0)) throw domain_error("differential: TF needs N > 0");
            out.sigma_out = 1.0 - (Tea * Tea + eb * eb) / (Tea + eb);
            Q_M = -1.0;
            sigma_in = 0.0;
            break;
        case DifferentialProbe::Tmsv: {
            if (!(pr.G >= 1.0)) throw domain_error("differential: TMSV needs G >= 1");
            out.sigma_out =
                1.0 + (pr.G * pr.alpha_sq * (Tea - eb) * (Tea - eb) -
                       (Tea * Tea + eb * eb)) /
                          (Tea + eb);
            N = pr.G - 1.0;  // sinh^2 r
            Q_M = N;
            sigma_in = 0.0;
            symmetric = N > 0.0;
            break;
        }
        case DifferentialProbe::Tmsd:
            if (!(pr.G >= 1.0)) throw domain_error("differential: TMSD needs G >= 1");
            out.sigma_out = 1.0 + 2.0 * (pr.G - 1.0) *
                                      (pr.G * (Tea - eb) * (Tea - eb) - eb * eb) /
                                      (pr.G * Tea + (pr.G - 1.0) * eb);
            symmetric = false;  // <n_a> != <n_b> for a displaced seed
            break;
        case DifferentialProbe::ProductCoherent:
            if (!(pr.N > 0.0)) throw domain_error("differential: PC needs N > 0");
            out.sigma_out = 1.0;
            Q_M = 0.0;
            sigma_in = 1.0;
            break;
    }

    if (symmetric && N > 0.0) {
        const double noise =
            (Tea - eb) * (Tea - eb) * Q_M + 2.0 * Tea * eb * (sigma_in - 1.0) +
            (Tea + eb);
        out.snr = std::fabs(eb - Tea) * N / std::sqrt(N * noise);
        out.r_snr = std::sqrt((Tea + eb) / noise);
    }
    return out;
}

// --- Multiparameter bounds ---------------------------------------------------

struct Qfim {
    Eigen::MatrixXd matrix;
    std::vector<std::string> labels;

    void validate() const {
        if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() > 1e-10)
            throw domain_error("Qfim: matrix not symmetric");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(matrix);
        if (es.eigenvalues().minCoeff() < -1e-10)
            throw domain_error("Qfim: matrix not positive semidefinite");
    }
};

enum class TransmittanceProbe { Quantum, ProductCoherent };

// Diagonal QFIM for K transmittance channels:
//   quantum: eta_k N_k / (T_k (1 - eta_k T_k))   [first printed form]
//   PC     : eta_k N_k / T_k
inline Qfim qfim_transmittances(const std::vector<double>& T,
                                const std::vector<double>& eta,
                                const std::vector<double>& N,
                                TransmittanceProbe probe = TransmittanceProbe::Quantum) {
    const std::size_t K = T.size();
    if (eta.size() != K || N.size() != K || K == 0)
        throw domain_error("qfim_transmittances: inconsistent channel arrays");
    Qfim q;
    q.matrix = Eigen::MatrixXd::Zero(K, K);
    for (std::size_t k = 0; k < K; ++k) {
        if (T[k] <= 0.0 || T[k] >= 1.0)
            throw boundary_error("qfim_transmittances: T_" + std::to_string(k) +
                                 " on the boundary of (0,1); bound diverges or "
                                 "degenerates");
        if (!(eta[k] > 0.0 && eta[k] <= 1.0))
            throw domain_error("qfim_transmittances: eta outside (0,1]");
        if (!(N[k] > 0.0)) throw domain_error("qfim_transmittances: N must be > 0");
        q.matrix(k, k) = probe == TransmittanceProbe::Quantum
                             ? eta[k] * N[k] / (T[k] * (1.0 - eta[k] * T[k]))
                             : eta[k] * N[k] / T[k];
        q.labels.push_back("T_" + std::to_string(k));
    }
    return q;
}

// Variance bound n^T H^+ n / nu for the global parameter n . x, with the
// pseudo-inverse taken on the support (eigenvalues above 1e-10 * max).
inline double projected_variance_bound(const Qfim& H, const Eigen::VectorXd& n,
                                       double nu = 1.0) {
    H.validate();
    if (n.size() != H.matrix.rows())
        throw domain_error("projected_variance_bound: projection size mismatch");
    if (n.cwiseAbs().maxCoeff() == 0.0)
        throw domain_error("projected_variance_bound: projection vector is zero");
    if (!(nu >= 1.0)) throw domain_error("projected_variance_bound: nu must be >= 1");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H.matrix);
    const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(es.eigenvalues().size());
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i) > 1e-10 * lmax) inv(i) = 1.0 / es.eigenvalues()(i);
    const Eigen::MatrixXd pinv =
        es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
    return n.dot(pinv * n) / nu;
}

}  // namespace qplasm::estimate
