#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <variant>

#include "qplasm/errors.hpp"
#include "qplasm/fock.hpp"
#include "qplasm/gaussian.hpp"

namespace qplasm::states {

struct TruncationOptions {
    int hard_cap = 64;          // per-mode photon cutoff ceiling
    double leakage_tol = 1e-8;  // top-layer mass above this sets the warning
};

namespace detail {

// Truncation floor from the auto-sizing rule cutoff >= mean + 8 std.
inline int cutoff_floor(double mean, double stddev, const TruncationOptions& opt) {
    const int want = static_cast<int>(std::ceil(mean + 8.0 * stddev)) + 1;
    const int cut = std::max(want, 2);
    if (cut > opt.hard_cap + 1)
        throw resource_error("Fock cutoff " + std::to_string(cut - 1) +
                             " exceeds hard cap " + std::to_string(opt.hard_cap));
    return cut;
}

// Grow a single-index amplitude sequence beyond the floor until the
// running term drops below tail_eps (heavy-tailed families need more
// than the mean + 8 std floor to honor the leakage invariant).
template <typename NextFn>
inline std::vector<complexd> grow_amplitudes(complexd first, int floor_entries,
                                             int max_entries, NextFn next,
                                             double tail_eps = 1e-10) {
    std::vector<complexd> amps{first};
    complexd c = first;
    for (int k = 1; k < max_entries; ++k) {
        c = next(c, k);
        amps.push_back(c);
        if (static_cast<int>(amps.size()) >= floor_entries && std::norm(c) < tail_eps)
            break;
    }
    return amps;
}

inline void attach_leakage_flag(FockState& s, const TruncationOptions& opt) {
    for (int k = 0; k < s.modes(); ++k)
        if (s.cutoff_mass(k) > opt.leakage_tol) s.set_truncation_warning(true);
}

}  // namespace detail

// --- Fock-representation constructors -------------------------------

inline FockState fock_coherent(complexd alpha, TruncationOptions opt = {}) {
    const double n = std::norm(alpha);
    const int floor_dim = detail::cutoff_floor(n, std::sqrt(std::max(n, 1.0)), opt);
    // c_n = e^{-|alpha|^2/2} alpha^n / sqrt(n!), built by recurrence
    const auto amps = detail::grow_amplitudes(
        std::exp(-0.5 * n), floor_dim, opt.hard_cap + 1,
        [&](complexd c, int k) { return c * alpha / std::sqrt(static_cast<double>(k)); });
    FockState s = FockState::pure({static_cast<int>(amps.size())});
    for (std::size_t k = 0; k < amps.size(); ++k) s.amp(k) = amps[k];
    detail::attach_leakage_flag(s, opt);
    s.normalize();
    return s;
}

inline FockState fock_number(int N, TruncationOptions opt = {}) {
    if (N < 0) throw domain_error("fock_number: N must be >= 0");
    if (N > opt.hard_cap) throw resource_error("fock_number: N exceeds hard cap");
    FockState s = FockState::pure({N + 1});
    s.amp(N) = 1.0;
    return s;
}

inline FockState fock_twin(int N, TruncationOptions opt = {}) {
    if (N < 0) throw domain_error("fock_twin: N must be >= 0");
    if (N > opt.hard_cap) throw resource_error("fock_twin: N exceeds hard cap");
    FockState s = FockState::pure({N + 1, N + 1});
    s.amp(s.index({N, N})) = 1.0;
    return s;
}

// (|N,0> + |0,N>)/sqrt(2); equal real amplitudes.
inline FockState fock_noon(int N, TruncationOptions opt = {}) {
    if (N < 1) throw domain_error("fock_noon: N must be >= 1");
    if (N > opt.hard_cap) throw resource_error("fock_noon: N exceeds hard cap");
    FockState s = FockState::pure({N + 1, N + 1});
    s.amp(s.index({N, 0})) = 1.0 / std::sqrt(2.0);
    s.amp(s.index({0, N})) = 1.0 / std::sqrt(2.0);
    return s;
}

inline FockState fock_squeezed_vacuum(double r, double theta_s = 0.0,
                                      TruncationOptions opt = {}) {
    if (r < 0.0) throw domain_error("fock_squeezed_vacuum: r must be >= 0");
    const double N = std::sinh(r) * std::sinh(r);
    const double var = 2.0 * N * (N + 1.0) + N;  // Var(n) = 2 sinh^2 cosh^2
    const int floor_dim = detail::cutoff_floor(N, std::sqrt(var), opt);
    // |xi> = (cosh r)^{-1/2} sum_m (-e^{i th} tanh r)^m sqrt((2m)!)/(2^m m!) |2m>
    const complexd base = -std::polar(std::tanh(r), theta_s);
    const auto even = detail::grow_amplitudes(
        complexd(1.0 / std::sqrt(std::cosh(r)), 0.0), (floor_dim + 1) / 2,
        opt.hard_cap / 2 + 1,
        [&](complexd c, int m) {
            return c * base * std::sqrt((2.0 * m - 1.0) * (2.0 * m)) / (2.0 * m);
        });
    FockState s = FockState::pure({static_cast<int>(2 * even.size() - 1)});
    for (std::size_t m = 0; m < even.size(); ++m) s.amp(2 * m) = even[m];
    detail::attach_leakage_flag(s, opt);
    s.normalize();
    return s;
}

// c_n = (-e^{i th_s} tanh r)^n / cosh r on |n, n>. The default
// theta_s = pi matches the Gaussian construction and the gain channel.
inline FockState fock_tmsv(double r, double theta_s = pi, TruncationOptions opt = {}) {
    if (r < 0.0) throw domain_error("fock_tmsv: r must be >= 0");
    const double N = std::sinh(r) * std::sinh(r);
    const int floor_dim = detail::cutoff_floor(N, std::sqrt(N * (N + 1.0)), opt);
    const complexd base = -std::polar(std::tanh(r), theta_s);
    const auto amps = detail::grow_amplitudes(
        complexd(1.0 / std::cosh(r), 0.0), floor_dim, opt.hard_cap + 1,
        [&](complexd c, int) { return c * base; });
    const int dim = static_cast<int>(amps.size());
    FockState s = FockState::pure({dim, dim});
    for (int n = 0; n < dim; ++n) s.amp(s.index({n, n})) = amps[n];
    detail::attach_leakage_flag(s, opt);
    s.normalize();
    return s;
}

// Product of two single-mode pure states.
inline FockState fock_product(const FockState& a, const FockState& b) {
    if (a.rep() != FockState::Rep::Pure || b.rep() != FockState::Rep::Pure ||
        a.modes() != 1 || b.modes() != 1)
        throw domain_error("fock_product: expects two single-mode pure states");
    FockState s = FockState::pure({a.dim(0), b.dim(0)});
    for (int n = 0; n < a.dim(0); ++n)
        for (int m = 0; m < b.dim(0); ++m)
            s.amp(s.index({n, m})) = a.amp(n) * b.amp(m);
    s.set_truncation_warning(a.truncation_warning() || b.truncation_warning());
    return s;
}

// --- Gaussian-representation constructors ---------------------------

inline GaussianState gaussian_coherent(complexd alpha) {
    GaussianState s = GaussianState::vacuum(1);
    s.d(0) = std::sqrt(2.0) * alpha.real();
    s.d(1) = std::sqrt(2.0) * alpha.imag();
    return s;
}

// Squeezed quadrature along angle theta_s/2; variance e^{-2r}/2 there.
inline GaussianState gaussian_squeezed_vacuum(double r, double theta_s = 0.0) {
    if (r < 0.0) throw domain_error("gaussian_squeezed_vacuum: r must be >= 0");
    GaussianState s = GaussianState::vacuum(1);
    const double ct = std::cos(theta_s / 2.0), st = std::sin(theta_s / 2.0);
    Eigen::Matrix2d rot;
    rot << ct, -st, st, ct;
    Eigen::Matrix2d diag = Eigen::Matrix2d::Zero();
    diag(0, 0) = std::exp(-2.0 * r) / 2.0;
    diag(1, 1) = std::exp(2.0 * r) / 2.0;
    s.V = rot * diag * rot.transpose();
    return s;
}

inline GaussianState gaussian_tmsv(double r, double theta_s = pi) {
    if (r < 0.0) throw domain_error("gaussian_tmsv: r must be >= 0");
    GaussianState s = GaussianState::vacuum(2);
    const double ch = std::cosh(2.0 * r), sh = std::sinh(2.0 * r);
    const double cs = std::cos(theta_s), sn = std::sin(theta_s);
    s.V.setZero();
    s.V(0, 0) = s.V(1, 1) = s.V(2, 2) = s.V(3, 3) = ch / 2.0;
    // cross block of S2(xi)|0,0>: (x_a x_b) coupling -cos, (x p) -sin
    Eigen::Matrix2d cross;
    cross << -cs, -sn, -sn, cs;
    cross *= sh / 2.0;
    s.V.block(0, 2, 2, 2) = cross;
    s.V.block(2, 0, 2, 2) = cross.transpose();
    return s;
}

// S2(xi) D_a(alpha) |0,0>, theta_s = pi by default.
inline GaussianState gaussian_tmsd(complexd alpha, double r, double theta_s = pi) {
    GaussianState s = gaussian_tmsv(r, theta_s);
    const complexd a_mean = alpha * std::cosh(r);
    const complexd b_mean = -std::polar(1.0, theta_s) * std::conj(alpha) * std::sinh(r);
    s.d(0) = std::sqrt(2.0) * a_mean.real();
    s.d(1) = std::sqrt(2.0) * a_mean.imag();
    s.d(2) = std::sqrt(2.0) * b_mean.real();
    s.d(3) = std::sqrt(2.0) * b_mean.imag();
    return s;
}

// --- Statistics ------------------------------------------------------

struct PhotonStats {
    double mean = 0.0;
    double variance = 0.0;
    double mandel_q = 0.0;
    bool vacuum_convention = false;  // Q_M pinned to 0 for (near-)vacuum
};

inline PhotonStats photon_statistics_impl(double mean, double variance) {
    PhotonStats st;
    st.mean = mean;
    st.variance = std::max(variance, 0.0);
    if (mean < 1e-12) {
        st.mandel_q = 0.0;
        st.vacuum_convention = true;
    } else {
        st.mandel_q = st.variance / mean - 1.0;
    }
    return st;
}

inline PhotonStats photon_statistics(const FockState& s, int mode = 0) {
    if (s.norm() <= 0.0) throw domain_error("photon_statistics: zero-norm state");
    return photon_statistics_impl(s.mean_photons(mode), s.photon_variance(mode));
}

inline PhotonStats photon_statistics(const GaussianState& s, int mode = 0) {
    s.check_physical();
    return photon_statistics_impl(gaussian_mean_photons(s, mode),
                                  gaussian_photon_variance(s, mode));
}

// --- Unified state construction ---------------------------------------

struct CoherentSpec {
    complexd alpha;
};
struct FockSpec {
    int n = 0;
};
struct TwinFockSpec {
    int n = 0;
};
struct NoonSpec {
    int n = 1;
};
struct SqueezedVacuumSpec {
    double r = 0.0;
    double theta_s = 0.0;
};
struct TmsvSpec {
    double r = 0.0;
    double theta_s = pi;
};
struct TmsdSpec {
    complexd alpha;
    double r = 0.0;
    double theta_s = pi;
};

using SingleModeSpec = std::variant<CoherentSpec, FockSpec, SqueezedVacuumSpec>;

struct ProductSpec {
    SingleModeSpec mode_a;
    SingleModeSpec mode_b;
};

using StateSpec = std::variant<CoherentSpec, FockSpec, TwinFockSpec, NoonSpec,
                               SqueezedVacuumSpec, TmsvSpec, TmsdSpec, ProductSpec>;

inline FockState make_fock_state(const SingleModeSpec& spec, TruncationOptions opt = {}) {
    return std::visit(
        [&](const auto& s) -> FockState {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, CoherentSpec>)
                return fock_coherent(s.alpha, opt);
            else if constexpr (std::is_same_v<T, FockSpec>)
                return fock_number(s.n, opt);
            else
                return fock_squeezed_vacuum(s.r, s.theta_s, opt);
        },
        spec);
}

// Truncated number-basis representation of a state spec. TMSD has no
// compact number-basis form here; ask for the Gaussian representation.
inline FockState make_fock_state(const StateSpec& spec, TruncationOptions opt = {}) {
    return std::visit(
        [&](const auto& s) -> FockState {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, CoherentSpec>)
                return fock_coherent(s.alpha, opt);
            else if constexpr (std::is_same_v<T, FockSpec>)
                return fock_number(s.n, opt);
            else if constexpr (std::is_same_v<T, TwinFockSpec>)
                return fock_twin(s.n, opt);
            else if constexpr (std::is_same_v<T, NoonSpec>)
                return fock_noon(s.n, opt);
            else if constexpr (std::is_same_v<T, SqueezedVacuumSpec>)
                return fock_squeezed_vacuum(s.r, s.theta_s, opt);
            else if constexpr (std::is_same_v<T, TmsvSpec>)
                return fock_tmsv(s.r, s.theta_s, opt);
            else if constexpr (std::is_same_v<T, ProductSpec>)
                return fock_product(make_fock_state(s.mode_a, opt),
                                    make_fock_state(s.mode_b, opt));
            else
                throw domain_error(
                    "make_fock_state: TMSD is Gaussian-represented; use "
                    "make_gaussian_state");
        },
        spec);
}

inline GaussianState make_gaussian_state(const SingleModeSpec& spec) {
    return std::visit(
        [](const auto& s) -> GaussianState {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, CoherentSpec>)
                return gaussian_coherent(s.alpha);
            else if constexpr (std::is_same_v<T, SqueezedVacuumSpec>)
                return gaussian_squeezed_vacuum(s.r, s.theta_s);
            else
                throw domain_error(
                    "make_gaussian_state: photon-number states are non-Gaussian");
        },
        spec);
}

// Moment representation of a state spec; number states are rejected.
inline GaussianState make_gaussian_state(const StateSpec& spec) {
    return std::visit(
        [](const auto& s) -> GaussianState {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, CoherentSpec>)
                return gaussian_coherent(s.alpha);
            else if constexpr (std::is_same_v<T, SqueezedVacuumSpec>)
                return gaussian_squeezed_vacuum(s.r, s.theta_s);
            else if constexpr (std::is_same_v<T, TmsvSpec>)
                return gaussian_tmsv(s.r, s.theta_s);
            else if constexpr (std::is_same_v<T, TmsdSpec>)
                return gaussian_tmsd(s.alpha, s.r, s.theta_s);
            else if constexpr (std::is_same_v<T, ProductSpec>)
                return make_gaussian_state(s.mode_a).tensor(
                    make_gaussian_state(s.mode_b));
            else
                throw domain_error(
                    "make_gaussian_state: photon-number states are non-Gaussian");
        },
        spec);
}

struct NrfResult {
    double sigma = 0.0;
    bool degenerate = false;  // one mode carried (near) zero mean photons
};

// sigma = Var(n_b - n_a) / (<n_a> + <n_b>).
inline NrfResult nrf(const FockState& s) {
    if (s.modes() != 2) throw domain_error("nrf: needs a two-mode state");
    const double ma = s.mean_photons(0), mb = s.mean_photons(1);
    if (ma + mb <= 0.0) throw degenerate_input_error("nrf: zero total mean photons");
    const double var =
        s.photon_variance(0) + s.photon_variance(1) - 2.0 * s.photon_covariance(0, 1);
    return {var / (ma + mb), ma < 1e-12 || mb < 1e-12};
}

inline NrfResult nrf(const GaussianState& s) {
    if (s.modes() != 2) throw domain_error("nrf: needs a two-mode state");
    const double ma = gaussian_mean_photons(s, 0), mb = gaussian_mean_photons(s, 1);
    if (ma + mb <= 0.0) throw degenerate_input_error("nrf: zero total mean photons");
    const double var = gaussian_photon_variance(s, 0) + gaussian_photon_variance(s, 1) -
                       2.0 * gaussian_photon_covariance(s, 0, 1);
    return {var / (ma + mb), ma < 1e-12 || mb < 1e-12};
}

}  // namespace qplasm::states
