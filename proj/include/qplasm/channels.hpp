#pragma once

#include <cmath>
#include <vector>

#include "qplasm/errors.hpp"
#include "qplasm/fock.hpp"
#include "qplasm/gaussian.hpp"
#include "qplasm/states.hpp"

namespace qplasm::channels {

using states::FockState;
using states::GaussianState;

namespace detail {

inline double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

// Binomial pmf row B(k | n, p), k = 0..n.
inline std::vector<double> binomial_row(int n, double p) {
    std::vector<double> row(n + 1);
    for (int k = 0; k <= n; ++k) {
        const double lg = log_factorial(n) - log_factorial(k) - log_factorial(n - k);
        double term = lg;
        term += k > 0 ? k * std::log(p) : 0.0;
        term += (n - k) > 0 ? (n - k) * std::log1p(-p) : 0.0;
        row[k] = (p == 0.0 && k > 0) || (p == 1.0 && k < n) ? 0.0 : std::exp(term);
    }
    return row;
}

}  // namespace detail

// --- Loss ------------------------------------------------------------

enum class LossTracking {
    Diagonal,      // reduce pure -> joint number diagonal, then thin
    Purification,  // append a vacuum environment mode, stay pure
};

// Fictitious beam splitter with a vacuum environment. The environment
// is never materialized in Diagonal mode; only the binomially thinned
// number distribution survives. This is the single non-unitary path in
// the Fock representation.
inline FockState apply_loss(const FockState& in, double eta, int mode,
                            LossTracking tracking = LossTracking::Diagonal);

inline GaussianState apply_loss(const GaussianState& in, double eta, int mode) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw domain_error("apply_loss: eta outside [0,1]");
    GaussianState out = in;
    const int M = in.modes();
    if (mode < 0 || mode >= M) throw domain_error("apply_loss: bad mode");
    Eigen::MatrixXd S = Eigen::MatrixXd::Identity(2 * M, 2 * M);
    S.block(2 * mode, 2 * mode, 2, 2) *= std::sqrt(eta);
    out.d = S * in.d;
    out.V = S * in.V * S.transpose();
    out.V.block(2 * mode, 2 * mode, 2, 2) +=
        (1.0 - eta) / 2.0 * Eigen::Matrix2d::Identity();
    return out;
}

// --- Beam splitter ----------------------------------------------------

// Mode-operator map (theta = pi/2 gives the symmetric splitter):
//   a -> sqrt(T) a - e^{ i theta} sqrt(1-T) b
//   b -> e^{-i theta} sqrt(1-T) a + sqrt(T) b
inline FockState apply_beam_splitter(const FockState& in, double T,
                                     double theta = pi / 2.0, int mode_a = 0,
                                     int mode_b = 1) {
    if (!(T >= 0.0 && T <= 1.0)) throw domain_error("apply_beam_splitter: T outside [0,1]");
    if (in.rep() != FockState::Rep::Pure)
        throw domain_error("apply_beam_splitter: Fock route needs a pure state");
    if (mode_a == mode_b || mode_a >= in.modes() || mode_b >= in.modes())
        throw domain_error("apply_beam_splitter: bad mode pair");

    // Photons present in the pair bound the output dims. Amplitudes
    // below the support threshold are dropped (with mass accounting)
    // so negligible tails cannot force huge output tensors.
    const double support_eps = 1e-14;
    int n_tot = 0;
    double dropped = 0.0;
    for (std::size_t idx = 0; idx < in.total_dim(); ++idx) {
        if (std::norm(in.amp(idx)) < support_eps) {
            dropped += std::norm(in.amp(idx));
            continue;
        }
        const auto ns = in.occupation(idx);
        n_tot = std::max(n_tot, ns[mode_a] + ns[mode_b]);
    }
    std::vector<int> out_dims = in.dims();
    out_dims[mode_a] = std::max(out_dims[mode_a], n_tot + 1);
    out_dims[mode_b] = std::max(out_dims[mode_b], n_tot + 1);
    FockState out = FockState::pure(out_dims);
    out.set_truncation_warning(in.truncation_warning() || dropped > 1e-8);

    const double st = std::sqrt(T), sr = std::sqrt(1.0 - T);
    const complexd eim = std::polar(1.0, -theta);  // e^{-i theta}
    const complexd eip = std::polar(1.0, theta);

    // U a^dag U^dag = st a^dag + e^{-i th} sr b^dag
    // U b^dag U^dag = -e^{i th} sr a^dag + st b^dag
    for (std::size_t idx = 0; idx < in.total_dim(); ++idx) {
        const complexd c = in.amp(idx);
        if (std::norm(c) < support_eps) continue;
        auto ns = in.occupation(idx);
        const int n = ns[mode_a], m = ns[mode_b];
        const double lg_nm = detail::log_factorial(n) + detail::log_factorial(m);
        for (int j = 0; j <= n; ++j) {
            for (int k = 0; k <= m; ++k) {
                const int p = j + k, q = n + m - p;
                const double lbin =
                    detail::log_factorial(n) - detail::log_factorial(j) -
                    detail::log_factorial(n - j) + detail::log_factorial(m) -
                    detail::log_factorial(k) - detail::log_factorial(m - k);
                const double mag =
                    std::exp(lbin +
                             0.5 * (detail::log_factorial(p) +
                                    detail::log_factorial(q) - lg_nm));
                complexd term = mag;
                if (j + (m - k) > 0) term *= std::pow(st, j + (m - k));
                if ((n - j) + k > 0) term *= std::pow(sr, (n - j) + k);
                for (int t = 0; t < n - j; ++t) term *= eim;
                for (int t = 0; t < k; ++t) term *= -eip;
                ns[mode_a] = p;
                ns[mode_b] = q;
                out.amp(out.index(ns)) += c * term;
            }
        }
        ns[mode_a] = n;
        ns[mode_b] = m;
    }
    return out;
}

inline GaussianState apply_beam_splitter(const GaussianState& in, double T,
                                         double theta = pi / 2.0, int mode_a = 0,
                                         int mode_b = 1) {
    if (!(T >= 0.0 && T <= 1.0)) throw domain_error("apply_beam_splitter: T outside [0,1]");
    const int M = in.modes();
    if (mode_a == mode_b || mode_a >= M || mode_b >= M)
        throw domain_error("apply_beam_splitter: bad mode pair");
    auto blk = [](complexd u) {
        Eigen::Matrix2d b;
        b << u.real(), -u.imag(), u.imag(), u.real();
        return b;
    };
    Eigen::MatrixXd S = Eigen::MatrixXd::Identity(2 * M, 2 * M);
    const double st = std::sqrt(T), sr = std::sqrt(1.0 - T);
    S.block(2 * mode_a, 2 * mode_a, 2, 2) = blk(st);
    S.block(2 * mode_a, 2 * mode_b, 2, 2) = blk(-std::polar(sr, theta));
    S.block(2 * mode_b, 2 * mode_a, 2, 2) = blk(std::polar(sr, -theta));
    S.block(2 * mode_b, 2 * mode_b, 2, 2) = blk(st);
    GaussianState out;
    out.d = S * in.d;
    out.V = S * in.V * S.transpose();
    return out;
}

inline FockState apply_loss(const FockState& in, double eta, int mode,
                            LossTracking tracking) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw domain_error("apply_loss: eta outside [0,1]");
    if (mode < 0 || mode >= in.modes()) throw domain_error("apply_loss: bad mode");
    if (eta == 1.0) return in;

    if (tracking == LossTracking::Purification) {
        if (in.rep() != FockState::Rep::Pure)
            throw domain_error("apply_loss: purification needs a pure state");
        // Append a vacuum environment mode and mix it in with a BS of
        // transmission eta; the output stays pure on modes+1 modes.
        std::vector<int> dims = in.dims();
        dims.push_back(in.dim(mode));
        FockState ext = FockState::pure(dims);
        for (std::size_t idx = 0; idx < in.total_dim(); ++idx) {
            if (std::norm(in.amp(idx)) == 0.0) continue;
            auto ns = in.occupation(idx);
            ns.push_back(0);
            ext.amp(ext.index(ns)) = in.amp(idx);
        }
        ext.set_truncation_warning(in.truncation_warning());
        return apply_beam_splitter(ext, eta, 0.0, mode, in.modes());
    }

    const FockState diag = in.to_diagonal();
    FockState out = FockState::diagonal(diag.dims());
    out.set_truncation_warning(diag.truncation_warning());
    const int d = diag.dim(mode);
    std::vector<std::vector<double>> thin(d);
    for (int n = 0; n < d; ++n) thin[n] = detail::binomial_row(n, eta);
    for (std::size_t idx = 0; idx < diag.total_dim(); ++idx) {
        const double p = diag.prob(idx);
        if (p == 0.0) continue;
        auto ns = diag.occupation(idx);
        const int n = ns[mode];
        for (int k = 0; k <= n; ++k) {
            ns[mode] = k;
            out.prob(out.index(ns)) += p * thin[n][k];
        }
    }
    return out;
}

// --- Phase shift ------------------------------------------------------

enum class PhaseKind { SingleMode, RelativeTwoMode };

inline FockState apply_phase(const FockState& in, double phi,
                             PhaseKind kind = PhaseKind::SingleMode, int mode_a = 0,
                             int mode_b = 1) {
    if (in.rep() == FockState::Rep::Diagonal) return in;  // counting stats untouched
    FockState out = in;
    for (std::size_t idx = 0; idx < out.total_dim(); ++idx) {
        const auto ns = out.occupation(idx);
        const double ang = kind == PhaseKind::SingleMode
                               ? phi * ns[mode_a]
                               : 0.5 * phi * (ns[mode_a] - ns[mode_b]);
        out.amp(idx) *= std::polar(1.0, ang);
    }
    return out;
}

inline GaussianState apply_phase(const GaussianState& in, double phi,
                                 PhaseKind kind = PhaseKind::SingleMode, int mode_a = 0,
                                 int mode_b = 1) {
    const int M = in.modes();
    Eigen::MatrixXd S = Eigen::MatrixXd::Identity(2 * M, 2 * M);
    auto rot = [](double a) {
        Eigen::Matrix2d r;
        r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
        return r;
    };
    if (kind == PhaseKind::SingleMode) {
        S.block(2 * mode_a, 2 * mode_a, 2, 2) = rot(phi);
    } else {
        S.block(2 * mode_a, 2 * mode_a, 2, 2) = rot(phi / 2.0);
        S.block(2 * mode_b, 2 * mode_b, 2, 2) = rot(-phi / 2.0);
    }
    GaussianState out;
    out.d = S * in.d;
    out.V = S * in.V * S.transpose();
    return out;
}

// --- Two-mode squeezer (gain) ------------------------------------------

// a -> sqrt(G) a + sqrt(G-1) b^dag  (theta_s = pi). Loss factors are
// composed separately with apply_loss, gain first.
inline GaussianState apply_two_mode_squeezer(const GaussianState& in, double G,
                                             int mode_a = 0, int mode_b = 1) {
    if (!(G >= 1.0)) throw domain_error("apply_two_mode_squeezer: G must be >= 1");
    const int M = in.modes();
    if (mode_a == mode_b || mode_a >= M || mode_b >= M)
        throw domain_error("apply_two_mode_squeezer: bad mode pair");
    Eigen::MatrixXd S = Eigen::MatrixXd::Identity(2 * M, 2 * M);
    const double g = std::sqrt(G), h = std::sqrt(G - 1.0);
    Eigen::Matrix2d Z;
    Z << 1.0, 0.0, 0.0, -1.0;
    S.block(2 * mode_a, 2 * mode_a, 2, 2) = g * Eigen::Matrix2d::Identity();
    S.block(2 * mode_b, 2 * mode_b, 2, 2) = g * Eigen::Matrix2d::Identity();
    S.block(2 * mode_a, 2 * mode_b, 2, 2) = h * Z;
    S.block(2 * mode_b, 2 * mode_a, 2, 2) = h * Z;
    GaussianState out;
    out.d = S * in.d;
    out.V = S * in.V * S.transpose();
    return out;
}

// Fock route exists only for the vacuum seed (the TMSV construction);
// anything else would need the full two-mode squeeze matrix exponential.
inline FockState apply_two_mode_squeezer(const FockState& in, double G,
                                         states::TruncationOptions opt = {}) {
    if (!(G >= 1.0)) throw domain_error("apply_two_mode_squeezer: G must be >= 1");
    bool is_vacuum = in.rep() == FockState::Rep::Pure && in.modes() == 2;
    if (is_vacuum)
        for (std::size_t idx = 0; idx < in.total_dim(); ++idx)
            if (std::norm(in.amp(idx)) > 0.0 && idx != in.index({0, 0}))
                is_vacuum = false;
    if (!is_vacuum)
        throw resource_error(
            "apply_two_mode_squeezer: Fock route supports the vacuum seed only; "
            "use the Gaussian representation");
    return states::fock_tmsv(std::acosh(std::sqrt(G)), pi, opt);
}

}  // namespace qplasm::channels
