#pragma once

#include <Eigen/Dense>
#include <complex>

#include "qplasm/errors.hpp"
#include "qplasm/units.hpp"

namespace qplasm::states {

// Quadrature convention: x = (a + a^dag)/sqrt(2), Q = (x1, p1, x2, p2),
// vacuum covariance I/2, symplectic form Omega = diag(J, J) with
// J = [[0, 1], [-1, 0]].
inline Eigen::MatrixXd symplectic_form(int modes) {
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * modes, 2 * modes);
    for (int k = 0; k < modes; ++k) {
        omega(2 * k, 2 * k + 1) = 1.0;
        omega(2 * k + 1, 2 * k) = -1.0;
    }
    return omega;
}

struct GaussianState {
    Eigen::VectorXd d;  // first moments
    Eigen::MatrixXd V;  // symmetrized covariance

    int modes() const { return static_cast<int>(d.size()) / 2; }

    static GaussianState vacuum(int modes) {
        GaussianState s;
        s.d = Eigen::VectorXd::Zero(2 * modes);
        s.V = Eigen::MatrixXd::Identity(2 * modes, 2 * modes) / 2.0;
        return s;
    }

    // Smallest eigenvalue of V + i Omega/2; >= 0 for physical states.
    double physicality_margin() const {
        const int n = static_cast<int>(d.size());
        Eigen::MatrixXcd M = V.cast<complexd>();
        M += complexd(0.0, 0.5) * symplectic_form(modes()).cast<complexd>();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
        double lo = es.eigenvalues()(0);
        for (int i = 1; i < n; ++i) lo = std::min(lo, es.eigenvalues()(i));
        return lo;
    }

    void check_physical(double tol = 1e-10) const {
        if (d.size() != V.rows() || V.rows() != V.cols())
            throw domain_error("GaussianState: moment dimensions disagree");
        if ((V - V.transpose()).cwiseAbs().maxCoeff() > 1e-10)
            throw domain_error("GaussianState: covariance not symmetric");
        if (physicality_margin() < -tol)
            throw domain_error("GaussianState: V + i Omega/2 not positive semidefinite");
    }

    complexd mode_amplitude(int mode) const {
        return complexd(d(2 * mode), d(2 * mode + 1)) / std::sqrt(2.0);
    }

    GaussianState marginal_mode(int mode) const {
        GaussianState s;
        s.d = d.segment(2 * mode, 2);
        s.V = V.block(2 * mode, 2 * mode, 2, 2);
        return s;
    }

    GaussianState tensor(const GaussianState& other) const {
        GaussianState s;
        const int n1 = static_cast<int>(d.size()), n2 = static_cast<int>(other.d.size());
        s.d = Eigen::VectorXd::Zero(n1 + n2);
        s.d.head(n1) = d;
        s.d.tail(n2) = other.d;
        s.V = Eigen::MatrixXd::Zero(n1 + n2, n1 + n2);
        s.V.topLeftCorner(n1, n1) = V;
        s.V.bottomRightCorner(n2, n2) = other.V;
        return s;
    }
};

namespace detail {

// Complex second moments <da_i^dag da_j> and <da_i da_j> from the
// non-symmetrized quadrature correlators C = V + i Omega/2.
struct ComplexMoments {
    Eigen::VectorXcd mean;  // <a_i>
    Eigen::MatrixXcd n;     // n_ij = <da_i^dag da_j>
    Eigen::MatrixXcd m;     // m_ij = <da_i da_j>
};

inline ComplexMoments complex_moments(const GaussianState& s) {
    const int M = s.modes();
    ComplexMoments cm;
    cm.mean.resize(M);
    cm.n.resize(M, M);
    cm.m.resize(M, M);
    const Eigen::MatrixXcd C =
        s.V.cast<complexd>() +
        complexd(0.0, 0.5) * symplectic_form(M).cast<complexd>();
    for (int i = 0; i < M; ++i) {
        cm.mean(i) = s.mode_amplitude(i);
        for (int j = 0; j < M; ++j) {
            const complexd xx = C(2 * i, 2 * j), xp = C(2 * i, 2 * j + 1);
            const complexd px = C(2 * i + 1, 2 * j), pp = C(2 * i + 1, 2 * j + 1);
            // The i(xp - px)/2 piece of the non-symmetrized correlator
            // supplies the -1/2 vacuum offset on the diagonal of n.
            cm.n(i, j) = 0.5 * (xx + complexd(0, 1) * xp - complexd(0, 1) * px + pp);
            cm.m(i, j) = 0.5 * (xx + complexd(0, 1) * xp + complexd(0, 1) * px - pp);
        }
    }
    return cm;
}

}  // namespace detail

// <n_mode> including displacement.
inline double gaussian_mean_photons(const GaussianState& s, int mode) {
    const auto cm = detail::complex_moments(s);
    return cm.n(mode, mode).real() + std::norm(cm.mean(mode));
}

// Cov(n_i, n_j) for a Gaussian state via quantum Wick contractions.
inline double gaussian_photon_covariance(const GaussianState& s, int i, int j) {
    const auto cm = detail::complex_moments(s);
    const complexd mi = cm.mean(i), mj = cm.mean(j);
    complexd t = 2.0 * std::conj(mi) * std::conj(mj) * cm.m(i, j);
    t += 2.0 * mi * std::conj(mj) * cm.n(i, j);
    double cov = t.real() + std::norm(cm.m(i, j)) + (cm.n(i, j) * cm.n(j, i)).real();
    if (i == j) cov += std::norm(mi) + cm.n(i, i).real();
    return cov;
}

inline double gaussian_photon_variance(const GaussianState& s, int mode) {
    return gaussian_photon_covariance(s, mode, mode);
}

}  // namespace qplasm::states
