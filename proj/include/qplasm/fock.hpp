#pragma once

#include <complex>
#include <numeric>
#include <vector>

#include "qplasm/errors.hpp"
#include "qplasm/units.hpp"

namespace qplasm::states {

// Truncated photon-number-basis state over 1..4 modes, either pure
// (amplitude tensor) or diagonal in the joint number basis (pmf).
// Loss is the only channel that demotes pure to diagonal.
class FockState {
  public:
    enum class Rep { Pure, Diagonal };

    static FockState pure(std::vector<int> dims) {
        FockState s;
        s.rep_ = Rep::Pure;
        s.dims_ = std::move(dims);
        s.amp_.assign(s.total_dim(), complexd(0.0, 0.0));
        return s;
    }

    static FockState diagonal(std::vector<int> dims) {
        FockState s;
        s.rep_ = Rep::Diagonal;
        s.dims_ = std::move(dims);
        s.prob_.assign(s.total_dim(), 0.0);
        return s;
    }

    Rep rep() const { return rep_; }
    int modes() const { return static_cast<int>(dims_.size()); }
    const std::vector<int>& dims() const { return dims_; }
    int dim(int mode) const { return dims_.at(mode); }

    std::size_t total_dim() const {
        std::size_t n = 1;
        for (int d : dims_) n *= static_cast<std::size_t>(d);
        return n;
    }

    // Row-major index: mode 0 slowest.
    std::size_t index(const std::vector<int>& ns) const {
        std::size_t idx = 0;
        for (int k = 0; k < modes(); ++k) idx = idx * dims_[k] + ns[k];
        return idx;
    }

    std::vector<int> occupation(std::size_t idx) const {
        std::vector<int> ns(modes());
        for (int k = modes() - 1; k >= 0; --k) {
            ns[k] = static_cast<int>(idx % dims_[k]);
            idx /= dims_[k];
        }
        return ns;
    }

    complexd& amp(std::size_t idx) { return amp_.at(idx); }
    const complexd& amp(std::size_t idx) const { return amp_.at(idx); }
    std::vector<complexd>& amplitudes() { return amp_; }
    const std::vector<complexd>& amplitudes() const { return amp_; }

    double& prob(std::size_t idx) { return prob_.at(idx); }
    const double& prob(std::size_t idx) const { return prob_.at(idx); }
    std::vector<double>& probabilities() { return prob_; }
    const std::vector<double>& probabilities() const { return prob_; }

    bool truncation_warning() const { return truncation_warning_; }
    void set_truncation_warning(bool w) { truncation_warning_ = w; }

    double norm() const {
        if (rep_ == Rep::Pure) {
            double s = 0.0;
            for (const auto& a : amp_) s += std::norm(a);
            return s;
        }
        return std::accumulate(prob_.begin(), prob_.end(), 0.0);
    }

    void normalize() {
        const double n = norm();
        if (n <= 0.0) throw domain_error("FockState: zero-norm state");
        if (rep_ == Rep::Pure) {
            const double inv = 1.0 / std::sqrt(n);
            for (auto& a : amp_) a *= inv;
        } else {
            for (auto& p : prob_) p /= n;
        }
    }

    // Joint probability of an occupation index.
    double joint_prob(std::size_t idx) const {
        return rep_ == Rep::Pure ? std::norm(amp_[idx]) : prob_[idx];
    }

    // Probability mass sitting on the top number layer of a given mode.
    double cutoff_mass(int mode) const {
        double mass = 0.0;
        const std::size_t n = total_dim();
        for (std::size_t i = 0; i < n; ++i)
            if (occupation(i)[mode] == dims_[mode] - 1) mass += joint_prob(i);
        return mass;
    }

    // Drop amplitudes, keep the joint number distribution.
    FockState to_diagonal() const {
        if (rep_ == Rep::Diagonal) return *this;
        FockState out = diagonal(dims_);
        for (std::size_t i = 0; i < amp_.size(); ++i) out.prob_[i] = std::norm(amp_[i]);
        out.truncation_warning_ = truncation_warning_;
        return out;
    }

    // Marginal number distribution of one mode.
    std::vector<double> marginal(int mode) const {
        std::vector<double> p(dims_.at(mode), 0.0);
        const std::size_t n = total_dim();
        for (std::size_t i = 0; i < n; ++i) p[occupation(i)[mode]] += joint_prob(i);
        return p;
    }

    double mean_photons(int mode) const {
        const auto p = marginal(mode);
        double m = 0.0;
        for (std::size_t n = 0; n < p.size(); ++n) m += static_cast<double>(n) * p[n];
        return m;
    }

    double photon_variance(int mode) const {
        const auto p = marginal(mode);
        double m = 0.0, m2 = 0.0;
        for (std::size_t n = 0; n < p.size(); ++n) {
            m += static_cast<double>(n) * p[n];
            m2 += static_cast<double>(n) * static_cast<double>(n) * p[n];
        }
        return m2 - m * m;
    }

    // Cov(n_i, n_j) over the joint number distribution.
    double photon_covariance(int mode_i, int mode_j) const {
        const std::size_t n = total_dim();
        double mi = 0.0, mj = 0.0, mij = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const auto ns = occupation(k);
            const double p = joint_prob(k);
            mi += ns[mode_i] * p;
            mj += ns[mode_j] * p;
            mij += static_cast<double>(ns[mode_i]) * ns[mode_j] * p;
        }
        return mij - mi * mj;
    }

  private:
    Rep rep_ = Rep::Pure;
    std::vector<int> dims_;
    std::vector<complexd> amp_;
    std::vector<double> prob_;
    bool truncation_warning_ = false;
};

}  // namespace qplasm::states
