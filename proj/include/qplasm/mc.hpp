#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "qplasm/errors.hpp"
#include "qplasm/estimate.hpp"
#include "qplasm/gaussian.hpp"
#include "qplasm/rng.hpp"
#include "qplasm/transduce.hpp"

namespace qplasm::mc {

// --- Worker pool -------------------------------------------------------

// QPLASM_THREADS caps parallelism; sampling stays bit-identical for any
// worker count because every sample owns a counter-RNG substream.
inline int resolve_threads(int requested = 0) {
    int n = requested;
    if (n <= 0) {
        if (const char* env = std::getenv("QPLASM_THREADS")) n = std::atoi(env);
    }
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    return std::max(1, std::min(n, 64));
}

inline void parallel_for(long count, int threads, const std::function<void(long)>& fn) {
    threads = std::min<long>(std::max(threads, 1), count);
    if (threads <= 1) {
        for (long i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([=, &fn] {
            for (long i = t; i < count; i += threads) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

// --- Probe sampling ------------------------------------------------------

enum class ProbeKind { Coherent, Fock, TwinFock, ProductCoherent, Tmsv };

enum class Measurement { PhotonCounting, IntensityDifference, Coincidence };

struct OutcomeSample {
    long n_a = 0;
    long n_b = 0;
};

// Draw the input photon number(s) for one repetition, then push every
// photon through its Bernoulli survival trial (probabilities p_a, p_b).
// This is the brute-force binomial pipeline; no closed-form shortcuts.
inline OutcomeSample sample_photon_pair(ProbeKind probe, double N, double p_a,
                                        double p_b, CounterRng& rng) {
    if (!(p_a >= 0.0 && p_a <= 1.0 && p_b >= 0.0 && p_b <= 1.0))
        throw domain_error("sample_photon_pair: survival probabilities outside [0,1]");
    OutcomeSample s;
    switch (probe) {
        case ProbeKind::Fock: {
            const long n0 = static_cast<long>(N);
            s.n_a = rng.binomial(n0, p_a);
            break;
        }
        case ProbeKind::Coherent: {
            const long n0 = rng.poisson(N);
            s.n_a = rng.binomial(n0, p_a);
            break;
        }
        case ProbeKind::TwinFock: {
            const long n0 = static_cast<long>(N);
            s.n_a = rng.binomial(n0, p_a);
            s.n_b = rng.binomial(n0, p_b);
            break;
        }
        case ProbeKind::ProductCoherent: {
            s.n_a = rng.binomial(rng.poisson(N), p_a);
            s.n_b = rng.binomial(rng.poisson(N), p_b);
            break;
        }
        case ProbeKind::Tmsv: {
            // thermal marginal with mean N, perfectly correlated pair
            const double q = N / (1.0 + N);
            long n0 = 0;
            while (rng.uniform() < q) ++n0;
            s.n_a = rng.binomial(n0, p_a);
            s.n_b = rng.binomial(n0, p_b);
            break;
        }
    }
    return s;
}

inline std::vector<OutcomeSample> sample_outcomes(ProbeKind probe, double N, double p_a,
                                                  double p_b, long nu, CounterRng& rng) {
    if (nu < 1) throw domain_error("sample_outcomes: nu must be >= 1");
    std::vector<OutcomeSample> draws(nu);
    for (long i = 0; i < nu; ++i) draws[i] = sample_photon_pair(probe, N, p_a, p_b, rng);
    return draws;
}

// Reduce raw photon draws to the scalar record of a measurement kind.
// Coincidence detection is fringe-based and has its own sampler.
inline std::vector<double> measurement_values(Measurement meas,
                                              const std::vector<OutcomeSample>& draws) {
    if (meas == Measurement::Coincidence)
        throw config_error(
            "measurement_values: coincidence detection needs a fringe probability; "
            "use sample_coincidences");
    std::vector<double> out;
    out.reserve(draws.size());
    for (const auto& d : draws)
        out.push_back(meas == Measurement::PhotonCounting
                          ? static_cast<double>(d.n_a)
                          : static_cast<double>(d.n_b - d.n_a));
    return out;
}

// Bernoulli draws of an N-fold coincidence fringe with event
// probability p_coin; returns the number of coincidences in nu trials.
inline long sample_coincidences(double p_coin, long nu, CounterRng& rng) {
    if (!(p_coin >= 0.0 && p_coin <= 1.0))
        throw domain_error("sample_coincidences: p outside [0,1]");
    if (nu < 1) throw domain_error("sample_coincidences: nu must be >= 1");
    return rng.binomial(nu, p_coin);
}

// Ground-truth transmittance of a Kretschmann stack, for configs that
// tie the estimated parameter to the transducer instead of a raw T.
inline double stack_transmittance(const transduce::LayerStack& stack, double theta_deg,
                                  double lambda_nm) {
    return transduce::kretschmann_reflectance(theta_deg, lambda_nm, stack).R;
}

// Bivariate-normal moment sampling of (n_a, n_b) for Gaussian states;
// the difference-detection noise model, approximate by construction.
inline OutcomeSample sample_gaussian_difference(const states::GaussianState& s,
                                                CounterRng& rng) {
    if (s.modes() != 2)
        throw domain_error("sample_gaussian_difference: needs a two-mode state");
    const double ma = states::gaussian_mean_photons(s, 0);
    const double mb = states::gaussian_mean_photons(s, 1);
    const double vaa = states::gaussian_photon_variance(s, 0);
    const double vbb = states::gaussian_photon_variance(s, 1);
    const double vab = states::gaussian_photon_covariance(s, 0, 1);
    // Cholesky of the 2x2 photon covariance
    const double l11 = std::sqrt(std::max(vaa, 0.0));
    const double l21 = l11 > 0.0 ? vab / l11 : 0.0;
    const double l22 = std::sqrt(std::max(vbb - l21 * l21, 0.0));
    const double z1 = rng.normal(), z2 = rng.normal();
    OutcomeSample out;
    out.n_a = std::lround(std::max(0.0, ma + l11 * z1));
    out.n_b = std::lround(std::max(0.0, mb + l21 * z1 + l22 * z2));
    return out;
}

// --- Estimate distributions ------------------------------------------------

struct EstimateDistribution {
    std::vector<double> estimates;
    double mean = 0.0;
    double stddev = 0.0;
    double bias = 0.0;   // mean - ground truth
    double truth = 0.0;
    long clamped = 0;    // inversions clipped at a bracket edge

    void finalize(double ground_truth) {
        truth = ground_truth;
        const long n = static_cast<long>(estimates.size());
        if (n < 2) throw domain_error("EstimateDistribution: needs >= 2 samples");
        double s = 0.0;
        for (double e : estimates) s += e;
        mean = s / n;
        double ss = 0.0;
        for (double e : estimates) ss += (e - mean) * (e - mean);
        stddev = std::sqrt(ss / (n - 1));
        bias = mean - ground_truth;
    }
};

// Standard error of a sample std via the chi-distribution approximation.
inline double stddev_standard_error(double stddev, long samples) {
    return stddev / std::sqrt(2.0 * (samples - 1));
}

struct TransmittanceConfig {
    ProbeKind probe = ProbeKind::Coherent;  // Coherent or Fock
    double N = 100.0;  // photons per repetition
    double T = 0.5;    // ground truth
    double eta = 1.0;  // channel + detection efficiency
    long nu = 1;
    long samples = 1000;
    std::uint64_t seed = 1;
    std::uint64_t stream_base = 0;  // substream offset (sweeps)
    int threads = 0;
};

// Sample-mean estimator T_est = sum(counts) / (nu eta N) per sample.
inline EstimateDistribution estimate_transmittance(const TransmittanceConfig& cfg) {
    if (cfg.probe != ProbeKind::Coherent && cfg.probe != ProbeKind::Fock)
        throw config_error("estimate_transmittance: probe must be coherent or fock");
    if (!(cfg.T >= 0.0 && cfg.T <= 1.0)) throw config_error("estimate_transmittance: T");
    if (!(cfg.eta > 0.0 && cfg.eta <= 1.0))
        throw config_error("estimate_transmittance: eta outside (0,1]");
    if (cfg.samples < 2) throw config_error("estimate_transmittance: samples >= 2");
    EstimateDistribution dist;
    dist.estimates.assign(cfg.samples, 0.0);
    parallel_for(cfg.samples, resolve_threads(cfg.threads), [&](long s) {
        CounterRng rng(cfg.seed, cfg.stream_base + static_cast<std::uint64_t>(s));
        long total = 0;
        for (long rep = 0; rep < cfg.nu; ++rep)
            total += sample_photon_pair(cfg.probe, cfg.N, cfg.eta * cfg.T, 0.0, rng).n_a;
        dist.estimates[s] =
            static_cast<double>(total) / (static_cast<double>(cfg.nu) * cfg.eta * cfg.N);
    });
    dist.finalize(cfg.T);
    return dist;
}

// Analytic one-repetition bound for the same configuration.
inline double transmittance_bound(const TransmittanceConfig& cfg) {
    estimate::Params p{{"T", cfg.T}, {"eta", cfg.eta}, {"N", cfg.N},
                       {"nu", static_cast<double>(cfg.nu)}};
    return estimate::bound_catalog(
               cfg.probe == ProbeKind::Fock ? "fock_intensity" : "snl_intensity", p)
        .value;
}

// --- Refractive-index estimation (Kretschmann pipeline) ---------------------

struct RefractiveIndexConfig {
    transduce::LayerStack stack;  // carries the ground-truth analyte
    double theta_in_deg = 0.0;
    double lambda_nm = 632.8;
    ProbeKind probe = ProbeKind::Fock;
    double N = 100.0;
    double eta = 1.0;  // channel efficiency outside the prism
    long nu = 1;
    long samples = 1000;
    std::uint64_t seed = 1;
    std::uint64_t stream_base = 0;
    int threads = 0;
    double bracket_lo = 1.30;  // n_a inversion bracket
    double bracket_hi = 1.35;
    bool noiseless = false;  // analytic counts, for self-consistency checks
};

namespace detail {

// Prism transmittance model after air normalization: the estimator
// divides measured transmittance by the simulated air reference, so the
// inversion model carries the same R_air factor.
struct PrismModel {
    const RefractiveIndexConfig* cfg;
    double R_air;

    double R_of(double n_a) const {
        transduce::LayerStack st = cfg->stack;
        st.analyte_permittivity = n_a * n_a;
        return transduce::kretschmann_reflectance(cfg->theta_in_deg, cfg->lambda_nm, st)
            .R;
    }
    double normalized(double n_a) const { return R_of(n_a) / R_air; }
};

}  // namespace detail

// Per sample: simulate counts -> T_total -> divide by the simulated air
// reference -> invert the normalized reflectance by bisection.
inline EstimateDistribution estimate_refractive_index(const RefractiveIndexConfig& cfg) {
    cfg.stack.validate();
    if (cfg.probe != ProbeKind::Coherent && cfg.probe != ProbeKind::Fock)
        throw config_error("estimate_refractive_index: probe must be coherent or fock");
    if (!(cfg.eta > 0.0 && cfg.eta <= 1.0))
        throw config_error("estimate_refractive_index: eta outside (0,1]");
    if (cfg.samples < 2) throw config_error("estimate_refractive_index: samples >= 2");
    const double n_truth = cfg.stack.analyte_index();
    if (!(n_truth > cfg.bracket_lo && n_truth < cfg.bracket_hi))
        throw config_error("estimate_refractive_index: truth outside the bracket");

    transduce::LayerStack air = cfg.stack;
    air.analyte_permittivity = 1.0;
    const double R_air =
        transduce::kretschmann_reflectance(cfg.theta_in_deg, cfg.lambda_nm, air).R;
    detail::PrismModel model{&cfg, R_air};

    // Monotonicity scan over the bracket; report the usable window.
    const int scan = 256;
    std::vector<double> g(scan);
    for (int i = 0; i < scan; ++i)
        g[i] = model.normalized(cfg.bracket_lo +
                                (cfg.bracket_hi - cfg.bracket_lo) * i / (scan - 1));
    const bool increasing = g[scan - 1] > g[0];
    for (int i = 1; i < scan; ++i) {
        if ((increasing && g[i] <= g[i - 1]) || (!increasing && g[i] >= g[i - 1])) {
            // expand the monotone window around the truth for the message
            int t = static_cast<int>((n_truth - cfg.bracket_lo) /
                                     (cfg.bracket_hi - cfg.bracket_lo) * (scan - 1));
            t = std::clamp(t, 0, scan - 1);
            int lo = t, hi = t;
            auto ok = [&](int a, int b) {
                return increasing ? g[b] > g[a] : g[b] < g[a];
            };
            while (lo > 0 && ok(lo - 1, lo)) --lo;
            while (hi + 1 < scan && ok(hi, hi + 1)) ++hi;
            const double step = (cfg.bracket_hi - cfg.bracket_lo) / (scan - 1);
            throw config_error(
                "estimate_refractive_index: R(n_a) not monotonic over the bracket; "
                "monotonic window around truth: [" +
                std::to_string(cfg.bracket_lo + lo * step) + ", " +
                std::to_string(cfg.bracket_lo + hi * step) + "]");
        }
    }

    auto invert = [&](double target, long& clamped) {
        double lo = cfg.bracket_lo, hi = cfg.bracket_hi;
        double glo = model.normalized(lo), ghi = model.normalized(hi);
        const double gmin = std::min(glo, ghi), gmax = std::max(glo, ghi);
        if (target <= gmin || target >= gmax) {
            ++clamped;
            const bool at_low = (target <= gmin) == (glo < ghi);
            return at_low ? lo : hi;
        }
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double gm = model.normalized(mid);
            if ((gm < target) == (glo < ghi))
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    };

    const double T_sig = cfg.eta * model.R_of(n_truth);
    const double T_air_true = cfg.eta * R_air;
    const double shots = static_cast<double>(cfg.nu) * cfg.N;

    EstimateDistribution dist;
    dist.estimates.assign(cfg.samples, 0.0);
    std::vector<long> clamp_counts(cfg.samples, 0);

    if (cfg.noiseless) {
        for (long s = 0; s < cfg.samples; ++s)
            dist.estimates[s] = invert(T_sig / T_air_true, clamp_counts[s]);
    } else {
        // air reference run: streams offset past the signal block
        std::vector<double> air_hat(cfg.samples, 0.0);
        parallel_for(cfg.samples, resolve_threads(cfg.threads), [&](long s) {
            CounterRng rng(cfg.seed,
                           cfg.stream_base + static_cast<std::uint64_t>(cfg.samples + s));
            long total = 0;
            for (long rep = 0; rep < cfg.nu; ++rep)
                total += sample_photon_pair(cfg.probe, cfg.N, T_air_true, 0.0, rng).n_a;
            air_hat[s] = static_cast<double>(total) / shots;
        });
        double air_norm = 0.0;
        for (double a : air_hat) air_norm += a;
        air_norm /= cfg.samples;
        if (!(air_norm > 0.0))
            throw config_error("estimate_refractive_index: air reference came out zero");

        parallel_for(cfg.samples, resolve_threads(cfg.threads), [&](long s) {
            CounterRng rng(cfg.seed, cfg.stream_base + static_cast<std::uint64_t>(s));
            long total = 0;
            for (long rep = 0; rep < cfg.nu; ++rep)
                total += sample_photon_pair(cfg.probe, cfg.N, T_sig, 0.0, rng).n_a;
            // T_prism = T_total / <T_air>, the model's normalized ratio
            const double t_prism = (static_cast<double>(total) / shots) / air_norm;
            dist.estimates[s] = invert(t_prism, clamp_counts[s]);
        });
    }
    dist.finalize(n_truth);
    for (long c : clamp_counts) dist.clamped += c;
    return dist;
}

// Concentration readout from an index distribution via a linear
// calibration slope dn/dC (defaults: water baseline, BSA slope).
inline EstimateDistribution concentration_from_index(const EstimateDistribution& idx,
                                                     double slope_per_percent = 1.933e-3,
                                                     double n_reference = 1.33) {
    if (!(slope_per_percent != 0.0))
        throw domain_error("concentration_from_index: zero slope");
    EstimateDistribution out;
    out.estimates.reserve(idx.estimates.size());
    for (double n : idx.estimates)
        out.estimates.push_back((n - n_reference) / slope_per_percent);
    out.finalize((idx.truth - n_reference) / slope_per_percent);
    return out;
}

// --- Strategy comparison table ----------------------------------------------

struct ComparisonRow {
    std::string label;
    double empirical = 0.0;
    double analytic = 0.0;
    double ratio = 0.0;       // empirical / analytic
    double tolerance = 0.0;   // 3 standard errors
    bool pass = false;
};

// Empirical std next to the catalog bound for each configuration.
// All configs must share the ground-truth transmittance.
inline std::vector<ComparisonRow> compare_strategies(
    const std::vector<TransmittanceConfig>& cfgs) {
    if (cfgs.empty()) throw config_error("compare_strategies: no configurations");
    for (const auto& c : cfgs)
        if (c.T != cfgs.front().T)
            throw config_error("compare_strategies: configs disagree on the ground truth");
    std::vector<ComparisonRow> rows;
    for (const auto& c : cfgs) {
        const EstimateDistribution d = estimate_transmittance(c);
        ComparisonRow row;
        row.label = (c.probe == ProbeKind::Fock ? std::string("fock") : "coherent") +
                    "_N" + std::to_string(static_cast<long>(c.N));
        row.empirical = d.stddev;
        row.analytic = transmittance_bound(c);
        row.ratio = row.empirical / row.analytic;
        row.tolerance = 3.0 * stddev_standard_error(d.stddev, c.samples);
        row.pass = std::fabs(row.empirical - row.analytic) <= row.tolerance;
        rows.push_back(row);
    }
    return rows;
}

// --- Differential-detection NRF sampling --------------------------------------

struct DifferentialConfig {
    ProbeKind probe = ProbeKind::TwinFock;  // TwinFock, ProductCoherent, Tmsv
    double N = 5.0;       // per-mode mean photons
    double T = 0.8;       // object transmittance (signal mode)
    double eta_a = 1.0;
    double eta_b = 1.0;
    long samples = 100000;
    std::uint64_t seed = 1;
    std::uint64_t stream_base = 0;
    int threads = 0;
};

struct DifferentialEmpirical {
    double sigma_out = 0.0;  // Var(n_b - n_a) / (<n_a> + <n_b>)
    double se = 0.0;         // standard error of sigma_out
    double mean_a = 0.0;
    double mean_b = 0.0;
};

inline DifferentialEmpirical sample_differential_nrf(const DifferentialConfig& cfg) {
    if (cfg.samples < 16) throw config_error("sample_differential_nrf: too few samples");
    std::vector<double> diff(cfg.samples);
    std::vector<double> na(cfg.samples), nb(cfg.samples);
    parallel_for(cfg.samples, resolve_threads(cfg.threads), [&](long s) {
        CounterRng rng(cfg.seed, cfg.stream_base + static_cast<std::uint64_t>(s));
        const OutcomeSample o =
            sample_photon_pair(cfg.probe, cfg.N, cfg.T * cfg.eta_a, cfg.eta_b, rng);
        na[s] = static_cast<double>(o.n_a);
        nb[s] = static_cast<double>(o.n_b);
        diff[s] = nb[s] - na[s];
    });
    const long n = cfg.samples;
    double ma = 0.0, mb = 0.0, md = 0.0;
    for (long i = 0; i < n; ++i) {
        ma += na[i];
        mb += nb[i];
        md += diff[i];
    }
    ma /= n; mb /= n; md /= n;
    double m2 = 0.0, m4 = 0.0;
    for (long i = 0; i < n; ++i) {
        const double d = diff[i] - md;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    const double var = m2 / (n - 1);
    m4 /= n;
    // exact-ish standard error of the sample variance
    const double var_of_var =
        (m4 - var * var * (n - 3.0) / (n - 1.0)) / static_cast<double>(n);
    DifferentialEmpirical out;
    out.mean_a = ma;
    out.mean_b = mb;
    if (!(ma + mb > 0.0))
        throw degenerate_input_error("sample_differential_nrf: zero total mean");
    out.sigma_out = var / (ma + mb);
    out.se = std::sqrt(std::max(var_of_var, 0.0)) / (ma + mb);
    return out;
}

}  // namespace qplasm::mc
