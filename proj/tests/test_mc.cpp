#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qplasm/mc.hpp"
#include "qplasm/states.hpp"

using namespace qplasm;
using namespace qplasm::mc;
using Catch::Approx;

namespace {

transduce::LayerStack gold_stack(double n_a = 1.32) {
    transduce::LayerStack st;
    st.prism_permittivity = 1.7617 * 1.7617;
    st.metal.plasma_frequency = 1.37e16;
    st.metal.damping = 1.0e14;
    st.metal_thickness_nm = 50.0;
    st.analyte_permittivity = n_a * n_a;
    return st;
}

}  // namespace

TEST_CASE("counter rng substreams are deterministic") {
    CounterRng a(123, 7), b(123, 7), c(123, 8);
    for (int i = 0; i < 100; ++i) {
        const auto va = a.next_u64();
        CHECK(va == b.next_u64());
        CHECK(va != c.next_u64());
    }
}

TEST_CASE("rng distribution sanity") {
    CounterRng rng(2024, 0);
    // Poisson mean/variance
    const double mean = 37.5;
    long n = 20000;
    double s = 0.0, s2 = 0.0;
    for (long i = 0; i < n; ++i) {
        const double x = static_cast<double>(rng.poisson(mean));
        s += x;
        s2 += x * x;
    }
    const double m = s / n, v = s2 / n - m * m;
    CHECK(m == Approx(mean).margin(3.0 * std::sqrt(mean / n)));
    CHECK(v == Approx(mean).epsilon(0.05));
    // binomial bounds
    for (int i = 0; i < 50; ++i) {
        const long k = rng.binomial(20, 0.3);
        CHECK(k >= 0);
        CHECK(k <= 20);
    }
}

TEST_CASE("sample_outcomes laws of large numbers") {
    CounterRng rng(9, 0);
    const double etaT = 0.4;
    const long N = 50, nu = 4000;
    const auto draws = sample_outcomes(ProbeKind::Fock, N, etaT, 0.0, nu, rng);
    double mean = 0.0;
    for (const auto& d : draws) mean += d.n_a;
    mean /= (nu * N);
    const double se = std::sqrt(etaT * (1.0 - etaT) / (nu * N));
    CHECK(mean == Approx(etaT).margin(3.0 * se));

    // Poisson probe: variance/mean -> 1
    CounterRng rng2(9, 1);
    const auto pdraw = sample_outcomes(ProbeKind::Coherent, 30.0, 0.8, 0.0, 6000, rng2);
    double m = 0.0, m2 = 0.0;
    for (const auto& d : pdraw) {
        m += d.n_a;
        m2 += static_cast<double>(d.n_a) * d.n_a;
    }
    m /= pdraw.size();
    const double var = m2 / pdraw.size() - m * m;
    CHECK(var / m == Approx(1.0).margin(0.06));

    // fixed seed: identical count vectors
    CounterRng r1(55, 3), r2(55, 3);
    const auto d1 = sample_outcomes(ProbeKind::TwinFock, 10, 0.7, 0.6, 200, r1);
    const auto d2 = sample_outcomes(ProbeKind::TwinFock, 10, 0.7, 0.6, 200, r2);
    for (std::size_t i = 0; i < d1.size(); ++i) {
        CHECK(d1[i].n_a == d2[i].n_a);
        CHECK(d1[i].n_b == d2[i].n_b);
    }
}

TEST_CASE("transmittance estimation matches the closed-form uncertainties") {
    TransmittanceConfig cfg;
    cfg.probe = ProbeKind::Coherent;
    cfg.N = 100.0;
    cfg.T = 1.0;
    cfg.eta = 1.0;
    cfg.nu = 1;
    cfg.samples = 1000;
    cfg.seed = 11;
    const auto coh = estimate_transmittance(cfg);
    const double se = stddev_standard_error(coh.stddev, cfg.samples);
    CHECK(coh.stddev == Approx(0.1).margin(3.0 * se));

    cfg.probe = ProbeKind::Fock;
    cfg.T = 0.5;
    const auto fk = estimate_transmittance(cfg);
    CHECK(fk.stddev ==
          Approx(0.05).margin(3.0 * stddev_standard_error(fk.stddev, cfg.samples)));
}

TEST_CASE("fock vs coherent enhancement sits in the 10-20 percent band") {
    for (double etaT : {0.2, 0.36}) {
        TransmittanceConfig base;
        base.N = 100.0;
        base.T = 0.8;
        base.eta = etaT / base.T;
        base.nu = 1;
        base.samples = 1000;
        base.seed = 21;
        TransmittanceConfig fock = base;
        fock.probe = ProbeKind::Fock;
        TransmittanceConfig coh = base;
        coh.probe = ProbeKind::Coherent;
        const auto df = estimate_transmittance(fock);
        const auto dc = estimate_transmittance(coh);
        const double ratio = df.stddev / dc.stddev;
        const double se_ratio =
            ratio * std::sqrt(2.0) / std::sqrt(2.0 * (base.samples - 1.0));
        CHECK(ratio == Approx(std::sqrt(1.0 - etaT)).margin(3.0 * se_ratio));
    }
}

TEST_CASE("estimator properties: unbiasedness, bound, nu scaling, determinism") {
    TransmittanceConfig cfg;
    cfg.probe = ProbeKind::Fock;
    cfg.N = 80.0;
    cfg.T = 0.65;
    cfg.eta = 0.7;
    cfg.nu = 2;
    cfg.samples = 1500;
    cfg.seed = 5;

    const auto d = estimate_transmittance(cfg);
    CHECK(std::fabs(d.bias) < 3.0 * d.stddev / std::sqrt(cfg.samples));
    const double bound = transmittance_bound(cfg);
    CHECK(d.stddev >= bound - 3.0 * stddev_standard_error(d.stddev, cfg.samples));

    TransmittanceConfig cfg2 = cfg;
    cfg2.nu = 2 * cfg.nu;
    const auto d2 = estimate_transmittance(cfg2);
    CHECK(d.stddev / d2.stddev ==
          Approx(std::sqrt(2.0))
              .margin(3.0 * std::sqrt(2.0) / std::sqrt(2.0 * (cfg.samples - 1.0)) * 2.0));

    const auto again = estimate_transmittance(cfg);
    REQUIRE(again.estimates.size() == d.estimates.size());
    for (std::size_t i = 0; i < d.estimates.size(); ++i)
        CHECK(again.estimates[i] == d.estimates[i]);

    // thread count must not change the draw
    TransmittanceConfig one = cfg;
    one.threads = 1;
    TransmittanceConfig many = cfg;
    many.threads = 8;
    const auto da = estimate_transmittance(one);
    const auto db = estimate_transmittance(many);
    for (std::size_t i = 0; i < da.estimates.size(); ++i)
        CHECK(da.estimates[i] == db.estimates[i]);
}

TEST_CASE("refractive index pipeline: zero-noise self-consistency") {
    RefractiveIndexConfig cfg;
    cfg.stack = gold_stack(1.32);
    cfg.theta_in_deg = 52.5;
    cfg.lambda_nm = 632.8;
    cfg.probe = ProbeKind::Fock;
    cfg.N = 10000.0;
    cfg.eta = 0.9;
    cfg.nu = 1;
    cfg.samples = 8;
    cfg.seed = 3;
    cfg.bracket_lo = 1.31;
    cfg.bracket_hi = 1.33;
    cfg.noiseless = true;
    const auto d = estimate_refractive_index(cfg);
    CHECK(std::fabs(d.mean - 1.32) < 1e-9);
    CHECK(d.stddev == Approx(0.0).margin(1e-12));
}

TEST_CASE("refractive index pipeline: quantum vs classical uncertainty ratio") {
    RefractiveIndexConfig cfg;
    cfg.stack = gold_stack(1.32);
    cfg.theta_in_deg = 52.5;
    cfg.lambda_nm = 632.8;
    cfg.N = 10000.0;
    cfg.eta = 0.9;
    cfg.nu = 1;
    cfg.samples = 600;
    cfg.seed = 17;
    cfg.bracket_lo = 1.31;
    cfg.bracket_hi = 1.33;

    cfg.probe = ProbeKind::Fock;
    const auto dq = estimate_refractive_index(cfg);
    cfg.probe = ProbeKind::Coherent;
    const auto dc = estimate_refractive_index(cfg);
    CHECK(dq.clamped == 0);
    CHECK(dc.clamped == 0);

    transduce::LayerStack st = gold_stack(1.32);
    const double T_total =
        cfg.eta * transduce::kretschmann_reflectance(52.5, 632.8, st).R;
    const double ratio = dq.stddev / dc.stddev;
    const double se_ratio = ratio * std::sqrt(2.0) / std::sqrt(2.0 * (cfg.samples - 1.0));
    // delta-method oracle: the slope cancels, leaving sqrt(1 - T_total)
    CHECK(ratio == Approx(std::sqrt(1.0 - T_total)).margin(3.0 * se_ratio));

    // calibration slope use-case
    const auto conc = concentration_from_index(dq, 1.933e-3, 1.31);
    CHECK(conc.mean == Approx((dq.mean - 1.31) / 1.933e-3).epsilon(1e-12));
}

TEST_CASE("refractive index pipeline: non-monotonic window is rejected") {
    RefractiveIndexConfig cfg;
    cfg.stack = gold_stack(1.32);
    cfg.theta_in_deg = 52.0;  // resonance crosses the bracket here
    cfg.lambda_nm = 632.8;
    cfg.probe = ProbeKind::Fock;
    cfg.N = 100.0;
    cfg.eta = 0.9;
    cfg.samples = 4;
    cfg.bracket_lo = 1.31;
    cfg.bracket_hi = 1.33;
    cfg.noiseless = true;
    CHECK_THROWS_AS(estimate_refractive_index(cfg), config_error);
    try {
        estimate_refractive_index(cfg);
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("monotonic window") != std::string::npos);
    }
}

TEST_CASE("compare_strategies emits the enhancement table") {
    TransmittanceConfig fock;
    fock.probe = ProbeKind::Fock;
    fock.N = 100.0;
    fock.T = 0.8;
    fock.eta = 0.45;
    fock.samples = 1000;
    fock.seed = 30;
    TransmittanceConfig coh = fock;
    coh.probe = ProbeKind::Coherent;

    const auto rows = compare_strategies({fock, coh});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].pass);
    CHECK(rows[1].pass);
    const double ratio = rows[0].empirical / rows[1].empirical;
    const double want = std::sqrt(1.0 - fock.eta * fock.T);
    CHECK(ratio == Approx(want).margin(0.1));

    const auto dup = compare_strategies({fock, fock});
    CHECK(dup[0].empirical == dup[1].empirical);
    CHECK(dup[0].analytic == dup[1].analytic);

    TransmittanceConfig other = coh;
    other.T = 0.5;
    CHECK_THROWS_AS(compare_strategies({fock, other}), config_error);
}

TEST_CASE("brute-force differential pipeline reproduces the NRF closed forms") {
    DifferentialConfig cfg;
    cfg.probe = ProbeKind::TwinFock;
    cfg.N = 5.0;
    cfg.T = 0.8;
    cfg.eta_a = 0.9;
    cfg.eta_b = 0.72;  // starred case: T eta_a = eta_b
    cfg.samples = 100000;
    cfg.seed = 8;
    const auto tf = sample_differential_nrf(cfg);
    CHECK(tf.sigma_out == Approx(1.0 - 0.72).margin(3.0 * tf.se));

    cfg.probe = ProbeKind::ProductCoherent;
    const auto pc = sample_differential_nrf(cfg);
    CHECK(pc.sigma_out == Approx(1.0).margin(3.0 * pc.se));

    // general (non-starred) twin-Fock point
    cfg.probe = ProbeKind::TwinFock;
    cfg.eta_b = 0.95;
    const auto tf2 = sample_differential_nrf(cfg);
    const double Tea = cfg.T * cfg.eta_a, eb = cfg.eta_b;
    const double want = 1.0 - (Tea * Tea + eb * eb) / (Tea + eb);
    CHECK(tf2.sigma_out == Approx(want).margin(3.0 * tf2.se));
}

TEST_CASE("measurement records reduce photon draws") {
    CounterRng rng(12, 0);
    const auto draws = sample_outcomes(ProbeKind::TwinFock, 6, 0.8, 0.9, 50, rng);
    const auto counting = measurement_values(Measurement::PhotonCounting, draws);
    const auto diff = measurement_values(Measurement::IntensityDifference, draws);
    for (std::size_t i = 0; i < draws.size(); ++i) {
        CHECK(counting[i] == static_cast<double>(draws[i].n_a));
        CHECK(diff[i] == static_cast<double>(draws[i].n_b - draws[i].n_a));
    }
    CHECK_THROWS_AS(measurement_values(Measurement::Coincidence, draws), config_error);
}

TEST_CASE("thread cap honors the environment variable") {
    setenv("QPLASM_THREADS", "3", 1);
    CHECK(resolve_threads(0) == 3);
    unsetenv("QPLASM_THREADS");
    CHECK(resolve_threads(5) == 5);
    CHECK(resolve_threads(0) >= 1);
}

TEST_CASE("coincidence sampling follows the fringe probability") {
    CounterRng rng(31, 0);
    const double p = 0.35;
    const long nu = 20000;
    const long hits = sample_coincidences(p, nu, rng);
    const double se = std::sqrt(p * (1.0 - p) / nu);
    CHECK(static_cast<double>(hits) / nu == Approx(p).margin(3.0 * se));
    CHECK_THROWS_AS(sample_coincidences(1.4, 10, rng), domain_error);

    CounterRng r1(31, 5), r2(31, 5);
    CHECK(sample_coincidences(p, 500, r1) == sample_coincidences(p, 500, r2));
}

TEST_CASE("stack-backed ground-truth transmittance") {
    const auto st = gold_stack(1.32);
    const double T = stack_transmittance(st, 52.5, 632.8);
    CHECK(T == Approx(transduce::kretschmann_reflectance(52.5, 632.8, st).R));
    TransmittanceConfig cfg;
    cfg.probe = ProbeKind::Fock;
    cfg.T = T;
    cfg.N = 100.0;
    cfg.eta = 0.9;
    cfg.samples = 200;
    cfg.seed = 2;
    CHECK_NOTHROW(estimate_transmittance(cfg));
}

TEST_CASE("gaussian difference sampling tracks the TMSD moments") {
    using namespace qplasm::states;
    const GaussianState s = gaussian_tmsd(complexd(3.0, 0.0), 0.6);
    CounterRng rng(77, 0);
    const long n = 20000;
    double mean = 0.0, m2 = 0.0;
    for (long i = 0; i < n; ++i) {
        const auto o = sample_gaussian_difference(s, rng);
        const double d = static_cast<double>(o.n_b - o.n_a);
        mean += d;
        m2 += d * d;
    }
    mean /= n;
    const double var = m2 / n - mean * mean;
    const double want_var = gaussian_photon_variance(s, 0) +
                            gaussian_photon_variance(s, 1) -
                            2.0 * gaussian_photon_covariance(s, 0, 1);
    CHECK(var == Approx(want_var).epsilon(0.08));
}
