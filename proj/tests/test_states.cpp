#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>

#include "qplasm/states.hpp"

using namespace qplasm;
using namespace qplasm::states;
using Catch::Approx;

TEST_CASE("fock number state") {
    const FockState s = fock_number(3);
    CHECK(s.mean_photons(0) == Approx(3.0));
    CHECK(s.photon_variance(0) == Approx(0.0).margin(1e-14));
    const auto p = s.marginal(0);
    CHECK(p[3] == Approx(1.0));
}

TEST_CASE("tmsv amplitudes follow the squeezing recurrence") {
    const double r = 0.8, ths = 0.4;
    const FockState s = fock_tmsv(r, ths);
    const complexd expected_ratio = -std::polar(std::tanh(r), ths);
    for (int n = 0; n + 1 < s.dim(0); ++n) {
        const complexd cn = s.amp(s.index({n, n}));
        const complexd cn1 = s.amp(s.index({n + 1, n + 1}));
        if (std::abs(cn) < 1e-12) continue;
        const complexd ratio = cn1 / cn;
        CHECK(ratio.real() == Approx(expected_ratio.real()).margin(1e-10));
        CHECK(ratio.imag() == Approx(expected_ratio.imag()).margin(1e-10));
    }
    CHECK(s.mean_photons(0) == Approx(std::sinh(r) * std::sinh(r)).epsilon(1e-8));
    CHECK(s.mean_photons(1) == Approx(std::sinh(r) * std::sinh(r)).epsilon(1e-8));
}

TEST_CASE("normalization and leakage invariants") {
    for (double r : {0.3, 0.8, 1.2}) {
        const FockState s = fock_tmsv(r);
        CHECK(std::fabs(s.norm() - 1.0) < 1e-10);
        CHECK_FALSE(s.truncation_warning());
    }
    const FockState c = fock_coherent(complexd(2.0, -1.0));
    CHECK(std::fabs(c.norm() - 1.0) < 1e-10);
    CHECK_FALSE(c.truncation_warning());
}

TEST_CASE("cutoff hard cap raises a resource error") {
    TruncationOptions opt;
    opt.hard_cap = 16;
    CHECK_THROWS_AS(fock_tmsv(2.5, 0.0, opt), resource_error);
    CHECK_THROWS_AS(fock_number(40, opt), resource_error);
}

TEST_CASE("tmsd per-mode means match the displaced-squeezer forms") {
    const double r = 0.6;
    const complexd alpha(1.3, 0.4);
    const GaussianState s = gaussian_tmsd(alpha, r);
    const double sh2 = std::sinh(r) * std::sinh(r);
    const double ch2 = std::cosh(r) * std::cosh(r);
    CHECK(gaussian_mean_photons(s, 0) ==
          Approx(sh2 + std::norm(alpha) * ch2).epsilon(1e-10));
    CHECK(gaussian_mean_photons(s, 1) ==
          Approx(sh2 + std::norm(alpha) * sh2).epsilon(1e-10));
}

TEST_CASE("photon statistics: coherent, fock, tmsv marginal") {
    const auto coh = photon_statistics(fock_coherent(complexd(1.5, 0.0)));
    CHECK(coh.mean == Approx(2.25).epsilon(1e-8));
    CHECK(coh.variance == Approx(2.25).epsilon(1e-7));
    CHECK(coh.mandel_q == Approx(0.0).margin(1e-7));

    const auto fk = photon_statistics(fock_number(4));
    CHECK(fk.variance == Approx(0.0).margin(1e-12));
    CHECK(fk.mandel_q == Approx(-1.0));

    const double r = 0.9, N = std::sinh(r) * std::sinh(r);
    const auto tm = photon_statistics(fock_tmsv(r), 0);
    CHECK(tm.variance / tm.mean == Approx(N + 1.0).epsilon(1e-6));

    // vacuum convention
    const auto vac = photon_statistics(fock_number(0));
    CHECK(vac.mandel_q == 0.0);
    CHECK(vac.vacuum_convention);
}

TEST_CASE("gaussian photon statistics agree with fock construction") {
    TruncationOptions roomy;
    roomy.hard_cap = 200;  // thermal tails at r = 1.5 need ~130 levels
    for (double r : {0.2, 0.7, 1.2, 1.5}) {
        const FockState f = fock_tmsv(r, pi, roomy);
        const GaussianState g = gaussian_tmsv(r, pi);
        for (int mode : {0, 1}) {
            CHECK(gaussian_mean_photons(g, mode) ==
                  Approx(f.mean_photons(mode)).margin(1e-6));
            CHECK(gaussian_photon_variance(g, mode) ==
                  Approx(f.photon_variance(mode)).margin(1e-6));
        }
        CHECK(gaussian_photon_covariance(g, 0, 1) ==
              Approx(f.photon_covariance(0, 1)).margin(1e-6));
    }
    // coherent cross-check
    const complexd alpha(0.9, -0.4);
    const FockState f = fock_coherent(alpha);
    const GaussianState g = gaussian_coherent(alpha);
    CHECK(gaussian_mean_photons(g, 0) == Approx(f.mean_photons(0)).margin(1e-8));
    CHECK(gaussian_photon_variance(g, 0) == Approx(f.photon_variance(0)).margin(1e-6));
}

TEST_CASE("nrf benchmarks") {
    // product coherent: the shot-noise reference sigma = 1
    const FockState pc =
        fock_product(fock_coherent(complexd(1.2, 0.0)), fock_coherent(complexd(0.8, 0.3)));
    CHECK(nrf(pc).sigma == Approx(1.0).margin(1e-6));

    // TMSV: perfectly correlated, sigma = 0
    CHECK(nrf(fock_tmsv(0.8)).sigma == Approx(0.0).margin(1e-8));
    CHECK(nrf(gaussian_tmsv(0.8)).sigma == Approx(0.0).margin(1e-12));

    // TMSD with alpha = 0 degenerates to the TMSV
    CHECK(nrf(gaussian_tmsd(complexd(0.0, 0.0), 0.7)).sigma ==
          Approx(0.0).margin(1e-12));

    // TMSD closed form sigma = |a|^2 / (|a|^2 + 2(1+|a|^2) sinh^2 r)
    const double r = 0.55;
    const complexd alpha(1.7, 0.2);
    const double a2 = std::norm(alpha), sh2 = std::sinh(r) * std::sinh(r);
    CHECK(nrf(gaussian_tmsd(alpha, r)).sigma ==
          Approx(a2 / (a2 + 2.0 * (1.0 + a2) * sh2)).epsilon(1e-10));

    // twin Fock: sigma = 0 exactly
    CHECK(nrf(fock_twin(4)).sigma == Approx(0.0).margin(1e-14));

    // degenerate and error paths
    CHECK(nrf(fock_product(fock_coherent(complexd(1.0, 0.0)), fock_number(0)))
              .degenerate);
    CHECK_THROWS_AS(nrf(fock_twin(0)), degenerate_input_error);
}

TEST_CASE("nrf is nonnegative across a state zoo") {
    for (const FockState& s :
         {fock_twin(3), fock_tmsv(0.4), fock_tmsv(1.1, 0.7),
          fock_product(fock_coherent(complexd(1.0, 0.2)),
                       fock_coherent(complexd(0.5, -0.9))),
          fock_noon(3)}) {
        CHECK(nrf(s).sigma >= -1e-12);
    }
}

TEST_CASE("state construction is deterministic") {
    const FockState a = fock_tmsv(0.9, 0.3);
    const FockState b = fock_tmsv(0.9, 0.3);
    REQUIRE(a.amplitudes().size() == b.amplitudes().size());
    CHECK(std::memcmp(a.amplitudes().data(), b.amplitudes().data(),
                      a.amplitudes().size() * sizeof(complexd)) == 0);
    const GaussianState g1 = gaussian_tmsd(complexd(1.0, 0.5), 0.8);
    const GaussianState g2 = gaussian_tmsd(complexd(1.0, 0.5), 0.8);
    CHECK((g1.V - g2.V).cwiseAbs().maxCoeff() == 0.0);
    CHECK((g1.d - g2.d).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("unified state specs dispatch to both representations") {
    const StateSpec tmsv = TmsvSpec{0.7, pi};
    const FockState f = make_fock_state(tmsv);
    const GaussianState g = make_gaussian_state(tmsv);
    CHECK(f.mean_photons(0) == Approx(gaussian_mean_photons(g, 0)).margin(1e-7));

    const StateSpec pc =
        ProductSpec{CoherentSpec{complexd(1.0, 0.0)}, CoherentSpec{complexd(0.7, 0.2)}};
    CHECK(nrf(make_fock_state(pc)).sigma == Approx(1.0).margin(1e-6));
    CHECK(nrf(make_gaussian_state(pc)).sigma == Approx(1.0).margin(1e-12));

    CHECK(make_fock_state(StateSpec{FockSpec{3}}).mean_photons(0) == Approx(3.0));
    CHECK_THROWS_AS(make_gaussian_state(StateSpec{FockSpec{3}}), domain_error);
    CHECK_THROWS_AS(make_fock_state(StateSpec{TmsdSpec{complexd(1.0, 0.0), 0.5, pi}}),
                    domain_error);
    CHECK(gaussian_mean_photons(
              make_gaussian_state(StateSpec{TmsdSpec{complexd(1.0, 0.0), 0.5, pi}}), 0) >
          0.0);
}

TEST_CASE("gaussian physicality") {
    CHECK(GaussianState::vacuum(2).physicality_margin() >= -1e-12);
    CHECK(gaussian_tmsv(1.0).physicality_margin() >= -1e-10);
    GaussianState bad = GaussianState::vacuum(1);
    bad.V *= 0.5;  // below the vacuum floor
    CHECK_THROWS_AS(bad.check_physical(), domain_error);
}

TEST_CASE("noon state layout") {
    const FockState s = fock_noon(4);
    CHECK(std::norm(s.amp(s.index({4, 0}))) == Approx(0.5));
    CHECK(std::norm(s.amp(s.index({0, 4}))) == Approx(0.5));
    CHECK(s.mean_photons(0) == Approx(2.0));
}
