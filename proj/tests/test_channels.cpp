#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "qplasm/channels.hpp"

using namespace qplasm;
using namespace qplasm::states;
using namespace qplasm::channels;
using Catch::Approx;

TEST_CASE("binomial loss on a Fock state") {
    const FockState out = apply_loss(fock_number(2), 0.5, 0);
    const auto p = out.marginal(0);
    CHECK(p[0] == Approx(0.25));
    CHECK(p[1] == Approx(0.5));
    CHECK(p[2] == Approx(0.25));
}

TEST_CASE("unit transmission is the identity") {
    const FockState in = fock_tmsv(0.7);
    const FockState out = apply_loss(in, 1.0, 0);
    CHECK(out.rep() == FockState::Rep::Pure);
    for (std::size_t i = 0; i < in.total_dim(); ++i)
        CHECK(std::abs(out.amp(i) - in.amp(i)) < 1e-15);
}

TEST_CASE("coherent state under loss thins like a Poisson process") {
    const complexd alpha(1.4, -0.3);
    const double eta = 0.6;
    // Gaussian route
    const GaussianState g = apply_loss(gaussian_coherent(alpha), eta, 0);
    CHECK(gaussian_mean_photons(g, 0) == Approx(eta * std::norm(alpha)).epsilon(1e-12));
    CHECK(gaussian_photon_variance(g, 0) ==
          Approx(eta * std::norm(alpha)).epsilon(1e-12));
    // Fock route vs the Poisson-thinning oracle (mean and variance eta*|a|^2)
    const FockState f = apply_loss(fock_coherent(alpha), eta, 0);
    CHECK(f.mean_photons(0) == Approx(eta * std::norm(alpha)).epsilon(1e-7));
    CHECK(f.photon_variance(0) == Approx(eta * std::norm(alpha)).epsilon(1e-6));
}

TEST_CASE("loss composition law") {
    // distributions: exact composition
    const FockState base = fock_number(6);
    const FockState two_step = apply_loss(apply_loss(base, 0.8, 0), 0.55, 0);
    const FockState one_step = apply_loss(base, 0.8 * 0.55, 0);
    const auto p2 = two_step.marginal(0);
    const auto p1 = one_step.marginal(0);
    for (std::size_t n = 0; n < p1.size(); ++n)
        CHECK(p2[n] == Approx(p1[n]).margin(1e-12));

    // Gaussian moments to 1e-12 absolute
    const GaussianState g = gaussian_tmsd(complexd(1.0, 0.4), 0.6);
    const GaussianState g2 = apply_loss(apply_loss(g, 0.8, 0), 0.55, 0);
    const GaussianState g1 = apply_loss(g, 0.44, 0);
    CHECK((g2.V - g1.V).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((g2.d - g1.d).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("loss purification keeps the state pure and the statistics exact") {
    const FockState in = fock_number(3);
    const FockState pur = apply_loss(in, 0.35, 0, LossTracking::Purification);
    CHECK(pur.rep() == FockState::Rep::Pure);
    CHECK(pur.modes() == 2);
    const FockState diag = apply_loss(in, 0.35, 0);
    const auto p_pur = pur.marginal(0);
    const auto p_diag = diag.marginal(0);
    for (std::size_t n = 0; n < p_diag.size(); ++n)
        CHECK(p_pur[n] == Approx(p_diag[n]).margin(1e-12));
}

TEST_CASE("hong-ou-mandel dip at a balanced splitter") {
    const FockState in = fock_product(fock_number(1), fock_number(1));
    const FockState out = apply_beam_splitter(in, 0.5, pi / 2.0);
    CHECK(std::norm(out.amp(out.index({1, 1}))) == Approx(0.0).margin(1e-14));
    CHECK(std::norm(out.amp(out.index({2, 0}))) == Approx(0.5).epsilon(1e-12));
    CHECK(std::norm(out.amp(out.index({0, 2}))) == Approx(0.5).epsilon(1e-12));
}

TEST_CASE("beam splitter identity and coherent moment oracle") {
    const FockState in = fock_product(fock_coherent(complexd(0.9, 0.2)), fock_number(0));
    const FockState id = apply_beam_splitter(in, 1.0, pi / 2.0);
    for (std::size_t i = 0; i < in.total_dim(); ++i) {
        const auto ns = in.occupation(i);
        CHECK(std::abs(id.amp(id.index(ns)) - in.amp(i)) < 1e-12);
    }

    // |alpha>|0> -> (sqrt(T) a, -e^{i th} sqrt(1-T) a) in the means
    const complexd alpha(1.1, -0.5);
    const double T = 0.7, th = pi / 2.0;
    const GaussianState g =
        apply_beam_splitter(gaussian_coherent(alpha).tensor(GaussianState::vacuum(1)),
                            T, th);
    const complexd want_a = std::sqrt(T) * alpha;
    const complexd want_b = -std::polar(std::sqrt(1.0 - T), th) * alpha;
    CHECK(std::abs(g.mode_amplitude(0) - want_a) < 1e-12);
    CHECK(std::abs(g.mode_amplitude(1) - want_b) < 1e-12);
    // still a product coherent state: covariance stays at the vacuum floor
    CHECK((g.V - Eigen::MatrixXd::Identity(4, 4) / 2.0).cwiseAbs().maxCoeff() < 1e-12);

    // Fock representation gives the same means
    const FockState fout = apply_beam_splitter(
        fock_product(fock_coherent(alpha), fock_number(0)), T, th);
    CHECK(fout.mean_photons(0) == Approx(std::norm(want_a)).epsilon(1e-6));
    CHECK(fout.mean_photons(1) == Approx(std::norm(want_b)).epsilon(1e-6));
}

TEST_CASE("lossless beam splitter conserves the mean photon number") {
    std::mt19937 gen(777);
    std::uniform_real_distribution<double> uT(0.05, 0.95), uph(0.0, 2.0 * pi);
    for (int trial = 0; trial < 5; ++trial) {
        FockState in = fock_product(fock_coherent(complexd(0.8, 0.3)),
                                    fock_squeezed_vacuum(0.5, uph(gen)));
        const double before = in.mean_photons(0) + in.mean_photons(1);
        const FockState out = apply_beam_splitter(in, uT(gen), uph(gen));
        const double after = out.mean_photons(0) + out.mean_photons(1);
        CHECK(after == Approx(before).margin(1e-9));
    }
}

TEST_CASE("phase shift identities") {
    const FockState in = fock_noon(3);
    const FockState same = apply_phase(in, 0.0, PhaseKind::RelativeTwoMode);
    for (std::size_t i = 0; i < in.total_dim(); ++i)
        CHECK(std::abs(same.amp(i) - in.amp(i)) < 1e-15);

    // photon-number counting never sees a single-mode phase
    const FockState f = apply_phase(fock_number(4), 0.77);
    const auto p = f.marginal(0);
    CHECK(p[4] == Approx(1.0));

    // squeezed vacuum rotates its squeezing ellipse by 2 phi
    const double r = 0.6, phi = 0.37;
    const GaussianState rotated = apply_phase(gaussian_squeezed_vacuum(r, 0.0), phi);
    const GaussianState direct = gaussian_squeezed_vacuum(r, 2.0 * phi);
    CHECK((rotated.V - direct.V).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("two-mode squeezer: identity, TMSV covariance, TMSD seed NRF") {
    const GaussianState vac2 = GaussianState::vacuum(2);
    const GaussianState id = apply_two_mode_squeezer(vac2, 1.0);
    CHECK((id.V - vac2.V).cwiseAbs().maxCoeff() < 1e-14);

    const double G = 2.3, r = std::acosh(std::sqrt(G));
    const GaussianState out = apply_two_mode_squeezer(vac2, G);
    CHECK(gaussian_mean_photons(out, 0) == Approx(G - 1.0).epsilon(1e-12));
    CHECK(gaussian_mean_photons(out, 1) == Approx(G - 1.0).epsilon(1e-12));
    CHECK(nrf(out).sigma == Approx(0.0).margin(1e-12));
    CHECK((out.V - gaussian_tmsv(r, pi).V).cwiseAbs().maxCoeff() < 1e-12);

    // coherent seed reproduces the TMSD noise reduction factor
    const complexd alpha(1.9, 0.0);
    const GaussianState seeded = apply_two_mode_squeezer(
        gaussian_coherent(alpha).tensor(GaussianState::vacuum(1)), G);
    const double a2 = std::norm(alpha), sh2 = G - 1.0;
    CHECK(nrf(seeded).sigma ==
          Approx(a2 / (a2 + 2.0 * (1.0 + a2) * sh2)).epsilon(1e-10));

    // Fock route: vacuum only, and the cutoff cap is enforced
    const FockState fvac = FockState::pure({3, 3});
    FockState seed_vac = fvac;
    seed_vac.amp(seed_vac.index({0, 0})) = 1.0;
    CHECK_NOTHROW(apply_two_mode_squeezer(seed_vac, 1.5));
    TruncationOptions tight;
    tight.hard_cap = 4;
    CHECK_THROWS_AS(apply_two_mode_squeezer(seed_vac, 30.0, tight), resource_error);
    CHECK_THROWS_AS(apply_two_mode_squeezer(fock_twin(2), 1.5), resource_error);
}

TEST_CASE("gaussian channels preserve physicality") {
    std::mt19937 gen(4242);
    std::uniform_real_distribution<double> ur(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        GaussianState s = gaussian_tmsd(complexd(ur(gen), ur(gen)), 0.3 + ur(gen));
        s = apply_two_mode_squeezer(s, 1.0 + ur(gen));
        s = apply_loss(s, 0.2 + 0.8 * ur(gen), 0);
        s = apply_loss(s, 0.2 + 0.8 * ur(gen), 1);
        s = apply_beam_splitter(s, ur(gen), 2.0 * pi * ur(gen));
        s = apply_phase(s, 2.0 * pi * ur(gen), PhaseKind::RelativeTwoMode);
        CHECK(s.physicality_margin() >= -1e-10);
    }
}

TEST_CASE("fock and gaussian pipelines agree on first and second moments") {
    // squeezer -> loss -> BS, r <= 1.0, agreement to 1e-6
    for (double r : {0.4, 1.0}) {
        const double G = std::cosh(r) * std::cosh(r);
        const double eta_a = 0.75, eta_b = 0.9, T = 0.6;

        GaussianState g = apply_two_mode_squeezer(GaussianState::vacuum(2), G);
        g = apply_loss(g, eta_a, 0);
        g = apply_loss(g, eta_b, 1);
        g = apply_beam_splitter(g, T, pi / 2.0);

        states::TruncationOptions opt;
        opt.hard_cap = 48;
        FockState f = fock_tmsv(r, pi, opt);
        f = apply_loss(f, eta_a, 0, LossTracking::Purification);
        f = apply_loss(f, eta_b, 1, LossTracking::Purification);
        f = apply_beam_splitter(f, T, pi / 2.0, 0, 1);

        for (int mode : {0, 1}) {
            CHECK(f.mean_photons(mode) ==
                  Approx(gaussian_mean_photons(g, mode)).margin(1e-6));
            CHECK(f.photon_variance(mode) ==
                  Approx(gaussian_photon_variance(g, mode)).margin(1e-6));
        }
        CHECK(f.photon_covariance(0, 1) ==
              Approx(gaussian_photon_covariance(g, 0, 1)).margin(1e-6));
    }
}

TEST_CASE("loss parameter validation") {
    CHECK_THROWS_AS(apply_loss(fock_number(2), 1.2, 0), domain_error);
    CHECK_THROWS_AS(apply_loss(fock_number(2), -0.1, 0), domain_error);
}
