#include "spdc/jsa.hpp"
#include "spdc/materials.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace spdc;
using namespace support;

namespace {

const TaylorDispersion kLinear{0.5, {0.0, 1.0}};

JointSpectralAmplitude gaussian_source(double ratio, double tau = 200.0, Eigen::Index min_points = 257) {
    const PumpPulse pump = finite_pump(1.0, tau, ratio * tau);
    return build_counterprop_jsa(pump, kLinear, suggest_counterprop_grid(pump, kLinear, 7.0, min_points, 4097));
}

std::vector<double> ratio_ladder() {
    std::vector<double> r;
    for (int k = 0; k < 10; ++k) r.push_back(std::pow(10.0, -0.9 + 0.2 * k));
    r.push_back(1.0);
    r.push_back(3.0);
    return r;
}

}  // namespace

TEST_CASE("pump factors") {
    const PumpPulse p = finite_pump(1.0, 4.0, 2.5);
    CHECK(pump_spectral_amplitude(p, 0.0) == 1.0);
    CHECK(pump_spectral_amplitude(p, 1.0 / 4.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
    CHECK(pump_spectral_amplitude(p, 0.3) == pump_spectral_amplitude(p, -0.3));
    CHECK(pump_spatial_transform(p, 0.0) == 1.0);
    CHECK(pump_spatial_transform(p, 1.0 / 2.5) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
    CHECK(pump_spatial_transform(p, 0.7) == pump_spatial_transform(p, -0.7));
    CHECK(sinc(0.0) == 1.0);
    CHECK(sinc(kPi) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(sinc(1e-9) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(tau_from_intensity_fwhm(2.0) == doctest::Approx(std::sqrt(std::log(2.0))).epsilon(1e-15));
}

TEST_CASE("pump and grid contracts") {
    PumpPulse both = monochromatic_pump(1.0, 2.0);
    both.plane_wave = true;
    CHECK_THROWS_AS(both.validate(), InvalidArgument);
    CHECK_THROWS_AS(finite_pump(1.0, 0.0, 1.0).validate(), InvalidArgument);
    CHECK_THROWS_AS(finite_pump(1.0, 1.0, -1.0).validate(), InvalidArgument);
    CHECK_THROWS_AS(FrequencyGrid::symmetric(0.5, 0.2, 256).validate(), InvalidArgument);
    CHECK_THROWS_AS(FrequencyGrid::symmetric(0.5, 0.0, 257).validate(), InvalidArgument);
    const FrequencyGrid g = FrequencyGrid::symmetric(0.5, 0.25, 101);
    CHECK(g.detuning(g.center_index()) == 0.0);
    CHECK(g.step() == doctest::Approx(0.005).epsilon(1e-15));
    CHECK(g.detunings()[0] == doctest::Approx(-0.25).epsilon(1e-15));
}

TEST_CASE("builders normalize") {
    std::mt19937_64 rng(3);
    const FrequencyGrid g = FrequencyGrid::symmetric(0.5, 0.5, 201);
    for (int trial = 0; trial < 20; ++trial) {
        const TaylorDispersion m = random_taylor(rng);
        for (const PumpPulse& p : {finite_pump(1.0, 8.0, 5.0), monochromatic_pump(1.0, 5.0), plane_wave_pump(1.0, 8.0)}) {
            const auto jsa = build_counterprop_jsa(p, m, g);
            CHECK(std::abs(norm_squared(jsa) - 1.0) < 1e-10);
            CHECK(jsa.amplitude.allFinite());
        }
    }
    JointSpectralAmplitude zero;
    zero.grid = g;
    zero.amplitude = MatrixXc::Zero(201, 201);
    CHECK_THROWS_AS(normalized(zero), DegenerateKernel);
}

TEST_CASE("monochromatic limit lives on the anti-diagonal") {
    std::mt19937_64 rng(8);
    const FrequencyGrid g = FrequencyGrid::symmetric(0.5, 0.5, 257);
    for (int trial = 0; trial < 10; ++trial) {
        const auto jsa = build_counterprop_jsa(monochromatic_pump(1.0, 3.0), random_taylor(rng), g);
        const Eigen::Index n = g.n_points;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                if (i + j != n - 1) REQUIRE(jsa.amplitude(i, j) == Complex(0.0));
        CHECK(frequency_correlation(jsa) < -0.99);
    }
}

TEST_CASE("plane-wave limit lives on the diagonal for any dispersion") {
    std::mt19937_64 rng(9);
    const FrequencyGrid g = FrequencyGrid::symmetric(0.5, 0.5, 257);
    for (int trial = 0; trial < 10; ++trial) {
        const auto jsa = build_counterprop_jsa(plane_wave_pump(1.0, 3.0), random_taylor(rng), g);
        for (Eigen::Index i = 0; i < g.n_points; ++i)
            for (Eigen::Index j = 0; j < g.n_points; ++j)
                if (i != j) REQUIRE(jsa.amplitude(i, j) == Complex(0.0));
        CHECK(frequency_correlation(jsa) > 0.99);
    }
}

TEST_CASE("gaussian correlation formula") {
    for (double r : ratio_ladder()) {
        CAPTURE(r);
        const auto jsa = gaussian_source(r);
        CHECK(std::abs(frequency_correlation(jsa) - gaussian_rho(r, 1.0)) < 1e-3);
        CHECK(relative_error(rms_bandwidth(jsa), gaussian_sigma(r * 200.0, 200.0)) < 1e-3);
    }
    CHECK(std::abs(frequency_correlation(gaussian_source(1.0))) < 1e-3);
    CHECK(std::abs(frequency_correlation(gaussian_source(3.0)) - 0.8) < 1e-3);
}

TEST_CASE("exchange symmetry and auto-phase-matching") {
    std::mt19937_64 rng(13);
    const FrequencyGrid g = FrequencyGrid::symmetric(0.5, 0.5, 151);
    const VectorXd nu = g.detunings();
    for (int trial = 0; trial < 30; ++trial) {
        const TaylorDispersion m = random_taylor(rng);
        const PumpPulse p = finite_pump(1.0, 6.0, 4.0);
        const auto jsa = build_counterprop_jsa(p, m, g);
        const MatrixXd mag = jsa.amplitude.cwiseAbs();
        CHECK((mag - mag.transpose()).cwiseAbs().maxCoeff() < 1e-12 * mag.maxCoeff());
        // On the diagonal only the spectral factor remains.
        const Complex scale = jsa.amplitude(g.center_index(), g.center_index());
        for (Eigen::Index i = 0; i < g.n_points; ++i) {
            CHECK(pump_spatial_transform(p, delta_beta(m, g.center_l + nu[i], g.center_r + nu[i])) == 1.0);
            CHECK(std::abs(jsa.amplitude(i, i) - scale * pump_spectral_amplitude(p, 2.0 * nu[i])) <
                  1e-12 * std::abs(scale));
        }
    }
}

TEST_CASE("correlation grows with pump width") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        const TaylorDispersion m = random_taylor(rng);
        const FrequencyGrid g = FrequencyGrid::symmetric(0.5, 0.5, 301);
        double prev = -1.0;
        for (double w : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) {
            const double rho = frequency_correlation(build_counterprop_jsa(finite_pump(1.0, 4.0, w), m, g));
            CHECK(rho >= prev - 1e-12);
            prev = rho;
        }
    }
}

TEST_CASE("grid refinement at fixed span") {
    for (double r : {0.3, 1.0, 3.0}) {
        const PumpPulse p = finite_pump(1.0, 200.0, 200.0 * r);
        const FrequencyGrid coarse = suggest_counterprop_grid(p, kLinear);
        FrequencyGrid fine = coarse;
        fine.n_points = 2 * coarse.n_points - 1;
        const auto a = build_counterprop_jsa(p, kLinear, coarse);
        const auto b = build_counterprop_jsa(p, kLinear, fine);
        CHECK(std::abs(frequency_correlation(a) - frequency_correlation(b)) < 1e-3);
        CHECK(relative_error(rms_bandwidth(a), rms_bandwidth(b)) < 1e-3);
    }
}

TEST_CASE("marginal spectra") {
    const FrequencyGrid g = FrequencyGrid::symmetric(0.5, 0.5, 401);
    const auto sep = separable_gaussian(g, 0.05);
    const auto left = marginal_spectrum(sep, Side::left);
    CHECK(left.intensity.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(relative_error(left.rms_bandwidth, 0.05) < 1e-6);
    CHECK(std::abs(left.mean) < 1e-12);

    const auto jsa = gaussian_source(2.0);
    const auto l = marginal_spectrum(jsa, Side::left), r = marginal_spectrum(jsa, Side::right);
    CHECK((l.intensity - r.intensity).cwiseAbs().maxCoeff() < 1e-12);

    // Pump-limited anti-diagonal: |A|² ∝ exp(−(2β₁Wν)²), so σ = 1/(2√2·β₁W).
    const double w = 4.0;
    const double sigma = 1.0 / (2.0 * std::sqrt(2.0) * w);
    const auto mono = build_counterprop_jsa(monochromatic_pump(1.0, w), kLinear, FrequencyGrid::symmetric(0.5, 8.0 * sigma, 257));
    const auto mono_fine = build_counterprop_jsa(monochromatic_pump(1.0, w), kLinear, FrequencyGrid::symmetric(0.5, 8.0 * sigma, 1025));
    CHECK(relative_error(rms_bandwidth(mono), sigma) < 1e-6);
    CHECK(relative_error(rms_bandwidth(mono), rms_bandwidth(mono_fine)) < 1e-6);
}

TEST_CASE("degenerate marginals") {
    const FrequencyGrid g = FrequencyGrid::symmetric(0.5, 0.1, 5);
    JointSpectralAmplitude jsa;
    jsa.grid = g;
    jsa.amplitude = MatrixXc::Zero(5, 5);
    jsa.amplitude(2, 2) = 1.0;
    CHECK_THROWS_AS(frequency_correlation(normalized(jsa)), ZeroVariance);
    jsa.amplitude(2, 3) = 1.0;
    CHECK_THROWS_AS(frequency_correlation(normalized(jsa)), ZeroVariance);
}

TEST_CASE("time-frequency duality") {
    for (double r : ratio_ladder()) {
        if (std::abs(r - 1.0) < 1e-12) continue;
        CAPTURE(r);
        const auto jsa = gaussian_source(r);
        const auto jti = joint_temporal_intensity(jsa);
        CHECK(jti.intensity.minCoeff() >= 0.0);
        CHECK(std::abs(jti.intensity.sum() - 1.0) < 1e-8);
        const double rho_nu = frequency_correlation(jsa);
        const double rho_t = temporal_correlation(jti);
        CHECK(rho_t * rho_nu < 0.0);
        CHECK(std::abs(rho_t + rho_nu) < 0.05);
    }
    CHECK(temporal_correlation(joint_temporal_intensity(gaussian_source(0.2))) > 0.0);
    CHECK(temporal_correlation(joint_temporal_intensity(gaussian_source(5.0))) < 0.0);
}

TEST_CASE("temporal grid and edge warning") {
    const auto jsa = gaussian_source(2.0);
    const auto jti = joint_temporal_intensity(jsa);
    const Eigen::Index n = jsa.grid.n_points;
    CHECK(jti.times.size() == n);
    CHECK(jti.times[jsa.grid.center_index()] == 0.0);
    CHECK(jti.times[1] - jti.times[0] == doctest::Approx(2.0 * kPi / (n * jsa.grid.step())).epsilon(1e-12));
    CHECK_FALSE(jti.alias_warning);

    const FrequencyGrid narrow = FrequencyGrid::symmetric(0.5, 0.05, 101);
    const auto cut = build_counterprop_jsa(finite_pump(1.0, 10.0, 20.0), kLinear, narrow);
    CHECK(joint_temporal_intensity(cut).alias_warning);
}

TEST_CASE("collinear source limits") {
    const double wp = wavelength_to_omega(7.9e-7);
    QpmCollinearSource q;
    q.pump_center_wavelength = 7.9e-7;
    q.pump_bandwidth = kTwoPi * 3e12;
    q.pump_dispersion = TaylorDispersion{wp, {2.6e7, 6.05e-9}};
    q.signal_dispersion = TaylorDispersion{0.5 * wp, {1.2e7, 5.9e-9}};
    q.idler_dispersion = TaylorDispersion{0.5 * wp, {1.3e7, 6.2e-9}};
    q.poling_period = solve_poling_period(q);

    // Very short crystal: the sinc is flat and only the pump factor is left.
    q.length = 1e-9;
    const FrequencyGrid g = FrequencyGrid::symmetric(0.5 * wp, 4e13, 201);
    const auto thin = build_collinear_jsa(q, g);
    CHECK(std::abs(norm_squared(thin) - 1.0) < 1e-10);
    PumpPulse pump_only = plane_wave_pump(wp, tau_from_intensity_fwhm(q.pump_bandwidth));
    JointSpectralAmplitude pump_kernel;
    pump_kernel.grid = g;
    pump_kernel.amplitude = MatrixXc(201, 201);
    const VectorXd nu = g.detunings();
    for (Eigen::Index i = 0; i < 201; ++i)
        for (Eigen::Index j = 0; j < 201; ++j)
            pump_kernel.amplitude(i, j) = pump_spectral_amplitude(pump_only, nu[i] + nu[j]);
    const double rho_pump = frequency_correlation(normalized(pump_kernel));
    CHECK(rho_pump < 0.0);
    CHECK(std::abs(frequency_correlation(thin) - rho_pump) < 1e-6);

    // Group-velocity matched: correlation climbs towards +1 with length, slowly
    // because the sinc² tails decay only as 1/Δ².
    double prev = -1.0;
    for (double len : {1e-4, 1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.3}) {
        q.length = len;
        const double rho = frequency_correlation(build_collinear_jsa(q, suggest_collinear_grid(q)));
        CHECK(rho > prev);
        prev = rho;
    }
    CHECK(prev > 0.98);

    // Strong group-velocity dispersion bends the phase-matching ridge and caps the correlation.
    QpmCollinearSource d = q;
    d.signal_dispersion = TaylorDispersion{0.5 * wp, {1.2e7, 5.9e-9, 5e-24}};
    d.idler_dispersion = TaylorDispersion{0.5 * wp, {1.3e7, 6.2e-9, 5e-24}};
    d.poling_period = solve_poling_period(d);
    d.length = 0.3;
    CHECK(frequency_correlation(build_collinear_jsa(d, suggest_collinear_grid(d))) < prev - 0.01);

    d.length = 0.0;
    CHECK_THROWS_AS(build_collinear_jsa(d, g), InvalidArgument);
}

TEST_CASE("limit-source calibration") {
    const FrequencyGrid g = FrequencyGrid::symmetric(0.5, 0.5, 1025);
    PumpPulse anti, corr;
    const auto a = calibrated_limit_source(LimitCase::anti_correlated, 1.0, kLinear, g, 0.1, &anti);
    const auto b = calibrated_limit_source(LimitCase::correlated, 1.0, kLinear, g, 0.1, &corr);
    CHECK(relative_error(rms_bandwidth(a), 0.1) < 1e-6);
    CHECK(relative_error(rms_bandwidth(b), 0.1) < 1e-6);
    CHECK(anti.monochromatic);
    CHECK(corr.plane_wave);
    // Closed forms for the linear model: W = 1/(2√2 β₁ σ), and τ the same with β₁ → 1.
    CHECK(relative_error(anti.width_w, 1.0 / (2.0 * std::sqrt(2.0) * 0.1)) < 1e-4);
    CHECK(relative_error(corr.tau, 1.0 / (2.0 * std::sqrt(2.0) * 0.1)) < 1e-4);
    CHECK(frequency_correlation(a) < -0.99);
    CHECK(frequency_correlation(b) > 0.99);
}

TEST_CASE("suggested grids") {
    const auto g = suggest_counterprop_grid(finite_pump(1.0, 10.0, 10.0), kLinear);
    CHECK(g.n_points % 2 == 1);
    CHECK(g.n_points >= 257);
    CHECK(g.n_points <= 2049);
    CHECK(g.center_l == 0.5);
    CHECK(g.half_span <= 0.45 * 0.5);
    const auto big = suggest_counterprop_grid(finite_pump(1.0, 10.0, 1e4), kLinear, 5.0, 257, 2049);
    CHECK(big.n_points == 2049);
}
