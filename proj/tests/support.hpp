#pragma once

#include "spdc/dispersion.hpp"
#include "spdc/franson.hpp"
#include "spdc/jsa.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace support {

using namespace spdc;

/// Normalized-unit Taylor model with β' > 0 over |ν| ≤ 0.5 (no Δβ roots off the diagonal).
inline TaylorDispersion random_taylor(std::mt19937_64& rng, double omega0 = 0.5) {
    std::uniform_real_distribution<double> b0(-5.0, 5.0), b1(0.5, 2.0), hi(-0.5, 0.5);
    std::uniform_int_distribution<int> order(1, 3);
    TaylorDispersion t{omega0, {b0(rng), b1(rng)}};
    const int k = order(rng);
    for (int o = 2; o <= k; ++o) t.coefficients.push_back(hi(rng));
    return t;
}

inline double gaussian_rho(double w_beta1, double tau) {
    const double a = w_beta1 * w_beta1, b = tau * tau;
    return (a - b) / (a + b);
}

/// RMS marginal bandwidth of the first-order Gaussian source.
inline double gaussian_sigma(double w_beta1, double tau) {
    return std::sqrt((1.0 / (tau * tau) + 1.0 / (w_beta1 * w_beta1)) / 8.0);
}

inline PumpPulse finite_pump(double omega_p, double tau, double w) {
    PumpPulse p;
    p.omega_p = omega_p;
    p.tau = tau;
    p.width_w = w;
    return p;
}

inline PumpPulse monochromatic_pump(double omega_p, double w) {
    PumpPulse p;
    p.omega_p = omega_p;
    p.width_w = w;
    p.monochromatic = true;
    return p;
}

inline PumpPulse plane_wave_pump(double omega_p, double tau) {
    PumpPulse p;
    p.omega_p = omega_p;
    p.tau = tau;
    p.plane_wave = true;
    return p;
}

/// Separable Gaussian JSA whose marginals have RMS width `sigma`.
inline JointSpectralAmplitude separable_gaussian(const FrequencyGrid& grid, double sigma) {
    JointSpectralAmplitude jsa;
    jsa.grid = grid;
    const VectorXd nu = grid.detunings();
    const VectorXd g = (-(nu.array() / (2.0 * sigma)).square()).exp();
    jsa.amplitude = (g * g.transpose()).cast<Complex>();
    return normalized(jsa);
}

/// Direct four-path sum, independent of the library's factorized kernel.
inline double brute_force_coincidence(const JointSpectralAmplitude& jsa, double t1, double t2, double p1 = 0.0,
                                      double p2 = 0.0) {
    const VectorXd wl = jsa.grid.omegas_l();
    const VectorXd wr = jsa.grid.omegas_r();
    const double dw2 = jsa.grid.step() * jsa.grid.step();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < wl.size(); ++i) {
        for (Eigen::Index j = 0; j < wr.size(); ++j) {
            const Complex a = (1.0 + std::polar(1.0, wl[i] * t1 + p1)) * (1.0 + std::polar(1.0, wr[j] * t2 + p2));
            sum += std::norm(jsa.amplitude(i, j)) * dw2 * std::norm(a);
        }
    }
    return sum / 16.0;
}

// Pole-free form of tan(κd/2 − mπ/2) = γ/κ: κ·sin(arg) − γ·cos(arg) = 0.
// m = 0 carries the even modes, m = 1 the odd ones.
inline double slab_transcendental(double n_eff, double n_core, double n_clad, double d, double lambda, int parity) {
    const double k0 = 2.0 * kPi / lambda;
    const double kappa = k0 * std::sqrt(std::max(n_core * n_core - n_eff * n_eff, 0.0));
    const double gamma = k0 * std::sqrt(std::max(n_eff * n_eff - n_clad * n_clad, 0.0));
    const double arg = 0.5 * kappa * d - 0.5 * kPi * parity;
    return kappa * std::sin(arg) - gamma * std::cos(arg);
}

// Sign scan over 10⁶ samples, each bracket refined by bisection on the same function.
inline std::vector<double> scanned_roots(double n_core, double n_clad, double d, double lambda) {
    constexpr int kSamples = 1000000;
    std::vector<double> roots;
    for (int parity = 0; parity < 2; ++parity) {
        auto h = [&](double n) { return slab_transcendental(n, n_core, n_clad, d, lambda, parity); };
        const double dn = (n_core - n_clad) / kSamples;
        double prev_n = n_clad + 0.5 * dn;
        double prev = h(prev_n);
        for (int k = 1; k < kSamples; ++k) {
            const double n = n_clad + (k + 0.5) * dn;
            const double v = h(n);
            if ((prev < 0.0) != (v < 0.0)) {
                double lo = prev_n, hi = n, flo = prev;
                for (int it = 0; it < 100; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double fm = h(mid);
                    if ((fm < 0.0) == (flo < 0.0)) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                roots.push_back(0.5 * (lo + hi));
            }
            prev = v;
            prev_n = n;
        }
    }
    std::sort(roots.rbegin(), roots.rend());
    return roots;
}

inline double relative_error(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace support
