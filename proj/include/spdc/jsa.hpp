#pragma once

#include "spdc/core.hpp"
#include "spdc/dispersion.hpp"

#include <cmath>
#include <string>

namespace spdc {

/// Gaussian pump pulse. Either limit may be flagged, but not both.
struct PumpPulse {
    double omega_p = 0.0;  // rad/s (or normalized)
    double tau = 0.0;      // duration
    double width_w = 0.0;  // extent along the waveguide
    bool monochromatic = false;  // τ → ∞
    bool plane_wave = false;     // W → ∞

    void validate() const;
};

/// τ for a pump whose intensity spectrum has the given angular FWHM:
/// |Ẽ_t|² = exp(−(ντ)²)  ⇒  FWHM = 2√(ln 2)/τ.
double tau_from_intensity_fwhm(double fwhm);

struct FrequencyGrid {
    double center_l = 0.0;
    double center_r = 0.0;
    double half_span = 0.0;
    Eigen::Index n_points = 257;

    static FrequencyGrid symmetric(double center, double half_span, Eigen::Index n_points = 257);

    void validate() const;
    double step() const { return 2.0 * half_span / static_cast<double>(n_points - 1); }
    Eigen::Index center_index() const { return (n_points - 1) / 2; }
    double detuning(Eigen::Index i) const { return static_cast<double>(i - center_index()) * step(); }
    VectorXd detunings() const;
    VectorXd omegas_l() const { return detunings().array() + center_l; }
    VectorXd omegas_r() const { return detunings().array() + center_r; }
};

/// A(ω_l,i, ω_r,j): rows index the left photon, columns the right photon.
struct JointSpectralAmplitude {
    FrequencyGrid grid;
    MatrixXc amplitude;
    std::string description;

    /// |A|²·step², the discrete joint probability.
    MatrixXd probability() const;
};

template <typename Scalar> Scalar gaussian_factor(Scalar x) {
    using std::exp;
    return exp(Scalar(-0.5) * x * x);
}

template <typename Scalar> Scalar sinc(Scalar x) {
    using std::abs;
    using std::sin;
    if (abs(x) < Scalar(1e-8)) return Scalar(1) - x * x / Scalar(6);
    return sin(x) / x;
}

/// Ẽ_t(ν_sum) = exp(−½(ν_sum·τ)²), ν_sum the detuning of ω_l+ω_r from ω_p.
template <typename Scalar> Scalar pump_spectral_amplitude(const PumpPulse& pump, Scalar nu_sum) {
    return gaussian_factor(nu_sum * Scalar(pump.tau));
}

/// f̃_z(Δβ) = exp(−½(Δβ·W)²).
template <typename Scalar> Scalar pump_spatial_transform(const PumpPulse& pump, Scalar d_beta) {
    return gaussian_factor(d_beta * Scalar(pump.width_w));
}

/// Σ|A|²·step².
double norm_squared(const JointSpectralAmplitude& jsa);
JointSpectralAmplitude normalized(JointSpectralAmplitude jsa);

JointSpectralAmplitude build_counterprop_jsa(const PumpPulse& pump, const DispersionModel& model,
                                             const FrequencyGrid& grid, int threads = 1);

/// Collinear quasi-phase-matched kernel Ẽ_t(ν_s+ν_i)·sinc(Δk·L/2). Signal is
/// the left (row) photon, idler the right.
JointSpectralAmplitude build_collinear_jsa(const QpmCollinearSource& src, const FrequencyGrid& grid,
                                           int threads = 1);

enum class Side { left, right };

struct MarginalSpectrum {
    VectorXd detuning;
    VectorXd intensity;  // discrete probabilities, sum to 1
    double mean = 0.0;
    double rms_bandwidth = 0.0;
};

MarginalSpectrum marginal_spectrum(const JointSpectralAmplitude& jsa, Side side);

/// Mean of the left and right RMS marginal bandwidths.
double rms_bandwidth(const JointSpectralAmplitude& jsa);

/// Weighted Pearson correlation of (x_i, y_j) under the joint weights w_ij.
double weighted_pearson(const MatrixXd& weights, const VectorXd& x, const VectorXd& y);

/// Pearson correlation of (ν_l, ν_r) under |A|².
double frequency_correlation(const JointSpectralAmplitude& jsa);

struct JointTemporalIntensity {
    VectorXd times;  // shared by both axes (identical steps)
    MatrixXd intensity;
    /// Largest boundary value of |A|² relative to its peak; the transform
    /// wraps around when this is not small.
    double edge_ratio = 0.0;
    bool alias_warning = false;
};

inline constexpr double kEdgeDecayLimit = 1e-6;

JointTemporalIntensity joint_temporal_intensity(const JointSpectralAmplitude& jsa);

double temporal_correlation(const JointTemporalIntensity& jti);

/// Grid centred on ω_p/2 wide enough for a counter-propagating source: the
/// half span covers `span_sigmas` times the Gaussian estimate of the marginal
/// bandwidth, and the point count resolves the interaction-length scale β₁W.
FrequencyGrid suggest_counterprop_grid(const PumpPulse& pump, const DispersionModel& model,
                                       double span_sigmas = 5.0, Eigen::Index min_points = 257,
                                       Eigen::Index max_points = 2049);

FrequencyGrid suggest_collinear_grid(const QpmCollinearSource& src, double span_sigmas = 5.0,
                                     Eigen::Index min_points = 257, Eigen::Index max_points = 2049);

enum class LimitCase {
    anti_correlated,  // monochromatic pump, finite W
    correlated,       // plane-wave pump, finite τ
};

/// Builds the limiting source whose RMS marginal bandwidth equals
/// `target_sigma`, solving for the finite pump parameter by bisection.
JointSpectralAmplitude calibrated_limit_source(LimitCase which, double omega_p, const DispersionModel& model,
                                               const FrequencyGrid& grid, double target_sigma,
                                               PumpPulse* solved = nullptr);

}  // namespace spdc
