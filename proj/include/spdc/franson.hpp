#pragma once

#include "spdc/core.hpp"
#include "spdc/dispersion.hpp"
#include "spdc/jsa.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace spdc {

struct DelayPair {
    double tau1 = 0.0;
    double tau2 = 0.0;
};

/// Largest step·|τ| for which the frequency grid still samples the
/// interferometer fringes without aliasing.
inline constexpr double kAliasGuard = kPi / 4.0;

void check_alias_guard(const FrequencyGrid& grid, double max_abs_delay);

/// Coincidence probability behind two unbalanced Mach-Zehnder interferometers
/// with balanced lossless splitters and time-integrating detectors:
///   P = (1/16) Σᵢⱼ |A|²step² |(1 + e^{i(ω_l τ₁+φ₁)})(1 + e^{i(ω_r τ₂+φ₂)})|²
/// with absolute frequencies ω. The optional φ are frequency-independent phase
/// shifts in the long arms.
double coincidence_probability(const JointSpectralAmplitude& jsa, DelayPair d, double phase1 = 0.0,
                               double phase2 = 0.0);

struct FransonMap {
    VectorXd tau1;  // in units of `time_unit`
    VectorXd tau2;
    double time_unit = 1.0;
    MatrixXd probability;  // (tau1 index, tau2 index)
};

/// One optical cycle at the mean down-conversion frequency.
double optical_cycle(const FrequencyGrid& grid);

/// Map over [0, tau_max]² (tau_max in units of `time_unit`, default one
/// optical cycle).
FransonMap franson_map(const JointSpectralAmplitude& jsa, double tau_max, Eigen::Index n_samples,
                       std::optional<double> time_unit = std::nullopt, int threads = 1);

enum class ScanDirection { diagonal, antidiagonal };

enum class ScanMode {
    carrier_phase,  // delays fixed; long-arm phases stepped by ω_c·δ per arm
    group_delay,    // delays themselves displaced by δ
};

struct FringeScan {
    DelayPair center;
    ScanDirection direction = ScanDirection::diagonal;
    ScanMode mode = ScanMode::carrier_phase;
    VectorXd offsets;  // δ
    VectorXd probability;
    double modulation_depth = 0.0;  // max − min
    double raw_visibility = 0.0;
    double scaled_visibility = 0.0;
    bool clamped = false;  // scaled value exceeded 1 and was clamped
    bool flat = false;     // both directions below kFlatFringeDepth
};

inline constexpr double kRawVisibilityCeiling = 0.5;
inline constexpr double kFlatFringeDepth = 1e-6;

struct VisibilityOptions {
    double offset_in_sigma = 4.0;
    std::optional<ScanDirection> direction;  // unset: larger modulation depth wins
    ScanMode mode = ScanMode::carrier_phase;
    double periods = 3.0;
    int samples_per_period = 128;
};

/// Scan through (offset/σ, offset/σ), σ the RMS marginal bandwidth.
FringeScan fringe_scan(const JointSpectralAmplitude& jsa, DelayPair center, ScanDirection direction,
                       const VisibilityOptions& opts = {});

FringeScan fourth_order_visibility(const JointSpectralAmplitude& jsa, const VisibilityOptions& opts = {});

enum class CorrelationClass { anti_correlated, correlated, intermediate };

std::string to_string(CorrelationClass c);

struct Classification {
    CorrelationClass label = CorrelationClass::intermediate;
    double diagonal_visibility = 0.0;      // scaled
    double antidiagonal_visibility = 0.0;  // scaled
};

inline constexpr double kClassifyMargin = 0.2;

Classification classify_correlation(const JointSpectralAmplitude& jsa, const VisibilityOptions& opts = {});

/// Counter-propagating family: the interaction length is the pump width W.
struct CounterpropFamily {
    PumpPulse pump;
    DispersionModel model;
};

/// Collinear family: the interaction length is the crystal length L.
struct CollinearFamily {
    QpmCollinearSource source;
};

using SourceFamily = std::variant<CounterpropFamily, CollinearFamily>;

struct VisibilityCurve {
    std::string family;
    std::vector<double> lengths;
    std::vector<double> visibility;  // scaled, antidiagonal (frequency-correlated) fringes
};

struct SweepOptions {
    VisibilityOptions visibility{};
    double span_sigmas = 5.0;
    Eigen::Index min_points = 257;
    Eigen::Index max_points = 2049;
    int threads = 1;
};

/// Scaled visibility of the frequency-correlated fringes for one source per
/// length, with the pump bandwidth held fixed.
VisibilityCurve visibility_vs_length(const SourceFamily& family, const std::vector<double>& lengths,
                                     const SweepOptions& opts = {});

JointSpectralAmplitude build_family_member(const SourceFamily& family, double length, const SweepOptions& opts);

std::vector<double> log_spaced(double lo, double hi, int count);

}  // namespace spdc
