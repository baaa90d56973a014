#include "spdc/franson.hpp"
#include "spdc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace spdc {

namespace {

// Transmission of one unbalanced interferometer at each grid frequency:
// |1 + e^{i(ωτ+φ)}|²/4 = (1 + cos(ωτ+φ))/2.
VectorXd arm_filter(const VectorXd& omegas, double tau, double phase) {
    return (((omegas.array() * tau) + phase).cos() + 1.0) * 0.5;
}

// Caches the joint probability and absolute frequencies so repeated delay
// evaluations cost one matrix-vector product each.
class CoincidenceKernel {
public:
    explicit CoincidenceKernel(const JointSpectralAmplitude& jsa)
        : grid_(jsa.grid), prob_(jsa.probability()), wl_(jsa.grid.omegas_l()), wr_(jsa.grid.omegas_r()) {}

    double operator()(DelayPair d, double phase1, double phase2) const {
        const VectorXd u = arm_filter(wl_, d.tau1, phase1);
        const VectorXd v = arm_filter(wr_, d.tau2, phase2);
        return u.dot(prob_ * v);
    }

    const FrequencyGrid& grid() const { return grid_; }
    const MatrixXd& probability() const { return prob_; }
    const VectorXd& omegas_l() const { return wl_; }
    const VectorXd& omegas_r() const { return wr_; }

private:
    FrequencyGrid grid_;
    MatrixXd prob_;
    VectorXd wl_;
    VectorXd wr_;
};

double fringe_period(const FrequencyGrid& grid) { return kTwoPi / (grid.center_l + grid.center_r); }

}  // namespace

void check_alias_guard(const FrequencyGrid& grid, double max_abs_delay) {
    const double product = grid.step() * max_abs_delay;
    if (!(product < kAliasGuard)) {
        std::ostringstream os;
        os << "step*tau = " << product << " exceeds pi/4; refine the grid or reduce the delay";
        throw AliasRisk(os.str());
    }
}

double coincidence_probability(const JointSpectralAmplitude& jsa, DelayPair d, double phase1, double phase2) {
    check_alias_guard(jsa.grid, std::max(std::abs(d.tau1), std::abs(d.tau2)));
    return CoincidenceKernel(jsa)(d, phase1, phase2);
}

double optical_cycle(const FrequencyGrid& grid) { return kTwoPi / (0.5 * (grid.center_l + grid.center_r)); }

FransonMap franson_map(const JointSpectralAmplitude& jsa, double tau_max, Eigen::Index n_samples,
                       std::optional<double> time_unit, int threads) {
    if (n_samples < 2) throw InvalidArgument("franson_map: need at least two samples per axis");
    if (!(tau_max > 0.0)) throw InvalidArgument("franson_map: tau_max must be positive");
    FransonMap map;
    map.time_unit = time_unit.value_or(optical_cycle(jsa.grid));
    check_alias_guard(jsa.grid, tau_max * map.time_unit);

    map.tau1 = VectorXd::LinSpaced(n_samples, 0.0, tau_max);
    map.tau2 = map.tau1;
    const CoincidenceKernel kernel(jsa);
    const Eigen::Index n = jsa.grid.n_points;
    MatrixXd u(n, n_samples), v(n, n_samples);
    parallel_for(n_samples, threads, [&](Eigen::Index k) {
        u.col(k) = arm_filter(kernel.omegas_l(), map.tau1[k] * map.time_unit, 0.0);
        v.col(k) = arm_filter(kernel.omegas_r(), map.tau2[k] * map.time_unit, 0.0);
    });
    const MatrixXd pv = kernel.probability() * v;
    map.probability.resize(n_samples, n_samples);
    parallel_for(n_samples, threads, [&](Eigen::Index a) { map.probability.row(a) = u.col(a).transpose() * pv; });
    return map;
}

FringeScan fringe_scan(const JointSpectralAmplitude& jsa, DelayPair center, ScanDirection direction,
                       const VisibilityOptions& opts) {
    if (opts.samples_per_period < 8) throw InvalidArgument("fringe scan: too few samples per period");
    if (!(opts.periods > 0.0)) throw InvalidArgument("fringe scan: periods must be positive");
    const double period = fringe_period(jsa.grid);
    const double half_window = 0.5 * opts.periods * period;
    const auto samples = static_cast<Eigen::Index>(std::ceil(opts.periods * opts.samples_per_period)) + 1;
    const double sign2 = direction == ScanDirection::diagonal ? 1.0 : -1.0;

    double max_delay = std::max(std::abs(center.tau1), std::abs(center.tau2));
    if (opts.mode == ScanMode::group_delay) max_delay += half_window;
    check_alias_guard(jsa.grid, max_delay);

    FringeScan scan;
    scan.center = center;
    scan.direction = direction;
    scan.mode = opts.mode;
    scan.offsets = VectorXd::LinSpaced(samples, -half_window, half_window);
    scan.probability.resize(samples);
    const CoincidenceKernel kernel(jsa);
    for (Eigen::Index k = 0; k < samples; ++k) {
        const double delta = scan.offsets[k];
        if (opts.mode == ScanMode::group_delay) {
            scan.probability[k] = kernel({center.tau1 + delta, center.tau2 + sign2 * delta}, 0.0, 0.0);
        } else {
            scan.probability[k] =
                kernel(center, jsa.grid.center_l * delta, sign2 * jsa.grid.center_r * delta);
        }
    }
    const double hi = scan.probability.maxCoeff();
    const double lo = scan.probability.minCoeff();
    scan.modulation_depth = hi - lo;
    scan.raw_visibility = hi + lo > 0.0 ? (hi - lo) / (hi + lo) : 0.0;
    const double scaled = scan.raw_visibility / kRawVisibilityCeiling;
    scan.clamped = scaled > 1.0;
    scan.scaled_visibility = std::clamp(scaled, 0.0, 1.0);
    return scan;
}

FringeScan fourth_order_visibility(const JointSpectralAmplitude& jsa, const VisibilityOptions& opts) {
    const double sigma = rms_bandwidth(jsa);
    if (!(sigma > 0.0)) throw ZeroVariance("fourth_order_visibility: zero marginal bandwidth");
    const double t0 = opts.offset_in_sigma / sigma;
    const DelayPair center{t0, t0};

    FringeScan best;
    if (opts.direction) {
        best = fringe_scan(jsa, center, *opts.direction, opts);
        best.flat = best.modulation_depth < kFlatFringeDepth;
    } else {
        FringeScan diag = fringe_scan(jsa, center, ScanDirection::diagonal, opts);
        FringeScan anti = fringe_scan(jsa, center, ScanDirection::antidiagonal, opts);
        const bool both_flat = diag.modulation_depth < kFlatFringeDepth && anti.modulation_depth < kFlatFringeDepth;
        best = anti.modulation_depth > diag.modulation_depth ? std::move(anti) : std::move(diag);
        best.flat = both_flat;
    }
    if (best.flat) {
        best.raw_visibility = 0.0;
        best.scaled_visibility = 0.0;
        best.clamped = false;
    }
    return best;
}

std::string to_string(CorrelationClass c) {
    switch (c) {
    case CorrelationClass::anti_correlated: return "anti_correlated";
    case CorrelationClass::correlated: return "correlated";
    case CorrelationClass::intermediate: return "intermediate";
    }
    return "intermediate";
}

Classification classify_correlation(const JointSpectralAmplitude& jsa, const VisibilityOptions& opts) {
    VisibilityOptions o = opts;
    o.direction = ScanDirection::diagonal;
    const FringeScan diag = fourth_order_visibility(jsa, o);
    o.direction = ScanDirection::antidiagonal;
    const FringeScan anti = fourth_order_visibility(jsa, o);
    Classification c;
    c.diagonal_visibility = diag.scaled_visibility;
    c.antidiagonal_visibility = anti.scaled_visibility;
    if (c.diagonal_visibility - c.antidiagonal_visibility >= kClassifyMargin) {
        c.label = CorrelationClass::anti_correlated;
    } else if (c.antidiagonal_visibility - c.diagonal_visibility >= kClassifyMargin) {
        c.label = CorrelationClass::correlated;
    }
    return c;
}

JointSpectralAmplitude build_family_member(const SourceFamily& family, double length, const SweepOptions& opts) {
    if (const auto* cp = std::get_if<CounterpropFamily>(&family)) {
        PumpPulse pump = cp->pump;
        pump.plane_wave = false;
        pump.width_w = length;
        const FrequencyGrid grid =
            suggest_counterprop_grid(pump, cp->model, opts.span_sigmas, opts.min_points, opts.max_points);
        return build_counterprop_jsa(pump, cp->model, grid, opts.threads);
    }
    const auto& col = std::get<CollinearFamily>(family);
    QpmCollinearSource src = col.source;
    src.length = length;
    const FrequencyGrid grid = suggest_collinear_grid(src, opts.span_sigmas, opts.min_points, opts.max_points);
    return build_collinear_jsa(src, grid, opts.threads);
}

VisibilityCurve visibility_vs_length(const SourceFamily& family, const std::vector<double>& lengths,
                                     const SweepOptions& opts) {
    if (lengths.empty()) throw InvalidArgument("visibility sweep: no lengths given");
    for (std::size_t k = 0; k < lengths.size(); ++k) {
        if (!(lengths[k] > 0.0)) throw InvalidArgument("visibility sweep: lengths must be positive");
        if (k > 0 && !(lengths[k] > lengths[k - 1]))
            throw InvalidArgument("visibility sweep: lengths must be strictly increasing");
    }
    VisibilityOptions vis = opts.visibility;
    if (!vis.direction) vis.direction = ScanDirection::antidiagonal;

    VisibilityCurve curve;
    curve.family = std::holds_alternative<CounterpropFamily>(family) ? "counterprop" : "collinear";
    curve.lengths = lengths;
    curve.visibility.reserve(lengths.size());
    for (double length : lengths) {
        const JointSpectralAmplitude jsa = build_family_member(family, length, opts);
        curve.visibility.push_back(fourth_order_visibility(jsa, vis).scaled_visibility);
    }
    return curve;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
    if (!(lo > 0.0 && hi > lo) || count < 2) throw InvalidArgument("log_spaced: need 0 < lo < hi and count >= 2");
    std::vector<double> out(static_cast<std::size_t>(count));
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (int k = 0; k < count; ++k) out[static_cast<std::size_t>(k)] = std::exp(a + (b - a) * k / (count - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

}  // namespace spdc
