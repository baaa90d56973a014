#include "spdc/jsa.hpp"
#include "spdc/parallel.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace spdc {

void PumpPulse::validate() const {
    if (!(omega_p > 0.0)) throw InvalidArgument("pump: omega_p must be positive");
    if (monochromatic && plane_wave)
        throw InvalidArgument("pump: monochromatic and plane-wave limits cannot both be flagged");
    if (!monochromatic && !(tau > 0.0 && std::isfinite(tau)))
        throw InvalidArgument("pump: tau must be positive and finite unless flagged monochromatic");
    if (!plane_wave && !(width_w > 0.0 && std::isfinite(width_w)))
        throw InvalidArgument("pump: width must be positive and finite unless flagged plane-wave");
}

double tau_from_intensity_fwhm(double fwhm) {
    if (!(fwhm > 0.0)) throw InvalidArgument("pump bandwidth must be positive");
    return 2.0 * std::sqrt(std::log(2.0)) / fwhm;
}

FrequencyGrid FrequencyGrid::symmetric(double center, double half_span, Eigen::Index n_points) {
    FrequencyGrid g{center, center, half_span, n_points};
    g.validate();
    return g;
}

void FrequencyGrid::validate() const {
    if (n_points < 3 || n_points % 2 == 0) throw InvalidArgument("grid: n_points must be odd and >= 3");
    if (!(half_span > 0.0 && std::isfinite(half_span))) throw InvalidArgument("grid: half_span must be positive");
}

VectorXd FrequencyGrid::detunings() const {
    VectorXd d(n_points);
    for (Eigen::Index i = 0; i < n_points; ++i) d[i] = detuning(i);
    return d;
}

MatrixXd JointSpectralAmplitude::probability() const {
    const double s = grid.step();
    return amplitude.cwiseAbs2() * (s * s);
}

double norm_squared(const JointSpectralAmplitude& jsa) {
    const double s = jsa.grid.step();
    return jsa.amplitude.cwiseAbs2().sum() * s * s;
}

JointSpectralAmplitude normalized(JointSpectralAmplitude jsa) {
    if (!jsa.amplitude.allFinite()) throw DegenerateKernel("JSA contains non-finite entries");
    const double n2 = norm_squared(jsa);
    if (!(n2 > 0.0)) throw DegenerateKernel("JSA is identically zero on the grid");
    jsa.amplitude /= std::sqrt(n2);
    return jsa;
}

namespace {

void check_grid_size(const JointSpectralAmplitude& jsa) {
    const auto n = jsa.grid.n_points;
    if (jsa.amplitude.rows() != n || jsa.amplitude.cols() != n)
        throw InvalidArgument("JSA amplitude does not match its grid");
}

}  // namespace

JointSpectralAmplitude build_counterprop_jsa(const PumpPulse& pump, const DispersionModel& model,
                                             const FrequencyGrid& grid, int threads) {
    pump.validate();
    grid.validate();
    const Eigen::Index n = grid.n_points;
    const VectorXd wl = grid.omegas_l();
    const VectorXd wr = grid.omegas_r();
    const VectorXd bl = beta(model, wl);
    const VectorXd br = beta(model, wr);
    const double step = grid.step();

    // Plane-wave limit keeps only the Δβ = 0 locus; half the smallest per-step
    // change of β resolves it to a single grid line.
    double line_tol = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k + 1 < n; ++k) line_tol = std::min(line_tol, std::abs(br[k + 1] - br[k]));
    line_tol *= 0.5;

    JointSpectralAmplitude jsa;
    jsa.grid = grid;
    jsa.amplitude.resize(n, n);
    parallel_for(n, threads, [&](Eigen::Index i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double nu_sum = wl[i] + wr[j] - pump.omega_p;
            const double d_beta = bl[i] - br[j];
            const double et = pump.monochromatic ? (std::abs(nu_sum) <= 0.5 * step ? 1.0 : 0.0)
                                                 : pump_spectral_amplitude(pump, nu_sum);
            const double fz = pump.plane_wave ? (std::abs(d_beta) <= line_tol ? 1.0 : 0.0)
                                              : pump_spatial_transform(pump, d_beta);
            jsa.amplitude(i, j) = Complex(et * fz, 0.0);
        }
    });

    std::ostringstream os;
    os.precision(17);
    os << "counterprop(omega_p=" << pump.omega_p << ";tau=";
    if (pump.monochromatic) os << "inf"; else os << pump.tau;
    os << ";W=";
    if (pump.plane_wave) os << "inf"; else os << pump.width_w;
    os << ";" << describe(model) << ")";
    jsa.description = os.str();
    return normalized(std::move(jsa));
}

JointSpectralAmplitude build_collinear_jsa(const QpmCollinearSource& src, const FrequencyGrid& grid, int threads) {
    grid.validate();
    if (!(src.length > 0.0)) throw InvalidArgument("collinear source: length must be positive");
    if (!(src.poling_period > 0.0)) throw InvalidArgument("collinear source: poling period must be positive");
    const double omega_p = pump_center_omega(src);
    PumpPulse pump;
    pump.omega_p = omega_p;
    pump.tau = tau_from_intensity_fwhm(src.pump_bandwidth);
    pump.plane_wave = true;

    const Eigen::Index n = grid.n_points;
    const Eigen::Index c = grid.center_index();
    const double step = grid.step();
    const VectorXd ws = grid.omegas_l();
    const VectorXd wi = grid.omegas_r();
    const VectorXd bs = beta(src.signal_dispersion, ws);
    const VectorXd bi = beta(src.idler_dispersion, wi);
    // Pump frequencies ω_s+ω_i depend only on i+j.
    VectorXd sums(2 * n - 1);
    for (Eigen::Index k = 0; k < 2 * n - 1; ++k)
        sums[k] = grid.center_l + grid.center_r + static_cast<double>(k - 2 * c) * step;
    const VectorXd bp = beta(src.pump_dispersion, sums);

    double grating = 0.0;
    if (std::isfinite(src.poling_period)) {
        const double sign = unpoled_mismatch(src, 0.0, 0.0) < 0.0 ? -1.0 : 1.0;
        grating = sign * kTwoPi / src.poling_period;
    }

    JointSpectralAmplitude jsa;
    jsa.grid = grid;
    jsa.amplitude.resize(n, n);
    const double half_length = 0.5 * src.length;
    parallel_for(n, threads, [&](Eigen::Index i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double dk = bp[i + j] - bs[i] - bi[j] - grating;
            const double et = pump_spectral_amplitude(pump, sums[i + j] - omega_p);
            jsa.amplitude(i, j) = Complex(et * sinc(dk * half_length), 0.0);
        }
    });

    std::ostringstream os;
    os.precision(17);
    os << "collinear(lambda_p=" << src.pump_center_wavelength << ";bw=" << src.pump_bandwidth
       << ";period=" << src.poling_period << ";L=" << src.length << ";p=" << describe(src.pump_dispersion)
       << ";s=" << describe(src.signal_dispersion) << ";i=" << describe(src.idler_dispersion) << ")";
    jsa.description = os.str();
    return normalized(std::move(jsa));
}

MarginalSpectrum marginal_spectrum(const JointSpectralAmplitude& jsa, Side side) {
    check_grid_size(jsa);
    const MatrixXd p = jsa.probability();
    MarginalSpectrum m;
    m.detuning = jsa.grid.detunings();
    m.intensity = side == Side::left ? VectorXd(p.rowwise().sum()) : VectorXd(p.colwise().sum().transpose());
    const double total = m.intensity.sum();
    m.intensity /= total;
    m.mean = m.intensity.dot(m.detuning);
    const double var = m.intensity.dot(m.detuning.cwiseAbs2()) - m.mean * m.mean;
    m.rms_bandwidth = std::sqrt(std::max(var, 0.0));
    return m;
}

double rms_bandwidth(const JointSpectralAmplitude& jsa) {
    return 0.5 * (marginal_spectrum(jsa, Side::left).rms_bandwidth +
                  marginal_spectrum(jsa, Side::right).rms_bandwidth);
}

double weighted_pearson(const MatrixXd& weights, const VectorXd& x, const VectorXd& y) {
    const double total = weights.sum();
    if (!(total > 0.0)) throw ZeroVariance("weights sum to zero");
    const VectorXd px = weights.rowwise().sum() / total;
    const VectorXd py = weights.colwise().sum().transpose() / total;
    const double mx = px.dot(x);
    const double my = py.dot(y);
    const VectorXd xc = x.array() - mx;
    const VectorXd yc = y.array() - my;
    const double vx = px.dot(xc.cwiseAbs2());
    const double vy = py.dot(yc.cwiseAbs2());
    const double scale = std::max({x.cwiseAbs().maxCoeff(), y.cwiseAbs().maxCoeff(), 1e-300});
    if (vx <= 1e-24 * scale * scale || vy <= 1e-24 * scale * scale)
        throw ZeroVariance("a marginal is concentrated on a single grid point");
    const double cov = xc.dot(weights * yc) / total;
    return std::clamp(cov / std::sqrt(vx * vy), -1.0, 1.0);
}

double frequency_correlation(const JointSpectralAmplitude& jsa) {
    check_grid_size(jsa);
    const VectorXd nu = jsa.grid.detunings();
    return weighted_pearson(jsa.probability(), nu, nu);
}

JointTemporalIntensity joint_temporal_intensity(const JointSpectralAmplitude& jsa) {
    check_grid_size(jsa);
    const Eigen::Index n = jsa.grid.n_points;
    const Eigen::Index c = jsa.grid.center_index();
    const MatrixXd mag = jsa.amplitude.cwiseAbs2();
    const double peak = mag.maxCoeff();
    const double edge = std::max({mag.row(0).maxCoeff(), mag.row(n - 1).maxCoeff(), mag.col(0).maxCoeff(),
                                  mag.col(n - 1).maxCoeff()});

    JointTemporalIntensity jti;
    jti.edge_ratio = peak > 0.0 ? edge / peak : 0.0;
    jti.alias_warning = jti.edge_ratio >= kEdgeDecayLimit;

    // Row and column transforms; the detuning origin sits at index c, which only
    // contributes a phase per output bin and drops out of |Ã|².
    Eigen::FFT<double> fft;
    MatrixXc tmp(n, n);
    std::vector<Complex> in(static_cast<std::size_t>(n)), out;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) in[static_cast<std::size_t>(j)] = jsa.amplitude(i, j);
        fft.fwd(out, in);
        for (Eigen::Index j = 0; j < n; ++j) tmp(i, j) = out[static_cast<std::size_t>(j)];
    }
    MatrixXc spec(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) in[static_cast<std::size_t>(i)] = tmp(i, j);
        fft.fwd(out, in);
        for (Eigen::Index i = 0; i < n; ++i) spec(i, j) = out[static_cast<std::size_t>(i)];
    }

    // Bin k of the centred time axis is FFT bin (k − c) mod n.
    jti.times.resize(n);
    jti.intensity.resize(n, n);
    const double dt = kTwoPi / (static_cast<double>(n) * jsa.grid.step());
    auto wrap = [n](Eigen::Index k) { return ((k % n) + n) % n; };
    for (Eigen::Index k = 0; k < n; ++k) jti.times[k] = static_cast<double>(k - c) * dt;
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) jti.intensity(a, b) = std::norm(spec(wrap(a - c), wrap(b - c)));
    jti.intensity /= jti.intensity.sum();
    return jti;
}

double temporal_correlation(const JointTemporalIntensity& jti) {
    return weighted_pearson(jti.intensity, jti.times, jti.times);
}

namespace {

Eigen::Index odd_points(double span, double max_step, Eigen::Index min_points, Eigen::Index max_points) {
    double want = std::ceil(span / max_step) + 1.0;
    if (!std::isfinite(want)) want = static_cast<double>(max_points);
    auto n = static_cast<Eigen::Index>(std::clamp(want, static_cast<double>(min_points), static_cast<double>(max_points)));
    if (n % 2 == 0) ++n;
    return std::min(n, max_points % 2 ? max_points : max_points - 1);
}

// Step such that the time-domain extent (3×length scale plus the Franson
// offset) fits inside the aliasing window 2π/step.
double max_step_for(double time_extent, double offset) {
    const double t = 3.0 * time_extent + offset;
    return t > 0.0 ? kPi / t : std::numeric_limits<double>::infinity();
}

}  // namespace

FrequencyGrid suggest_counterprop_grid(const PumpPulse& pump, const DispersionModel& model, double span_sigmas,
                                       Eigen::Index min_points, Eigen::Index max_points) {
    pump.validate();
    const double center = 0.5 * pump.omega_p;
    const double b1 = std::abs(beta_derivatives(model, center, 1)[0]);
    const double var_sum = pump.monochromatic ? 0.0 : 1.0 / (2.0 * pump.tau * pump.tau);
    const double var_diff = pump.plane_wave ? 0.0 : 1.0 / (2.0 * b1 * b1 * pump.width_w * pump.width_w);
    double sigma = 0.5 * std::sqrt(var_sum + var_diff);
    double half_span = std::min(span_sigmas * sigma, 0.45 * center);
    sigma = std::min(sigma, half_span / span_sigmas);
    const double extent = std::max(pump.monochromatic ? 0.0 : pump.tau, pump.plane_wave ? 0.0 : b1 * pump.width_w);
    const Eigen::Index n = odd_points(2.0 * half_span, max_step_for(extent, 4.0 / sigma), min_points, max_points);
    return FrequencyGrid::symmetric(center, half_span, n);
}

FrequencyGrid suggest_collinear_grid(const QpmCollinearSource& src, double span_sigmas, Eigen::Index min_points,
                                     Eigen::Index max_points) {
    const auto [ws, wi] = signal_idler_centers(src);
    const double tau = tau_from_intensity_fwhm(src.pump_bandwidth);
    const double b1s = beta_derivatives(src.signal_dispersion, ws, 1)[0];
    const double b1i = beta_derivatives(src.idler_dispersion, wi, 1)[0];
    const double kappa = std::abs(0.5 * (b1i - b1s));
    const double var_sum = 1.0 / (2.0 * tau * tau);
    // sinc²(x) ≈ exp(−x²/3) near its peak, x = κLΔ/2.
    const double kl = kappa * src.length;
    const double var_diff = kl > 0.0 ? 6.0 / (kl * kl) : std::numeric_limits<double>::infinity();
    const double cap = 0.45 * std::min(ws, wi);
    double sigma = 0.5 * std::sqrt(var_sum + var_diff);
    const double half_span = std::min(span_sigmas * sigma, cap);
    sigma = std::min(sigma, half_span / span_sigmas);
    const Eigen::Index n =
        odd_points(2.0 * half_span, max_step_for(std::max(tau, kl), 4.0 / sigma), min_points, max_points);
    FrequencyGrid g{ws, wi, half_span, n};
    g.validate();
    return g;
}

JointSpectralAmplitude calibrated_limit_source(LimitCase which, double omega_p, const DispersionModel& model,
                                               const FrequencyGrid& grid, double target_sigma, PumpPulse* solved) {
    if (!(target_sigma > 0.0)) throw InvalidArgument("calibration target bandwidth must be positive");
    PumpPulse pump;
    pump.omega_p = omega_p;
    pump.monochromatic = which == LimitCase::anti_correlated;
    pump.plane_wave = which == LimitCase::correlated;
    auto with_param = [&](double p) {
        PumpPulse q = pump;
        (which == LimitCase::anti_correlated ? q.width_w : q.tau) = p;
        return q;
    };
    auto sigma_of = [&](double p) { return rms_bandwidth(build_counterprop_jsa(with_param(p), model, grid)); };

    // The marginal narrows monotonically as the finite parameter grows.
    const double b1 = std::abs(beta_derivatives(model, 0.5 * omega_p, 1)[0]);
    double guess = 1.0 / target_sigma;
    if (which == LimitCase::anti_correlated) guess /= b1;
    double lo = guess, hi = guess;
    for (int i = 0; i < 200 && sigma_of(lo) < target_sigma; ++i) lo *= 0.5;
    for (int i = 0; i < 200 && sigma_of(hi) > target_sigma; ++i) hi *= 2.0;
    if (sigma_of(lo) < target_sigma || sigma_of(hi) > target_sigma)
        throw InvalidArgument("calibration: target bandwidth not reachable on this grid");
    for (int it = 0; it < 200 && hi / lo - 1.0 > 1e-13; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (sigma_of(mid) > target_sigma) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const PumpPulse best = with_param(std::sqrt(lo * hi));
    if (solved) *solved = best;
    return build_counterprop_jsa(best, model, grid);
}

}  // namespace spdc
