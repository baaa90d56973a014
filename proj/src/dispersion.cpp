#include "spdc/dispersion.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace spdc {

namespace {

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

double taylor_value(const TaylorDispersion& t, double omega, int derivative) {
    const double x = omega - t.omega0;
    const int n = static_cast<int>(t.coefficients.size());
    // Horner over the shifted coefficients: Σ_{k≥d} β_k x^{k−d}/(k−d)!
    double acc = 0.0;
    for (int k = n - 1; k >= derivative; --k) {
        acc = t.coefficients[k] + acc * x / static_cast<double>(k - derivative + 1);
    }
    return acc;
}

double n_squared(const SellmeierModel& m, double lambda_um) {
    const auto& c = m.coefficients;
    if (c.empty()) throw InvalidArgument("Sellmeier model '" + m.name + "' has no coefficients");
    const double l2 = lambda_um * lambda_um;
    double n2 = c[0];
    for (std::size_t k = 1; k + 1 < c.size(); k += 2) {
        const double b = c[k];
        const double p = c[k + 1];
        switch (m.form) {
        case SellmeierForm::standard: n2 += b * l2 / (l2 - p * p); break;
        case SellmeierForm::pole: n2 += b / (l2 - p); break;
        }
    }
    return n2;
}

double bulk_beta(const SellmeierModel& m, double omega) {
    if (!(omega > 0.0)) throw OutOfRange("beta: angular frequency must be positive");
    return refractive_index(m, omega_to_wavelength(omega)) * omega / kSpeedOfLight;
}

double slab_beta(const SlabWaveguideTE& wg, double omega) {
    if (!(omega > 0.0)) throw OutOfRange("beta: angular frequency must be positive");
    return slab_te_effective_index(wg, omega_to_wavelength(omega)) * omega / kSpeedOfLight;
}

// Central-difference stencils at absolute step h.
double fd1(const DispersionModel& m, double w, double h) {
    return (beta(m, w + h) - beta(m, w - h)) / (2.0 * h);
}

double fd2(const DispersionModel& m, double w, double h) {
    return (beta(m, w + h) - 2.0 * beta(m, w) + beta(m, w - h)) / (h * h);
}

double fd3(const DispersionModel& m, double w, double h) {
    return (beta(m, w + 2.0 * h) - 2.0 * beta(m, w + h) + 2.0 * beta(m, w - h) - beta(m, w - 2.0 * h)) /
           (2.0 * h * h * h);
}

}  // namespace

SellmeierModel SellmeierModel::constant(double n, double lambda_min_um, double lambda_max_um) {
    SellmeierModel m;
    std::ostringstream os;
    os << "constant(n=" << n << ")";
    m.name = os.str();
    m.form = SellmeierForm::standard;
    m.coefficients = {n * n};
    m.lambda_min_um = lambda_min_um;
    m.lambda_max_um = lambda_max_um;
    return m;
}

double refractive_index(const SellmeierModel& model, double lambda_m) {
    const double lambda_um = lambda_m * 1e6;
    if (!(lambda_um >= model.lambda_min_um && lambda_um <= model.lambda_max_um)) {
        std::ostringstream os;
        os << "refractive_index: wavelength " << lambda_um << " um outside [" << model.lambda_min_um << ", "
           << model.lambda_max_um << "] um of '" << model.name << "'";
        throw OutOfRange(os.str());
    }
    const double n2 = n_squared(model, lambda_um);
    if (!(n2 > 1.0)) {
        std::ostringstream os;
        os << "refractive_index: '" << model.name << "' yields n^2 = " << n2 << " at " << lambda_um << " um";
        throw OutOfRange(os.str());
    }
    return std::sqrt(n2);
}

double slab_te_effective_index(const SlabWaveguideTE& wg, double lambda_m) {
    if (!(wg.thickness > 0.0)) throw InvalidArgument("slab thickness must be positive");
    if (wg.mode_order < 0) throw InvalidArgument("slab mode order must be non-negative");
    const double n_core = refractive_index(wg.core, lambda_m);
    const double n_clad = wg.n_clad;
    if (!(n_core > n_clad)) throw ModeCutoff("slab core index does not exceed cladding index");

    const double k0 = kTwoPi / lambda_m;
    const double half_d = 0.5 * wg.thickness;
    const double shift = 0.5 * kPi * wg.mode_order;
    const double core2 = n_core * n_core;
    const double clad2 = n_clad * n_clad;

    // Strictly decreasing in n_eff: κ falls and atan(γ/κ) rises.
    auto f = [&](double n_eff) {
        const double n2 = n_eff * n_eff;
        const double kappa = k0 * std::sqrt(std::max(core2 - n2, 0.0));
        const double gamma = k0 * std::sqrt(std::max(n2 - clad2, 0.0));
        return kappa * half_d - shift - std::atan2(gamma, kappa);
    };

    double lo = n_clad;
    double hi = n_core;
    if (!(f(lo) > 0.0)) {
        std::ostringstream os;
        os << "TE" << wg.mode_order << " is not guided at " << lambda_m * 1e6 << " um (d = " << wg.thickness * 1e6
           << " um)";
        throw ModeCutoff(os.str());
    }
    // Bisect to bracket collapse; this also drives |f| far below 1e-12.
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (f(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double beta(const DispersionModel& model, double omega) {
    return std::visit(overloaded{
                          [&](const TaylorDispersion& t) { return taylor_value(t, omega, 0); },
                          [&](const SellmeierModel& s) { return bulk_beta(s, omega); },
                          [&](const SlabWaveguideTE& w) { return slab_beta(w, omega); },
                      },
                      model);
}

VectorXd beta(const DispersionModel& model, const VectorXd& omegas) {
    VectorXd out(omegas.size());
    for (Eigen::Index i = 0; i < omegas.size(); ++i) out[i] = beta(model, omegas[i]);
    return out;
}

double derivative_step(int order) {
    switch (order) {
    case 1: return 1e-5;
    case 2: return 1e-3;
    case 3: return 1e-2;
    default: throw InvalidArgument("derivative order must be 1, 2 or 3");
    }
}

std::vector<double> beta_derivatives(const DispersionModel& model, double omega, int max_order) {
    if (max_order < 1 || max_order > 3) throw InvalidArgument("beta_derivatives: max_order must be in [1, 3]");
    std::vector<double> out;
    out.reserve(max_order);
    if (const auto* t = std::get_if<TaylorDispersion>(&model)) {
        for (int k = 1; k <= max_order; ++k) out.push_back(taylor_value(*t, omega, k));
        return out;
    }
    if (const auto* s = std::get_if<SellmeierModel>(&model); s && s->coefficients.size() == 1) {
        // Nondispersive medium: β = nω/c exactly.
        if (!(omega > 0.0)) throw OutOfRange("beta: angular frequency must be positive");
        out.push_back(refractive_index(*s, omega_to_wavelength(omega)) / kSpeedOfLight);
        out.resize(static_cast<std::size_t>(max_order), 0.0);
        return out;
    }
    // β₁ from a plain central difference; β₂, β₃ Richardson-combine steps h and
    // h/2 to cancel the O(h²) term, since round-off forbids small steps there.
    out.push_back(fd1(model, omega, derivative_step(1) * omega));
    if (max_order >= 2) {
        const double h = derivative_step(2) * omega;
        out.push_back((4.0 * fd2(model, omega, 0.5 * h) - fd2(model, omega, h)) / 3.0);
    }
    if (max_order >= 3) {
        const double h = derivative_step(3) * omega;
        out.push_back((4.0 * fd3(model, omega, 0.5 * h) - fd3(model, omega, h)) / 3.0);
    }
    return out;
}

double delta_beta(const DispersionModel& model, double omega_l, double omega_r) {
    return beta(model, omega_l) - beta(model, omega_r);
}

double phase_index(const DispersionModel& model, double omega) {
    return beta(model, omega) * kSpeedOfLight / omega;
}

std::string describe(const DispersionModel& model) {
    std::ostringstream os;
    os.precision(17);
    std::visit(overloaded{
                   [&](const TaylorDispersion& t) {
                       os << "taylor(omega0=" << t.omega0 << ";beta=";
                       for (std::size_t k = 0; k < t.coefficients.size(); ++k)
                           os << (k ? " " : "") << t.coefficients[k];
                       os << ")";
                   },
                   [&](const SellmeierModel& s) { os << "bulk(" << s.name << ")"; },
                   [&](const SlabWaveguideTE& w) {
                       os << "slab_te(core=" << w.core.name << ";n_clad=" << w.n_clad << ";d=" << w.thickness
                          << ";m=" << w.mode_order << ")";
                   },
               },
               model);
    return os.str();
}

// ---------------------------------------------------------------------------

double pump_center_omega(const QpmCollinearSource& src) {
    if (!(src.pump_center_wavelength > 0.0)) throw InvalidArgument("pump wavelength must be positive");
    return wavelength_to_omega(src.pump_center_wavelength);
}

std::pair<double, double> signal_idler_centers(const QpmCollinearSource& src) {
    const double wp = pump_center_omega(src);
    const double ws = src.signal_center > 0.0 ? src.signal_center : 0.5 * wp;
    const double wi = src.idler_center > 0.0 ? src.idler_center : wp - ws;
    return {ws, wi};
}

double unpoled_mismatch(const QpmCollinearSource& src, double nu_s, double nu_i) {
    const auto [ws0, wi0] = signal_idler_centers(src);
    const double ws = ws0 + nu_s;
    const double wi = wi0 + nu_i;
    return beta(src.pump_dispersion, ws + wi) - beta(src.signal_dispersion, ws) - beta(src.idler_dispersion, wi);
}

double qpm_mismatch(const QpmCollinearSource& src, double nu_s, double nu_i) {
    if (!(src.poling_period > 0.0)) throw InvalidArgument("poling period must be positive");
    const double dk = unpoled_mismatch(src, nu_s, nu_i);
    if (std::isinf(src.poling_period)) return dk;
    const double grating = kTwoPi / src.poling_period;
    const double sign = unpoled_mismatch(src, 0.0, 0.0) < 0.0 ? -1.0 : 1.0;
    return dk - sign * grating;
}

double solve_poling_period(const QpmCollinearSource& src) {
    const double dk0 = unpoled_mismatch(src, 0.0, 0.0);
    if (dk0 == 0.0) throw DegenerateMismatch("unpoled mismatch vanishes at degeneracy; no poling required");
    return kTwoPi / std::abs(dk0);
}

}  // namespace spdc
