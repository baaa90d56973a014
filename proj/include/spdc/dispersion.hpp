#pragma once

#include "spdc/core.hpp"

#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace spdc {

// Closed forms understood by SellmeierModel (λ in micrometres):
//   standard : n² = A + Σₖ Bₖ λ² / (λ² − Cₖ²)   coefficients [A, B₁, C₁, B₂, C₂, ...]
//   pole     : n² = A + Σₖ Bₖ / (λ² − Cₖ)       coefficients [A, B₁, C₁, B₂, C₂, ...]
// A constant-index medium is the standard form with only A.
enum class SellmeierForm { standard, pole };

struct SellmeierModel {
    std::string name;
    SellmeierForm form = SellmeierForm::standard;
    std::vector<double> coefficients;
    double lambda_min_um = 0.0;
    double lambda_max_um = 0.0;

    static SellmeierModel constant(double n, double lambda_min_um = 0.2, double lambda_max_um = 20.0);
};

/// β(ω) = Σₖ βₖ (ω − ω₀)ᵏ / k!, exact for the stored orders. Polynomial models
/// have no validity window.
struct TaylorDispersion {
    double omega0 = 0.0;
    std::vector<double> coefficients;  // β₀, β₁, β₂, ...
};

/// Symmetric TE slab: core of thickness d between two identical claddings.
struct SlabWaveguideTE {
    SellmeierModel core;
    double n_clad = 1.0;
    double thickness = 0.0;  // m
    int mode_order = 0;
};

using DispersionModel = std::variant<TaylorDispersion, SellmeierModel, SlabWaveguideTE>;

double refractive_index(const SellmeierModel& model, double lambda_m);

/// Effective index of the requested TE mode, solved by bisection on
/// κd/2 − mπ/2 − atan(γ/κ) = 0, which is the transcendental
/// tan(κd/2 − mπ/2) = γ/κ written without poles.
double slab_te_effective_index(const SlabWaveguideTE& wg, double lambda_m);

/// Propagation constant in rad/m.
double beta(const DispersionModel& model, double omega);

/// β at every entry of `omegas`.
VectorXd beta(const DispersionModel& model, const VectorXd& omegas);

/// β₁ … β_max_order (max_order ≤ 3). Exact for Taylor models; Richardson-
/// combined central differences otherwise, see derivative_step().
std::vector<double> beta_derivatives(const DispersionModel& model, double omega, int max_order);

/// Relative finite-difference step used for the given derivative order.
double derivative_step(int order);

/// Δβ = β(ω_l) − β(ω_r).
double delta_beta(const DispersionModel& model, double omega_l, double omega_r);

/// Phase index β·c/ω, meaningful for SI models.
double phase_index(const DispersionModel& model, double omega);

std::string describe(const DispersionModel& model);

// ---------------------------------------------------------------------------
// Collinear quasi-phase-matched source.

struct QpmCollinearSource {
    DispersionModel pump_dispersion;
    DispersionModel signal_dispersion;
    DispersionModel idler_dispersion;
    double poling_period = 0.0;           // m; +inf means unpoled
    double length = 0.0;                  // m
    double pump_center_wavelength = 0.0;  // m
    double pump_bandwidth = 0.0;          // rad/s, FWHM of the pump intensity spectrum
    double signal_center = 0.0;           // rad/s; 0 selects ω_p/2
    double idler_center = 0.0;            // rad/s; 0 selects ω_p/2
};

double pump_center_omega(const QpmCollinearSource& src);
std::pair<double, double> signal_idler_centers(const QpmCollinearSource& src);

/// β_p(ω_s+ω_i) − β_s(ω_s) − β_i(ω_i) at the given detunings, without poling.
double unpoled_mismatch(const QpmCollinearSource& src, double nu_s, double nu_i);

/// Δk = Δk₀ − s·2π/Λ, where s = sign of Δk₀ at degeneracy selects the
/// grating harmonic that compensates the material mismatch.
double qpm_mismatch(const QpmCollinearSource& src, double nu_s, double nu_i);

double solve_poling_period(const QpmCollinearSource& src);

}  // namespace spdc
