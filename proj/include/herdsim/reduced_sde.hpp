#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace herdsim {

/// Parameters of the two-exponent multiplicative SDE
///   dx = (eta - lam/2) x^(2 eta - 1) dt + x^eta dW
/// restricted to [x_min, x_max] by reflection. Requires eta != 1.
struct ReducedParams {
    double eta = 2.5;
    double lam = 4.1;
    double x_min = 1.0;
    double x_max = 100.0;
    std::uint64_t seed = 1;
    /// Internal Euler step dt = step_kappa * x^(-2(eta-1)); the noise
    /// increment per step is then sqrt(step_kappa) * x.
    double step_kappa = 0.005;
    /// Substep budget per emitted sample; exceeding it signals parameters
    /// for which the state-scaled stepping cannot make progress.
    std::uint64_t max_substeps_per_sample = 50'000'000;

    void validate() const;
};

/// Raised when the per-sample substep budget is exhausted.
struct StepCollapseError : std::runtime_error {
    explicit StepCollapseError(const std::string& what) : std::runtime_error(what) {}
};

/// The (eta, lam, beta) exponent family: power-law PDF tail lam, spectral
/// exponent beta, multiplicativity eta.
struct ExponentTriple {
    double eta = 0.0;
    double lam = 0.0;
    double beta = 0.0;
};

/// beta from (eta, lam): 1 + (lam - 3) / (2 (eta - 1)).
double psd_exponent(double eta, double lam);

/// Exponents implied by the herding model's activity feedback:
/// eta = (3+alpha)/2, lam = eps_cf + alpha + 1,
/// beta = 1 + (eps_cf + alpha - 2)/(1 + alpha).
ExponentTriple exponents_from_params(double eps_cf, double alpha);

/// Deterministic part (eta - lam/2) x^(2 eta - 1).
double reduced_drift(double x, const ReducedParams& p);

/// Stationary density (1-lam) x^(-lam) / (x_max^(1-lam) - x_min^(1-lam))
/// on [x_min, x_max]. Throws std::domain_error outside the boundaries;
/// requires lam != 1.
double analytic_stationary_pdf(double x, const ReducedParams& p);

/// Inverse CDF of the stationary law, u in [0,1].
double analytic_stationary_quantile(double u, const ReducedParams& p);

/// Integrate the SDE and emit n_samples values on a uniform grid with
/// spacing sample_dt (scaled time). The initial state is drawn from the
/// analytic stationary law.
std::vector<double> simulate_reduced(const ReducedParams& p, std::size_t n_samples,
                                     double sample_dt);

} // namespace herdsim
