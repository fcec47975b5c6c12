#include "herdsim/reduced_sde.hpp"

#include <cmath>
#include <random>

#include "herdsim/errors.hpp"
#include "herdsim/rng.hpp"

namespace herdsim {

void ReducedParams::validate() const {
    if (std::abs(eta - 1.0) < 1e-12) throw ConfigError("reduced: eta must differ from 1");
    if (!(x_min > 0.0)) throw ConfigError("reduced: x_min must be > 0");
    if (!(x_max > x_min)) throw ConfigError("reduced: x_max must exceed x_min");
    if (!(step_kappa > 0.0)) throw ConfigError("reduced: step_kappa must be > 0");
}

double psd_exponent(double eta, double lam) {
    return 1.0 + (lam - 3.0) / (2.0 * (eta - 1.0));
}

ExponentTriple exponents_from_params(double eps_cf, double alpha) {
    ExponentTriple t;
    t.eta = 0.5 * (3.0 + alpha);
    t.lam = eps_cf + alpha + 1.0;
    t.beta = 1.0 + (eps_cf + alpha - 2.0) / (1.0 + alpha);
    return t;
}

double reduced_drift(double x, const ReducedParams& p) {
    return (p.eta - 0.5 * p.lam) * std::pow(x, 2.0 * p.eta - 1.0);
}

double analytic_stationary_pdf(double x, const ReducedParams& p) {
    if (!(x >= p.x_min && x <= p.x_max)) {
        throw std::domain_error("analytic_stationary_pdf: x outside [x_min, x_max]");
    }
    const double e = 1.0 - p.lam;
    if (p.lam == 0.0) return 1.0 / (p.x_max - p.x_min);
    return e * std::pow(x, -p.lam) / (std::pow(p.x_max, e) - std::pow(p.x_min, e));
}

double analytic_stationary_quantile(double u, const ReducedParams& p) {
    const double e = 1.0 - p.lam;
    if (p.lam == 0.0) return p.x_min + u * (p.x_max - p.x_min);
    const double a = std::pow(p.x_min, e), b = std::pow(p.x_max, e);
    return std::pow(a + u * (b - a), 1.0 / e);
}

namespace {

double reflect_interval(double v, double lo, double hi) {
    while (v < lo || v > hi) {
        if (v < lo) v = 2.0 * lo - v;
        if (v > hi) v = 2.0 * hi - v;
    }
    return v;
}

} // namespace

std::vector<double> simulate_reduced(const ReducedParams& p, std::size_t n_samples,
                                     double sample_dt) {
    p.validate();
    if (!(sample_dt > 0.0)) throw ConfigError("reduced: sample_dt must be > 0");

    Rng rng = make_rng(p.seed, Stream::reduced);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    const double e2 = 2.0 * (p.eta - 1.0);
    const bool cubic = std::abs(e2 - 3.0) < 1e-12;
    const double drift_kappa = (p.eta - 0.5 * p.lam) * p.step_kappa;
    const double noise_kappa = std::sqrt(p.step_kappa);

    double x = analytic_stationary_quantile(unif(rng), p);
    std::vector<double> out;
    out.reserve(n_samples);

    for (std::size_t i = 0; i < n_samples; ++i) {
        double remaining = sample_dt;
        std::uint64_t steps = 0;
        while (remaining > 0.0) {
            if (++steps > p.max_substeps_per_sample) {
                throw StepCollapseError("simulate_reduced: substep budget exhausted");
            }
            const double h_full = p.step_kappa * (cubic ? 1.0 / (x * x * x) : std::pow(x, -e2));
            // Interior steps need no powers: dx scales linearly with x.
            if (h_full <= remaining) {
                x += drift_kappa * x + noise_kappa * x * gauss(rng);
                remaining -= h_full;
            } else {
                const double f = remaining / h_full;
                x += drift_kappa * x * f + noise_kappa * std::sqrt(f) * x * gauss(rng);
                remaining = 0.0;
            }
            x = reflect_interval(x, p.x_min, p.x_max);
        }
        out.push_back(x);
    }
    return out;
}

} // namespace herdsim
