#include "herdsim/sde_engine.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace herdsim {

namespace {

double feedback_factor(double x, double gain, double exponent) {
    const double base = 1.0 + gain * x;
    if (exponent == 2.0) return base * base;
    if (exponent == 0.0) return 1.0;
    if (exponent == 1.0) return base;
    return std::pow(base, exponent);
}

// Fold a value back into [lo, hi]; loops in case of a gross overshoot.
double reflect(double v, double lo, double hi) {
    while (v < lo || v > hi) {
        if (v < lo) v = 2.0 * lo - v;
        if (v > hi) v = 2.0 * hi - v;
    }
    return v;
}

} // namespace

double inv_tau(double n_f, const ModelParams& p) {
    if (!(n_f > 0.0 && n_f <= 1.0)) {
        throw std::domain_error("inv_tau: n_f must lie in (0,1]");
    }
    return feedback_factor((1.0 - n_f) / n_f, p.feedback_gain, p.feedback_exp);
}

double drift_nf(double n_f, const ModelParams& p) {
    if (!(n_f > 0.0 && n_f < 1.0)) {
        throw std::domain_error("drift_nf: n_f must lie in (0,1)");
    }
    return ((1.0 - n_f) * p.eps_cf - n_f * p.eps_fc) * inv_tau(n_f, p);
}

double diffusion_nf(double n_f, const ModelParams& p) {
    if (!(n_f >= 0.0 && n_f <= 1.0)) {
        throw std::domain_error("diffusion_nf: n_f must lie in [0,1]");
    }
    if (n_f == 0.0 || n_f == 1.0) return 0.0;
    return std::sqrt(2.0 * n_f * (1.0 - n_f) * inv_tau(n_f, p));
}

double drift_xi(double xi, double n_f, const ModelParams& p) {
    if (!(xi > -1.0 && xi < 1.0)) {
        throw std::domain_error("drift_xi: xi must lie in (-1,1)");
    }
    return -2.0 * p.freq_ratio * p.eps_cc * xi * inv_tau(n_f, p);
}

double diffusion_xi(double xi, double n_f, const ModelParams& p) {
    if (!(xi >= -1.0 && xi <= 1.0)) {
        throw std::domain_error("diffusion_xi: xi must lie in [-1,1]");
    }
    return std::sqrt(2.0 * p.freq_ratio * (1.0 - xi * xi) * inv_tau(n_f, p));
}

std::vector<double> EnginePath::x_series() const {
    std::vector<double> x;
    x.reserve(states.size());
    for (const auto& s : states) x.push_back((1.0 - s.n_f) / s.n_f);
    return x;
}

SdeEngine::SdeEngine(const ModelParams& params, const EngineOptions& opts)
    : params_(params),
      opts_(opts),
      tick_dt_(params.tick_dt_scaled()),
      rng_nf_(make_rng(params.seed, Stream::fundamentalist)),
      rng_xi_(make_rng(params.seed, Stream::mood)) {
    params_.validate();
    reset();
}

void SdeEngine::reset() {
    state_.n_f = params_.fixed_point_nf();
    state_.xi = opts_.evolve_xi ? 0.0 : opts_.frozen_xi;
    state_.t_scaled = 0.0;
    rng_nf_ = make_rng(params_.seed, Stream::fundamentalist);
    rng_xi_ = make_rng(params_.seed, Stream::mood);
    gauss_nf_.reset();
    gauss_xi_.reset();
}

void SdeEngine::advance_nf(double dt) {
    const double eps = opts_.boundary_eps;
    const double relax = params_.eps_cf + params_.eps_fc;
    const double frac2 = opts_.substep_sd_frac * opts_.substep_sd_frac;
    double n = state_.n_f;
    double remaining = dt;
    while (remaining > 0.0) {
        const double g = feedback_factor((1.0 - n) / n, params_.feedback_gain, params_.feedback_exp);
        const double var_rate = 2.0 * n * (1.0 - n) * g;
        const double dist = std::min(n, 1.0 - n);
        const double h = std::max(std::min({remaining, opts_.substep_cap / (relax * g),
                                            frac2 * dist * dist / var_rate}),
                                  remaining * 1e-9);
        const double drift = ((1.0 - n) * params_.eps_cf - n * params_.eps_fc) * g;
        n += drift * h + opts_.diffusion_scale * std::sqrt(var_rate * h) * gauss_nf_(rng_nf_);
        n = reflect(n, eps, 1.0 - eps);
        remaining -= h;
    }
    state_.n_f = n;
}

void SdeEngine::advance_xi(double dt) {
    const double eps = opts_.boundary_eps;
    const double frac2 = opts_.substep_sd_frac * opts_.substep_sd_frac;
    // The activity factor is held at its tick-start value: n_f barely moves
    // within one tick, and xi relaxes orders of magnitude faster.
    const double g = feedback_factor((1.0 - state_.n_f) / state_.n_f,
                                     params_.feedback_gain, params_.feedback_exp);
    const double relax = 2.0 * params_.freq_ratio * params_.eps_cc * g;
    const double hdrift = opts_.substep_cap / relax;
    double xi = state_.xi;
    double remaining = dt;
    while (remaining > 0.0) {
        const double var_rate = 2.0 * params_.freq_ratio * (1.0 - xi * xi) * g;
        const double dist = 1.0 - std::abs(xi);
        const double h = std::max(
            std::min({remaining, hdrift, frac2 * dist * dist / var_rate}), remaining * 1e-9);
        xi += -relax * xi * h +
              opts_.diffusion_scale * std::sqrt(var_rate * h) * gauss_xi_(rng_xi_);
        xi = reflect(xi, -1.0 + eps, 1.0 - eps);
        remaining -= h;
    }
    state_.xi = xi;
}

const AgentState& SdeEngine::step(double dt_scaled) {
    advance_nf(dt_scaled);
    if (opts_.evolve_xi) {
        advance_xi(dt_scaled);
    } else {
        state_.xi = opts_.frozen_xi;
    }
    state_.t_scaled += dt_scaled;
    return state_;
}

void SdeEngine::skip(std::size_t n_ticks) {
    for (std::size_t i = 0; i < n_ticks; ++i) advance_tick();
}

EnginePath SdeEngine::simulate(std::size_t n_ticks, std::size_t burn_in) {
    if (n_ticks > opts_.max_path_ticks) {
        throw std::length_error("simulate: n_ticks exceeds max_path_ticks");
    }
    skip(burn_in);
    EnginePath path;
    path.params = params_;
    path.states.reserve(n_ticks);
    for (std::size_t i = 0; i < n_ticks; ++i) {
        path.states.push_back(advance_tick());
    }
    return path;
}

void write_path_csv(const EnginePath& path, std::ostream& out) {
    out << "tick,n_f,xi\n";
    out.precision(9);
    for (std::size_t i = 0; i < path.states.size(); ++i) {
        out << i << ',' << path.states[i].n_f << ',' << path.states[i].xi << '\n';
    }
}

} // namespace herdsim
