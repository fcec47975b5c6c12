#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "herdsim/model_params.hpp"
#include "herdsim/rng.hpp"

namespace herdsim {

/// Macroscopic agent configuration at one tick.
struct AgentState {
    double n_f = 0.0;      ///< fundamentalist fraction, strictly in (0,1)
    double xi = 0.0;       ///< average chartist mood, strictly in (-1,1)
    double t_scaled = 0.0; ///< scaled time
};

struct EngineOptions {
    /// Max drift-relaxation per Euler substep (rate * dt). 0.0125 keeps the
    /// stationary-law bias of n_f and the Var(xi) bias below ~1e-3.
    double substep_cap = 0.0125;
    /// Max noise step as a fraction of the distance to the nearest
    /// boundary; keeps reflection events rare where the diffusion
    /// coefficient varies fastest.
    double substep_sd_frac = 0.5;
    /// Reflection margin at the state-space boundaries.
    double boundary_eps = 1e-6;
    /// Scales both diffusion amplitudes; 0 turns the noise off (test hook).
    double diffusion_scale = 1.0;
    /// When false, xi is pinned to frozen_xi and its noise stream is not
    /// consumed. The n_f trajectory is identical either way.
    bool evolve_xi = true;
    double frozen_xi = 0.0;
    /// simulate() refuses to materialize paths longer than this.
    std::size_t max_path_ticks = std::size_t(1) << 26;
};

/// Trading-activity feedback 1/tau(n_f) = (1 + a_tau*|(1-n_f)/n_f|)^alpha.
/// Throws std::domain_error unless 0 < n_f <= 1.
double inv_tau(double n_f, const ModelParams& p);

/// Drift of the fundamentalist-fraction SDE: [(1-n_f)eps_cf - n_f eps_fc]/tau.
/// Throws std::domain_error unless 0 < n_f < 1.
double drift_nf(double n_f, const ModelParams& p);

/// Noise amplitude sqrt(2 n_f (1-n_f)/tau); zero at both boundaries.
/// Throws std::domain_error unless 0 <= n_f <= 1.
double diffusion_nf(double n_f, const ModelParams& p);

/// Mood drift -2 H eps_cc xi / tau(n_f).
double drift_xi(double xi, double n_f, const ModelParams& p);

/// Mood noise amplitude sqrt(2 H (1 - xi^2)/tau(n_f)); zero at xi = +-1.
double diffusion_xi(double xi, double n_f, const ModelParams& p);

struct EnginePath {
    std::vector<AgentState> states; ///< one entry per tick, constant spacing
    ModelParams params;

    /// Chartist/fundamentalist ratio x = (1-n_f)/n_f per tick.
    std::vector<double> x_series() const;
};

/// Euler–Maruyama integrator for the coupled (n_f, xi) system on the tick
/// grid. Both equations share the activity feedback but carry independent
/// Wiener increments, drawn from per-equation substreams of the seed.
/// Within a tick each equation substeps adaptively so that
/// drift_rate * dt stays below EngineOptions::substep_cap; overshoots past
/// a boundary are reflected.
class SdeEngine {
public:
    explicit SdeEngine(const ModelParams& params, const EngineOptions& opts = {});

    const AgentState& state() const { return state_; }
    const ModelParams& params() const { return params_; }

    /// Back to the deterministic rest point (n_f*, 0) at t = 0 with fresh
    /// RNG streams; the engine then reproduces its first trajectory.
    void reset();

    /// Advance both equations by dt in scaled time.
    const AgentState& step(double dt_scaled);

    /// Advance by one delta-tick.
    const AgentState& advance_tick() { return step(tick_dt_); }

    /// Run n ticks without recording (burn-in).
    void skip(std::size_t n_ticks);

    /// Record n_ticks states after discarding burn_in ticks.
    /// Throws std::length_error beyond EngineOptions::max_path_ticks.
    EnginePath simulate(std::size_t n_ticks, std::size_t burn_in);

private:
    void advance_nf(double dt);
    void advance_xi(double dt);

    ModelParams params_;
    EngineOptions opts_;
    double tick_dt_;
    AgentState state_;
    Rng rng_nf_;
    Rng rng_xi_;
    // One distribution per stream: normal_distribution caches a spare
    // variate, which must not cross streams.
    std::normal_distribution<double> gauss_nf_;
    std::normal_distribution<double> gauss_xi_;
};

/// Raw path dump, header `tick,n_f,xi`.
void write_path_csv(const EnginePath& path, std::ostream& out);

} // namespace herdsim
