#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "herdsim/model_params.hpp"
#include "herdsim/rng.hpp"

namespace herdsim {

/// Finite-N agent configuration: fundamentalists, optimists, pessimists.
struct MicroState {
    std::int64_t n_fund = 0;
    std::int64_t n_opt = 0;
    std::int64_t n_pess = 0;
    double t_scaled = 0.0;

    std::int64_t total() const { return n_fund + n_opt + n_pess; }
    double frac_fund() const { return double(n_fund) / double(total()); }
    /// Average mood (n_o - n_p)/(n_o + n_p); 0 when there are no chartists.
    double mood() const {
        const std::int64_t c = n_opt + n_pess;
        return c == 0 ? 0.0 : double(n_opt - n_pess) / double(c);
    }
    bool mood_valid() const { return n_opt + n_pess > 0; }
};

/// Total switching rates of the six channels, in scaled time. Each channel
/// rate is (source count) x (idiosyncratic rate + peer count). The
/// trading-activity feedback is not included here; it rescales all six
/// channels alike and enters the event clock instead.
struct RateTable {
    double f_to_o = 0, f_to_p = 0, o_to_f = 0, p_to_f = 0, o_to_p = 0, p_to_o = 0;
    double total() const { return f_to_o + f_to_p + o_to_f + p_to_f + o_to_p + p_to_o; }
};

/// Channel rates for the current configuration.
RateTable transition_rates(const MicroState& s, const ModelParams& p);

/// Shared activity feedback, evaluated at n_f = N_f/N clamped to
/// >= 1/(2N) so it stays finite in the zero-fundamentalist corner.
double activity_factor(const MicroState& s, const ModelParams& p);

struct MicroTransition {
    double waiting_time = 0.0;
    MicroState state;
};

/// One exact event of the embedded jump process: exponential waiting time
/// at the total rate, channel chosen proportionally, one agent moves.
/// Throws std::runtime_error if the total rate is zero (absorbing state).
MicroTransition gillespie_step(const MicroState& s, const ModelParams& p, Rng& rng);

struct MicroSample {
    double t_scaled = 0.0;
    double n_f = 0.0;
    double xi = 0.0;
    bool xi_valid = true;
};

struct MicroResult {
    std::vector<MicroSample> samples; ///< uniform grid, spacing sample_dt
    double sample_dt = 0.0;
    std::uint64_t n_events = 0;
    double elapsed_scaled = 0.0;
    /// Exact time-weighted moments of n_f over the post-burn-in run.
    double mean_nf = 0.0;
    double var_nf = 0.0;
    double mean_xi = 0.0;
    double var_xi = 0.0;
};

/// Event-driven simulation of the finite-N model. Starts from the
/// macroscopic rest point (rounded), discards burn_in_events, then runs
/// n_events, recording grid samples and exact time-weighted moments.
/// Requires n_agents >= 3.
MicroResult simulate_micro(std::int64_t n_agents, const ModelParams& p,
                           std::uint64_t n_events, double sample_dt,
                           std::uint64_t burn_in_events = 0);

/// Dump with header `t_scaled,n_f,xi,valid`.
void write_micro_csv(const MicroResult& r, std::ostream& out);

} // namespace herdsim
