#pragma once

#include <cstdint>

namespace herdsim {

/// Model constants for the three-state herding market model, in scaled
/// (dimensionless) units. Time inside the SDEs is scaled time
/// t_s = herd_rate * t_seconds; one simulation tick covers tick_days of
/// calendar trading time.
///
/// Defaults are the reference parameter set used throughout the figure
/// recipes.
struct ModelParams {
    double eps_cf = 1.1;  ///< chartist -> fundamentalist idiosyncratic rate
    double eps_fc = 3.0;  ///< fundamentalist -> chartist idiosyncratic rate
    double eps_cc = 3.0;  ///< optimist <-> pessimist idiosyncratic rate
    double freq_ratio = 1000.0;     ///< chartist/fundamentalist trading frequency ratio (H)
    double feedback_gain = 0.7;     ///< trading-activity feedback gain (a_tau)
    double feedback_exp = 2.0;      ///< trading-activity feedback exponent (alpha)
    double herd_rate = 0.3e-8;      ///< herding rate h, 1/second
    double tick_days = 1.0 / 390.0; ///< tick length delta, trading days
    double return_gain = 1.0;       ///< return sensitivity to endogenous log-price (a0)
    double vol_scale = 1.0;         ///< volatility normalization (b0)
    double season_width = 0.25;     ///< intraday seasonality width w, trading days
    std::uint64_t seed = 1;

    /// Throws ConfigError naming the offending field if any constraint fails.
    void validate() const;

    /// Tick length in scaled time: herd_rate * 86400 * tick_days
    /// (calendar seconds per trading day).
    double tick_dt_scaled() const { return herd_rate * 86400.0 * tick_days; }

    /// Deterministic rest point of the fundamentalist fraction,
    /// eps_cf / (eps_cf + eps_fc).
    double fixed_point_nf() const { return eps_cf / (eps_cf + eps_fc); }

    /// Ticks per trading day (exact when 1/tick_days is integral).
    double ticks_per_day() const { return 1.0 / tick_days; }
};

} // namespace herdsim
