#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "herdsim/model_params.hpp"
#include "herdsim/rng.hpp"
#include "herdsim/sde_engine.hpp"

namespace herdsim {

/// Which noise sources enter the return pipeline. The four ablation modes:
///   A: endogenous ratio x only (no order flow, frozen mood, flat envelope)
///   B: order-flow noise on, mood frozen, flat envelope
///   C: order-flow noise and mood dynamics on, flat envelope
///   D: full model with intraday seasonality
struct NoiseConfig {
    bool exogenous = true;   ///< order-flow noise omega in r = sigma * omega
    bool xi_dynamics = true; ///< live mood vs frozen at its stationary scale
    bool seasonality = true; ///< intraday envelope vs constant b0

    static NoiseConfig from_mode(char mode); ///< 'A'..'D'
    char mode_letter() const;
};

enum class Normalization { none, global, moving };

/// Return series on the aggregation grid, with normalization metadata.
struct ReturnSeries {
    std::vector<double> values;
    double window_days = 0.0; ///< aggregation window Delta, trading days
    Normalization normalization = Normalization::none;
    double sigma_used = 0.0;        ///< divisor of the global variant
    std::size_t moving_window = 0;  ///< window length of the moving variant
};

/// Endogenous log-price p = ((1-n_f)/n_f) * xi.
/// Throws std::domain_error unless 0 < n_f <= 1.
double log_price(double n_f, double xi);

/// Intraday volatility envelope b0 * exp(-((t mod 1) - 0.5)^2 / w^2) + 0.5;
/// t in trading days, period exactly one day.
double seasonal_b0(double t_days, double b0, double w);

/// sigma = b0_t * (1 + a0 |p|).
double volatility(double p, double b0_t, double a0);

/// One-tick return sigma * omega with omega a standard normal draw.
double tick_return(double sigma, Rng& rng);

/// Mood freeze level used when xi dynamics are off: the stationary scale
/// sqrt(1/(2 eps_cc + 1)).
double frozen_xi_scale(const ModelParams& p);

/// Non-overlapping block sums over window_ratio ticks (Delta/delta).
/// Throws ConfigError unless window_ratio >= 1.
std::vector<double> aggregate_returns(const std::vector<double>& ticks,
                                      std::size_t window_ratio);

/// Ratio Delta/delta, verified integral (relative tolerance 1e-9).
std::size_t window_ratio(double delta_days, double tick_days);

/// Divide every value by the sample standard deviation of the whole
/// series. Throws DataError on zero variance.
ReturnSeries normalize_global(const ReturnSeries& s);

/// Divide each value by the standard deviation of the preceding `window`
/// values; the first `window` entries are dropped.
ReturnSeries normalize_moving(const ReturnSeries& s, std::size_t window = 5000);

/// Streaming per-tick generator: advances an agent-path engine and applies
/// the configured noise composition. Emits the tick return and the
/// chartist/fundamentalist ratio x (the mode-A observable).
class TickReturnStream {
public:
    TickReturnStream(const ModelParams& params, const NoiseConfig& cfg,
                     const EngineOptions& eng_opts = {});

    struct Tick {
        double r = 0.0; ///< tick return r_delta
        double x = 0.0; ///< (1 - n_f)/n_f
    };

    void burn_in(std::size_t n_ticks);
    Tick next();

    const ModelParams& params() const { return params_; }
    const NoiseConfig& config() const { return cfg_; }

private:
    double envelope(std::uint64_t tick_index) const;

    ModelParams params_;
    NoiseConfig cfg_;
    SdeEngine engine_;
    Rng rng_omega_;
    std::normal_distribution<double> gauss_;
    std::vector<double> envelope_table_; ///< per tick-of-day, when integral
    std::uint64_t tick_index_ = 0;
    double prev_p_ = 0.0;
    double xi_frozen_ = 0.0;
};

} // namespace herdsim
