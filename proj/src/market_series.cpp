#include "herdsim/market_series.hpp"

#include <cmath>
#include <stdexcept>

#include "herdsim/errors.hpp"

namespace herdsim {

NoiseConfig NoiseConfig::from_mode(char mode) {
    switch (mode) {
        case 'A': return {false, false, false};
        case 'B': return {true, false, false};
        case 'C': return {true, true, false};
        case 'D': return {true, true, true};
        default: throw ConfigError(std::string("unknown ablation mode '") + mode + "'");
    }
}

char NoiseConfig::mode_letter() const {
    if (!exogenous) return 'A';
    if (!xi_dynamics) return 'B';
    return seasonality ? 'D' : 'C';
}

double log_price(double n_f, double xi) {
    if (!(n_f > 0.0 && n_f <= 1.0)) {
        throw std::domain_error("log_price: n_f must lie in (0,1]");
    }
    return (1.0 - n_f) / n_f * xi;
}

double seasonal_b0(double t_days, double b0, double w) {
    if (!(w > 0.0)) throw ConfigError("seasonal_b0: w must be > 0");
    double frac = t_days - std::floor(t_days);
    const double z = (frac - 0.5) / w;
    return b0 * std::exp(-z * z) + 0.5;
}

double volatility(double p, double b0_t, double a0) {
    return b0_t * (1.0 + a0 * std::abs(p));
}

double tick_return(double sigma, Rng& rng) {
    std::normal_distribution<double> gauss;
    return sigma * gauss(rng);
}

double frozen_xi_scale(const ModelParams& p) {
    return std::sqrt(1.0 / (2.0 * p.eps_cc + 1.0));
}

std::size_t window_ratio(double delta_days, double tick_days) {
    const double ratio = delta_days / tick_days;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
        throw ConfigError("aggregation window must be an integer multiple of the tick");
    }
    return std::size_t(rounded);
}

std::vector<double> aggregate_returns(const std::vector<double>& ticks,
                                      std::size_t ratio) {
    if (ratio == 0) throw ConfigError("aggregate_returns: window ratio must be >= 1");
    std::vector<double> out;
    out.reserve(ticks.size() / ratio);
    double acc = 0.0;
    std::size_t k = 0;
    for (double r : ticks) {
        acc += r;
        if (++k == ratio) {
            out.push_back(acc);
            acc = 0.0;
            k = 0;
        }
    }
    return out;
}

namespace {

double sample_sd(const std::vector<double>& v) {
    if (v.size() < 2) throw DataError("normalize: need at least 2 values");
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= double(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / double(v.size() - 1));
    // a constant series leaves only rounding dust in ss
    if (!(sd > 1e-12 * std::abs(mean))) return 0.0;
    return sd;
}

} // namespace

ReturnSeries normalize_global(const ReturnSeries& s) {
    const double sd = sample_sd(s.values);
    if (!(sd > 0.0)) throw DataError("normalize_global: zero variance");
    ReturnSeries out;
    out.window_days = s.window_days;
    out.normalization = Normalization::global;
    out.sigma_used = sd;
    out.values.reserve(s.values.size());
    for (double x : s.values) out.values.push_back(x / sd);
    return out;
}

ReturnSeries normalize_moving(const ReturnSeries& s, std::size_t window) {
    if (window < 2) throw ConfigError("normalize_moving: window must be >= 2");
    if (s.values.size() <= window) {
        throw InsufficientSamplesError("normalize_moving: series not longer than window");
    }
    ReturnSeries out;
    out.window_days = s.window_days;
    out.normalization = Normalization::moving;
    out.moving_window = window;
    out.values.reserve(s.values.size() - window);

    // trailing moments over the preceding `window` values
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < window; ++i) {
        sum += s.values[i];
        sum2 += s.values[i] * s.values[i];
    }
    for (std::size_t i = window; i < s.values.size(); ++i) {
        const double n = double(window);
        const double var = (sum2 - sum * sum / n) / (n - 1.0);
        if (!(var > 0.0)) throw DataError("normalize_moving: zero variance window");
        out.values.push_back(s.values[i] / std::sqrt(var));
        sum += s.values[i] - s.values[i - window];
        sum2 += s.values[i] * s.values[i] - s.values[i - window] * s.values[i - window];
    }
    return out;
}

TickReturnStream::TickReturnStream(const ModelParams& params, const NoiseConfig& cfg,
                                   const EngineOptions& eng_opts)
    : params_(params),
      cfg_(cfg),
      engine_(params,
              [&] {
                  EngineOptions o = eng_opts;
                  o.evolve_xi = cfg.xi_dynamics;
                  o.frozen_xi = cfg.xi_dynamics ? 0.0 : frozen_xi_scale(params);
                  return o;
              }()),
      rng_omega_(make_rng(params.seed, Stream::order_flow)) {
    xi_frozen_ = frozen_xi_scale(params_);
    // envelope lookup per tick of day when the tick divides the day evenly
    const double per_day = params_.ticks_per_day();
    const double rounded = std::round(per_day);
    if (cfg_.seasonality && rounded >= 1.0 && std::abs(per_day - rounded) < 1e-9 * per_day) {
        const std::size_t n = std::size_t(rounded);
        envelope_table_.reserve(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double t_mid = (double(k) + 0.5) * params_.tick_days;
            envelope_table_.push_back(seasonal_b0(t_mid, params_.vol_scale,
                                                  params_.season_width));
        }
    }
}

double TickReturnStream::envelope(std::uint64_t tick_index) const {
    if (!cfg_.seasonality) return params_.vol_scale;
    if (!envelope_table_.empty()) {
        return envelope_table_[tick_index % envelope_table_.size()];
    }
    const double t_mid = (double(tick_index) + 0.5) * params_.tick_days;
    return seasonal_b0(t_mid, params_.vol_scale, params_.season_width);
}

void TickReturnStream::burn_in(std::size_t n_ticks) {
    engine_.skip(n_ticks);
    tick_index_ = 0;
    const AgentState& s = engine_.state();
    prev_p_ = log_price(s.n_f, cfg_.xi_dynamics ? s.xi : xi_frozen_);
}

TickReturnStream::Tick TickReturnStream::next() {
    const AgentState& s = engine_.advance_tick();
    Tick out;
    out.x = (1.0 - s.n_f) / s.n_f;
    const double xi = cfg_.xi_dynamics ? s.xi : xi_frozen_;
    const double p = out.x * xi;
    const double sigma = volatility(p, envelope(tick_index_), params_.return_gain);
    double omega;
    if (cfg_.exogenous) {
        omega = gauss_(rng_omega_);
    } else {
        // order flow off: unit magnitude carrying the sign of the
        // endogenous price change
        omega = (p >= prev_p_) ? 1.0 : -1.0;
    }
    out.r = sigma * omega;
    prev_p_ = p;
    ++tick_index_;
    return out;
}

} // namespace herdsim
