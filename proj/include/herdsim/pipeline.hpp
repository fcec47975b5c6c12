#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "herdsim/market_series.hpp"
#include "herdsim/model_params.hpp"
#include "herdsim/stats.hpp"

namespace herdsim {

/// One simulation assignment: model, noise composition, aggregation window
/// and run length. The seed is supplied per run.
struct SimJob {
    ModelParams params;
    NoiseConfig mode;
    double delta_days = 1.0 / 390.0; ///< aggregation window Delta
    std::size_t n_ticks = 0;         ///< delta-ticks per seed (post burn-in)
    std::size_t burn_in = 100000;    ///< discarded ticks
    EngineOptions engine;
};

/// seeds base, base+1, ..., base+n-1 (substreams are decorrelated by the
/// seed mixer).
std::vector<std::uint64_t> make_seeds(std::uint64_t base, std::size_t n);

/// Apply fn to every seed, in parallel when OpenMP is available and
/// `parallel` is true. Results are returned in seed order, so serial and
/// concurrent execution produce identical output. The serial path is the
/// reference implementation the parallel one is checked against.
template <class Fn>
auto run_per_seed(const std::vector<std::uint64_t>& seeds, Fn&& fn, bool parallel = true)
    -> std::vector<decltype(fn(std::uint64_t{}))> {
    using Result = decltype(fn(std::uint64_t{}));
    std::vector<Result> results(seeds.size());
    if (!parallel || seeds.size() < 2) {
        for (std::size_t i = 0; i < seeds.size(); ++i) results[i] = fn(seeds[i]);
        return results;
    }
    std::vector<std::exception_ptr> errors(seeds.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long long i = 0; i < (long long)seeds.size(); ++i) {
        try {
            results[std::size_t(i)] = fn(seeds[std::size_t(i)]);
        } catch (...) {
            errors[std::size_t(i)] = std::current_exception();
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return results;
}

/// Returns aggregated to the Delta grid for one seed (unnormalized).
ReturnSeries run_return_series(const SimJob& job, std::uint64_t seed);

/// Mode-A observable on the Delta grid: the ratio x at the last tick of
/// each aggregation block.
std::vector<double> run_x_series(const SimJob& job, std::uint64_t seed);

/// Tick-scale interval extraction without materializing the series.
/// Pass 1 measures the global standard deviation of the observable
/// (|r| for modes with order flow, x for mode A); pass 2 replays the same
/// seed and collects exceedance intervals for every threshold.
struct TickIntervalResult {
    double sd = 0.0;                      ///< global sd used for thresholds
    std::vector<IntervalSeries> series;   ///< one entry per requested q
    std::uint64_t n_ticks = 0;
};
TickIntervalResult run_tick_intervals(const SimJob& job, std::uint64_t seed,
                                      const std::vector<double>& thresholds);

/// Delta-grid intervals for one seed: aggregate, normalize globally,
/// extract intervals per threshold. For mode A the x series is thresholded
/// in units of its own standard deviation instead.
std::vector<IntervalSeries> run_delta_intervals(const SimJob& job, std::uint64_t seed,
                                                const std::vector<double>& thresholds);

} // namespace herdsim
