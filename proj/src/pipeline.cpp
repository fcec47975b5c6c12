#include "herdsim/pipeline.hpp"

#include <cmath>
#include <string>

#include "herdsim/errors.hpp"

namespace herdsim {

std::vector<std::uint64_t> make_seeds(std::uint64_t base, std::size_t n) {
    std::vector<std::uint64_t> seeds(n);
    for (std::size_t i = 0; i < n; ++i) seeds[i] = base + i;
    return seeds;
}

namespace {

ModelParams with_seed(const SimJob& job, std::uint64_t seed) {
    ModelParams p = job.params;
    p.seed = seed;
    return p;
}

std::string seed_tag(const SimJob& job, std::uint64_t seed) {
    return std::string(1, job.mode.mode_letter()) + "/seed=" + std::to_string(seed);
}

} // namespace

ReturnSeries run_return_series(const SimJob& job, std::uint64_t seed) {
    const std::size_t ratio = window_ratio(job.delta_days, job.params.tick_days);
    TickReturnStream stream(with_seed(job, seed), job.mode, job.engine);
    stream.burn_in(job.burn_in);

    ReturnSeries out;
    out.window_days = job.delta_days;
    out.values.reserve(job.n_ticks / ratio);
    double acc = 0.0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < job.n_ticks; ++i) {
        acc += stream.next().r;
        if (++k == ratio) {
            out.values.push_back(acc);
            acc = 0.0;
            k = 0;
        }
    }
    return out;
}

std::vector<double> run_x_series(const SimJob& job, std::uint64_t seed) {
    const std::size_t ratio = window_ratio(job.delta_days, job.params.tick_days);
    TickReturnStream stream(with_seed(job, seed), job.mode, job.engine);
    stream.burn_in(job.burn_in);

    std::vector<double> out;
    out.reserve(job.n_ticks / ratio);
    std::size_t k = 0;
    double x = 0.0;
    for (std::size_t i = 0; i < job.n_ticks; ++i) {
        x = stream.next().x;
        if (++k == ratio) {
            out.push_back(x);
            k = 0;
        }
    }
    return out;
}

TickIntervalResult run_tick_intervals(const SimJob& job, std::uint64_t seed,
                                      const std::vector<double>& thresholds) {
    const bool mode_a = !job.mode.exogenous;

    // pass 1: global standard deviation of the observable
    RunningMoments mom;
    {
        TickReturnStream stream(with_seed(job, seed), job.mode, job.engine);
        stream.burn_in(job.burn_in);
        for (std::size_t i = 0; i < job.n_ticks; ++i) {
            const auto t = stream.next();
            mom.add(mode_a ? t.x : t.r);
        }
    }
    TickIntervalResult out;
    out.sd = mom.sd();
    out.n_ticks = job.n_ticks;
    if (!(out.sd > 0.0)) throw DataError("run_tick_intervals: zero variance observable");

    // pass 2: replay the identical trajectory, collect exceedance gaps
    struct Tracker {
        double level = 0.0;
        std::size_t last = 0;
        bool seen = false;
        std::vector<std::uint32_t> intervals;
    };
    std::vector<Tracker> trackers(thresholds.size());
    for (std::size_t j = 0; j < thresholds.size(); ++j) {
        trackers[j].level = thresholds[j] * out.sd;
    }
    {
        TickReturnStream stream(with_seed(job, seed), job.mode, job.engine);
        stream.burn_in(job.burn_in);
        for (std::size_t i = 0; i < job.n_ticks; ++i) {
            const auto t = stream.next();
            const double v = mode_a ? t.x : std::abs(t.r);
            for (auto& tr : trackers) {
                if (v > tr.level) {
                    if (tr.seen) tr.intervals.push_back(std::uint32_t(i - tr.last));
                    tr.last = i;
                    tr.seen = true;
                }
            }
        }
    }
    out.series.reserve(thresholds.size());
    for (std::size_t j = 0; j < thresholds.size(); ++j) {
        IntervalSeries s;
        s.q = thresholds[j];
        s.source = seed_tag(job, seed);
        s.intervals = std::move(trackers[j].intervals);
        if (!s.intervals.empty()) {
            std::uint64_t sum = 0;
            for (auto v : s.intervals) sum += v;
            s.mean_T = double(sum) / double(s.intervals.size());
        }
        out.series.push_back(std::move(s));
    }
    return out;
}

std::vector<IntervalSeries> run_delta_intervals(const SimJob& job, std::uint64_t seed,
                                                const std::vector<double>& thresholds) {
    std::vector<IntervalSeries> out;
    out.reserve(thresholds.size());
    if (!job.mode.exogenous) {
        std::vector<double> x = run_x_series(job, seed);
        RunningMoments mom;
        for (double v : x) mom.add(v);
        const double sd = mom.sd();
        if (!(sd > 0.0)) throw DataError("run_delta_intervals: zero variance x series");
        for (double& v : x) v /= sd;
        for (double q : thresholds) {
            auto s = extract_intervals(x, q, seed_tag(job, seed));
            out.push_back(std::move(s));
        }
        return out;
    }
    const ReturnSeries raw = run_return_series(job, seed);
    const ReturnSeries norm = normalize_global(raw);
    for (double q : thresholds) {
        out.push_back(extract_intervals(norm.values, q, seed_tag(job, seed)));
    }
    return out;
}

} // namespace herdsim
