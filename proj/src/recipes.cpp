#include "herdsim/recipes.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "herdsim/csv_io.hpp"
#include "herdsim/errors.hpp"
#include "herdsim/pipeline.hpp"

namespace fs = std::filesystem;

namespace herdsim {

namespace {

std::ofstream open_out(const std::string& dir, const std::string& name,
                       std::vector<std::string>* emitted) {
    fs::create_directories(dir);
    const fs::path p = fs::path(dir) / name;
    std::ofstream out(p);
    if (!out) throw DataError("cannot write '" + p.string() + "'");
    if (emitted) emitted->push_back(p.string());
    return out;
}

std::string q_tag(double q) {
    std::ostringstream ss;
    ss << "q" << q;
    return ss.str();
}

SimJob job_from(const RunConfig& cfg) {
    SimJob job;
    job.params = cfg.params;
    job.mode = cfg.mode;
    job.delta_days = cfg.delta_days;
    job.n_ticks = cfg.n_ticks;
    job.burn_in = cfg.burn_in;
    return job;
}

} // namespace

std::vector<std::vector<IntervalSeries>> collect_intervals(const RunConfig& cfg) {
    const SimJob job = job_from(cfg);
    const std::size_t ratio = window_ratio(cfg.delta_days, cfg.params.tick_days);
    auto per_seed = run_per_seed(cfg.seeds, [&](std::uint64_t seed) {
        if (ratio == 1) return run_tick_intervals(job, seed, cfg.thresholds).series;
        return run_delta_intervals(job, seed, cfg.thresholds);
    });
    std::vector<std::vector<IntervalSeries>> by_q(cfg.thresholds.size());
    for (auto& seed_result : per_seed) {
        for (std::size_t j = 0; j < seed_result.size(); ++j) {
            by_q[j].push_back(std::move(seed_result[j]));
        }
    }
    return by_q;
}

std::vector<std::string> emit_interval_curves(const RunConfig& cfg,
                                              const AnalysisOptions& opts,
                                              const std::string& prefix,
                                              bool conditional) {
    std::vector<std::string> emitted;
    const auto by_q = collect_intervals(cfg);
    nlohmann::json summary = nlohmann::json::array();
    for (std::size_t j = 0; j < cfg.thresholds.size(); ++j) {
        const IntervalSeries pooled = pool_intervals(by_q[j]);
        if (pooled.size() < 100) {
            throw InsufficientSamplesError(
                "intervals: fewer than 100 intervals at q=" +
                std::to_string(cfg.thresholds[j]) + "; increase --ticks or add seeds");
        }
        const auto pdf = scaled_interval_pdf(pooled, opts.n_bins);
        SlopeFit fit;
        try {
            fit = tail_exponent_fit(pdf, opts.fit_lo, opts.fit_hi);
        } catch (const InsufficientSamplesError&) {
            fit = SlopeFit{}; // fit window unoccupied; reported with n_bins = 0
        }
        const std::string tag = prefix + "_" + q_tag(cfg.thresholds[j]);
        {
            auto out = open_out(cfg.output_dir, tag + ".csv", &emitted);
            write_density_csv(pdf, out);
        }
        summary.push_back(nlohmann::json::parse(interval_summary_json(pooled, fit)));
        if (conditional) {
            for (auto side : {ConditionSide::low, ConditionSide::high}) {
                const auto succ = pooled_conditional_successors(by_q[j], side);
                if (succ.size() < 100) {
                    throw InsufficientSamplesError(
                        "conditional intervals: fewer than 100 successors at q=" +
                        std::to_string(cfg.thresholds[j]));
                }
                std::vector<double> y(succ.size());
                for (std::size_t i = 0; i < succ.size(); ++i) {
                    y[i] = double(succ[i]) / pooled.mean_T;
                }
                const auto cpdf = log_binned_pdf(y, opts.n_bins);
                auto out = open_out(cfg.output_dir,
                                    tag + (side == ConditionSide::low ? "_low" : "_high") +
                                        ".csv",
                                    &emitted);
                write_density_csv(cpdf, out);
            }
        }
    }
    {
        auto out = open_out(cfg.output_dir, prefix + "_summary.json", &emitted);
        out << summary.dump(2) << '\n';
    }
    return emitted;
}

std::vector<std::string> emit_ablation(const RunConfig& base, const AnalysisOptions& opts,
                                       const std::string& prefix) {
    std::vector<std::string> emitted;
    nlohmann::json j;
    std::vector<IntervalSeries> pooled_by_mode;
    for (char m : {'A', 'B', 'C', 'D'}) {
        RunConfig cfg = base;
        cfg.mode = NoiseConfig::from_mode(m);
        const auto by_q = collect_intervals(cfg);
        const IntervalSeries pooled = pool_intervals(by_q.front());
        if (pooled.size() >= 100) {
            const auto pdf = scaled_interval_pdf(pooled, opts.n_bins);
            auto out = open_out(base.output_dir, prefix + "_mode" + m + ".csv", &emitted);
            write_density_csv(pdf, out);
        }
        j[std::string(1, m)] = {{"n_intervals", pooled.size()}, {"mean_T", pooled.mean_T}};
        pooled_by_mode.push_back(pooled);
    }
    nlohmann::json ks = nlohmann::json::array();
    for (std::size_t i = 0; i + 1 < pooled_by_mode.size(); ++i) {
        const auto& a = pooled_by_mode[i];
        const auto& b = pooled_by_mode[i + 1];
        if (!a.has_data() || !b.has_data()) continue;
        std::vector<double> ya(a.size()), yb(b.size());
        for (std::size_t k = 0; k < a.size(); ++k) ya[k] = a.intervals[k] / a.mean_T;
        for (std::size_t k = 0; k < b.size(); ++k) yb[k] = b.intervals[k] / b.mean_T;
        const KsTest t = ks_test_two_sample(ya, yb);
        ks.push_back({{"pair", std::string(1, "ABCD"[i]) + "/" + "ABCD"[i + 1]},
                      {"distance", t.distance},
                      {"p_value", t.p_value}});
    }
    j["pairwise_ks"] = ks;
    auto out = open_out(base.output_dir, prefix + "_summary.json", &emitted);
    out << j.dump(2) << '\n';
    return emitted;
}

std::vector<std::string> run_recipe(const std::string& name, const RunConfig& base,
                                    const AnalysisOptions& opts) {
    const double tick = base.params.tick_days;
    std::vector<std::string> emitted;

    auto intervals_at = [&](double delta, std::vector<double> qs, bool conditional,
                            const char* prefix) {
        RunConfig cfg = base;
        cfg.delta_days = delta;
        cfg.thresholds = std::move(qs);
        auto files = emit_interval_curves(cfg, opts, prefix, conditional);
        emitted.insert(emitted.end(), files.begin(), files.end());
    };

    if (name == "fig3") {
        for (double delta : {tick, 1.0}) {
            RunConfig cfg = base;
            cfg.delta_days = delta;
            cfg.thresholds = {2.0};
            const std::string prefix = delta == tick ? "fig3_tick" : "fig3_day";
            auto files = emit_ablation(cfg, opts, prefix);
            emitted.insert(emitted.end(), files.begin(), files.end());
        }
    } else if (name == "fig4") {
        intervals_at(tick, {1.5, 2.0, 2.5, 3.0}, false, "fig4");
    } else if (name == "fig5") {
        intervals_at(tick, {1.5, 2.0, 2.5, 3.0}, true, "fig5");
    } else if (name == "fig6") {
        intervals_at(1.0, {1.7, 2.0, 3.0, 4.0}, false, "fig6");
    } else if (name == "fig7") {
        intervals_at(1.0, {1.7, 2.0, 3.0, 4.0}, true, "fig7");
    } else if (name == "fig8") {
        intervals_at(21.0, {1.0, 2.0, 3.5}, false, "fig8");
        intervals_at(21.0, {1.5, 2.0, 3.0, 5.0}, false, "fig8_panel");
    } else {
        throw ConfigError("unknown recipe '" + name + "' (expected fig3..fig8)");
    }
    return emitted;
}

} // namespace herdsim
