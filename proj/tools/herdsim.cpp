// herdsim — simulation and analysis front end for the herding market model.
//
// herdsim <command> [--config FILE] [--seed N[,N...]] [--ticks N] [--q LIST]
//         [--delta DAYS] [--mode A|B|C|D] [--out DIR] [--format csv|json]
//
// Exit codes: 0 success, 2 config error, 3 data error, 4 insufficient samples.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "herdsim/csv_io.hpp"
#include "herdsim/errors.hpp"
#include "herdsim/microsim.hpp"
#include "herdsim/pipeline.hpp"
#include "herdsim/recipes.hpp"
#include "herdsim/reduced_sde.hpp"
#include "herdsim/run_config.hpp"
#include "herdsim/sde_engine.hpp"
#include "herdsim/stats.hpp"

namespace fs = std::filesystem;
using namespace herdsim;

namespace {

struct CliState {
    std::string config_file;
    std::vector<std::pair<std::string, std::string>> overrides;
    AnalysisOptions analysis;
    std::size_t moving_window = 0; ///< 0: global normalization (ingest)
    bool dump_returns = false;
};

RunConfig resolve(const CliState& st, const std::string& command) {
    auto overrides = st.overrides;
    overrides.emplace_back("command", command);
    if (!st.config_file.empty()) return parse_config_file(st.config_file, overrides);
    std::istringstream empty;
    return parse_config(empty, overrides);
}

std::ofstream open_out(const RunConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.output_dir);
    const fs::path p = fs::path(cfg.output_dir) / name;
    std::ofstream out(p);
    if (!out) throw DataError("cannot write '" + p.string() + "'");
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

int cmd_simulate(const CliState& st) {
    RunConfig cfg = resolve(st, "simulate");
    auto paths = run_per_seed(cfg.seeds, [&](std::uint64_t seed) {
        ModelParams p = cfg.params;
        p.seed = seed;
        SdeEngine engine(p);
        return engine.simulate(cfg.n_ticks, cfg.burn_in);
    });
    for (std::size_t i = 0; i < paths.size(); ++i) {
        auto out = open_out(cfg, "path_seed" + std::to_string(cfg.seeds[i]) + ".csv");
        write_path_csv(paths[i], out);
    }
    return 0;
}

int cmd_reduced(const CliState& st) {
    RunConfig cfg = resolve(st, "reduced");
    ReducedParams rp = cfg.reduced;
    rp.seed = cfg.seeds.front();
    const auto x = simulate_reduced(rp, cfg.reduced_samples, cfg.reduced_sample_dt);
    {
        auto out = open_out(cfg, "reduced_samples.csv");
        write_samples_csv(x, cfg.reduced_sample_dt, out);
    }
    const auto pdf = log_binned_pdf(x, st.analysis.n_bins, rp.x_min, rp.x_max);
    const auto fit = tail_exponent_fit(pdf, rp.x_min * 3.0, rp.x_max * 0.3);
    {
        auto out = open_out(cfg, "reduced_pdf.csv");
        write_density_csv(pdf, out);
    }
    const auto spec = psd(x, cfg.reduced_sample_dt, st.analysis.psd_segments,
                          st.analysis.n_bins);
    {
        auto out = open_out(cfg, "reduced_psd.csv");
        write_density_csv(spec, out);
    }
    const double mid = std::sqrt(spec.center(0) * spec.center(spec.size() - 1));
    const SlopeFit psd_fit = tail_exponent_fit(spec, mid / 10.0, mid * 10.0);
    nlohmann::json j;
    j["pdf"] = nlohmann::json::parse(slope_summary_json("pdf_tail", fit));
    j["psd"] = nlohmann::json::parse(slope_summary_json("psd", psd_fit));
    j["exponents"] = {{"eta", rp.eta},
                      {"lam", rp.lam},
                      {"beta", psd_exponent(rp.eta, rp.lam)}};
    auto out = open_out(cfg, "reduced_summary.json");
    out << j.dump(2) << '\n';
    return 0;
}

int cmd_microsim(const CliState& st) {
    RunConfig cfg = resolve(st, "microsim");
    auto results = run_per_seed(cfg.seeds, [&](std::uint64_t seed) {
        ModelParams p = cfg.params;
        p.seed = seed;
        return simulate_micro(cfg.micro_agents, p, cfg.micro_events, cfg.micro_sample_dt,
                              cfg.micro_events / 10);
    });
    nlohmann::json j = nlohmann::json::array();
    for (std::size_t i = 0; i < results.size(); ++i) {
        auto out = open_out(cfg, "micro_seed" + std::to_string(cfg.seeds[i]) + ".csv");
        write_micro_csv(results[i], out);
        j.push_back({{"seed", cfg.seeds[i]},
                     {"mean_nf", results[i].mean_nf},
                     {"var_nf", results[i].var_nf},
                     {"var_xi", results[i].var_xi},
                     {"events", results[i].n_events},
                     {"elapsed_scaled", results[i].elapsed_scaled}});
    }
    auto out = open_out(cfg, "micro_summary.json");
    out << j.dump(2) << '\n';
    return 0;
}

int cmd_psd(const CliState& st) {
    RunConfig cfg = resolve(st, "psd");
    const SimJob job = job_from(cfg);
    auto spectra = run_per_seed(cfg.seeds, [&](std::uint64_t seed) {
        const ReturnSeries norm = normalize_global(run_return_series(job, seed));
        std::vector<double> abs_r(norm.values.size());
        for (std::size_t i = 0; i < abs_r.size(); ++i) abs_r[i] = std::abs(norm.values[i]);
        return psd(abs_r, cfg.delta_days, st.analysis.psd_segments, st.analysis.n_bins);
    });
    BinnedDensity total = spectra.front();
    for (std::size_t i = 1; i < spectra.size(); ++i) total = merge(total, spectra[i]);
    {
        auto out = open_out(cfg, "psd.csv");
        write_density_csv(total, out);
    }
    const double mid = std::sqrt(total.center(0) * total.center(total.size() - 1));
    const SlopeFit fit = tail_exponent_fit(total, mid / 10.0, mid * 10.0);
    auto out = open_out(cfg, "psd_summary.json");
    out << slope_summary_json("abs_return_psd", fit) << '\n';
    return 0;
}

int cmd_pdf(const CliState& st) {
    RunConfig cfg = resolve(st, "pdf");
    const SimJob job = job_from(cfg);
    const double edges_lo = 0.01, edges_hi = 100.0;
    auto pdfs = run_per_seed(cfg.seeds, [&](std::uint64_t seed) {
        const ReturnSeries norm = normalize_global(run_return_series(job, seed));
        std::vector<double> abs_r;
        abs_r.reserve(norm.values.size());
        for (double v : norm.values) {
            if (std::abs(v) > 0.0) abs_r.push_back(std::abs(v));
        }
        return log_binned_pdf(abs_r, st.analysis.n_bins, edges_lo, edges_hi);
    });
    BinnedDensity total = pdfs.front();
    for (std::size_t i = 1; i < pdfs.size(); ++i) total = merge(total, pdfs[i]);
    {
        auto out = open_out(cfg, "pdf.csv");
        write_density_csv(total, out);
    }
    const SlopeFit fit = tail_exponent_fit(total, 2.0, 30.0);
    auto out = open_out(cfg, "pdf_summary.json");
    out << slope_summary_json("abs_return_pdf_tail", fit) << '\n';
    return 0;
}

int cmd_ingest(const CliState& st, const std::string& input, std::size_t delta_rows) {
    CliState st2 = st;
    st2.overrides.emplace_back("input", input);
    RunConfig cfg = resolve(st2, "ingest");
    const EmpiricalSeries series = ingest_csv_file(cfg.input_csv);
    const ReturnSeries returns = returns_from_prices(series, delta_rows);
    const ReturnSeries norm = st.moving_window > 0
                                  ? normalize_moving(returns, st.moving_window)
                                  : normalize_global(returns);
    {
        auto out = open_out(cfg, "ingest_returns.csv");
        write_returns_csv(norm, out);
    }
    nlohmann::json summary = nlohmann::json::array();
    for (double q : cfg.thresholds) {
        const auto s = extract_intervals(norm.values, q, series.asset_label);
        SlopeFit fit;
        if (s.size() >= 100) {
            const auto pdf = scaled_interval_pdf(s, st.analysis.n_bins);
            auto out = open_out(cfg, "ingest_intervals_" + q_tag(q) + ".csv");
            write_density_csv(pdf, out);
            try {
                fit = tail_exponent_fit(pdf, st.analysis.fit_lo, st.analysis.fit_hi);
            } catch (const InsufficientSamplesError&) {
            }
        }
        summary.push_back(nlohmann::json::parse(interval_summary_json(s, fit)));
    }
    auto out = open_out(cfg, "ingest_summary.json");
    out << summary.dump(2) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"herding market model simulator"};
    app.require_subcommand(1);

    CliState st;
    std::string seed_list, q_list, mode, out_dir, format, delta;
    std::string ticks, burn_in, agents, events, eta, lambda, input;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", st.config_file, "flat key=value config file");
        cmd->add_option("--seed", seed_list, "seed list N[,N...]");
        cmd->add_option("--ticks", ticks, "delta-ticks per seed");
        cmd->add_option("--q", q_list, "threshold list");
        cmd->add_option("--delta", delta, "aggregation window, trading days");
        cmd->add_option("--mode", mode, "noise composition A|B|C|D");
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--format", format, "csv|json");
        cmd->add_option("--bins", st.analysis.n_bins, "log bins for densities");
        cmd->add_option("--segments", st.analysis.psd_segments, "PSD segments");
        cmd->add_option("--fit-lo", st.analysis.fit_lo, "slope fit window lower edge");
        cmd->add_option("--fit-hi", st.analysis.fit_hi, "slope fit window upper edge");
        cmd->add_option("--burn-in", burn_in, "burn-in ticks");
    };

    auto* c_sim = app.add_subcommand("simulate", "agent-path simulation, CSV dump");
    auto* c_red = app.add_subcommand("reduced", "two-exponent SDE run with fitted slopes");
    auto* c_mic = app.add_subcommand("microsim", "event-driven finite-N simulation");
    auto* c_int = app.add_subcommand("intervals", "return-interval statistics");
    auto* c_psd = app.add_subcommand("psd", "spectral density of absolute returns");
    auto* c_pdf = app.add_subcommand("pdf", "density of absolute returns");
    auto* c_abl = app.add_subcommand("ablate", "noise-composition comparison at one q");
    auto* c_ing = app.add_subcommand("ingest", "empirical price CSV analysis");
    auto* c_rec = app.add_subcommand("recipe", "figure reproduction pipelines");
    for (auto* c : {c_sim, c_red, c_mic, c_int, c_psd, c_pdf, c_abl, c_ing, c_rec}) {
        add_common(c);
    }
    c_mic->add_option("--agents", agents, "number of agents");
    c_mic->add_option("--events", events, "number of events");
    c_red->add_option("--eta", eta, "multiplicativity exponent");
    c_red->add_option("--lambda", lambda, "stationary tail exponent");
    std::string recipe_name;
    std::size_t ingest_delta = 1;
    c_rec->add_option("name", recipe_name, "fig3|fig4|fig5|fig6|fig7|fig8")->required();
    c_ing->add_option("input", input, "price CSV (date,price or t,price)")->required();
    c_ing->add_option("--rows", ingest_delta, "return spacing in rows");
    c_ing->add_option("--moving-window", st.moving_window,
                      "moving normalization window (0 = global)");
    c_int->add_flag("--dump-returns", st.dump_returns,
                    "also write per-seed aggregated return series");

    CLI11_PARSE(app, argc, argv);

    auto push = [&](const char* key, const std::string& v) {
        if (!v.empty()) st.overrides.emplace_back(key, v);
    };
    push("seeds", seed_list);
    push("ticks", ticks);
    push("q", q_list);
    push("delta", delta);
    push("mode", mode);
    push("out", out_dir);
    push("format", format);
    push("burn_in", burn_in);
    push("agents", agents);
    push("events", events);
    push("eta", eta);
    push("lambda", lambda);

    try {
        if (app.got_subcommand(c_sim)) return cmd_simulate(st);
        if (app.got_subcommand(c_red)) return cmd_reduced(st);
        if (app.got_subcommand(c_mic)) return cmd_microsim(st);
        if (app.got_subcommand(c_int)) {
            RunConfig cfg = resolve(st, "intervals");
            if (st.dump_returns) {
                const SimJob job = job_from(cfg);
                auto series = run_per_seed(cfg.seeds, [&](std::uint64_t seed) {
                    return run_return_series(job, seed);
                });
                for (std::size_t i = 0; i < series.size(); ++i) {
                    auto out = open_out(cfg, "returns_seed" +
                                                 std::to_string(cfg.seeds[i]) + ".csv");
                    write_returns_csv(series[i], out);
                }
            }
            emit_interval_curves(cfg, st.analysis, "intervals", true);
            return 0;
        }
        if (app.got_subcommand(c_psd)) return cmd_psd(st);
        if (app.got_subcommand(c_pdf)) return cmd_pdf(st);
        if (app.got_subcommand(c_abl)) {
            RunConfig cfg = resolve(st, "ablate");
            emit_ablation(cfg, st.analysis, "ablate");
            return 0;
        }
        if (app.got_subcommand(c_ing)) return cmd_ingest(st, input, ingest_delta);
        if (app.got_subcommand(c_rec)) {
            RunConfig cfg = resolve(st, "intervals");
            run_recipe(recipe_name, cfg, st.analysis);
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const InsufficientSamplesError& e) {
        std::cerr << "insufficient samples: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
