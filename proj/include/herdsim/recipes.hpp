#pragma once

#include <string>
#include <vector>

#include "herdsim/run_config.hpp"
#include "herdsim/stats.hpp"

namespace herdsim {

/// Estimator knobs shared by the interval/density pipelines.
struct AnalysisOptions {
    std::size_t n_bins = 40;
    std::size_t psd_segments = 32;
    double fit_lo = 0.05; ///< slope fit window on T/<T>
    double fit_hi = 5.0;
};

/// Per-seed interval sequences for every configured threshold, grouped as
/// [threshold][seed]. Uses the streaming tick path when Delta equals the
/// tick, the in-memory aggregation path otherwise.
std::vector<std::vector<IntervalSeries>> collect_intervals(const RunConfig& cfg);

/// Scaled interval PDFs (optionally with octile-conditioned curves) for
/// every threshold; emits one CSV per curve plus a JSON summary into
/// cfg.output_dir. Returns the emitted file names.
std::vector<std::string> emit_interval_curves(const RunConfig& cfg,
                                              const AnalysisOptions& opts,
                                              const std::string& prefix, bool conditional);

/// Fig-3-style comparison of the four noise compositions at the first
/// configured threshold; emits per-mode scaled PDFs and a JSON summary with
/// pairwise KS statistics.
std::vector<std::string> emit_ablation(const RunConfig& cfg, const AnalysisOptions& opts,
                                       const std::string& prefix);

/// Figure-reproduction pipelines (fig3..fig8): runs the corresponding
/// thresholds/windows and emits plot-ready CSVs plus JSON summaries.
/// Returns the emitted file names.
std::vector<std::string> run_recipe(const std::string& name, const RunConfig& base,
                                    const AnalysisOptions& opts);

} // namespace herdsim
