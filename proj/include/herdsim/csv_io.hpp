#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "herdsim/market_series.hpp"
#include "herdsim/stats.hpp"

namespace herdsim {

/// User-supplied price history: strictly increasing trading-day indices and
/// positive prices.
struct EmpiricalSeries {
    std::vector<double> timestamps;
    std::vector<double> prices;
    std::string asset_label;
};

/// Parse CSV with header `date,price` or `t,price`. With a `date` column
/// the trading-day index is the row number. Errors carry the offending
/// line number.
EmpiricalSeries ingest_csv(std::istream& in, std::string asset_label = {});
EmpiricalSeries ingest_csv_file(const std::string& path);

/// Non-overlapping log returns at a spacing of delta_rows rows.
/// Requires at least delta_rows + 1 rows.
ReturnSeries returns_from_prices(const EmpiricalSeries& s, std::size_t delta_rows);

/// `bin_center,density,count` for PDFs, `freq_per_day,power,count` for PSDs.
void write_density_csv(const BinnedDensity& d, std::ostream& out);

/// `t_days,r` with t the right edge of each aggregation window.
void write_returns_csv(const ReturnSeries& s, std::ostream& out);

/// `t,x` on the uniform sample grid.
void write_samples_csv(const std::vector<double>& x, double dt, std::ostream& out);

/// JSON summary {q, mean_T, n_intervals, slope, stderr, fit_range}.
std::string interval_summary_json(const IntervalSeries& s, const SlopeFit& fit);

/// JSON summary for a fitted spectral or density slope.
std::string slope_summary_json(const std::string& label, const SlopeFit& fit);

} // namespace herdsim
