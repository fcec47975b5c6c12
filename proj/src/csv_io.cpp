#include "herdsim/csv_io.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "herdsim/errors.hpp"

namespace herdsim {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

} // namespace

EmpiricalSeries ingest_csv(std::istream& in, std::string asset_label) {
    EmpiricalSeries out;
    out.asset_label = std::move(asset_label);

    std::string line;
    if (!std::getline(in, line)) throw DataError("ingest: empty input");
    const std::string header = trim(line);
    bool numeric_time;
    if (header == "date,price") {
        numeric_time = false;
    } else if (header == "t,price") {
        numeric_time = true;
    } else {
        throw DataError("ingest: header must be 'date,price' or 't,price', got '" +
                        header + "'");
    }

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string row = trim(line);
        if (row.empty()) continue;
        const auto comma = row.find(',');
        if (comma == std::string::npos) {
            throw DataError("ingest: line " + std::to_string(line_no) + ": missing comma");
        }
        const std::string t_field = trim(row.substr(0, comma));
        const std::string p_field = trim(row.substr(comma + 1));

        double t;
        if (numeric_time) {
            try {
                std::size_t pos = 0;
                t = std::stod(t_field, &pos);
                if (pos != t_field.size()) throw std::invalid_argument(t_field);
            } catch (const std::exception&) {
                throw DataError("ingest: line " + std::to_string(line_no) +
                                ": bad time value '" + t_field + "'");
            }
            if (!out.timestamps.empty() && t <= out.timestamps.back()) {
                throw DataError("ingest: line " + std::to_string(line_no) +
                                ": timestamps must be strictly increasing");
            }
        } else {
            t = double(out.timestamps.size());
        }

        double price;
        try {
            std::size_t pos = 0;
            price = std::stod(p_field, &pos);
            if (pos != p_field.size()) throw std::invalid_argument(p_field);
        } catch (const std::exception&) {
            throw DataError("ingest: line " + std::to_string(line_no) +
                            ": bad price value '" + p_field + "'");
        }
        if (!(price > 0.0)) {
            throw DataError("ingest: line " + std::to_string(line_no) +
                            ": price must be positive");
        }
        out.timestamps.push_back(t);
        out.prices.push_back(price);
    }
    return out;
}

EmpiricalSeries ingest_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("ingest: cannot open '" + path + "'");
    auto base = path.find_last_of('/');
    return ingest_csv(in, base == std::string::npos ? path : path.substr(base + 1));
}

ReturnSeries returns_from_prices(const EmpiricalSeries& s, std::size_t delta_rows) {
    if (delta_rows == 0) throw ConfigError("returns_from_prices: delta must be >= 1 row");
    if (s.prices.size() < delta_rows + 1) {
        throw InsufficientSamplesError("returns_from_prices: need at least delta+1 rows");
    }
    ReturnSeries out;
    out.window_days = double(delta_rows);
    for (std::size_t k = 0; (k + 1) * delta_rows < s.prices.size(); ++k) {
        out.values.push_back(std::log(s.prices[(k + 1) * delta_rows]) -
                             std::log(s.prices[k * delta_rows]));
    }
    return out;
}

void write_density_csv(const BinnedDensity& d, std::ostream& out) {
    out << (d.kind == DensityKind::psd ? "freq_per_day,power,count" : "bin_center,density,count")
        << '\n';
    out.precision(9);
    for (std::size_t i = 0; i < d.size(); ++i) {
        out << d.center(i) << ',' << d.density[i] << ',' << d.counts[i] << '\n';
    }
}

void write_returns_csv(const ReturnSeries& s, std::ostream& out) {
    out << "t_days,r\n";
    out.precision(9);
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        out << double(i + 1) * s.window_days << ',' << s.values[i] << '\n';
    }
}

void write_samples_csv(const std::vector<double>& x, double dt, std::ostream& out) {
    out << "t,x\n";
    out.precision(9);
    for (std::size_t i = 0; i < x.size(); ++i) {
        out << double(i) * dt << ',' << x[i] << '\n';
    }
}

std::string interval_summary_json(const IntervalSeries& s, const SlopeFit& fit) {
    nlohmann::json j;
    j["q"] = s.q;
    j["mean_T"] = s.mean_T;
    j["n_intervals"] = s.intervals.size();
    j["slope"] = fit.slope;
    j["stderr"] = fit.stderr_slope;
    j["fit_range"] = {fit.x_lo, fit.x_hi};
    return j.dump(2);
}

std::string slope_summary_json(const std::string& label, const SlopeFit& fit) {
    nlohmann::json j;
    j["label"] = label;
    j["slope"] = fit.slope;
    j["stderr"] = fit.stderr_slope;
    j["fit_range"] = {fit.x_lo, fit.x_hi};
    j["n_bins"] = fit.n_bins;
    return j.dump(2);
}

} // namespace herdsim
