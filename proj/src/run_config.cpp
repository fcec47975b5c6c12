#include "herdsim/run_config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "herdsim/errors.hpp"

namespace herdsim {

Command command_from_name(const std::string& name) {
    if (name == "simulate") return Command::simulate;
    if (name == "reduced") return Command::reduced;
    if (name == "microsim") return Command::microsim;
    if (name == "intervals") return Command::intervals;
    if (name == "psd") return Command::psd;
    if (name == "pdf") return Command::pdf;
    if (name == "ablate") return Command::ablate;
    if (name == "ingest") return Command::ingest;
    throw ConfigError("unknown command '" + name + "'");
}

std::string command_name(Command c) {
    switch (c) {
        case Command::simulate: return "simulate";
        case Command::reduced: return "reduced";
        case Command::microsim: return "microsim";
        case Command::intervals: return "intervals";
        case Command::psd: return "psd";
        case Command::pdf: return "pdf";
        case Command::ablate: return "ablate";
        case Command::ingest: return "ingest";
    }
    return "?";
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size() || x < 0) throw std::invalid_argument(v);
        return std::uint64_t(x);
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a non-negative integer, got '" + v + "'");
    }
}

template <class T, class Parse>
std::vector<T> parse_list(const std::string& key, const std::string& v, Parse parse) {
    std::vector<T> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError("key '" + key + "': empty list element");
        out.push_back(parse(key, item));
    }
    if (out.empty()) throw ConfigError("key '" + key + "': empty list");
    return out;
}

} // namespace

void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
    // model parameters
    if (key == "eps_cf") cfg.params.eps_cf = parse_double(key, value);
    else if (key == "eps_fc") cfg.params.eps_fc = parse_double(key, value);
    else if (key == "eps_cc") cfg.params.eps_cc = parse_double(key, value);
    else if (key == "H") cfg.params.freq_ratio = parse_double(key, value);
    else if (key == "a_tau") cfg.params.feedback_gain = parse_double(key, value);
    else if (key == "alpha") cfg.params.feedback_exp = parse_double(key, value);
    else if (key == "h") cfg.params.herd_rate = parse_double(key, value);
    else if (key == "tick_delta") cfg.params.tick_days = parse_double(key, value);
    else if (key == "a0") cfg.params.return_gain = parse_double(key, value);
    else if (key == "b0") cfg.params.vol_scale = parse_double(key, value);
    else if (key == "w") cfg.params.season_width = parse_double(key, value);
    else if (key == "seed") {
        cfg.params.seed = parse_u64(key, value);
        cfg.seeds = {cfg.params.seed};
    }
    // run shape
    else if (key == "command") cfg.command = command_from_name(value);
    else if (key == "delta") cfg.delta_days = parse_double(key, value);
    else if (key == "q") cfg.thresholds = parse_list<double>(key, value, parse_double);
    else if (key == "seeds") cfg.seeds = parse_list<std::uint64_t>(key, value, parse_u64);
    else if (key == "ticks") cfg.n_ticks = std::size_t(parse_u64(key, value));
    else if (key == "burn_in") cfg.burn_in = std::size_t(parse_u64(key, value));
    else if (key == "out") cfg.output_dir = value;
    else if (key == "mode") {
        if (value.size() != 1) throw ConfigError("key 'mode': expected one of A,B,C,D");
        cfg.mode = NoiseConfig::from_mode(value[0]);
    } else if (key == "format") {
        if (value == "csv") cfg.format = OutputFormat::csv;
        else if (value == "json") cfg.format = OutputFormat::json;
        else throw ConfigError("key 'format': expected csv or json, got '" + value + "'");
    }
    // reduced SDE
    else if (key == "eta") cfg.reduced.eta = parse_double(key, value);
    else if (key == "lambda") cfg.reduced.lam = parse_double(key, value);
    else if (key == "x_min") cfg.reduced.x_min = parse_double(key, value);
    else if (key == "x_max") cfg.reduced.x_max = parse_double(key, value);
    else if (key == "kappa") cfg.reduced.step_kappa = parse_double(key, value);
    else if (key == "samples") cfg.reduced_samples = std::size_t(parse_u64(key, value));
    else if (key == "sample_dt") {
        cfg.reduced_sample_dt = parse_double(key, value);
        cfg.micro_sample_dt = cfg.reduced_sample_dt;
    }
    // microsim
    else if (key == "agents") cfg.micro_agents = std::int64_t(parse_u64(key, value));
    else if (key == "events") cfg.micro_events = parse_u64(key, value);
    // ingest
    else if (key == "input") cfg.input_csv = value;
    else throw ConfigError("unknown key '" + key + "'");
}

void RunConfig::validate() const {
    params.validate();
    if (n_ticks == 0) throw ConfigError("key 'ticks': must be > 0");
    if (!(delta_days > 0.0)) throw ConfigError("key 'delta': must be > 0");
    for (double q : thresholds) {
        if (!(q > 0.0)) throw ConfigError("key 'q': thresholds must be > 0");
    }
    if (seeds.empty()) throw ConfigError("key 'seeds': at least one seed required");
    if (command == Command::reduced) reduced.validate();
    if (command == Command::microsim && micro_agents < 3) {
        throw ConfigError("key 'agents': need at least 3 agents");
    }
    if (command == Command::ingest && input_csv.empty()) {
        throw ConfigError("key 'input': required for ingest");
    }
}

RunConfig parse_config(std::istream& file,
                       const std::vector<std::pair<std::string, std::string>>& overrides) {
    RunConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(file, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected 'key = value'");
        }
        apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    for (const auto& [key, value] : overrides) apply_config_entry(cfg, key, value);
    if (const char* env_out = std::getenv("HERDSIM_OUT")) {
        if (*env_out) cfg.output_dir = env_out;
    }
    cfg.validate();
    return cfg;
}

RunConfig parse_config_file(const std::string& path,
                            const std::vector<std::pair<std::string, std::string>>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in, overrides);
}

} // namespace herdsim
