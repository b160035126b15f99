#include "sosdict/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "sosdict/serialize.hpp"

namespace sosdict::cli {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// one settable config key: parse from text, print current value
struct Field {
    std::function<void(ExperimentConfig&, const std::string&, const ParseError&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

long parse_long(const std::string& v, const ParseError& err) {
    char* end = nullptr;
    long x = std::strtol(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0') throw err;
    return x;
}

double parse_real(const std::string& v, const ParseError& err) {
    char* end = nullptr;
    double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0') throw err;
    return x;
}

bool parse_bool(const std::string& v, const ParseError& err) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw err;
}

Field int_field(int ExperimentConfig::* member) {
    return {[member](ExperimentConfig& c, const std::string& v, const ParseError& err) {
                c.*member = static_cast<int>(parse_long(v, err));
            },
            [member](const ExperimentConfig& c) { return std::to_string(c.*member); }};
}

Field long_field(long ExperimentConfig::* member) {
    return {[member](ExperimentConfig& c, const std::string& v, const ParseError& err) {
                c.*member = parse_long(v, err);
            },
            [member](const ExperimentConfig& c) { return std::to_string(c.*member); }};
}

Field real_field(double ExperimentConfig::* member) {
    return {[member](ExperimentConfig& c, const std::string& v, const ParseError& err) {
                c.*member = parse_real(v, err);
            },
            [member](const ExperimentConfig& c) { return format_double(c.*member); }};
}

Field bool_field(bool ExperimentConfig::* member) {
    return {[member](ExperimentConfig& c, const std::string& v, const ParseError& err) {
                c.*member = parse_bool(v, err);
            },
            [member](const ExperimentConfig& c) { return (c.*member) ? "true" : "false"; }};
}

Field string_field(std::string ExperimentConfig::* member) {
    return {[member](ExperimentConfig& c, const std::string& v, const ParseError&) {
                c.*member = v;
            },
            [member](const ExperimentConfig& c) { return c.*member; }};
}

Field seeds_field() {
    return {[](ExperimentConfig& c, const std::string& v, const ParseError& err) {
                c.seeds.clear();
                for (const auto& item : split_list(v)) {
                    char* end = nullptr;
                    unsigned long long s = std::strtoull(item.c_str(), &end, 10);
                    if (end == item.c_str() || *end != '\0') throw err;
                    c.seeds.push_back(static_cast<std::uint64_t>(s));
                }
            },
            [](const ExperimentConfig& c) {
                std::string out;
                for (std::size_t i = 0; i < c.seeds.size(); ++i)
                    out += (i ? "," : "") + std::to_string(c.seeds[i]);
                return out;
            }};
}

Field real_grid_field(std::optional<std::vector<double>> ExperimentConfig::* member) {
    return {[member](ExperimentConfig& c, const std::string& v, const ParseError& err) {
                std::vector<double> xs;
                for (const auto& item : split_list(v)) xs.push_back(parse_real(item, err));
                c.*member = std::move(xs);
            },
            [member](const ExperimentConfig& c) -> std::string {
                if (!(c.*member)) return "";
                std::string out;
                const auto& xs = *(c.*member);
                for (std::size_t i = 0; i < xs.size(); ++i)
                    out += (i ? "," : "") + format_double(xs[i]);
                return out;
            }};
}

Field int_grid_field(std::optional<std::vector<int>> ExperimentConfig::* member) {
    return {[member](ExperimentConfig& c, const std::string& v, const ParseError& err) {
                std::vector<int> xs;
                for (const auto& item : split_list(v))
                    xs.push_back(static_cast<int>(parse_long(item, err)));
                c.*member = std::move(xs);
            },
            [member](const ExperimentConfig& c) -> std::string {
                if (!(c.*member)) return "";
                std::string out;
                const auto& xs = *(c.*member);
                for (std::size_t i = 0; i < xs.size(); ++i)
                    out += (i ? "," : "") + std::to_string(xs[i]);
                return out;
            }};
}

// declaration order fixes both the serialized layout and the documented
// key set; grid keys serialize only when set
const std::vector<std::pair<std::string, Field>>& field_table() {
    static const std::vector<std::pair<std::string, Field>> table = {
        {"mode", string_field(&ExperimentConfig::mode)},
        {"n", int_field(&ExperimentConfig::n)},
        {"m", int_field(&ExperimentConfig::m)},
        {"d", int_field(&ExperimentConfig::d)},
        {"k", int_field(&ExperimentConfig::k)},
        {"tau", real_field(&ExperimentConfig::tau)},
        {"epsilon", real_field(&ExperimentConfig::epsilon)},
        {"gamma", real_field(&ExperimentConfig::gamma)},
        {"noise", real_field(&ExperimentConfig::noise)},
        {"num_samples", long_field(&ExperimentConfig::num_samples)},
        {"orthonormalize", bool_field(&ExperimentConfig::orthonormalize)},
        {"sdp_tol", real_field(&ExperimentConfig::sdp_tol)},
        {"sdp_max_iters", long_field(&ExperimentConfig::sdp_max_iters)},
        {"retries", int_field(&ExperimentConfig::retries)},
        {"max_columns", int_field(&ExperimentConfig::max_columns)},
        {"conditioning", real_field(&ExperimentConfig::conditioning)},
        {"strategy", string_field(&ExperimentConfig::strategy)},
        {"refined", bool_field(&ExperimentConfig::refined)},
        {"seeds", seeds_field()},
        {"input_dict", string_field(&ExperimentConfig::input_dict)},
        {"input_samples", string_field(&ExperimentConfig::input_samples)},
        {"input_poly", string_field(&ExperimentConfig::input_poly)},
        {"out_dict", string_field(&ExperimentConfig::out_dict)},
        {"out_samples", string_field(&ExperimentConfig::out_samples)},
        {"out_poly", string_field(&ExperimentConfig::out_poly)},
        {"out_recovered", string_field(&ExperimentConfig::out_recovered)},
        {"report", string_field(&ExperimentConfig::report)},
        {"grid_tau", real_grid_field(&ExperimentConfig::grid_tau)},
        {"grid_n", int_grid_field(&ExperimentConfig::grid_n)},
        {"grid_m", int_grid_field(&ExperimentConfig::grid_m)},
        {"grid_d", int_grid_field(&ExperimentConfig::grid_d)},
        {"grid_k", int_grid_field(&ExperimentConfig::grid_k)},
        {"amgm_n", int_field(&ExperimentConfig::amgm_n)},
        {"monomial", string_field(&ExperimentConfig::monomial)},
        {"holder", string_field(&ExperimentConfig::holder)},
    };
    return table;
}

bool grid_key(const std::string& key) { return key.rfind("grid_", 0) == 0; }

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& path) {
    std::map<std::string, const Field*> by_key;
    for (const auto& [key, field] : field_table()) by_key[key] = &field;

    ExperimentConfig cfg;
    std::set<std::string> seen;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string text = trim(raw);
        if (text.empty() || text[0] == '#') continue;
        std::size_t eq = text.find('=');
        if (eq == std::string::npos)
            throw ParseError(path, line, "expected key = value, got '" + text + "'");
        std::string key = trim(text.substr(0, eq));
        std::string value = trim(text.substr(eq + 1));
        auto it = by_key.find(key);
        if (it == by_key.end()) throw ParseError(path, line, "unknown key '" + key + "'");
        if (!seen.insert(key).second) throw ParseError(path, line, "duplicate key '" + key + "'");
        it->second->set(cfg, value,
                        ParseError(path, line, "bad value '" + value + "' for key '" + key + "'"));
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path, true, "cannot open for reading");
    return parse_config(in, path);
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    for (const auto& [key, field] : field_table()) {
        // unset grids have no line at all, so they parse back as unset
        if (grid_key(key)) {
            bool set = (key == "grid_tau" && cfg.grid_tau) || (key == "grid_n" && cfg.grid_n) ||
                       (key == "grid_m" && cfg.grid_m) || (key == "grid_d" && cfg.grid_d) ||
                       (key == "grid_k" && cfg.grid_k);
            if (!set) continue;
        }
        out << key << " = " << field.get(cfg) << "\n";
    }
    return out.str();
}

void validate_config(const ExperimentConfig& cfg) {
    static const std::set<std::string> modes = {"gen", "learn", "decompose", "certify", "bench"};
    if (!modes.count(cfg.mode)) throw ConfigError("unknown mode '" + cfg.mode + "'");
    if (cfg.n < 1 || cfg.m < 1) throw ConfigError("dimensions must be positive");
    if (cfg.d < 2 || cfg.d % 2 != 0) throw ConfigError("degree d must be even and at least 2");
    if (cfg.k < cfg.d || cfg.k % 2 != 0)
        throw ConfigError("moment degree k must be even and at least d");
    if (!(cfg.tau > 0.0) || cfg.tau > 1.0) throw ConfigError("tau must lie in (0, 1]");
    if (!(cfg.epsilon > 0.0) || cfg.epsilon >= 1.0) throw ConfigError("epsilon must lie in (0, 1)");
    if (cfg.noise < 0.0 || cfg.noise >= 1.0) throw ConfigError("noise must lie in [0, 1)");
    if (cfg.num_samples < 1) throw ConfigError("num_samples must be positive");
    if (cfg.seeds.empty()) throw ConfigError("at least one seed is required");
    if (cfg.sdp_tol <= 0.0) throw ConfigError("sdp_tol must be positive");
    if (cfg.sdp_max_iters < 1) throw ConfigError("sdp_max_iters must be positive");
    if (cfg.retries < 0) throw ConfigError("retries must be nonnegative");
    if (cfg.max_columns < 1) throw ConfigError("max_columns must be positive");
    if (cfg.conditioning < 1.0) throw ConfigError("conditioning must be at least 1");
    if (cfg.strategy != "eigenvector" && cfg.strategy != "gaussian")
        throw ConfigError("strategy must be eigenvector or gaussian");
    if (cfg.mode == "gen" && cfg.seeds.size() != 1)
        throw ConfigError("gen writes one artifact set and takes exactly one seed");
    if (cfg.orthonormalize && cfg.m > cfg.n)
        throw ConfigError("orthonormalize requires m <= n");
    for (const auto& g : {cfg.grid_d, cfg.grid_k})
        if (g)
            for (int v : *g)
                if (v < 2 || v % 2 != 0) throw ConfigError("grid degrees must be even");
}

const char* const kReportHeader =
    "mode,cell,n,m,d,k,tau,epsilon,seed,recovered,reason,cor_min,cors,close,tau_hat,"
    "retries_used,ms_data,ms_solve,ms_certify";

std::string report_row_csv(const ReportRow& row) {
    std::ostringstream out;
    out << row.mode << "," << row.cell << "," << row.n << "," << row.m << "," << row.d << ","
        << row.k << "," << format_double(row.tau) << "," << format_double(row.epsilon) << ","
        << row.seed << "," << row.recovered << "," << row.reason << ","
        << format_double(row.cor_min) << ",";
    for (std::size_t i = 0; i < row.cors.size(); ++i)
        out << (i ? ";" : "") << format_double(row.cors[i]);
    out << "," << row.close << "," << format_double(row.tau_hat) << "," << row.retries_used << ","
        << format_double(row.ms_data) << "," << format_double(row.ms_solve) << ","
        << format_double(row.ms_certify);
    return out.str();
}

void write_report_csv(std::ostream& out, const Report& report) {
    out << kReportHeader << "\n";
    for (const auto& row : report.rows) out << report_row_csv(row) << "\n";
}

}  // namespace sosdict::cli
