#include "subeq/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace subeq {

namespace {

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "command",     "subequation", "metric",      "domain",     "box",
        "grid",        "boundary",    "lambdas",     "tol_iter",   "tol_residual",
        "max_sweeps",  "mode",        "threads",     "seed",       "out",
        "quiet",       "c",           "delta_nodes", "epsilons",   "u",
        "v",           "pair",        "x0",          "lambda",     "points",
        "samples",     "tmax_pow",    "strictness",
    };
    return keys;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    size_t b = s.find_last_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

}  // namespace

std::string RunConfig::get(const std::string& key) const {
    auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError("missing required config key '" + key + "'");
    return it->second;
}

std::string RunConfig::get_or(const std::string& key, const std::string& dflt) const {
    auto it = kv.find(key);
    return it == kv.end() ? dflt : it->second;
}

double RunConfig::get_double(const std::string& key) const {
    const std::string v = get(key);
    try {
        size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': bad number '" + v + "'");
    }
}

double RunConfig::get_double_or(const std::string& key, double dflt) const {
    return has(key) ? get_double(key) : dflt;
}

long RunConfig::get_long_or(const std::string& key, long dflt) const {
    if (!has(key)) return dflt;
    return long(get_double(key));
}

std::uint64_t RunConfig::seed() const {
    if (!has("seed")) return 20240101ull;
    try {
        return std::stoull(get("seed"));
    } catch (const std::exception&) {
        throw ConfigError("config key 'seed': bad unsigned integer");
    }
}

std::vector<double> RunConfig::get_double_list_or(const std::string& key,
                                                  const std::vector<double>& dflt) const {
    if (!has(key)) return dflt;
    std::vector<double> out;
    std::stringstream ss(get(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "': bad number '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
    return out;
}

std::vector<int> RunConfig::get_int_list(const std::string& key) const {
    std::vector<int> out;
    for (double d : get_double_list_or(key, {})) out.push_back(int(d));
    return out;
}

std::vector<std::pair<double, double>> RunConfig::get_ranges(const std::string& key) const {
    // "lo:hi,lo:hi,..." per axis.
    std::vector<std::pair<double, double>> out;
    std::stringstream ss(get(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        auto colon = item.find(':');
        if (colon == std::string::npos)
            throw ConfigError("config key '" + key + "': expected lo:hi, got '" + item + "'");
        try {
            out.emplace_back(std::stod(item.substr(0, colon)),
                             std::stod(item.substr(colon + 1)));
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "': bad range '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError("config key '" + key + "': empty");
    return out;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    const auto& known = known_keys();
    if (std::find(known.begin(), known.end(), key) == known.end())
        throw ConfigError("unknown config key '" + key + "'");
    kv[key] = value;
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    const std::string trimmed = trim(text);
    if (!trimmed.empty() && trimmed.front() == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(trimmed);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("config JSON: ") + e.what());
        }
        if (!j.is_object()) throw ConfigError("config JSON: top level must be an object");
        for (auto it = j.begin(); it != j.end(); ++it) {
            std::string v;
            if (it.value().is_string())
                v = it.value().get<std::string>();
            else if (it.value().is_boolean())
                v = it.value().get<bool>() ? "1" : "0";
            else if (it.value().is_number_integer())
                v = std::to_string(it.value().get<long long>());
            else if (it.value().is_number()) {
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.17g", it.value().get<double>());
                v = buf;
            } else {
                throw ConfigError("config JSON: key '" + it.key() + "' has a non-scalar value");
            }
            cfg.set(it.key(), v);
        }
        return cfg;
    }
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
    std::string out;
    for (const auto& [k, v] : cfg.kv) out += k + "=" + v + "\n";
    return out;
}

}  // namespace subeq
