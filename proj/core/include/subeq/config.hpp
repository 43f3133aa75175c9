#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "subeq/errors.hpp"

namespace subeq {

/// Declarative run configuration. Values are kept as the canonical strings,
/// so serialize(parse(serialize(c))) round-trips bytewise; typed accessors
/// validate on use. Unknown keys are rejected at parse time.
struct RunConfig {
    std::map<std::string, std::string> kv;

    bool has(const std::string& key) const { return kv.count(key) != 0; }
    std::string get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& dflt) const;
    double get_double(const std::string& key) const;
    double get_double_or(const std::string& key, double dflt) const;
    long get_long_or(const std::string& key, long dflt) const;
    std::uint64_t seed() const;
    std::vector<double> get_double_list_or(const std::string& key,
                                           const std::vector<double>& dflt) const;
    std::vector<int> get_int_list(const std::string& key) const;
    std::vector<std::pair<double, double>> get_ranges(const std::string& key) const;

    void set(const std::string& key, const std::string& value);
};

/// Flat key=value text ('#' comments) or a JSON object; both canonicalize to
/// the same RunConfig.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config_file(const std::string& path);

/// Canonical form: sorted keys, `key=value` lines.
std::string serialize_config(const RunConfig& cfg);

}  // namespace subeq
