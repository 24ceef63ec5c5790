#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace gyrolat {

// Flat key = value configuration with [section] headers; a key inside
// [source] parses as "source.key".  Keys record their line numbers so
// duplicate and unknown keys can be reported precisely.
class ParsedConfig {
public:
    void insert(const std::string& key, const std::string& value, int line);

    bool has(const std::string& key) const;
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    // Throws naming every key never read by a getter — fail-fast for typos.
    void require_all_consumed() const;

    const std::vector<std::string>& keys() const { return order_; }
    int line_of(const std::string& key) const;

private:
    std::vector<std::string> order_;
    std::map<std::string, std::pair<std::string, int>> entries_;
    mutable std::set<std::string> accessed_;
};

ParsedConfig parse_config_text(const std::string& text);
ParsedConfig parse_config_file(const std::string& path);

// Emits the same flat format, sections regrouped; parse(serialize(c)) holds
// the same key/value pairs as c.
std::string serialize_config(const ParsedConfig& c);

}  // namespace gyrolat
