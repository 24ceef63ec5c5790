#include "gyrolat/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gyrolat {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

void ParsedConfig::insert(const std::string& key, const std::string& value, int line) {
    const auto it = entries_.find(key);
    if (it != entries_.end()) {
        std::ostringstream msg;
        msg << "duplicate key '" << key << "' at lines " << it->second.second << " and " << line;
        throw std::runtime_error(msg.str());
    }
    entries_[key] = {value, line};
    order_.push_back(key);
}

bool ParsedConfig::has(const std::string& key) const {
    accessed_.insert(key);
    return entries_.count(key) != 0;
}

std::string ParsedConfig::get(const std::string& key, const std::string& fallback) const {
    accessed_.insert(key);
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second.first;
}

double ParsedConfig::get_double(const std::string& key, double fallback) const {
    accessed_.insert(key);
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const std::string& v = it->second.first;
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw std::runtime_error("key '" + key + "': not a number: '" + v + "'");
    return x;
}

int ParsedConfig::get_int(const std::string& key, int fallback) const {
    accessed_.insert(key);
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const std::string& v = it->second.first;
    char* end = nullptr;
    const long x = std::strtol(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0')
        throw std::runtime_error("key '" + key + "': not an integer: '" + v + "'");
    return static_cast<int>(x);
}

bool ParsedConfig::get_bool(const std::string& key, bool fallback) const {
    accessed_.insert(key);
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const std::string& v = it->second.first;
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::runtime_error("key '" + key + "': not a boolean: '" + v + "'");
}

void ParsedConfig::require_all_consumed() const {
    std::vector<std::string> unknown;
    for (const auto& [key, value] : entries_)
        if (!accessed_.count(key)) unknown.push_back(key + " (line " + std::to_string(value.second) + ")");
    if (unknown.empty()) return;
    std::string msg = "unknown key(s):";
    for (const auto& u : unknown) msg += " " + u;
    throw std::runtime_error(msg);
}

int ParsedConfig::line_of(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? -1 : it->second.second;
}

ParsedConfig parse_config_text(const std::string& text) {
    ParsedConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw std::runtime_error("config line " + std::to_string(lineNo) +
                                         ": malformed section header: " + t);
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty())
                throw std::runtime_error("config line " + std::to_string(lineNo) +
                                         ": empty section name");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineNo) +
                                     ": expected key = value, got: " + t);
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error("config line " + std::to_string(lineNo) + ": empty key");
        cfg.insert(section.empty() ? key : section + "." + key, value, lineNo);
    }
    return cfg;
}

ParsedConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_config_text(buf.str());
}

std::string serialize_config(const ParsedConfig& c) {
    // Group keys by section, preserving first-appearance order of sections.
    std::vector<std::pair<std::string, std::vector<std::string>>> groups;
    const auto group_of = [&](const std::string& section) -> std::vector<std::string>& {
        for (auto& g : groups)
            if (g.first == section) return g.second;
        groups.emplace_back(section, std::vector<std::string>{});
        return groups.back().second;
    };
    for (const std::string& key : c.keys()) {
        const auto dot = key.find('.');
        if (dot == std::string::npos)
            group_of("").push_back(key);
        else
            group_of(key.substr(0, dot)).push_back(key);
    }
    std::ostringstream out;
    for (const auto& [section, keys] : groups) {
        if (!section.empty()) out << "[" << section << "]\n";
        for (const std::string& key : keys) {
            const auto dot = key.find('.');
            const std::string bare = (dot == std::string::npos) ? key : key.substr(dot + 1);
            out << bare << " = " << c.get(key, "") << "\n";
        }
    }
    return out.str();
}

}  // namespace gyrolat
