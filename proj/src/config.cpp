#include "chainshadow/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace chainshadow {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parse_text(os.str(), path);
}

Config Config::parse_text(const std::string& text, const std::string& origin) {
    Config cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                         ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            cfg.data_[section];
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                     ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": empty key");
        cfg.data_[section][key] = {value, lineno};
    }
    return cfg;
}

bool Config::has_section(const std::string& section) const { return data_.count(section) > 0; }

bool Config::has(const std::string& section, const std::string& key) const {
    return find(section, key) != nullptr;
}

const Config::Entry* Config::find(const std::string& section, const std::string& key) const {
    auto s = data_.find(section);
    if (s == data_.end()) return nullptr;
    auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
}

void Config::missing(const std::string& section, const std::string& key) const {
    throw std::runtime_error(origin_ + ": missing key '" + key + "' in section [" + section + "]");
}

std::string Config::get_string(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e) missing(section, key);
    return e->value;
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
    const Entry* e = find(section, key);
    return e ? e->value : fallback;
}

double Config::get_double(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e) missing(section, key);
    try {
        std::size_t pos = 0;
        double v = std::stod(e->value, &pos);
        if (trim(e->value.substr(pos)).empty()) return v;
    } catch (...) {
    }
    throw std::runtime_error(origin_ + ":" + std::to_string(e->line) + ": key '" + key +
                             "' is not a real number: '" + e->value + "'");
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
    return find(section, key) ? get_double(section, key) : fallback;
}

long Config::get_int(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e) missing(section, key);
    try {
        std::size_t pos = 0;
        long v = std::stol(e->value, &pos);
        if (trim(e->value.substr(pos)).empty()) return v;
    } catch (...) {
    }
    throw std::runtime_error(origin_ + ":" + std::to_string(e->line) + ": key '" + key +
                             "' is not an integer: '" + e->value + "'");
}

long Config::get_int(const std::string& section, const std::string& key, long fallback) const {
    return find(section, key) ? get_int(section, key) : fallback;
}

bool Config::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    std::string v = e->value;
    std::transform(v.begin(), v.end(), v.begin(), ::tolower);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::runtime_error(origin_ + ":" + std::to_string(e->line) + ": key '" + key +
                             "' is not a boolean: '" + e->value + "'");
}

std::vector<double> Config::get_vector(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e) missing(section, key);
    std::string v = e->value;
    std::replace(v.begin(), v.end(), ',', ' ');
    std::istringstream is(v);
    std::vector<double> out;
    double x;
    while (is >> x) out.push_back(x);
    if (out.empty())
        throw std::runtime_error(origin_ + ":" + std::to_string(e->line) + ": key '" + key +
                                 "' is not a list of reals: '" + e->value + "'");
    return out;
}

std::vector<double> Config::get_vector(const std::string& section, const std::string& key,
                                       const std::vector<double>& fallback) const {
    return find(section, key) ? get_vector(section, key) : fallback;
}

std::vector<std::string> Config::sections() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : data_) out.push_back(name);
    return out;
}

std::vector<std::pair<std::string, std::string>> Config::entries(const std::string& section) const {
    std::vector<std::pair<std::string, std::string>> out;
    auto s = data_.find(section);
    if (s != data_.end())
        for (const auto& [k, e] : s->second) out.emplace_back(k, e.value);
    return out;
}

std::string Config::snapshot() const {
    std::ostringstream os;
    for (const auto& [name, entries] : data_) {
        if (!name.empty()) os << '[' << name << "]\n";
        for (const auto& [k, e] : entries) os << k << " = " << e.value << '\n';
    }
    return os.str();
}

}  // namespace chainshadow
