#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace chainshadow {

// Flat sectioned key = value text:
//   [section]
//   key = value            # comment
// Values keep their raw text; typed getters parse on demand and report the
// defining line on error.
class Config {
  public:
    static Config parse_file(const std::string& path);
    static Config parse_text(const std::string& text, const std::string& origin = "<text>");

    bool has_section(const std::string& section) const;
    bool has(const std::string& section, const std::string& key) const;

    std::string get_string(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    long get_int(const std::string& section, const std::string& key) const;
    long get_int(const std::string& section, const std::string& key, long fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
    // comma- or space-separated list of reals
    std::vector<double> get_vector(const std::string& section, const std::string& key) const;
    std::vector<double> get_vector(const std::string& section, const std::string& key,
                                   const std::vector<double>& fallback) const;

    std::vector<std::string> sections() const;
    std::vector<std::pair<std::string, std::string>> entries(const std::string& section) const;
    std::string snapshot() const;  // canonical re-emission, stable order

  private:
    struct Entry {
        std::string value;
        int line = 0;
    };
    const Entry* find(const std::string& section, const std::string& key) const;
    [[noreturn]] void missing(const std::string& section, const std::string& key) const;

    std::string origin_;
    std::map<std::string, std::map<std::string, Entry>> data_;
};

}  // namespace chainshadow
