#pragma once

#include <string>
#include <vector>

namespace chainshadow {

std::string format_g17(double x);

// Stable key-order text report: nested blocks of "key = value" lines.
class Report {
  public:
    Report& line(const std::string& key, const std::string& value);
    Report& line(const std::string& key, double value);
    Report& line(const std::string& key, long value);
    Report& line(const std::string& key, bool value);
    Report& raw(const std::string& text);  // pre-formatted block
    std::string str() const { return body_; }
    void write(const std::string& path) const;

  private:
    std::string body_;
};

class Csv {
  public:
    explicit Csv(std::vector<std::string> header);
    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& values);
    std::string str() const { return body_; }
    void write(const std::string& path) const;

  private:
    std::string body_;
    std::size_t columns_;
};

struct Manifest {
    std::string tool_version;
    std::string command;
    std::string config_snapshot;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, double>> tolerances;
    double wall_seconds = 0.0;
    std::vector<std::string> artifacts;

    std::string str() const;
    void write(const std::string& path) const;
};

void write_text_file(const std::string& path, const std::string& content);

}  // namespace chainshadow
