#include "chainshadow/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace chainshadow {

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

Report& Report::line(const std::string& key, const std::string& value) {
    body_ += key + " = " + value + "\n";
    return *this;
}
Report& Report::line(const std::string& key, double value) {
    return line(key, format_g17(value));
}
Report& Report::line(const std::string& key, long value) {
    return line(key, std::to_string(value));
}
Report& Report::line(const std::string& key, bool value) {
    return line(key, std::string(value ? "true" : "false"));
}
Report& Report::raw(const std::string& text) {
    body_ += text;
    return *this;
}
void Report::write(const std::string& path) const { write_text_file(path, body_); }

Csv::Csv(std::vector<std::string> header) : columns_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) body_ += (i ? "," : "") + header[i];
    body_ += "\n";
}

void Csv::row(const std::vector<double>& values) {
    if (values.size() != columns_) throw std::runtime_error("csv: column count mismatch");
    for (std::size_t i = 0; i < values.size(); ++i)
        body_ += (i ? "," : "") + format_g17(values[i]);
    body_ += "\n";
}

void Csv::row_mixed(const std::vector<std::string>& values) {
    if (values.size() != columns_) throw std::runtime_error("csv: column count mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) body_ += (i ? "," : "") + values[i];
    body_ += "\n";
}

void Csv::write(const std::string& path) const { write_text_file(path, body_); }

std::string Manifest::str() const {
    std::ostringstream os;
    os << "manifest {\n";
    os << "  tool_version = " << tool_version << "\n";
    os << "  command = " << command << "\n";
    os << "  seed = " << seed << "\n";
    for (const auto& [k, v] : tolerances) os << "  tolerance." << k << " = " << format_g17(v) << "\n";
    os << "  wall_seconds = " << format_g17(wall_seconds) << "\n";
    for (const auto& a : artifacts) os << "  artifact = " << a << "\n";
    os << "}\n";
    os << "config {\n" << config_snapshot << "}\n";
    return os.str();
}

void Manifest::write(const std::string& path) const { write_text_file(path, str()); }

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

}  // namespace chainshadow
