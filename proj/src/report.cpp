#include "matrixinfo/report.hpp"

#include <cmath>
#include <cstdio>

namespace matrixinfo {

std::string format_double(double value) {
    if (std::isnan(value)) return "\"nan\"";
    if (std::isinf(value)) return value > 0 ? "\"inf\"" : "\"-inf\"";
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

namespace {

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += "\"";
    return out;
}

void append_entries(std::string& out, const char* section,
                    const std::vector<std::pair<std::string, std::string>>& entries) {
    out += quote(section);
    out += ": {";
    bool first = true;
    for (const auto& [key, encoded] : entries) {
        if (!first) out += ", ";
        first = false;
        out += quote(key);
        out += ": ";
        out += encoded;
    }
    out += "}";
}

}  // namespace

Check make_check(std::string name, double measured, double expected, double tolerance) {
    Check c;
    c.name = std::move(name);
    c.measured = measured;
    c.expected = expected;
    c.tolerance = tolerance;
    c.pass = std::isfinite(measured) && std::abs(measured - expected) <= tolerance;
    return c;
}

ReportDocument::ReportDocument(std::string command) : command_(std::move(command)) {}

void ReportDocument::add_config(const std::string& key, double value) {
    config_.push_back({key, format_double(value)});
}

void ReportDocument::add_config(const std::string& key, long long value) {
    config_.push_back({key, std::to_string(value)});
}

void ReportDocument::add_config(const std::string& key, const std::string& value) {
    config_.push_back({key, quote(value)});
}

void ReportDocument::add_result(const std::string& key, double value) {
    results_.push_back({key, format_double(value)});
}

void ReportDocument::add_result(const std::string& key, const std::vector<double>& values) {
    std::string encoded = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) encoded += ", ";
        encoded += format_double(values[i]);
    }
    encoded += "]";
    results_.push_back({key, std::move(encoded)});
}

void ReportDocument::add_result(const std::string& key, const std::string& value) {
    results_.push_back({key, quote(value)});
}

void ReportDocument::add_check(Check check) { checks_.push_back(std::move(check)); }

bool ReportDocument::all_checks_pass() const {
    for (const Check& c : checks_)
        if (!c.pass) return false;
    return true;
}

std::string ReportDocument::to_json() const {
    std::string out = "{";
    out += quote("tool_version");
    out += ": ";
    out += quote(kToolVersion);
    out += ", ";
    out += quote("command");
    out += ": ";
    out += quote(command_);
    out += ", ";

    std::vector<std::pair<std::string, std::string>> entries;
    for (const Entry& e : config_) entries.emplace_back(e.key, e.encoded);
    append_entries(out, "config", entries);
    out += ", ";

    entries.clear();
    for (const Entry& e : results_) entries.emplace_back(e.key, e.encoded);
    append_entries(out, "results", entries);

    out += ", ";
    out += quote("checks");
    out += ": [";
    for (std::size_t i = 0; i < checks_.size(); ++i) {
        const Check& c = checks_[i];
        if (i) out += ", ";
        out += "{";
        out += quote("name");
        out += ": ";
        out += quote(c.name);
        out += ", ";
        out += quote("measured");
        out += ": ";
        out += format_double(c.measured);
        out += ", ";
        out += quote("expected");
        out += ": ";
        out += format_double(c.expected);
        out += ", ";
        out += quote("tolerance");
        out += ": ";
        out += format_double(c.tolerance);
        out += ", ";
        out += quote("pass");
        out += ": ";
        out += c.pass ? "true" : "false";
        out += "}";
    }
    out += "]}";
    out += "\n";
    return out;
}

}  // namespace matrixinfo
