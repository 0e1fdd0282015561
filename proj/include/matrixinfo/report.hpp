#pragma once

#include <string>
#include <vector>

namespace matrixinfo {

inline constexpr const char* kToolVersion = "1.0.0";

/// One verification entry: pass is true iff |measured - expected| <=
/// tolerance (infinite measured values always fail).
struct Check {
    std::string name;
    double measured;
    double expected;
    double tolerance;
    bool pass;
};

Check make_check(std::string name, double measured, double expected, double tolerance);

/// Ordered key-value report emitted as JSON on standard output. Numbers are
/// serialized with 17 significant digits so reports round-trip exactly and
/// repeated runs are byte-identical.
class ReportDocument {
public:
    explicit ReportDocument(std::string command);

    void add_config(const std::string& key, double value);
    void add_config(const std::string& key, long long value);
    void add_config(const std::string& key, const std::string& value);
    void add_result(const std::string& key, double value);
    void add_result(const std::string& key, const std::vector<double>& values);
    void add_result(const std::string& key, const std::string& value);
    void add_check(Check check);

    bool all_checks_pass() const;
    std::string to_json() const;

private:
    struct Entry {
        std::string key;
        std::string encoded;  // already-serialized JSON value
    };
    std::string command_;
    std::vector<Entry> config_;
    std::vector<Entry> results_;
    std::vector<Check> checks_;
};

/// %.17g with inf/nan mapped to JSON strings, shared by every writer that
/// has to round-trip doubles.
std::string format_double(double value);

}  // namespace matrixinfo
