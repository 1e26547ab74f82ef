#pragma once

#include <map>
#include <string>

#include "mmci/errors.hpp"

namespace mmci {

// Plain-text key-value config: one `key = value` per line, '#' comments.
class KeyValueConfig {
public:
    static KeyValueConfig parse_file(const std::string& path);
    static KeyValueConfig parse_string(const std::string& text);

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    const std::map<std::string, std::string>& values() const { return values_; }
    std::string to_string() const;

private:
    std::map<std::string, std::string> values_;
};

}  // namespace mmci
