#ifndef METASTABLE_CONFIG_HPP
#define METASTABLE_CONFIG_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace metastable {

/// Configuration problem with the offending line number (0 = whole file).
class config_error : public std::runtime_error {
public:
    config_error(const std::string& msg, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg
                                      : msg),
          line(line) {}
    int line;
};

// Flat key/value configuration with [section] tables, in a small TOML-like
// dialect: numbers, booleans, quoted strings, and (nested) arrays.  Keys are
// addressed as "section.key".  Parsing reports the line of every error;
// numbers are plain decimal (no underscores, hex, or dates).
class ConfigFile {
public:
    struct Value {
        enum class Kind { number, string, boolean, array } kind = Kind::number;
        double num = 0.0;
        std::string str;
        bool boolean = false;
        std::vector<Value> array;
        int line = 0;
    };

    static ConfigFile parse_string(const std::string& text);
    static ConfigFile parse_file(const std::string& path);

    bool has(const std::string& key) const;

    double get_number(const std::string& key) const;
    double get_number_or(const std::string& key, double fallback) const;
    long get_integer(const std::string& key) const;
    long get_integer_or(const std::string& key, long fallback) const;
    std::string get_string(const std::string& key) const;
    std::string get_string_or(const std::string& key, const std::string& fallback) const;
    bool get_bool_or(const std::string& key, bool fallback) const;
    std::vector<double> get_number_list(const std::string& key) const;
    std::vector<std::vector<double>> get_number_table(const std::string& key) const;

    /// Raw file bytes, for config hashing.
    const std::string& raw_text() const { return raw_; }

private:
    const Value& require(const std::string& key) const;

    std::map<std::string, Value> values_;
    std::string raw_;
};

/// FNV-1a 64-bit hash of a byte string, rendered as fixed-width hex.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace metastable

#endif
