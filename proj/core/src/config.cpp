#include "metastable/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace metastable {

namespace {

struct Cursor {
    const std::string& s;
    std::size_t pos = 0;
    int line;

    bool done() const { return pos >= s.size(); }
    char peek() const { return s[pos]; }
    void skip_ws() {
        while (!done() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    }
};

ConfigFile::Value parse_value(Cursor& c);

ConfigFile::Value parse_array(Cursor& c) {
    ConfigFile::Value v;
    v.kind = ConfigFile::Value::Kind::array;
    v.line = c.line;
    ++c.pos;  // consume '['
    c.skip_ws();
    if (!c.done() && c.peek() == ']') {
        ++c.pos;
        return v;
    }
    while (true) {
        c.skip_ws();
        if (c.done())
            throw config_error("unterminated array", c.line);
        v.array.push_back(parse_value(c));
        c.skip_ws();
        if (c.done())
            throw config_error("unterminated array", c.line);
        if (c.peek() == ',') {
            ++c.pos;
            continue;
        }
        if (c.peek() == ']') {
            ++c.pos;
            return v;
        }
        throw config_error("expected ',' or ']' in array", c.line);
    }
}

ConfigFile::Value parse_value(Cursor& c) {
    c.skip_ws();
    if (c.done())
        throw config_error("missing value", c.line);
    ConfigFile::Value v;
    v.line = c.line;
    const char ch = c.peek();
    if (ch == '[') return parse_array(c);
    if (ch == '"') {
        v.kind = ConfigFile::Value::Kind::string;
        ++c.pos;
        while (!c.done() && c.peek() != '"') {
            v.str += c.peek();
            ++c.pos;
        }
        if (c.done())
            throw config_error("unterminated string", c.line);
        ++c.pos;
        return v;
    }
    // bare word: boolean or decimal number
    std::string word;
    while (!c.done() && c.peek() != ',' && c.peek() != ']' && c.peek() != '#' &&
           c.peek() != ' ' && c.peek() != '\t')
        word += c.s[c.pos++];
    if (word == "true" || word == "false") {
        v.kind = ConfigFile::Value::Kind::boolean;
        v.boolean = (word == "true");
        return v;
    }
    v.kind = ConfigFile::Value::Kind::number;
    std::size_t used = 0;
    try {
        v.num = std::stod(word, &used);
    } catch (const std::exception&) {
        throw config_error("cannot parse number '" + word + "'", c.line);
    }
    if (used != word.size())
        throw config_error("trailing characters in number '" + word + "'", c.line);
    return v;
}

}  // namespace

ConfigFile ConfigFile::parse_string(const std::string& text) {
    ConfigFile cfg;
    cfg.raw_ = text;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // strip comments outside strings
        bool in_str = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_str = !in_str;
            if (line[i] == '#' && !in_str) {
                line.resize(i);
                break;
            }
        }
        std::size_t a = line.find_first_not_of(" \t\r");
        if (a == std::string::npos) continue;
        std::size_t b = line.find_last_not_of(" \t\r");
        line = line.substr(a, b - a + 1);

        if (line.front() == '[') {
            if (line.back() != ']')
                throw config_error("malformed section header", lineno);
            section = line.substr(1, line.size() - 2);
            if (section.empty())
                throw config_error("empty section name", lineno);
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("expected 'key = value'", lineno);
        std::string key = line.substr(0, eq);
        key.erase(key.find_last_not_of(" \t") + 1);
        if (key.empty())
            throw config_error("empty key", lineno);
        std::string rest = line.substr(eq + 1);

        Cursor c{rest, 0, lineno};
        Value v = parse_value(c);
        c.skip_ws();
        if (!c.done())
            throw config_error("trailing characters after value", lineno);
        const std::string full = section.empty() ? key : section + "." + key;
        if (cfg.values_.count(full))
            throw config_error("duplicate key '" + full + "'", lineno);
        cfg.values_[full] = std::move(v);
    }
    return cfg;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw config_error("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

bool ConfigFile::has(const std::string& key) const { return values_.count(key) > 0; }

const ConfigFile::Value& ConfigFile::require(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end())
        throw config_error("missing required key '" + key + "'");
    return it->second;
}

double ConfigFile::get_number(const std::string& key) const {
    const Value& v = require(key);
    if (v.kind != Value::Kind::number)
        throw config_error("key '" + key + "' must be a number", v.line);
    return v.num;
}

double ConfigFile::get_number_or(const std::string& key, double fallback) const {
    return has(key) ? get_number(key) : fallback;
}

long ConfigFile::get_integer(const std::string& key) const {
    const Value& v = require(key);
    if (v.kind != Value::Kind::number || v.num != std::floor(v.num))
        throw config_error("key '" + key + "' must be an integer", v.line);
    return static_cast<long>(v.num);
}

long ConfigFile::get_integer_or(const std::string& key, long fallback) const {
    return has(key) ? get_integer(key) : fallback;
}

std::string ConfigFile::get_string(const std::string& key) const {
    const Value& v = require(key);
    if (v.kind != Value::Kind::string)
        throw config_error("key '" + key + "' must be a string", v.line);
    return v.str;
}

std::string ConfigFile::get_string_or(const std::string& key,
                                      const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}

bool ConfigFile::get_bool_or(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const Value& v = require(key);
    if (v.kind != Value::Kind::boolean)
        throw config_error("key '" + key + "' must be a boolean", v.line);
    return v.boolean;
}

std::vector<double> ConfigFile::get_number_list(const std::string& key) const {
    const Value& v = require(key);
    if (v.kind != Value::Kind::array)
        throw config_error("key '" + key + "' must be an array", v.line);
    std::vector<double> out;
    for (const Value& e : v.array) {
        if (e.kind != Value::Kind::number)
            throw config_error("key '" + key + "' must hold numbers", e.line);
        out.push_back(e.num);
    }
    return out;
}

std::vector<std::vector<double>> ConfigFile::get_number_table(
    const std::string& key) const {
    const Value& v = require(key);
    if (v.kind != Value::Kind::array)
        throw config_error("key '" + key + "' must be an array of arrays", v.line);
    std::vector<std::vector<double>> out;
    for (const Value& row : v.array) {
        if (row.kind != Value::Kind::array)
            throw config_error("key '" + key + "' must be an array of arrays",
                               row.line);
        std::vector<double> r;
        for (const Value& e : row.array) {
            if (e.kind != Value::Kind::number)
                throw config_error("key '" + key + "' must hold numbers", e.line);
            r.push_back(e.num);
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace metastable
