#pragma once

// Minimal TOML subset sufficient for the run configs: [section] tables one
// level deep, key = value with strings, integers, floats, booleans, and flat
// arrays of scalars, plus # comments. Keys are flattened to "section.key".
// Syntax errors carry the line number.

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hlslab {

class toml_error : public std::runtime_error {
public:
    toml_error(int line, const std::string& what)
        : std::runtime_error("toml: line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

struct TomlValue {
    enum class Kind { String, Integer, Float, Boolean, Array };
    Kind kind = Kind::String;
    std::string str;
    long long integer = 0;
    double real = 0.0;
    bool boolean = false;
    std::vector<TomlValue> array;

    // numeric accessor: integers promote to double
    double as_number() const {
        if (kind == Kind::Integer) return double(integer);
        if (kind == Kind::Float) return real;
        throw std::runtime_error("toml value is not a number");
    }
};

struct TomlDoc {
    std::map<std::string, TomlValue> values;  // flattened "section.key"

    bool has(const std::string& key) const { return values.count(key) > 0; }
    const TomlValue& at(const std::string& key) const { return values.at(key); }
};

namespace detail {

inline void skip_ws(const std::string& s, std::size_t& i) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
}

inline bool is_bare_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

inline TomlValue parse_value(const std::string& s, std::size_t& i, int line);

inline TomlValue parse_scalar(const std::string& s, std::size_t& i, int line) {
    TomlValue v;
    if (s[i] == '"') {
        v.kind = TomlValue::Kind::String;
        ++i;
        std::string out;
        while (i < s.size() && s[i] != '"') {
            if (s[i] == '\\') {
                ++i;
                if (i >= s.size()) throw toml_error(line, "dangling escape in string");
                switch (s[i]) {
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    case '\\': out += '\\'; break;
                    case '"': out += '"'; break;
                    default: throw toml_error(line, std::string("bad escape \\") + s[i]);
                }
            } else {
                out += s[i];
            }
            ++i;
        }
        if (i >= s.size()) throw toml_error(line, "unterminated string");
        ++i;
        v.str = out;
        return v;
    }
    // bare token: boolean or number
    std::size_t j = i;
    while (j < s.size() && s[j] != ',' && s[j] != ']' && s[j] != '#' && s[j] != ' ' &&
           s[j] != '\t')
        ++j;
    const std::string tok = s.substr(i, j - i);
    if (tok.empty()) throw toml_error(line, "expected a value");
    i = j;
    if (tok == "true" || tok == "false") {
        v.kind = TomlValue::Kind::Boolean;
        v.boolean = tok == "true";
        return v;
    }
    const bool looks_float = tok.find_first_of(".eE") != std::string::npos ||
                             tok == "inf" || tok == "-inf" || tok == "nan";
    try {
        std::size_t used = 0;
        if (looks_float) {
            v.kind = TomlValue::Kind::Float;
            v.real = std::stod(tok, &used);
        } else {
            v.kind = TomlValue::Kind::Integer;
            v.integer = std::stoll(tok, &used);
        }
        if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
        throw toml_error(line, "cannot parse value '" + tok + "'");
    }
    return v;
}

inline TomlValue parse_value(const std::string& s, std::size_t& i, int line) {
    skip_ws(s, i);
    if (i >= s.size()) throw toml_error(line, "missing value after '='");
    if (s[i] == '[') {
        TomlValue v;
        v.kind = TomlValue::Kind::Array;
        ++i;
        skip_ws(s, i);
        if (i < s.size() && s[i] == ']') {
            ++i;
            return v;
        }
        while (true) {
            v.array.push_back(parse_value(s, i, line));
            skip_ws(s, i);
            if (i < s.size() && s[i] == ',') {
                ++i;
                skip_ws(s, i);
                continue;
            }
            if (i < s.size() && s[i] == ']') {
                ++i;
                return v;
            }
            throw toml_error(line, "expected ',' or ']' in array");
        }
    }
    return parse_scalar(s, i, line);
}

}  // namespace detail

inline TomlDoc toml_parse(const std::string& content) {
    TomlDoc doc;
    std::istringstream in(content);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::size_t i = 0;
        detail::skip_ws(raw, i);
        if (i >= raw.size() || raw[i] == '#') continue;
        if (raw[i] == '[') {
            ++i;
            std::size_t j = i;
            while (j < raw.size() && detail::is_bare_char(raw[j])) ++j;
            if (j == i) throw toml_error(line, "empty table name");
            if (j >= raw.size() || raw[j] != ']') throw toml_error(line, "expected ']'");
            section = raw.substr(i, j - i);
            i = j + 1;
            detail::skip_ws(raw, i);
            if (i < raw.size() && raw[i] != '#')
                throw toml_error(line, "trailing characters after table header");
            continue;
        }
        std::size_t j = i;
        while (j < raw.size() && detail::is_bare_char(raw[j])) ++j;
        if (j == i) throw toml_error(line, "expected a key");
        const std::string key = raw.substr(i, j - i);
        i = j;
        detail::skip_ws(raw, i);
        if (i >= raw.size() || raw[i] != '=') throw toml_error(line, "expected '=' after key");
        ++i;
        TomlValue v = detail::parse_value(raw, i, line);
        detail::skip_ws(raw, i);
        if (i < raw.size() && raw[i] != '#')
            throw toml_error(line, "trailing characters after value");
        const std::string full = section.empty() ? key : section + "." + key;
        if (doc.values.count(full)) throw toml_error(line, "duplicate key '" + full + "'");
        doc.values[full] = std::move(v);
    }
    return doc;
}

inline TomlDoc toml_parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return toml_parse(ss.str());
}

}  // namespace hlslab
