#include "sublab/toml.hpp"

#include <charconv>
#include <cmath>

namespace sublab::toml {

const std::string& value::as_string() const {
    if (!is_string()) throw config_error("expected a string value");
    return std::get<std::string>(v);
}
double value::as_number() const {
    if (!is_number()) throw config_error("expected a numeric value");
    return std::get<double>(v);
}
bool value::as_bool() const {
    if (!is_bool()) throw config_error("expected a boolean value");
    return std::get<bool>(v);
}
const array& value::as_array() const {
    if (!is_array()) throw config_error("expected an array value");
    return std::get<array>(v);
}
const table& value::as_table() const {
    if (!is_table()) throw config_error("expected a table value");
    return std::get<table>(v);
}

const value* find(const table& t, const std::string& key) {
    auto it = t.find(key);
    return it == t.end() ? nullptr : &it->second;
}

namespace {

class reader {
public:
    explicit reader(const std::string& s) : s_(s) {}

    table parse() {
        table root;
        table* current = &root;
        skip_blank();
        while (!eof()) {
            if (peek() == '[') {
                current = open_table(root);
            } else {
                auto [key, val] = key_value();
                if (current->count(key)) fail("duplicate key '" + key + "'");
                (*current)[key] = std::move(val);
            }
            end_of_line();
            skip_blank();
        }
        return root;
    }

private:
    bool eof() const { return i_ >= s_.size(); }
    char peek() const { return s_[i_]; }
    char get() {
        char c = s_[i_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw config_error("config parse error at line " + std::to_string(line_) + ", column " +
                           std::to_string(col_) + ": " + msg);
    }
    void skip_inline_ws() {
        while (!eof() && (peek() == ' ' || peek() == '\t')) get();
    }
    void skip_comment() {
        if (!eof() && peek() == '#')
            while (!eof() && peek() != '\n') get();
    }
    void skip_blank() {
        for (;;) {
            skip_inline_ws();
            skip_comment();
            if (!eof() && (peek() == '\n' || peek() == '\r')) {
                get();
                continue;
            }
            return;
        }
    }
    void end_of_line() {
        skip_inline_ws();
        skip_comment();
        if (eof()) return;
        if (peek() == '\n' || peek() == '\r') {
            get();
            return;
        }
        fail("unexpected trailing characters");
    }

    static bool key_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
    }

    std::string bare_key() {
        skip_inline_ws();
        if (!eof() && (peek() == '"' || peek() == '\'')) return string_value();
        std::string k;
        while (!eof() && key_char(peek())) k += get();
        if (k.empty()) fail("expected a key");
        return k;
    }

    table* open_table(table& root) {
        get(); // [
        table* t = &root;
        for (;;) {
            std::string part = bare_key();
            auto it = t->find(part);
            if (it == t->end()) {
                value v;
                v.v = table{};
                it = t->emplace(part, std::move(v)).first;
            } else if (!it->second.is_table()) {
                fail("'" + part + "' is not a table");
            }
            t = &std::get<table>(it->second.v);
            skip_inline_ws();
            if (!eof() && peek() == '.') {
                get();
                continue;
            }
            break;
        }
        if (eof() || peek() != ']') fail("expected ']'");
        get();
        return t;
    }

    std::pair<std::string, value> key_value() {
        std::string key = bare_key();
        skip_inline_ws();
        if (eof() || peek() != '=') fail("expected '=' after key '" + key + "'");
        get();
        skip_inline_ws();
        return {key, parse_value()};
    }

    value parse_value() {
        if (eof()) fail("expected a value");
        char c = peek();
        if (c == '"' || c == '\'') return value{string_value()};
        if (c == '[') return value{array_value()};
        std::string word;
        while (!eof() && peek() != '\n' && peek() != '\r' && peek() != ',' && peek() != ']' &&
               peek() != '#' && peek() != ' ' && peek() != '\t')
            word += get();
        if (word == "true") return value{true};
        if (word == "false") return value{false};
        double d = 0.0;
        auto res = std::from_chars(word.data(), word.data() + word.size(), d);
        if (res.ec != std::errc() || res.ptr != word.data() + word.size())
            fail("cannot parse value '" + word + "'");
        return value{d};
    }

    std::string string_value() {
        char quote = get();
        std::string out;
        for (;;) {
            if (eof()) fail("unterminated string");
            char c = get();
            if (c == quote) return out;
            if (c == '\n') fail("newline inside string");
            if (quote == '"' && c == '\\') {
                if (eof()) fail("dangling escape");
                char e = get();
                switch (e) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case 'r': out += '\r'; break;
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                default: fail(std::string("unsupported escape '\\") + e + "'");
                }
            } else {
                out += c;
            }
        }
    }

    array array_value() {
        get(); // [
        array a;
        for (;;) {
            skip_blank();
            if (eof()) fail("unterminated array");
            if (peek() == ']') {
                get();
                return a;
            }
            a.push_back(parse_value());
            skip_blank();
            if (!eof() && peek() == ',') {
                get();
                continue;
            }
            skip_blank();
            if (eof() || peek() != ']') fail("expected ',' or ']' in array");
        }
    }

    const std::string& s_;
    std::size_t i_ = 0;
    int line_ = 1, col_ = 1;
};

} // namespace

table parse(const std::string& text) { return reader(text).parse(); }

} // namespace sublab::toml
