#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "sublab/errors.hpp"

namespace sublab::toml {

// The subset of TOML the run config needs: [table.headers], bare keys,
// strings, numbers, booleans, arrays (nestable), # comments.
struct value;
using array = std::vector<value>;
using table = std::map<std::string, value>;

struct value {
    std::variant<std::string, double, bool, array, table> v;

    bool is_string() const { return std::holds_alternative<std::string>(v); }
    bool is_number() const { return std::holds_alternative<double>(v); }
    bool is_bool() const { return std::holds_alternative<bool>(v); }
    bool is_array() const { return std::holds_alternative<array>(v); }
    bool is_table() const { return std::holds_alternative<table>(v); }
    const std::string& as_string() const;
    double as_number() const;
    bool as_bool() const;
    const array& as_array() const;
    const table& as_table() const;
};

// Throws config_error with line:column on malformed input.
table parse(const std::string& text);

const value* find(const table& t, const std::string& key);

} // namespace sublab::toml
