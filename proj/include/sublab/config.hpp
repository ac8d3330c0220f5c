#pragma once

#include "sublab/toml.hpp"
#include "sublab/zoo.hpp"

namespace sublab {

struct inline_chart_def {
    std::vector<std::string> coords;
    std::vector<std::pair<double, double>> box;
    std::vector<std::string> exclude; // in-domain iff each expression > 0
    std::vector<std::vector<std::string>> metric;
};

struct inline_model_def {
    std::string kind; // "submersion" or "map"
    inline_chart_def total;   // the domain chart (total space for submersions)
    inline_chart_def base;    // codomain
    std::vector<std::string> map_comps;
};

struct run_config {
    std::optional<model_spec> zoo;
    std::optional<inline_model_def> inline_def;
    const_map constants;
    classify_config run;
    std::optional<std::string> eigenfunction; // enables the Obata residual pass
    std::optional<std::string> out_json, out_csv;
    bool timestamp = true;
};

// Exactly one of [model] (zoo) / [inline] must be present; throws
// config_error on schema violations.
run_config config_from_toml(const std::string& text);
run_config config_from_file(const std::string& path);

built_model build_from_config(const run_config& cfg); // throws build_error

} // namespace sublab
