#pragma once

#include <nlohmann/json_fwd.hpp>

#include "sublab/submersion.hpp"

namespace sublab {

struct suite_result {
    std::string name;
    bool pass = false;
    double worst = 0.0;
    std::string detail;
};

struct obata_summary {
    std::string eigenfunction;
    double worst_base = 0.0, worst_eigres = 0.0, worst_jres = 0.0, worst_r1 = 0.0, worst_r2 = 0.0;
    int points = 0;
};

// The self-contained run artifact: verdict is recomputable from the records
// and tolerances alone.
struct run_report {
    std::string model_id;
    std::map<std::string, double> params;
    std::map<std::string, std::string> expr_params;
    bool is_submersion = false;
    classification_report cls;
    std::optional<obata_summary> obata;
    std::vector<suite_result> suites;
    std::string timestamp; // empty = suppressed
};

std::string report_to_json(const run_report& r);
std::string report_to_csv(const run_report& r);
run_report report_from_json(const std::string& text);

// recompute the verdict from records + tolerances; used on reload
verdict verdict_from_records(const classification_report& c);

// write-then-rename so readers never see a torn file
void write_atomic(const std::string& path, const std::string& content);

std::string iso_timestamp();

} // namespace sublab
