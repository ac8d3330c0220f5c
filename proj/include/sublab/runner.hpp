#pragma once

#include "sublab/config.hpp"
#include "sublab/report.hpp"
#include "sublab/validate.hpp"

namespace sublab {

// Build the configured model, classify, run the applicable residual passes,
// assemble the report. Deterministic given the seed.
run_report run_check(const run_config& cfg);

// classification only, at explicitly given points (CLI tension/bitension)
std::vector<point_record> evaluate_points(const built_model& bm, std::span<const point> pts,
                                          const std::optional<einstein_data>& ed);

} // namespace sublab
