#pragma once

#include "sublab/report.hpp"
#include "sublab/zoo.hpp"

namespace sublab {

// The zoo instances every cross-model suite runs over.
std::vector<model_spec> validation_zoo_submersions();
std::vector<model_spec> validation_zoo_metrics(); // single-manifold + total-space metrics

// Runs every module invariant suite on the zoo; failures are data, not
// errors. Includes the Eq (3.22)/(3.24) sign-resolution finding.
std::vector<suite_result> self_validate(std::uint64_t seed = 20250801);

bool all_pass(const std::vector<suite_result>& suites);

} // namespace sublab
