#pragma once

#include "measp/features.hpp"
#include "measp/nonground_program.hpp"

namespace measp {

// The nonground-11 vector. n_scc uses the full dependency graph, n_hcf_components
// the SCCs of its positive part; is_stratified is 1 for the empty program.
FeatureVector extract_nonground(const NonGroundProgram& program);

}  // namespace measp
