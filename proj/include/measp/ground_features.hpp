#pragma once

#include "measp/features.hpp"
#include "measp/ground_program.hpp"

namespace measp {

// The ground-52 vector: ten rule/atom counts, eight rule ratios, two size
// ratios, the 28 pairwise products of the rule ratios and four composites.
// Any zero denominator yields 0.
FeatureVector extract_ground(const GroundProgram& program);

}  // namespace measp
