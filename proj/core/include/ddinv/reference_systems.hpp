#pragma once

#include <string_view>

#include "ddinv/lti.hpp"

namespace ddinv::systems {

// Fixed two-input, two-output, four-state test plants that differ only in
// their invariant zeros. Each factory re-derives the zeros and checks
// minimality before returning, so a bad edit to the matrices fails loudly.

/// Invariant zeros {0.7, 0.8}.
lti::StateSpaceModel stable_zeros_system();

/// No invariant zeros (strongly observable).
lti::StateSpaceModel no_zeros_system();

/// Invariant zero at 1.25.
lti::StateSpaceModel unstable_zero_system();

enum class ReferenceSystem { StableZeros, NoZeros, UnstableZero };

lti::StateSpaceModel make(ReferenceSystem which);
std::string_view name(ReferenceSystem which);

}  // namespace ddinv::systems
