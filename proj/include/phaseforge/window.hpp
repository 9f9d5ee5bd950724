#pragma once

#include "phaseforge/group.hpp"

#include <cstdint>
#include <vector>

namespace phaseforge {

// Finite lens onto an infinite group. Lattice: every free coordinate in
// [-N, N], all torsion combinations. Q+: numerator and denominator <= N.
struct ObservationWindow {
  std::int64_t bound = 1;
};

// Canonically ordered (compare_elements) enumeration of the window.
std::vector<GroupElement> enumerate_window(const GroupSpec& spec, const ObservationWindow& window);

bool window_contains(const GroupSpec& spec, const ObservationWindow& window, const GroupElement& x);

}  // namespace phaseforge
