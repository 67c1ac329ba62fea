#pragma once

// Size-level construction shared by all_values and the enumerator.

#include <functional>
#include <vector>

#include "liasynth/datatypes.hpp"

namespace liasynth::detail {

using LevelLookup = std::function<const std::vector<DtValue>&(int dt, std::size_t size)>;

/// Values of `dt` with exactly `size` non-nullary constructors, built from
/// smaller levels: constructor order, then child-size compositions in
/// lexicographic order, then the product of child lists (first child slowest).
std::vector<DtValue> build_level(const DatatypeFamily& fam, int dt, std::size_t size,
                                 const LevelLookup& lookup);

}  // namespace liasynth::detail
