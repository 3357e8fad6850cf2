#pragma once

#include "tawl/raster.hpp"

namespace tawl {

// Rain-free frame: Background and Rain pixels come from `background`,
// Object pixels from `input`. No blending.
Frame compose(const Frame& input, const Frame& background, const ClassMap& map);

}  // namespace tawl
