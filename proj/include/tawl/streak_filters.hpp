#pragma once

#include <cstdint>

#include "tawl/raster.hpp"

namespace tawl {

// Longest horizontal rain run is w_max - 1; w_max = max(1, round_half_up(frac * width)).
int width_threshold(int frame_width, double width_frac = 0.05);

// Location radius scaled from a base radius defined at 320 px width.
int location_radius(int frame_width, int base_radius = 3, int base_width = 320);

// Relabels every maximal horizontal Rain run of length >= w_max as Object.
ClassMap width_filter(ClassMap map, int w_max);

struct ComponentLabels {
  Raster<std::int32_t> ids;  // 0 for unset pixels, 1..count otherwise
  std::int32_t count = 0;
};

// 8-connected labelling. Ids are assigned in raster order of each
// component's first pixel.
ComponentLabels connected_components(const BinaryMask& mask);

// Pixels within Chebyshev distance `radius` of a set pixel.
BinaryMask chebyshev_dilate(const BinaryMask& mask, int radius);

// Relabels as Object every 8-connected Rain component that comes within
// Chebyshev distance `radius` of an Object pixel.
ClassMap location_filter(ClassMap map, int radius);

BinaryMask label_mask(const ClassMap& map, Label label);

}  // namespace tawl
