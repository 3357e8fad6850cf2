#include "tawl/streak_filters.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "tawl/detection.hpp"

namespace tawl {

int width_threshold(int frame_width, double width_frac) {
  if (frame_width < 1) throw ShapeError("frame width must be positive");
  if (!(width_frac > 0.0 && width_frac < 1.0)) throw ConfigError("width fraction must be in (0,1)");
  return static_cast<int>(std::max(1L, round_half_up(width_frac * frame_width)));
}

int location_radius(int frame_width, int base_radius, int base_width) {
  if (base_radius < 1) throw ConfigError("location radius must be at least 1");
  if (frame_width < 1 || base_width < 1) throw ShapeError("frame width must be positive");
  const double scaled = static_cast<double>(base_radius) * frame_width / base_width;
  return static_cast<int>(std::max(1L, round_half_up(scaled)));
}

ClassMap width_filter(ClassMap map, int w_max) {
  if (w_max < 1) throw ConfigError("width threshold must be at least 1");
  for (int y = 0; y < map.height(); ++y) {
    auto row = map.row(y);
    const int width = map.width();
    int x = 0;
    while (x < width) {
      if (row[x] != Label::Rain) {
        ++x;
        continue;
      }
      int end = x;
      while (end < width && row[end] == Label::Rain) ++end;
      if (end - x >= w_max) std::fill(row.begin() + x, row.begin() + end, Label::Object);
      x = end;
    }
  }
  return map;
}

BinaryMask label_mask(const ClassMap& map, Label label) {
  BinaryMask mask(map.width(), map.height());
  const auto src = map.samples();
  auto dst = mask.samples();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] == label ? 1 : 0;
  return mask;
}

namespace {

std::int32_t find_root(std::vector<std::int32_t>& parent, std::int32_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

void unite(std::vector<std::int32_t>& parent, std::int32_t a, std::int32_t b) {
  a = find_root(parent, a);
  b = find_root(parent, b);
  if (a == b) return;
  if (a < b) std::swap(a, b);
  parent[a] = b;
}

}  // namespace

ComponentLabels connected_components(const BinaryMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  ComponentLabels result{Raster<std::int32_t>(w, h), 0};
  auto& ids = result.ids;
  std::vector<std::int32_t> parent{0};

  // First pass: provisional labels, merging with W, NW, N, NE neighbours.
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask(x, y)) continue;
      std::int32_t label = 0;
      auto join = [&](int nx, int ny) {
        if (nx < 0 || nx >= w || ny < 0) return;
        const std::int32_t other = ids(nx, ny);
        if (other == 0) return;
        if (label == 0) {
          label = other;
        } else {
          unite(parent, label, other);
        }
      };
      join(x - 1, y);
      join(x - 1, y - 1);
      join(x, y - 1);
      join(x + 1, y - 1);
      if (label == 0) {
        label = static_cast<std::int32_t>(parent.size());
        parent.push_back(label);
      }
      ids(x, y) = label;
    }
  }

  // Second pass: compact ids in order of first appearance.
  std::vector<std::int32_t> final_id(parent.size(), 0);
  for (auto& id : ids.samples()) {
    if (id == 0) continue;
    const std::int32_t root = find_root(parent, id);
    if (final_id[root] == 0) final_id[root] = ++result.count;
    id = final_id[root];
  }
  return result;
}

BinaryMask chebyshev_dilate(const BinaryMask& mask, int radius) {
  if (radius < 0) throw ConfigError("dilation radius must be non-negative");
  const int w = mask.width();
  const int h = mask.height();
  // Separable: a square structuring element is a row pass then a column pass.
  // Each pass tracks the distance to the most recent set pixel on either side.
  BinaryMask rows(w, h);
  for (int y = 0; y < h; ++y) {
    int last = -radius - 1;
    for (int x = 0; x < w; ++x) {
      if (mask(x, y)) last = x;
      if (x - last <= radius) rows(x, y) = 1;
    }
    last = w + radius + 1;
    for (int x = w - 1; x >= 0; --x) {
      if (mask(x, y)) last = x;
      if (last - x <= radius) rows(x, y) = 1;
    }
  }
  BinaryMask out(w, h);
  for (int x = 0; x < w; ++x) {
    int last = -radius - 1;
    for (int y = 0; y < h; ++y) {
      if (rows(x, y)) last = y;
      if (y - last <= radius) out(x, y) = 1;
    }
    last = h + radius + 1;
    for (int y = h - 1; y >= 0; --y) {
      if (rows(x, y)) last = y;
      if (last - y <= radius) out(x, y) = 1;
    }
  }
  return out;
}

ClassMap location_filter(ClassMap map, int radius) {
  if (radius < 1) throw ConfigError("location radius must be at least 1");
  const BinaryMask near_object = chebyshev_dilate(label_mask(map, Label::Object), radius);
  const ComponentLabels rain = connected_components(label_mask(map, Label::Rain));
  if (rain.count == 0) return map;

  std::vector<std::uint8_t> touches(static_cast<std::size_t>(rain.count) + 1, 0);
  const auto ids = rain.ids.samples();
  const auto near = near_object.samples();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] != 0 && near[i]) touches[ids[i]] = 1;
  }
  auto labels = map.samples();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (touches[ids[i]]) labels[i] = Label::Object;
  }
  return map;
}

}  // namespace tawl
