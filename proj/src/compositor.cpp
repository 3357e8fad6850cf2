#include "tawl/compositor.hpp"

#include <algorithm>

namespace tawl {

Frame compose(const Frame& input, const Frame& background, const ClassMap& map) {
  if (!input.same_shape(background)) throw ShapeError("compose: input and background differ");
  require_same_size(input, map, "compose");

  Frame out = background;
  const auto c = static_cast<std::size_t>(input.channels());
  const auto labels = map.samples();
  const auto src = input.samples();
  auto dst = out.samples();
  for (std::size_t p = 0; p < labels.size(); ++p) {
    if (labels[p] == Label::Object) {
      std::copy_n(src.begin() + p * c, c, dst.begin() + p * c);
    }
  }
  return out;
}

}  // namespace tawl
