#pragma once

#include <cstdint>
#include <vector>

#include "tawl/frame_io.hpp"
#include "tawl/raster.hpp"

namespace tawl {

struct DetectionConfig {
  int tau = 20;                 // intensity threshold on |I - B|
  double duration_frac = 0.25;  // duration threshold as a fraction of fps
  double window_frac = 0.5;     // appearance window as a fraction of fps
};

struct Thresholds {
  int tau = 20;
  int duration = 1;  // d: max appearance count still considered rain
  int window = 2;    // m: frames retained by the appearance window
};

// floor(x + 0.5)
long round_half_up(double x) noexcept;

// d = max(1, round_half_up(duration_frac * fps)), m = max(d + 1, round_half_up(window_frac * fps)).
Thresholds derive_thresholds(const Fps& fps, const DetectionConfig& config = {});

// 1 where |luma - background| > tau.
BinaryMask extract_foreground(const Frame& luma, const Frame& background, int tau);

// Sliding count of foreground hits over the last m masks, updated
// incrementally. The ring is stored bit-packed.
class TemporalAppearance {
 public:
  TemporalAppearance(int width, int height, int window);

  const TAMask& update(const BinaryMask& foreground);
  const TAMask& counts() const noexcept { return counts_; }

  int window() const noexcept { return window_; }
  std::size_t retained() const noexcept { return retained_; }
  // age 0 is the oldest retained mask.
  BinaryMask retained_mask(std::size_t age) const;

 private:
  int width_;
  int height_;
  int window_;
  std::size_t words_per_mask_;
  std::vector<std::uint64_t, memory::TrackedAllocator<std::uint64_t>> ring_;
  std::size_t head_ = 0;
  std::size_t retained_ = 0;
  TAMask counts_;
};

// Background where the current mask is 0; otherwise Object if the appearance
// count exceeds `duration`, else Rain.
ClassMap classify(const TAMask& appearance, const BinaryMask& foreground, int duration);

}  // namespace tawl
