#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tawl/memory.hpp"
#include "tawl/raster.hpp"

namespace tawl {

enum class BackgroundKind { TemporalMedian, GaussianMixture };

BackgroundKind parse_background_kind(const std::string& name);  // "median" | "mog"
const char* to_string(BackgroundKind kind);

struct BackgroundConfig {
  BackgroundKind kind = BackgroundKind::TemporalMedian;
  // Temporal median window K (frames).
  int window = 31;
  // Gaussian mixture parameters, in 8-bit intensity units.
  int max_components = 3;
  double learning_rate = 0.01;
  double initial_variance = 225.0;
  double variance_floor = 4.0;
  double match_sigmas = 2.5;
};

// Causal per-sample background estimator. Each channel of the input is
// modelled independently, so the same estimator serves the luma plane and
// the colour companion used for compositing.
class BackgroundModel {
 public:
  virtual ~BackgroundModel() = default;

  // Folds `frame` into the model and returns the estimate for that frame.
  // The estimate depends only on frames supplied so far.
  virtual const Frame& update(const Frame& frame) = 0;
  virtual const Frame& estimate() const noexcept = 0;
  virtual BackgroundKind kind() const noexcept = 0;

  std::size_t frames_seen() const noexcept { return frames_seen_; }

 protected:
  void check_shape(const Frame& frame, const Frame& reference) const;
  std::size_t frames_seen_ = 0;
};

// Ring buffer of the last K frames; output is the lower median
// (order statistic floor((L-1)/2) of the L buffered values) per sample.
// The median is maintained incrementally: each sample keeps the number of
// buffered values below and at-or-below its current median, and only rescans
// its window when the median has to move to a neighbouring value.
class TemporalMedianBackground final : public BackgroundModel {
 public:
  TemporalMedianBackground(const Frame& first_frame, int window);

  const Frame& update(const Frame& frame) override;
  const Frame& estimate() const noexcept override { return estimate_; }
  BackgroundKind kind() const noexcept override { return BackgroundKind::TemporalMedian; }

  int window() const noexcept { return window_; }
  std::size_t buffered() const noexcept { return count_; }
  // age 0 is the oldest buffered frame, buffered()-1 the newest.
  const Frame& buffered_frame(std::size_t age) const;

 private:
  template <typename Count>
  void advance(std::vector<Count, memory::TrackedAllocator<Count>>& below,
               std::vector<Count, memory::TrackedAllocator<Count>>& upto, const Frame& frame,
               bool full);

  int window_;
  std::vector<Frame> ring_;
  std::size_t head_ = 0;  // slot receiving the next frame
  std::size_t count_ = 0;
  Frame estimate_;
  // One pair is used: 8-bit counters while K fits, 16-bit beyond.
  std::vector<std::uint8_t, memory::TrackedAllocator<std::uint8_t>> below8_, upto8_;
  std::vector<std::uint16_t, memory::TrackedAllocator<std::uint16_t>> below16_, upto16_;
};

struct MixtureComponent {
  double mean = 0.0;
  double variance = 0.0;
  double weight = 0.0;
};

// Stauffer-Grimson style mixture per sample. Components of a sample are kept
// ordered by descending weight; the estimate is the (rounded) mean of the
// heaviest one.
class GaussianMixtureBackground final : public BackgroundModel {
 public:
  GaussianMixtureBackground(const Frame& first_frame, const BackgroundConfig& config);

  const Frame& update(const Frame& frame) override;
  const Frame& estimate() const noexcept override { return estimate_; }
  BackgroundKind kind() const noexcept override { return BackgroundKind::GaussianMixture; }

  std::span<const MixtureComponent> components(std::size_t sample) const noexcept;

 private:
  BackgroundConfig config_;
  std::size_t stride_;
  std::vector<MixtureComponent> components_;
  std::vector<std::uint8_t> active_;
  Frame estimate_;
};

// Builds the estimator from its first frame.
std::unique_ptr<BackgroundModel> make_background(const Frame& first_frame,
                                                 const BackgroundConfig& config);

// Lower median of each sample position across `planes` (all of equal length),
// written to `out`.
void lower_median(std::span<const std::span<const std::uint8_t>> planes,
                  std::span<std::uint8_t> out);

}  // namespace tawl
