#include "tawl/detection.hpp"

#include <cmath>
#include <cstdlib>

namespace tawl {

long round_half_up(double x) noexcept { return static_cast<long>(std::floor(x + 0.5)); }

Thresholds derive_thresholds(const Fps& fps, const DetectionConfig& config) {
  if (fps.num <= 0 || fps.den <= 0) throw ConfigError("fps must be positive");
  if (!(config.duration_frac > 0.0 && config.duration_frac < 1.0)) {
    throw ConfigError("duration fraction must be in (0,1)");
  }
  if (!(config.window_frac > 0.0)) throw ConfigError("window fraction must be positive");
  if (config.tau < 0 || config.tau > 255) throw ConfigError("tau must be in [0,255]");

  const double rate = fps.value();
  Thresholds t;
  t.tau = config.tau;
  t.duration = static_cast<int>(std::max(1L, round_half_up(config.duration_frac * rate)));
  t.window = static_cast<int>(
      std::max(static_cast<long>(t.duration) + 1, round_half_up(config.window_frac * rate)));
  return t;
}

BinaryMask extract_foreground(const Frame& luma, const Frame& background, int tau) {
  if (!luma.same_shape(background) || luma.channels() != 1) {
    throw ShapeError("extract_foreground needs matching single-channel frame and background");
  }
  BinaryMask mask(luma.width(), luma.height());
  const auto a = luma.samples();
  const auto b = background.samples();
  auto out = mask.samples();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::abs(static_cast<int>(a[i]) - static_cast<int>(b[i])) > tau ? 1 : 0;
  }
  return mask;
}

TemporalAppearance::TemporalAppearance(int width, int height, int window)
    : width_(width), height_(height), window_(window), counts_(width, height) {
  if (window < 1) throw ConfigError("appearance window must be at least 1");
  words_per_mask_ = (counts_.pixel_count() + 63) / 64;
  ring_.assign(words_per_mask_ * static_cast<std::size_t>(window), 0);
}

const TAMask& TemporalAppearance::update(const BinaryMask& foreground) {
  if (foreground.width() != width_ || foreground.height() != height_) {
    throw ShapeError("appearance mask size mismatch");
  }
  const auto bits = foreground.samples();
  auto counts = counts_.samples();
  std::uint64_t* slot = ring_.data() + head_ * words_per_mask_;
  const bool evicting = retained_ == static_cast<std::size_t>(window_);

  for (std::size_t w = 0; w < words_per_mask_; ++w) {
    const std::uint64_t old_word = evicting ? slot[w] : 0;
    std::uint64_t new_word = 0;
    const std::size_t base = w * 64;
    const std::size_t n = std::min<std::size_t>(64, bits.size() - base);
    for (std::size_t k = 0; k < n; ++k) {
      const std::uint64_t bit = bits[base + k] ? 1 : 0;
      new_word |= bit << k;
      counts[base + k] = static_cast<std::uint16_t>(counts[base + k] + bit - ((old_word >> k) & 1));
    }
    slot[w] = new_word;
  }

  head_ = (head_ + 1) % static_cast<std::size_t>(window_);
  if (!evicting) ++retained_;
  return counts_;
}

BinaryMask TemporalAppearance::retained_mask(std::size_t age) const {
  if (age >= retained_) throw InvariantError("retained_mask age out of range");
  const std::size_t w = static_cast<std::size_t>(window_);
  const std::size_t slot = (head_ + w - retained_ + age) % w;
  const std::uint64_t* words = ring_.data() + slot * words_per_mask_;
  BinaryMask mask(width_, height_);
  auto out = mask.samples();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (words[i / 64] >> (i % 64)) & 1;
  return mask;
}

ClassMap classify(const TAMask& appearance, const BinaryMask& foreground, int duration) {
  require_same_size(appearance, foreground, "classify");
  if (duration < 1) throw ConfigError("duration threshold must be at least 1");
  ClassMap map(foreground.width(), foreground.height());
  const auto m = appearance.samples();
  const auto f = foreground.samples();
  auto out = map.samples();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!f[i]) {
      out[i] = Label::Background;
    } else {
      out[i] = m[i] > duration ? Label::Object : Label::Rain;
    }
  }
  return map;
}

}  // namespace tawl
