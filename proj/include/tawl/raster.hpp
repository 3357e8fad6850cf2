#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tawl/errors.hpp"
#include "tawl/memory.hpp"

namespace tawl {

// Row-major raster with interleaved channels: sample (x, y, c) lives at
// (y * width + x) * channels + c.
template <typename T>
class Raster {
 public:
  using value_type = T;
  using Storage = std::vector<T, memory::TrackedAllocator<T>>;

  Raster() = default;

  Raster(int width, int height, int channels = 1, T fill = T{})
      : width_(width), height_(height), channels_(channels) {
    if (width < 1 || height < 1) {
      throw ShapeError("raster dimensions must be positive, got " + std::to_string(width) + "x" +
                       std::to_string(height));
    }
    if (channels < 1) throw ChannelError("raster needs at least one channel");
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(width_) * height_; }
  std::size_t size() const noexcept { return data_.size(); }

  T& operator()(int x, int y, int c = 0) noexcept { return data_[index(x, y, c)]; }
  const T& operator()(int x, int y, int c = 0) const noexcept { return data_[index(x, y, c)]; }

  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }

  std::span<T> samples() noexcept { return {data_.data(), data_.size()}; }
  std::span<const T> samples() const noexcept { return {data_.data(), data_.size()}; }

  std::span<T> row(int y) noexcept {
    return samples().subspan(static_cast<std::size_t>(y) * width_ * channels_,
                             static_cast<std::size_t>(width_) * channels_);
  }
  std::span<const T> row(int y) const noexcept {
    return samples().subspan(static_cast<std::size_t>(y) * width_ * channels_,
                             static_cast<std::size_t>(width_) * channels_);
  }

  void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

  template <typename U>
  bool same_size(const Raster<U>& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }
  template <typename U>
  bool same_shape(const Raster<U>& other) const noexcept {
    return same_size(other) && channels_ == other.channels();
  }

  friend bool operator==(const Raster& a, const Raster& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.channels_ == b.channels_ &&
           a.data_ == b.data_;
  }

 private:
  std::size_t index(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  Storage data_;
};

// 8-bit image, 1 (luma) or 3 (RGB) channels.
class Frame : public Raster<std::uint8_t> {
 public:
  Frame() = default;
  Frame(int width, int height, int channels = 1, std::uint8_t fill = 0)
      : Raster(width, height, channels, fill) {
    if (channels != 1 && channels != 3) {
      throw ChannelError("frame must have 1 or 3 channels, got " + std::to_string(channels));
    }
  }
};

// Single-channel {0,1} raster.
class BinaryMask : public Raster<std::uint8_t> {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height, std::uint8_t fill = 0) : Raster(width, height, 1, fill) {}

  std::size_t count() const {
    std::size_t n = 0;
    for (auto v : samples()) n += v;
    return n;
  }
};

// Per-pixel foreground hit count over the temporal-appearance window.
using TAMask = Raster<std::uint16_t>;

enum class Label : std::uint8_t { Background = 0, Rain = 1, Object = 2 };

using ClassMap = Raster<Label>;

inline const char* to_string(Label label) {
  switch (label) {
    case Label::Background: return "background";
    case Label::Rain: return "rain";
    case Label::Object: return "object";
  }
  return "?";
}

template <typename A, typename B>
void require_same_size(const Raster<A>& a, const Raster<B>& b, const char* what) {
  if (!a.same_size(b)) {
    throw ShapeError(std::string(what) + ": size mismatch " + std::to_string(a.width()) + "x" +
                     std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                     std::to_string(b.height()));
  }
}

}  // namespace tawl
