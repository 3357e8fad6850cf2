#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "json.hpp"

#include "tawl/frame_io.hpp"
#include "tawl/raster.hpp"

namespace tawl {

struct RainParams {
  int streaks_per_frame = 40;
  double length_mean = 12.0;  // pixels
  double length_std = 3.0;
  double angle_deg = 10.0;    // streak angle drawn uniformly in [-angle_deg, +angle_deg] from vertical
  int streak_width = 1;       // horizontal thickness, 1..3
  int brightness_delta = 80;  // added to touched pixels, saturating at 255
  std::uint64_t rng_seed = 1;
};

void validate(const RainParams& params);

// splitmix64 finaliser.
std::uint64_t mix64(std::uint64_t x) noexcept;
// Per-frame seed: mix64(seed ^ mix64(frame_index + 0x9E3779B97F4A7C15)).
std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t frame_index) noexcept;

// Portable variates on top of mt19937_64 (the standard distributions are
// implementation-defined, which would break cross-platform reproducibility).
class SynthRng {
 public:
  explicit SynthRng(std::uint64_t seed) : engine_(seed) {}
  double uniform() noexcept;                      // [0, 1)
  int uniform_int(int bound) noexcept;            // [0, bound)
  double normal() noexcept;                       // Box-Muller, one variate per call

 private:
  std::mt19937_64 engine_;
};

// Pixels covered by the streaks of one frame.
BinaryMask rain_streaks(int width, int height, const RainParams& params,
                        std::uint64_t frame_index);

struct RainyFrame {
  Frame frame;
  BinaryMask rain;
};

RainyFrame add_rain(const Frame& frame, const RainParams& params, std::uint64_t frame_index);

struct MovingObject {
  int x = 20;
  int y = 100;
  int width = 40;
  int height = 40;
  int vx = 2;
  int vy = 0;
  std::array<std::uint8_t, 3> color{40, 40, 180};
  // Reflect off the frame edges instead of leaving the frame.
  bool bounce = true;
};

struct SceneConfig {
  int width = 320;
  int height = 240;
  int frame_count = 150;
  Fps fps{32, 1};
  int channels = 3;
  std::uint64_t seed = 7;
  std::optional<MovingObject> object = MovingObject{};
};

// Static textured backdrop plus one scripted rectangle.
class Scene {
 public:
  explicit Scene(const SceneConfig& config);

  const SceneConfig& config() const noexcept { return config_; }
  const Frame& backdrop() const noexcept { return backdrop_; }
  // Top-left corner of the object at frame `index`.
  std::array<int, 2> object_position(std::size_t index) const;

  Frame frame(std::size_t index) const;
  BinaryMask object_mask(std::size_t index) const;

 private:
  SceneConfig config_;
  Frame backdrop_;
};

struct SceneSequence {
  std::vector<Frame> clean;
  std::vector<BinaryMask> object_masks;
};

SceneSequence make_scene(const SceneConfig& config);

struct SynthConfig {
  SceneConfig scene;
  RainParams rain;
  ImageFormat format = ImageFormat::Png;
};

void to_json(nlohmann::json& j, const RainParams& p);
void from_json(const nlohmann::json& j, RainParams& p);
void to_json(nlohmann::json& j, const SynthConfig& c);
void from_json(const nlohmann::json& j, SynthConfig& c);

SynthConfig read_synth_config(const fs::path& path);

// Writes clean/, rainy/, truth_rain/ and truth_object/ under `directory`,
// each with its own meta.txt. Frames are produced one at a time.
void write_synthetic_dataset(const SynthConfig& config, const fs::path& directory);

}  // namespace tawl
