#include "tawl/rain_synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "tawl/detection.hpp"

namespace tawl {

void validate(const RainParams& p) {
  if (p.streaks_per_frame < 0) throw ConfigError("streaks_per_frame must be >= 0");
  if (!(p.length_mean > 0.0)) throw ConfigError("length_mean must be > 0");
  if (p.length_std < 0.0) throw ConfigError("length_std must be >= 0");
  if (p.angle_deg < 0.0 || p.angle_deg > 45.0) throw ConfigError("angle_deg must be in [0,45]");
  if (p.streak_width < 1 || p.streak_width > 3) throw ConfigError("streak_width must be in [1,3]");
  if (p.brightness_delta < 0 || p.brightness_delta > 255) {
    throw ConfigError("brightness_delta must be in [0,255]");
  }
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t frame_index) noexcept {
  return mix64(seed ^ mix64(frame_index + 0x9E3779B97F4A7C15ull));
}

double SynthRng::uniform() noexcept {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

int SynthRng::uniform_int(int bound) noexcept {
  return std::min(bound - 1, static_cast<int>(uniform() * bound));
}

double SynthRng::normal() noexcept {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

BinaryMask rain_streaks(int width, int height, const RainParams& params,
                        std::uint64_t frame_index) {
  validate(params);
  BinaryMask mask(width, height);
  SynthRng rng(sub_seed(params.rng_seed, frame_index));
  const double max_angle = params.angle_deg * std::numbers::pi / 180.0;

  for (int s = 0; s < params.streaks_per_frame; ++s) {
    const int x0 = rng.uniform_int(width);
    const int y0 = rng.uniform_int(height);
    const double z = rng.normal();
    const double theta = (2.0 * rng.uniform() - 1.0) * max_angle;
    const long length = std::max(1L, round_half_up(params.length_mean + params.length_std * z));

    // Integer line stepping from the origin; y grows downward. The streak
    // spans `length` pixels along its major (vertical) axis.
    const long span = length - 1;
    const int dx = static_cast<int>(round_half_up(static_cast<double>(span) * std::sin(theta)));
    const int dy = static_cast<int>(round_half_up(static_cast<double>(span) * std::cos(theta)));
    const int adx = std::abs(dx);
    const int ady = std::abs(dy);
    const int sx = dx < 0 ? -1 : 1;
    int err = adx - ady;
    int x = x0;
    int y = y0;
    for (;;) {
      for (int k = 0; k < params.streak_width; ++k) {
        const int px = x + k;
        if (px >= 0 && px < width && y >= 0 && y < height) mask(px, y) = 1;
      }
      if (x == x0 + dx && y == y0 + dy) break;
      const int e2 = 2 * err;
      if (e2 >= -ady) {
        err -= ady;
        x += sx;
      }
      if (e2 <= adx) {
        err += adx;
        y += 1;
      }
    }
  }
  return mask;
}

RainyFrame add_rain(const Frame& frame, const RainParams& params, std::uint64_t frame_index) {
  RainyFrame result{frame, rain_streaks(frame.width(), frame.height(), params, frame_index)};
  const auto c = static_cast<std::size_t>(frame.channels());
  const auto bits = result.rain.samples();
  auto data = result.frame.samples();
  for (std::size_t p = 0; p < bits.size(); ++p) {
    if (!bits[p]) continue;
    for (std::size_t k = 0; k < c; ++k) {
      data[p * c + k] = static_cast<std::uint8_t>(
          std::min(255, static_cast<int>(data[p * c + k]) + params.brightness_delta));
    }
  }
  return result;
}

// --- scene -----------------------------------------------------------------

namespace {

int reflect(long position, int limit) {
  if (limit <= 0) return 0;
  const long period = 2L * limit;
  long r = position % period;
  if (r < 0) r += period;
  return static_cast<int>(r <= limit ? r : period - r);
}

int texture(std::uint64_t seed, int x, int y, int c, int amplitude) {
  const std::uint64_t h = mix64(seed ^ mix64((static_cast<std::uint64_t>(y) << 32) ^
                                             (static_cast<std::uint64_t>(x) << 2) ^
                                             static_cast<std::uint64_t>(c)));
  return static_cast<int>(h % static_cast<std::uint64_t>(2 * amplitude + 1)) - amplitude;
}

std::uint8_t clamp8(int v) { return static_cast<std::uint8_t>(std::clamp(v, 0, 255)); }

}  // namespace

Scene::Scene(const SceneConfig& config) : config_(config) {
  if (config.width < 1 || config.height < 1) throw ConfigError("scene dimensions must be positive");
  if (config.frame_count < 1) throw ConfigError("scene needs at least one frame");
  if (config.channels != 1 && config.channels != 3) throw ConfigError("scene channels must be 1 or 3");
  if (config.fps.num <= 0 || config.fps.den <= 0) throw ConfigError("scene fps must be positive");

  if (config.object) {
    const MovingObject& o = *config.object;
    if (o.width < 1 || o.height < 1) throw ConfigError("object size must be positive");
    if (o.x < 0 || o.y < 0 || o.x + o.width > config.width || o.y + o.height > config.height) {
      throw ConfigError("object starts outside the frame");
    }
    if (!o.bounce) {
      const long last = config.frame_count - 1;
      const long x_end = o.x + o.vx * last;
      const long y_end = o.y + o.vy * last;
      if (x_end < 0 || y_end < 0 || x_end + o.width > config.width ||
          y_end + o.height > config.height) {
        throw ConfigError("object leaves the frame before the last frame");
      }
    }
  }

  // Smooth per-channel gradients plus static +-10 texture noise.
  backdrop_ = Frame(config.width, config.height, config.channels);
  const double w = config.width;
  const double h = config.height;
  for (int y = 0; y < config.height; ++y) {
    for (int x = 0; x < config.width; ++x) {
      const double fx = x / w;
      const double fy = y / h;
      const int base[3] = {static_cast<int>(110 + 50 * fx), static_cast<int>(120 + 40 * fy),
                           static_cast<int>(100 + 30 * (fx + fy))};
      if (config.channels == 3) {
        for (int c = 0; c < 3; ++c) backdrop_(x, y, c) = clamp8(base[c] + texture(config.seed, x, y, c, 10));
      } else {
        const int grey = (base[0] + base[1] + base[2]) / 3;
        backdrop_(x, y) = clamp8(grey + texture(config.seed, x, y, 0, 10));
      }
    }
  }
}

std::array<int, 2> Scene::object_position(std::size_t index) const {
  if (!config_.object) throw ConfigError("scene has no object");
  const MovingObject& o = *config_.object;
  const long t = static_cast<long>(index);
  const long x = o.x + static_cast<long>(o.vx) * t;
  const long y = o.y + static_cast<long>(o.vy) * t;
  if (o.bounce) {
    return {reflect(x, config_.width - o.width), reflect(y, config_.height - o.height)};
  }
  return {static_cast<int>(x), static_cast<int>(y)};
}

Frame Scene::frame(std::size_t index) const {
  Frame frame = backdrop_;
  if (!config_.object) return frame;
  const MovingObject& o = *config_.object;
  const auto [ox, oy] = object_position(index);
  const std::uint64_t object_seed = mix64(config_.seed + 1);
  for (int y = 0; y < o.height; ++y) {
    for (int x = 0; x < o.width; ++x) {
      if (config_.channels == 3) {
        for (int c = 0; c < 3; ++c) {
          frame(ox + x, oy + y, c) = clamp8(o.color[c] + texture(object_seed, x, y, c, 6));
        }
      } else {
        const int grey = luma(o.color[0], o.color[1], o.color[2]);
        frame(ox + x, oy + y) = clamp8(grey + texture(object_seed, x, y, 0, 6));
      }
    }
  }
  return frame;
}

BinaryMask Scene::object_mask(std::size_t index) const {
  BinaryMask mask(config_.width, config_.height);
  if (!config_.object) return mask;
  const MovingObject& o = *config_.object;
  const auto [ox, oy] = object_position(index);
  for (int y = 0; y < o.height; ++y) {
    for (int x = 0; x < o.width; ++x) mask(ox + x, oy + y) = 1;
  }
  return mask;
}

SceneSequence make_scene(const SceneConfig& config) {
  const Scene scene(config);
  SceneSequence seq;
  seq.clean.reserve(static_cast<std::size_t>(config.frame_count));
  seq.object_masks.reserve(static_cast<std::size_t>(config.frame_count));
  for (int i = 0; i < config.frame_count; ++i) {
    seq.clean.push_back(scene.frame(static_cast<std::size_t>(i)));
    seq.object_masks.push_back(scene.object_mask(static_cast<std::size_t>(i)));
  }
  return seq;
}

// --- JSON ------------------------------------------------------------------

void to_json(nlohmann::json& j, const RainParams& p) {
  j = {{"streaks_per_frame", p.streaks_per_frame}, {"length_mean", p.length_mean},
       {"length_std", p.length_std},               {"angle_deg", p.angle_deg},
       {"streak_width", p.streak_width},           {"brightness_delta", p.brightness_delta},
       {"rng_seed", p.rng_seed}};
}

namespace {

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> keys,
                    const char* where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : keys) known = known || item.key() == k;
    if (!known) throw ConfigError("unknown key '" + item.key() + "' in " + where);
  }
}

}  // namespace

void from_json(const nlohmann::json& j, RainParams& p) {
  reject_unknown(j,
                 {"streaks_per_frame", "length_mean", "length_std", "angle_deg", "streak_width",
                  "brightness_delta", "rng_seed"},
                 "rain");
  p.streaks_per_frame = j.value("streaks_per_frame", p.streaks_per_frame);
  p.length_mean = j.value("length_mean", p.length_mean);
  p.length_std = j.value("length_std", p.length_std);
  p.angle_deg = j.value("angle_deg", p.angle_deg);
  p.streak_width = j.value("streak_width", p.streak_width);
  p.brightness_delta = j.value("brightness_delta", p.brightness_delta);
  p.rng_seed = j.value("rng_seed", p.rng_seed);
}

void to_json(nlohmann::json& j, const SynthConfig& c) {
  const SceneConfig& s = c.scene;
  nlohmann::json scene = {{"width", s.width},     {"height", s.height},   {"frames", s.frame_count},
                          {"fps_num", s.fps.num}, {"fps_den", s.fps.den}, {"channels", s.channels},
                          {"seed", s.seed}};
  if (s.object) {
    const MovingObject& o = *s.object;
    scene["object"] = {{"x", o.x},   {"y", o.y},   {"width", o.width}, {"height", o.height},
                       {"vx", o.vx}, {"vy", o.vy}, {"color", o.color}, {"bounce", o.bounce}};
  } else {
    scene["object"] = nullptr;
  }
  j = {{"scene", scene},
       {"rain", c.rain},
       {"format", c.format == ImageFormat::Png ? "png" : "pnm"}};
}

void from_json(const nlohmann::json& j, SynthConfig& c) {
  reject_unknown(j, {"scene", "rain", "format"}, "config");
  if (j.contains("scene")) {
    const auto& s = j.at("scene");
    reject_unknown(s, {"width", "height", "frames", "fps_num", "fps_den", "channels", "seed", "object"},
                   "scene");
    SceneConfig& sc = c.scene;
    sc.width = s.value("width", sc.width);
    sc.height = s.value("height", sc.height);
    sc.frame_count = s.value("frames", sc.frame_count);
    sc.fps.num = s.value("fps_num", sc.fps.num);
    sc.fps.den = s.value("fps_den", sc.fps.den);
    sc.channels = s.value("channels", sc.channels);
    sc.seed = s.value("seed", sc.seed);
    if (s.contains("object")) {
      if (s.at("object").is_null()) {
        sc.object.reset();
      } else {
        const auto& oj = s.at("object");
        reject_unknown(oj, {"x", "y", "width", "height", "vx", "vy", "color", "bounce"}, "object");
        MovingObject o = sc.object.value_or(MovingObject{});
        o.x = oj.value("x", o.x);
        o.y = oj.value("y", o.y);
        o.width = oj.value("width", o.width);
        o.height = oj.value("height", o.height);
        o.vx = oj.value("vx", o.vx);
        o.vy = oj.value("vy", o.vy);
        o.color = oj.value("color", o.color);
        o.bounce = oj.value("bounce", o.bounce);
        sc.object = o;
      }
    }
  }
  if (j.contains("rain")) from_json(j.at("rain"), c.rain);
  const std::string format = j.value("format", std::string("png"));
  if (format == "png") {
    c.format = ImageFormat::Png;
  } else if (format == "pnm") {
    c.format = ImageFormat::Pnm;
  } else {
    throw ConfigError("format must be png or pnm");
  }
}

SynthConfig read_synth_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  SynthConfig config;
  try {
    from_json(nlohmann::json::parse(in), config);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  validate(config.rain);
  return config;
}

void write_synthetic_dataset(const SynthConfig& config, const fs::path& directory) {
  validate(config.rain);
  const Scene scene(config.scene);
  const SceneConfig& sc = config.scene;
  const char* subdirs[] = {"clean", "rainy", "truth_rain", "truth_object"};
  for (const char* sub : subdirs) {
    std::error_code ec;
    fs::create_directories(directory / sub, ec);
    if (ec) throw WriteError("cannot create " + (directory / sub).string() + ": " + ec.message());
  }
  const std::string frame_ext = extension_for(config.format, sc.channels);
  const std::string mask_ext = extension_for(config.format, 1);
  for (int i = 0; i < sc.frame_count; ++i) {
    const auto index = static_cast<std::size_t>(i);
    const Frame clean = scene.frame(index);
    const RainyFrame rainy = add_rain(clean, config.rain, index);
    write_frame(directory / "clean" / indexed_name("frame", index, frame_ext), clean);
    write_frame(directory / "rainy" / indexed_name("frame", index, frame_ext), rainy.frame);
    write_mask(rainy.rain, directory / "truth_rain" / indexed_name("frame", index, mask_ext));
    write_mask(scene.object_mask(index),
               directory / "truth_object" / indexed_name("frame", index, mask_ext));
  }
  const VideoMeta meta{sc.fps, sc.width, sc.height, sc.frame_count};
  for (const char* sub : subdirs) write_meta(directory / sub / kMetaFileName, meta);
  std::ofstream json_out(directory / "config.json");
  json_out << nlohmann::json(config).dump(2) << '\n';
}

}  // namespace tawl
