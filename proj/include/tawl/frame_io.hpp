#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tawl/raster.hpp"

namespace tawl {

namespace fs = std::filesystem;

// Frame rate as an exact rational.
struct Fps {
  std::int64_t num = 30;
  std::int64_t den = 1;

  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Fps&, const Fps&) = default;
};

struct VideoMeta {
  Fps fps;
  int width = 0;
  int height = 0;
  int frame_count = 0;

  friend bool operator==(const VideoMeta&, const VideoMeta&) = default;
};

enum class ImageFormat { Png, Pnm };

inline constexpr const char* kMetaFileName = "meta.txt";

// key=value lines: fps_num, fps_den, width, height, frame_count.
VideoMeta read_meta(const fs::path& path);
void write_meta(const fs::path& path, const VideoMeta& meta);
void validate(const VideoMeta& meta);

// Decodes .png, .pgm or .ppm by extension.
Frame read_frame(const fs::path& path);
// Encodes by extension: .png, or .pgm/.ppm (binary P5/P6).
void write_frame(const fs::path& path, const Frame& frame);

// "frame_000042.png" etc. Index is 6-digit zero padded.
std::string indexed_name(const std::string& prefix, std::size_t index, const std::string& ext);
// ".png" or ".pgm"/".ppm" depending on channel count.
std::string extension_for(ImageFormat format, int channels);

// BT.601 weights with round-half-up, computed in exact integer arithmetic.
inline std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
  const unsigned weighted = 299u * r + 587u * g + 114u * b;  // thousandths
  return static_cast<std::uint8_t>((weighted + 500u) / 1000u);
}

Frame rgb_to_luma(const Frame& frame);

// ClassMap raster encoding: Background 0, Rain 128, Object 255.
std::uint8_t encode_label(Label label) noexcept;
Label decode_label(std::uint8_t value);

void write_classmap(const ClassMap& map, const fs::path& path);
ClassMap read_classmap(const fs::path& path);

// Binary masks on disk are single-channel 0/255 rasters; any nonzero reads as 1.
void write_mask(const BinaryMask& mask, const fs::path& path);
BinaryMask read_mask(const fs::path& path);
BinaryMask to_mask(const Frame& frame);

// Streams a frame directory one frame at a time. The directory listing is
// checked up front for a contiguous index range matching the meta file;
// frames are decoded lazily by next().
class SequenceReader {
 public:
  explicit SequenceReader(const fs::path& directory, const std::string& prefix = "frame");
  SequenceReader(const fs::path& directory, const fs::path& meta_file,
                 const std::string& prefix = "frame");

  const VideoMeta& meta() const noexcept { return meta_; }
  const fs::path& directory() const noexcept { return directory_; }
  std::size_t position() const noexcept { return next_; }
  // Channel count of the frames read so far (0 before the first frame).
  int channels() const noexcept { return channels_; }
  // ImageFormat of the first file in the sequence.
  ImageFormat format() const noexcept { return format_; }

  std::optional<Frame> next();

 private:
  fs::path directory_;
  std::string prefix_;
  VideoMeta meta_;
  std::vector<fs::path> files_;
  ImageFormat format_ = ImageFormat::Png;
  std::size_t next_ = 0;
  int channels_ = 0;
};

struct Sequence {
  std::vector<Frame> frames;
  VideoMeta meta;
};

Sequence load_sequence(const fs::path& directory, const fs::path& meta_file,
                       const std::string& prefix = "frame");
Sequence load_sequence(const fs::path& directory, const std::string& prefix = "frame");

// Writes frames as prefix_%06d.<ext> plus meta.txt.
void write_sequence(const fs::path& directory, const std::vector<Frame>& frames, const Fps& fps,
                    ImageFormat format, const std::string& prefix = "frame");

}  // namespace tawl
