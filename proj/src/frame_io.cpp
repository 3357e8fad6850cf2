#include "tawl/frame_io.hpp"

#include <png.h>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

namespace tawl {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::int64_t parse_int(const std::string& key, const std::string& text, const fs::path& path) {
  std::int64_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw MetaError(path.string() + ": value of '" + key + "' is not an integer: '" + text + "'");
  }
  return value;
}

std::string lower_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

// --- PNM -------------------------------------------------------------------

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string pnm_token(std::istream& in) {
  std::string token;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(static_cast<char>(c));
  }
  return token;
}

Frame read_pnm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ReadError("cannot open " + path.string());
  const std::string magic = pnm_token(in);
  int channels = 0;
  if (magic == "P5") {
    channels = 1;
  } else if (magic == "P6") {
    channels = 3;
  } else {
    throw FormatError(path.string() + ": unsupported PNM magic '" + magic + "'");
  }
  int width = 0, height = 0, maxval = 0;
  try {
    width = std::stoi(pnm_token(in));
    height = std::stoi(pnm_token(in));
    maxval = std::stoi(pnm_token(in));
  } catch (const std::exception&) {
    throw FormatError(path.string() + ": malformed PNM header");
  }
  if (maxval != 255) throw FormatError(path.string() + ": only 8-bit PNM is supported");
  Frame frame(width, height, channels);
  auto data = frame.samples();
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (in.gcount() != static_cast<std::streamsize>(data.size())) {
    throw FormatError(path.string() + ": truncated PNM payload");
  }
  return frame;
}

void write_pnm(const fs::path& path, const Frame& frame) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw WriteError("cannot open " + path.string() + " for writing");
  out << (frame.channels() == 1 ? "P5" : "P6") << '\n'
      << frame.width() << ' ' << frame.height() << "\n255\n";
  const auto data = frame.samples();
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw WriteError("failed writing " + path.string());
}

// --- PNG -------------------------------------------------------------------

Frame read_png(const fs::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw ReadError(path.string() + ": " + image.message);
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  Frame frame(static_cast<int>(image.width), static_cast<int>(image.height), color ? 3 : 1);
  if (!png_image_finish_read(&image, nullptr, frame.samples().data(), 0, nullptr)) {
    const std::string message = image.message;
    png_image_free(&image);
    throw FormatError(path.string() + ": " + message);
  }
  return frame;
}

void write_png(const fs::path& path, const Frame& frame) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(frame.width());
  image.height = static_cast<png_uint_32>(frame.height());
  image.format = frame.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, frame.samples().data(), 0, nullptr)) {
    throw WriteError(path.string() + ": " + image.message);
  }
}

}  // namespace

// --- meta ------------------------------------------------------------------

void validate(const VideoMeta& meta) {
  if (meta.fps.num <= 0 || meta.fps.den <= 0) throw MetaError("fps must be positive");
  if (meta.width < 1 || meta.height < 1) throw MetaError("frame dimensions must be positive");
  if (meta.frame_count < 1) throw MetaError("frame_count must be at least 1");
}

VideoMeta read_meta(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw MetaError("cannot read meta file " + path.string());
  std::map<std::string, std::string> entries;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw MetaError(path.string() + ": malformed line '" + line + "'");
    entries[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  auto get = [&](const char* key) {
    const auto it = entries.find(key);
    if (it == entries.end()) throw MetaError(path.string() + ": missing key '" + key + "'");
    return parse_int(key, it->second, path);
  };
  VideoMeta meta;
  meta.fps = {get("fps_num"), get("fps_den")};
  meta.width = static_cast<int>(get("width"));
  meta.height = static_cast<int>(get("height"));
  meta.frame_count = static_cast<int>(get("frame_count"));
  validate(meta);
  return meta;
}

void write_meta(const fs::path& path, const VideoMeta& meta) {
  std::ofstream out(path);
  if (!out) throw WriteError("cannot open " + path.string() + " for writing");
  out << "fps_num=" << meta.fps.num << '\n'
      << "fps_den=" << meta.fps.den << '\n'
      << "width=" << meta.width << '\n'
      << "height=" << meta.height << '\n'
      << "frame_count=" << meta.frame_count << '\n';
  if (!out) throw WriteError("failed writing " + path.string());
}

// --- frames ----------------------------------------------------------------

Frame read_frame(const fs::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".png") return read_png(path);
  if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") return read_pnm(path);
  throw FormatError(path.string() + ": unsupported extension");
}

void write_frame(const fs::path& path, const Frame& frame) {
  const std::string ext = lower_extension(path);
  if (ext == ".png") {
    write_png(path, frame);
  } else if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") {
    write_pnm(path, frame);
  } else {
    throw WriteError(path.string() + ": unsupported extension");
  }
}

std::string indexed_name(const std::string& prefix, std::size_t index, const std::string& ext) {
  char digits[32];
  std::snprintf(digits, sizeof digits, "%06zu", index);
  return prefix + "_" + digits + ext;
}

std::string extension_for(ImageFormat format, int channels) {
  if (format == ImageFormat::Png) return ".png";
  return channels == 3 ? ".ppm" : ".pgm";
}

Frame rgb_to_luma(const Frame& frame) {
  if (frame.channels() != 3) {
    throw ChannelError("rgb_to_luma expects 3 channels, got " + std::to_string(frame.channels()));
  }
  Frame out(frame.width(), frame.height(), 1);
  const auto src = frame.samples();
  auto dst = out.samples();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = luma(src[3 * i], src[3 * i + 1], src[3 * i + 2]);
  }
  return out;
}

// --- class maps and masks --------------------------------------------------

std::uint8_t encode_label(Label label) noexcept {
  switch (label) {
    case Label::Background: return 0;
    case Label::Rain: return 128;
    case Label::Object: return 255;
  }
  return 0;
}

Label decode_label(std::uint8_t value) {
  switch (value) {
    case 0: return Label::Background;
    case 128: return Label::Rain;
    case 255: return Label::Object;
    default: throw FormatError("invalid class map value " + std::to_string(value));
  }
}

void write_classmap(const ClassMap& map, const fs::path& path) {
  Frame raster(map.width(), map.height(), 1);
  auto dst = raster.samples();
  const auto src = map.samples();
  std::transform(src.begin(), src.end(), dst.begin(), encode_label);
  write_frame(path, raster);
}

ClassMap read_classmap(const fs::path& path) {
  const Frame raster = read_frame(path);
  if (raster.channels() != 1) throw ChannelError(path.string() + ": class map must be greyscale");
  ClassMap map(raster.width(), raster.height());
  std::transform(raster.samples().begin(), raster.samples().end(), map.samples().begin(),
                 decode_label);
  return map;
}

void write_mask(const BinaryMask& mask, const fs::path& path) {
  Frame raster(mask.width(), mask.height(), 1);
  auto dst = raster.samples();
  const auto src = mask.samples();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] ? 255 : 0;
  write_frame(path, raster);
}

BinaryMask to_mask(const Frame& frame) {
  BinaryMask mask(frame.width(), frame.height());
  const auto src = frame.samples();
  auto dst = mask.samples();
  const auto c = static_cast<std::size_t>(frame.channels());
  for (std::size_t i = 0; i < dst.size(); ++i) {
    bool on = false;
    for (std::size_t k = 0; k < c; ++k) on = on || src[i * c + k] != 0;
    dst[i] = on ? 1 : 0;
  }
  return mask;
}

BinaryMask read_mask(const fs::path& path) { return to_mask(read_frame(path)); }

// --- sequences -------------------------------------------------------------

SequenceReader::SequenceReader(const fs::path& directory, const std::string& prefix)
    : SequenceReader(directory, directory / kMetaFileName, prefix) {}

SequenceReader::SequenceReader(const fs::path& directory, const fs::path& meta_file,
                               const std::string& prefix)
    : directory_(directory), prefix_(prefix) {
  std::error_code ec;
  if (!fs::is_directory(directory_, ec)) {
    throw MetaError("input directory " + directory_.string() + " does not exist");
  }
  meta_ = read_meta(meta_file);

  const std::regex pattern(prefix_ + R"(_(\d{6})\.(png|pgm|ppm))");
  std::map<std::size_t, fs::path> found;
  for (const auto& entry : fs::directory_iterator(directory_)) {
    const std::string name = entry.path().filename().string();
    std::smatch match;
    if (!std::regex_match(name, match, pattern)) continue;
    const std::size_t index = std::stoul(match[1].str());
    if (!found.emplace(index, entry.path()).second) {
      throw MetaError(directory_.string() + ": index " + std::to_string(index) +
                      " present in more than one format");
    }
  }

  const auto expected = static_cast<std::size_t>(meta_.frame_count);
  for (std::size_t i = 0; i < expected; ++i) {
    const auto it = found.find(i);
    if (it == found.end()) {
      throw SequenceGapError(directory_.string() + ": missing " +
                             indexed_name(prefix_, i, ".*") + " (meta declares " +
                             std::to_string(expected) + " frames)");
    }
    files_.push_back(it->second);
  }
  if (found.size() != expected) {
    throw MetaError(directory_.string() + ": " + std::to_string(found.size()) +
                    " frames on disk but meta declares " + std::to_string(expected));
  }
  format_ = lower_extension(files_.front()) == ".png" ? ImageFormat::Png : ImageFormat::Pnm;
}

std::optional<Frame> SequenceReader::next() {
  if (next_ >= files_.size()) return std::nullopt;
  Frame frame = read_frame(files_[next_]);
  if (frame.width() != meta_.width || frame.height() != meta_.height) {
    throw ShapeError(files_[next_].string() + ": " + std::to_string(frame.width()) + "x" +
                     std::to_string(frame.height()) + " but meta declares " +
                     std::to_string(meta_.width) + "x" + std::to_string(meta_.height));
  }
  if (channels_ == 0) {
    channels_ = frame.channels();
  } else if (frame.channels() != channels_) {
    throw ShapeError(files_[next_].string() + ": channel count changed from " +
                     std::to_string(channels_) + " to " + std::to_string(frame.channels()));
  }
  ++next_;
  return frame;
}

Sequence load_sequence(const fs::path& directory, const fs::path& meta_file,
                       const std::string& prefix) {
  SequenceReader reader(directory, meta_file, prefix);
  Sequence seq;
  seq.meta = reader.meta();
  seq.frames.reserve(static_cast<std::size_t>(seq.meta.frame_count));
  while (auto frame = reader.next()) seq.frames.push_back(std::move(*frame));
  return seq;
}

Sequence load_sequence(const fs::path& directory, const std::string& prefix) {
  return load_sequence(directory, directory / kMetaFileName, prefix);
}

void write_sequence(const fs::path& directory, const std::vector<Frame>& frames, const Fps& fps,
                    ImageFormat format, const std::string& prefix) {
  if (frames.empty()) throw WriteError("refusing to write an empty sequence");
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw WriteError("cannot create " + directory.string() + ": " + ec.message());
  const Frame& first = frames.front();
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (!frames[i].same_shape(first)) {
      throw ShapeError("frame " + std::to_string(i) + " differs in shape from frame 0");
    }
    write_frame(directory / indexed_name(prefix, i, extension_for(format, first.channels())),
                frames[i]);
  }
  write_meta(directory / kMetaFileName,
             VideoMeta{fps, first.width(), first.height(), static_cast<int>(frames.size())});
}

}  // namespace tawl
