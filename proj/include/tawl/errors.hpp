#pragma once

#include <stdexcept>
#include <string>

namespace tawl {

// Coarse category, used by the CLI to pick an exit code.
enum class ErrorKind { Config, Input, Internal };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define TAWL_DEFINE_ERROR(Name, Kind)                                              \
  class Name : public Error {                                                      \
   public:                                                                         \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {}       \
  }

TAWL_DEFINE_ERROR(ConfigError, Config);
TAWL_DEFINE_ERROR(MetaError, Input);
TAWL_DEFINE_ERROR(SequenceGapError, Input);
TAWL_DEFINE_ERROR(ShapeError, Input);
TAWL_DEFINE_ERROR(ChannelError, Input);
TAWL_DEFINE_ERROR(ReadError, Input);
TAWL_DEFINE_ERROR(FormatError, Input);
TAWL_DEFINE_ERROR(WriteError, Input);
TAWL_DEFINE_ERROR(InvariantError, Internal);

#undef TAWL_DEFINE_ERROR

// Raised by the streaming driver; keeps the kind of the underlying error and
// prefixes the message with the frame index and pipeline stage.
class StageError : public Error {
 public:
  StageError(const Error& cause, std::size_t frame_index, const std::string& stage)
      : Error(cause.kind(), "frame " + std::to_string(frame_index) + ", stage " + stage + ": " +
                                cause.what()),
        frame_index_(frame_index),
        stage_(stage) {}

  std::size_t frame_index() const noexcept { return frame_index_; }
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::size_t frame_index_;
  std::string stage_;
};

}  // namespace tawl
