#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <optional>

#include "tawl/background.hpp"
#include "tawl/detection.hpp"
#include "tawl/frame_io.hpp"
#include "tawl/metrics.hpp"
#include "tawl/raster.hpp"

namespace tawl {

struct PipelineConfig {
  int tau = 20;
  double duration_frac = 0.25;
  double window_frac = 0.5;
  double width_frac = 0.05;
  int loc_radius_base = 3;  // at 320 px frame width
  BackgroundKind bg_kind = BackgroundKind::TemporalMedian;
  // Keep per-stage intermediates in StepResult (debug dumps, tests).
  bool capture_stages = false;
};

void validate(const PipelineConfig& config);

struct StageCapture {
  Frame luma_background;
  TAMask appearance;
  ClassMap temporal;     // straight out of classify
  ClassMap after_width;  // after width_filter
};

struct StepResult {
  std::size_t index = 0;
  bool warmup = false;
  Frame output;
  ClassMap classes;
  BinaryMask foreground;
  Frame background;  // colour (or grey) background used for compositing
  std::optional<StageCapture> stages;
};

// Frame-by-frame deraining state. Each step runs, in order: luma conversion,
// background update, foreground extraction, appearance update, classification,
// width filter, location filter, compositing. The first m frames pass through
// unchanged while the models fill.
class Pipeline {
 public:
  Pipeline(int width, int height, int channels, const Fps& fps, const PipelineConfig& config);

  StepResult step(const Frame& frame);

  const Thresholds& thresholds() const noexcept { return thresholds_; }
  int width_limit() const noexcept { return width_limit_; }
  int location_radius() const noexcept { return location_radius_; }
  int median_window() const noexcept { return background_config_.window; }
  int warmup_frames() const noexcept { return thresholds_.window; }
  std::size_t cursor() const noexcept { return cursor_; }

 private:
  PipelineConfig config_;
  int width_;
  int height_;
  int channels_;
  Thresholds thresholds_;
  BackgroundConfig background_config_;
  int width_limit_;
  int location_radius_;
  std::unique_ptr<BackgroundModel> luma_background_;
  std::unique_ptr<BackgroundModel> color_background_;  // null for greyscale input
  TemporalAppearance appearance_;
  std::size_t cursor_ = 0;
};

struct DerainOptions {
  fs::path input;
  fs::path output;
  PipelineConfig pipeline;
  bool dump_masks = false;
  std::optional<fs::path> truth_clean;
  std::optional<fs::path> truth_rain;
  std::optional<fs::path> truth_object;
  std::optional<fs::path> report;
  std::ostream* verbose = nullptr;  // per-frame scores
};

struct DerainSummary {
  std::size_t frames = 0;
  Thresholds thresholds;
  int median_window = 0;
  int width_limit = 0;
  int location_radius = 0;
  std::optional<FrameScore> average;
};

// Streams the input directory through the pipeline, writing out_%06d.<ext>
// (same format as the input) and optional dumps and report.
DerainSummary run_derain(const DerainOptions& options);

// Per-frame PSNR between two sequence directories (frame_* or out_* files).
std::vector<PsnrRow> run_psnr(const fs::path& a, const fs::path& b,
                              const std::optional<fs::path>& report);

// Frame file prefix used in a directory: "frame" if frame_000000.* exists,
// otherwise "out".
std::string detect_prefix(const fs::path& directory);

}  // namespace tawl
