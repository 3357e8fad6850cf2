#include "tawl/pipeline.hpp"

#include <ostream>

#include "tawl/compositor.hpp"
#include "tawl/streak_filters.hpp"

namespace tawl {

namespace {

template <typename Fn>
auto run_stage(std::size_t frame_index, const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(e, frame_index, stage);
  }
}

}  // namespace

void validate(const PipelineConfig& c) {
  if (c.tau < 0 || c.tau > 255) throw ConfigError("tau must be in [0,255]");
  auto fraction = [](double v, const char* name) {
    if (!(v > 0.0 && v < 1.0)) throw ConfigError(std::string(name) + " must be in (0,1)");
  };
  fraction(c.duration_frac, "duration fraction");
  fraction(c.window_frac, "window fraction");
  fraction(c.width_frac, "width fraction");
  if (c.loc_radius_base < 1) throw ConfigError("location radius must be at least 1");
}

Pipeline::Pipeline(int width, int height, int channels, const Fps& fps,
                   const PipelineConfig& config)
    : config_(config),
      width_(width),
      height_(height),
      channels_(channels),
      thresholds_((validate(config),
                   derive_thresholds(fps, {config.tau, config.duration_frac, config.window_frac}))),
      width_limit_(width_threshold(width, config.width_frac)),
      location_radius_(tawl::location_radius(width, config.loc_radius_base)),
      appearance_(width, height, thresholds_.window) {
  if (channels != 1 && channels != 3) throw ChannelError("pipeline input must have 1 or 3 channels");
  background_config_.kind = config.bg_kind;
  background_config_.window = 2 * thresholds_.window + 1;
}

StepResult Pipeline::step(const Frame& frame) {
  const std::size_t n = cursor_;
  if (frame.width() != width_ || frame.height() != height_ || frame.channels() != channels_) {
    throw StageError(ShapeError("frame is " + std::to_string(frame.width()) + "x" +
                                std::to_string(frame.height()) + "x" +
                                std::to_string(frame.channels()) + ", pipeline expects " +
                                std::to_string(width_) + "x" + std::to_string(height_) + "x" +
                                std::to_string(channels_)),
                     n, "input");
  }

  StepResult result;
  result.index = n;
  result.warmup = n < static_cast<std::size_t>(thresholds_.window);

  std::optional<Frame> converted;
  if (channels_ == 3) converted = run_stage(n, "rgb_to_luma", [&] { return rgb_to_luma(frame); });
  const Frame& luma = converted ? *converted : frame;

  const Frame* luma_bg = nullptr;
  const Frame* color_bg = nullptr;
  run_stage(n, "bg_update", [&] {
    if (!luma_background_) {
      luma_background_ = make_background(luma, background_config_);
      if (channels_ == 3) color_background_ = make_background(frame, background_config_);
      luma_bg = &luma_background_->estimate();
      color_bg = color_background_ ? &color_background_->estimate() : luma_bg;
    } else {
      luma_bg = &luma_background_->update(luma);
      color_bg = color_background_ ? &color_background_->update(frame) : luma_bg;
    }
    return 0;
  });

  result.foreground = run_stage(n, "extract_foreground",
                                [&] { return extract_foreground(luma, *luma_bg, thresholds_.tau); });
  const TAMask& counts =
      run_stage(n, "ta_update", [&]() -> const TAMask& { return appearance_.update(result.foreground); });
  ++cursor_;

  if (result.warmup) {
    result.output = frame;
    result.classes = ClassMap(width_, height_, 1, Label::Background);
    if (config_.capture_stages) {
      result.stages = StageCapture{*luma_bg, counts, result.classes, result.classes};
    }
    result.background = *color_bg;
    return result;
  }

  ClassMap temporal =
      run_stage(n, "classify", [&] { return classify(counts, result.foreground, thresholds_.duration); });
  if (config_.capture_stages) result.stages = StageCapture{*luma_bg, counts, temporal, {}};
  ClassMap widened = run_stage(n, "width_filter", [&] { return width_filter(std::move(temporal), width_limit_); });
  if (result.stages) result.stages->after_width = widened;
  result.classes = run_stage(n, "location_filter",
                             [&] { return location_filter(std::move(widened), location_radius_); });
  result.output = run_stage(n, "compose", [&] { return compose(frame, *color_bg, result.classes); });
  result.background = *color_bg;
  return result;
}

// --- drivers ---------------------------------------------------------------

namespace {

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw WriteError("cannot create " + dir.string() + ": " + ec.message());
}

Frame scaled_counts(const TAMask& counts, int window) {
  Frame out(counts.width(), counts.height(), 1);
  const auto src = counts.samples();
  auto dst = out.samples();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = static_cast<std::uint8_t>(std::min(255, src[i] * 255 / window));
  }
  return out;
}

}  // namespace

DerainSummary run_derain(const DerainOptions& options) {
  const bool any_truth = options.truth_clean || options.truth_rain || options.truth_object ||
                         options.report;
  const bool all_truth = options.truth_clean && options.truth_rain && options.truth_object &&
                         options.report;
  if (any_truth && !all_truth) {
    throw ConfigError("--truth-clean, --truth-rain, --truth-object and --report go together");
  }

  SequenceReader input(options.input);
  const VideoMeta& meta = input.meta();

  std::optional<SequenceReader> clean, rain, object;
  if (all_truth) {
    clean.emplace(*options.truth_clean);
    rain.emplace(*options.truth_rain);
    object.emplace(*options.truth_object);
    for (const SequenceReader* r : {&*clean, &*rain, &*object}) {
      if (r->meta().frame_count != meta.frame_count || r->meta().width != meta.width ||
          r->meta().height != meta.height) {
        throw MetaError(r->directory().string() + " does not match the input sequence");
      }
    }
  }

  ensure_directory(options.output);

  PipelineConfig config = options.pipeline;
  config.capture_stages = config.capture_stages || options.dump_masks;

  std::optional<Pipeline> pipeline;
  DerainSummary summary;
  std::vector<FrameScore> scores;
  std::string out_ext;

  while (auto frame = input.next()) {
    if (!pipeline) {
      pipeline.emplace(meta.width, meta.height, frame->channels(), meta.fps, config);
      out_ext = extension_for(input.format(), frame->channels());
      summary.thresholds = pipeline->thresholds();
      summary.median_window = pipeline->median_window();
      summary.width_limit = pipeline->width_limit();
      summary.location_radius = pipeline->location_radius();
    }
    StepResult step = pipeline->step(*frame);
    const std::size_t n = step.index;
    run_stage(n, "write_output", [&] {
      write_frame(options.output / indexed_name("out", n, out_ext), step.output);
      if (options.dump_masks && step.stages) {
        write_classmap(step.classes, options.output / indexed_name("mask", n, ".pgm"));
        write_classmap(step.stages->after_width, options.output / indexed_name("mask_w", n, ".pgm"));
        write_classmap(step.classes, options.output / indexed_name("mask_l", n, ".pgm"));
        write_mask(step.foreground, options.output / indexed_name("fg", n, ".pgm"));
        write_frame(options.output / indexed_name("ta", n, ".pgm"),
                    scaled_counts(step.stages->appearance, summary.thresholds.window));
        write_frame(options.output / indexed_name("bg", n, ".png"), step.background);
      }
      return 0;
    });

    if (all_truth) {
      FrameScore score = run_stage(n, "metrics", [&] {
        const auto clean_frame = clean->next();
        const auto rain_frame = rain->next();
        const auto object_frame = object->next();
        if (!clean_frame || !rain_frame || !object_frame) {
          throw SequenceGapError("truth sequence ended early");
        }
        const MaskScores ms = mask_scores(step.classes, to_mask(*rain_frame), to_mask(*object_frame));
        return FrameScore{n, psnr(*frame, *clean_frame), psnr(step.output, *clean_frame),
                          ms.rain_recall, ms.rain_precision, ms.object_recall};
      });
      if (options.verbose) {
        *options.verbose << "frame " << n << ": psnr_in=" << score.psnr_input_db
                         << " psnr_out=" << score.psnr_output_db
                         << " rain_recall=" << score.rain_recall
                         << " rain_precision=" << score.rain_precision
                         << " object_recall=" << score.object_recall << '\n';
      }
      scores.push_back(score);
    }
    ++summary.frames;
  }

  write_meta(options.output / kMetaFileName, meta);
  if (all_truth) {
    write_report(scores, *options.report);
    summary.average = mean_score(scores);
  }
  return summary;
}

std::string detect_prefix(const fs::path& directory) {
  for (const char* ext : {".png", ".pgm", ".ppm"}) {
    if (fs::exists(directory / indexed_name("frame", 0, ext))) return "frame";
  }
  return "out";
}

std::vector<PsnrRow> run_psnr(const fs::path& a, const fs::path& b,
                              const std::optional<fs::path>& report) {
  SequenceReader ra(a, detect_prefix(a));
  SequenceReader rb(b, detect_prefix(b));
  if (ra.meta().frame_count != rb.meta().frame_count) {
    throw MetaError("sequences differ in length: " + std::to_string(ra.meta().frame_count) +
                    " vs " + std::to_string(rb.meta().frame_count));
  }
  std::vector<PsnrRow> rows;
  while (auto fa = ra.next()) {
    auto fb = rb.next();
    if (!fb) throw SequenceGapError(b.string() + " ended early");
    rows.push_back({rows.size(), psnr(*fa, *fb)});
  }
  if (report) write_psnr_report(rows, *report);
  return rows;
}

}  // namespace tawl
