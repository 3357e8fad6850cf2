#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tawl/frame_io.hpp"
#include "tawl/raster.hpp"

namespace tawl {

// Reported for identical frames (zero MSE).
inline constexpr double kIdenticalPsnrDb = 100.0;

// 10 log10(255^2 / MSE), MSE over all pixels and channels jointly.
double psnr(const Frame& a, const Frame& b);

struct MaskScores {
  double rain_recall = 1.0;
  double rain_precision = 1.0;
  double object_recall = 1.0;
};

// Empty denominators score 1.
MaskScores mask_scores(const ClassMap& predicted, const BinaryMask& truth_rain,
                       const BinaryMask& truth_object);

// Object recall restricted to truth-object pixels that were also detected as
// foreground: |Object & truth & F| / |truth & F|, 1 when the denominator is empty.
double detected_object_recall(const ClassMap& predicted, const BinaryMask& truth_object,
                              const BinaryMask& foreground);

struct FrameScore {
  std::size_t frame_index = 0;
  double psnr_input_db = 0.0;
  double psnr_output_db = 0.0;
  double rain_recall = 0.0;
  double rain_precision = 0.0;
  double object_recall = 0.0;
};

FrameScore mean_score(const std::vector<FrameScore>& scores);

inline constexpr const char* kReportHeader =
    "frame,psnr_input_db,psnr_output_db,rain_recall,rain_precision,object_recall";

std::string format_report(const std::vector<FrameScore>& scores);
void write_report(const std::vector<FrameScore>& scores, const fs::path& path);

struct Report {
  std::vector<FrameScore> rows;
  FrameScore average;
};

Report read_report(const fs::path& path);

struct PsnrRow {
  std::size_t frame_index = 0;
  double psnr_db = 0.0;
};

// "frame,psnr_db" plus an avg row.
void write_psnr_report(const std::vector<PsnrRow>& rows, const fs::path& path);

}  // namespace tawl
