#include "tawl/metrics.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tawl {

namespace {

double ratio_or_one(std::size_t num, std::size_t den) {
  return den == 0 ? 1.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

void append_row(std::string& out, const std::string& label, const FrameScore& s) {
  out += label;
  for (double v : {s.psnr_input_db, s.psnr_output_db, s.rain_recall, s.rain_precision,
                   s.object_recall}) {
    out += ',';
    out += fixed4(v);
  }
  out += '\n';
}

}  // namespace

double psnr(const Frame& a, const Frame& b) {
  if (!a.same_shape(b)) throw ShapeError("psnr: frames differ in shape");
  std::uint64_t sum = 0;
  const auto x = a.samples();
  const auto y = b.samples();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const int d = static_cast<int>(x[i]) - static_cast<int>(y[i]);
    sum += static_cast<std::uint64_t>(d * d);
  }
  if (sum == 0) return kIdenticalPsnrDb;
  const double mse = static_cast<double>(sum) / static_cast<double>(x.size());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

MaskScores mask_scores(const ClassMap& predicted, const BinaryMask& truth_rain,
                       const BinaryMask& truth_object) {
  require_same_size(predicted, truth_rain, "mask_scores");
  require_same_size(predicted, truth_object, "mask_scores");
  std::size_t rain_hit = 0, rain_truth = 0, rain_pred = 0, obj_hit = 0, obj_truth = 0;
  const auto p = predicted.samples();
  const auto r = truth_rain.samples();
  const auto o = truth_object.samples();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const bool pr = p[i] == Label::Rain;
    rain_pred += pr;
    rain_truth += r[i] != 0;
    rain_hit += pr && r[i];
    obj_truth += o[i] != 0;
    obj_hit += p[i] == Label::Object && o[i];
  }
  return {ratio_or_one(rain_hit, rain_truth), ratio_or_one(rain_hit, rain_pred),
          ratio_or_one(obj_hit, obj_truth)};
}

double detected_object_recall(const ClassMap& predicted, const BinaryMask& truth_object,
                              const BinaryMask& foreground) {
  require_same_size(predicted, truth_object, "detected_object_recall");
  require_same_size(predicted, foreground, "detected_object_recall");
  std::size_t hit = 0, total = 0;
  const auto p = predicted.samples();
  const auto o = truth_object.samples();
  const auto f = foreground.samples();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!o[i] || !f[i]) continue;
    ++total;
    hit += p[i] == Label::Object;
  }
  return ratio_or_one(hit, total);
}

FrameScore mean_score(const std::vector<FrameScore>& scores) {
  FrameScore avg;
  if (scores.empty()) return avg;
  for (const auto& s : scores) {
    avg.psnr_input_db += s.psnr_input_db;
    avg.psnr_output_db += s.psnr_output_db;
    avg.rain_recall += s.rain_recall;
    avg.rain_precision += s.rain_precision;
    avg.object_recall += s.object_recall;
  }
  const double n = static_cast<double>(scores.size());
  avg.psnr_input_db /= n;
  avg.psnr_output_db /= n;
  avg.rain_recall /= n;
  avg.rain_precision /= n;
  avg.object_recall /= n;
  return avg;
}

std::string format_report(const std::vector<FrameScore>& scores) {
  if (scores.empty()) throw WriteError("report needs at least one frame");
  std::string out = kReportHeader;
  out += '\n';
  for (const auto& s : scores) append_row(out, std::to_string(s.frame_index), s);
  append_row(out, "avg", mean_score(scores));
  return out;
}

void write_report(const std::vector<FrameScore>& scores, const fs::path& path) {
  const std::string text = format_report(scores);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw WriteError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw WriteError("failed writing " + path.string());
}

Report read_report(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ReadError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kReportHeader) {
    throw FormatError(path.string() + ": unexpected report header");
  }
  Report report;
  bool have_avg = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 6) throw FormatError(path.string() + ": malformed row '" + line + "'");
    FrameScore s;
    try {
      s.psnr_input_db = std::stod(fields[1]);
      s.psnr_output_db = std::stod(fields[2]);
      s.rain_recall = std::stod(fields[3]);
      s.rain_precision = std::stod(fields[4]);
      s.object_recall = std::stod(fields[5]);
      if (fields[0] == "avg") {
        report.average = s;
        have_avg = true;
      } else {
        s.frame_index = std::stoul(fields[0]);
        report.rows.push_back(s);
      }
    } catch (const std::logic_error&) {
      throw FormatError(path.string() + ": malformed row '" + line + "'");
    }
  }
  if (!have_avg) throw FormatError(path.string() + ": missing avg row");
  return report;
}

void write_psnr_report(const std::vector<PsnrRow>& rows, const fs::path& path) {
  if (rows.empty()) throw WriteError("report needs at least one frame");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw WriteError("cannot open " + path.string() + " for writing");
  out << "frame,psnr_db\n";
  double total = 0.0;
  for (const auto& r : rows) {
    out << r.frame_index << ',' << fixed4(r.psnr_db) << '\n';
    total += r.psnr_db;
  }
  out << "avg," << fixed4(total / static_cast<double>(rows.size())) << '\n';
  if (!out) throw WriteError("failed writing " + path.string());
}

}  // namespace tawl
