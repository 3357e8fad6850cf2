// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tawl/compositor.hpp"
#include "tawl/detection.hpp"
#include "tawl/memory.hpp"
#include "tawl/metrics.hpp"
#include "tawl/pipeline.hpp"
#include "tawl/rain_synth.hpp"
#include "tawl/streak_filters.hpp"
#include "test_support.hpp"

using namespace tawl;
using tawl::testing::TempDir;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void verdict(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("%s criterion %d (%s): %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

// Runs one criterion, turning an escaped exception into a FAIL line.
void run(int id, const char* name, const std::function<void(int, const char*)>& body) {
  try {
    body(id, name);
  } catch (const std::exception& e) {
    verdict(id, name, false, std::string("exception: ") + e.what());
  }
}

std::string fmt(const char* format, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ClassMap upscale2(const ClassMap& map) {
  ClassMap out(map.width() * 2, map.height() * 2);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) out(x, y) = map(x / 2, y / 2);
  }
  return out;
}

struct Benchmark {
  std::vector<Frame> rainy;
  std::vector<Frame> clean;
  std::vector<BinaryMask> rain;
  std::vector<BinaryMask> object;
};

Benchmark make_benchmark(const SynthConfig& config) {
  const Scene scene(config.scene);
  Benchmark b;
  for (int i = 0; i < config.scene.frame_count; ++i) {
    const auto n = static_cast<std::size_t>(i);
    b.clean.push_back(scene.frame(n));
    RainyFrame r = add_rain(b.clean.back(), config.rain, n);
    b.rainy.push_back(std::move(r.frame));
    b.rain.push_back(std::move(r.rain));
    b.object.push_back(scene.object_mask(n));
  }
  return b;
}

void foreground_exhaustive(int id, const char* name) {
  const auto start = Clock::now();
  Frame intensity(256, 256, 1), background(256, 256, 1);
  for (int y = 0; y < 256; ++y) {
    for (int x = 0; x < 256; ++x) {
      intensity(x, y) = static_cast<std::uint8_t>(x);
      background(x, y) = static_cast<std::uint8_t>(y);
    }
  }
  bool ok = true;
  for (int tau : {20, 0, 255}) {
    const BinaryMask f = extract_foreground(intensity, background, tau);
    for (int y = 0; y < 256; ++y) {
      for (int x = 0; x < 256; ++x) {
        const int diff = x > y ? x - y : y - x;
        ok = ok && (f(x, y) != 0) == (diff > tau);
      }
    }
  }
  const double t = seconds_since(start);
  verdict(id, name, ok && t < 1.0, fmt("3 x 65536 pairs, %.3f s", t));
}

void appearance_incremental(int id, const char* name) {
  const auto start = Clock::now();
  std::mt19937 rng(2024);
  constexpr int kWindow = 15;
  TemporalAppearance ta(64, 64, kWindow);
  std::vector<BinaryMask> history;
  bool ok = true;
  for (int n = 0; n < 200; ++n) {
    history.push_back(oracle::random_mask(rng, 64, 64, 0.1 + 0.8 * (n % 7) / 6.0));
    ta.update(history.back());
    ok = ok && ta.counts() == oracle::appearance(history, kWindow);
  }
  const double t = seconds_since(start);
  verdict(id, name, ok && t < 5.0, fmt("200 frames, m = 15, %.3f s", t));
}

void width_oracle(int id, const char* name) {
  std::mt19937 rng(3);
  int mismatches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const ClassMap map = oracle::random_classmap(rng, 64, 64, 0.2 + 0.6 * (trial % 5) / 4.0, 0.05);
    const int w_max = 1 + trial % 12;
    mismatches += width_filter(map, w_max) != oracle::width_filter(map, w_max);
  }
  verdict(id, name, mismatches == 0, fmt("%g/100 maps differ", mismatches));
}

void location_oracle(int id, const char* name) {
  std::mt19937 rng(4);
  int mismatches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const ClassMap map = oracle::random_classmap(rng, 64, 64, 0.05 + 0.3 * (trial % 4) / 3.0,
                                                 0.002 + 0.01 * (trial % 3));
    const int radius = 1 + trial % 6;
    mismatches += location_filter(map, radius) != oracle::location_filter(map, radius);
  }
  verdict(id, name, mismatches == 0, fmt("%g/100 maps differ", mismatches));
}

void frame_rate_invariance(int id, const char* name) {
  SynthConfig config;
  config.scene.frame_count = 50;
  const Benchmark b = make_benchmark(config);
  Pipeline base(320, 240, 3, {32, 1}, PipelineConfig{});
  Pipeline doubled(320, 240, 3, {64, 1}, PipelineConfig{});
  int compared = 0, mismatches = 0;
  for (const Frame& f : b.rainy) {
    const StepResult a = base.step(f);
    doubled.step(f);
    const StepResult second = doubled.step(f);
    if (a.warmup) continue;
    ++compared;
    mismatches += second.warmup || a.classes != second.classes;
  }
  verdict(id, name, compared > 0 && mismatches == 0,
          fmt("%g post-warm-up frames compared at the second copy, %g differ", compared,
              mismatches));
}

void resolution_invariance(int id, const char* name) {
  std::mt19937 rng(6);
  int mismatches = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const ClassMap map = oracle::random_classmap(rng, 64, 64, 0.3 + 0.5 * (trial % 3) / 2.0, 0.02);
    const int w_max = 2 + trial % 10;
    mismatches += upscale2(width_filter(map, w_max)) != width_filter(upscale2(map), 2 * w_max);
  }
  verdict(id, name, mismatches == 0, fmt("%g/50 maps differ", mismatches));
}

void benchmark_scores(int id, const char* name) {
  const SynthConfig config;
  const Benchmark b = make_benchmark(config);

  auto start = Clock::now();
  oracle::Pipeline slow(config.scene.fps, config.scene.width);
  std::vector<oracle::Pipeline::Step> reference;
  for (const Frame& f : b.rainy) reference.push_back(slow.step(f));
  const double t_oracle = seconds_since(start);

  start = Clock::now();
  Pipeline fast(config.scene.width, config.scene.height, config.scene.channels, config.scene.fps,
                PipelineConfig{});
  int mismatches = 0;
  double psnr_in = 0, psnr_out = 0, rain_recall = 0, object_recall = 0, plain_object = 0;
  int post = 0;
  for (std::size_t n = 0; n < b.rainy.size(); ++n) {
    const StepResult r = fast.step(b.rainy[n]);
    mismatches += r.output != reference[n].output || r.classes != reference[n].classes;
    const auto& ref = reference[n];
    psnr_in += psnr(b.rainy[n], b.clean[n]);
    psnr_out += psnr(ref.output, b.clean[n]);
    if (r.warmup) continue;
    ++post;
    const MaskScores ms = mask_scores(ref.classes, b.rain[n], b.object[n]);
    rain_recall += ms.rain_recall;
    plain_object += ms.object_recall;
    object_recall += detected_object_recall(ref.classes, b.object[n], ref.foreground);
  }
  const double t_fast = seconds_since(start);
  const double frames = static_cast<double>(b.rainy.size());
  psnr_in /= frames;
  psnr_out /= frames;
  rain_recall /= post;
  object_recall /= post;
  plain_object /= post;

  std::printf("  oracle scores: psnr_in %.4f dB, psnr_out %.4f dB, rain_recall %.4f, "
              "object_recall %.4f (all truth-object pixels: %.4f); oracle %.1f s\n",
              psnr_in, psnr_out, rain_recall, object_recall, plain_object, t_oracle);
  const bool ok = mismatches == 0 && psnr_out >= psnr_in + 3.0 && object_recall >= 0.90 &&
                  rain_recall >= 0.80 && t_fast < 120.0;
  verdict(id, name, ok,
          fmt("gain %.2f dB, object_recall %.4f, rain_recall %.4f, ", psnr_out - psnr_in,
              object_recall, rain_recall) +
              fmt("%g frames differ from oracle, %.2f s", mismatches, t_fast));
}

void streaming_and_performance(const fs::path& root) {
  const SynthConfig config;
  write_synthetic_dataset(config, root / "data");
  const fs::path rainy = root / "data" / "rainy";

  // Criterion 9 first so the timing covers a cold, streaming run.
  bool perf_ok = false;
  std::string perf_detail;
  bool stream_ok = false;
  std::string stream_detail;
  try {
    DerainOptions opts;
    opts.input = rainy;
    opts.output = root / "streamed";
    const std::size_t baseline = memory::live_bytes();
    memory::reset_peak();
    const auto start = Clock::now();
    const DerainSummary summary = run_derain(opts);
    const double t = seconds_since(start);
    const std::size_t peak = memory::peak_bytes() - baseline;
    const double fps = static_cast<double>(summary.frames) / t;
    const std::size_t frame_bytes =
        static_cast<std::size_t>(config.scene.width) * config.scene.height * config.scene.channels;
    const std::size_t budget = static_cast<std::size_t>(summary.thresholds.window +
                                                        summary.median_window + 8) * frame_bytes;
    perf_ok = fps >= 32.0 && peak <= budget;
    perf_detail = fmt("%.1f frames/s, peak %.2f frame buffers of %g allowed", fps,
                      static_cast<double>(peak) / frame_bytes,
                      static_cast<double>(budget / frame_bytes));

    // Whole sequence in memory first, then fed through a fresh pipeline.
    const Sequence all = load_sequence(rainy);
    Pipeline p(all.meta.width, all.meta.height, all.frames.front().channels(), all.meta.fps,
               PipelineConfig{});
    fs::create_directories(root / "materialized");
    int differ = 0;
    for (std::size_t n = 0; n < all.frames.size(); ++n) {
      const std::string file = indexed_name("out", n, ".png");
      write_frame(root / "materialized" / file, p.step(all.frames[n]).output);
      differ += slurp(root / "streamed" / file) != slurp(root / "materialized" / file);
    }
    stream_ok = differ == 0 && all.frames.size() == summary.frames;
    stream_detail = fmt("%g/%g output files differ", differ, static_cast<double>(summary.frames));
  } catch (const std::exception& e) {
    perf_detail = stream_detail = std::string("exception: ") + e.what();
  }
  verdict(8, "streaming contract", stream_ok, stream_detail);
  verdict(9, "performance and memory", perf_ok, perf_detail);
}

void static_fixed_point(int id, const char* name) {
  SceneConfig sc;
  sc.object.reset();
  const Frame still = Scene(sc).frame(0);
  Pipeline p(320, 240, 3, {32, 1}, PipelineConfig{});
  int bad = 0;
  for (int n = 0; n < 60; ++n) {
    const StepResult r = p.step(still);
    bool background_only = true;
    for (Label l : r.classes.samples()) background_only = background_only && l == Label::Background;
    bad += r.output != still || !background_only;
  }
  verdict(id, name, bad == 0, fmt("%g/60 frames altered", bad));
}

}  // namespace

int main() {
  run(1, "foreground rule, exhaustive", foreground_exhaustive);
  run(2, "appearance incremental vs recompute", appearance_incremental);
  run(3, "width filter oracle", width_oracle);
  run(4, "location filter oracle", location_oracle);
  run(5, "frame-rate invariance", frame_rate_invariance);
  run(6, "resolution invariance", resolution_invariance);
  run(7, "synthetic benchmark", benchmark_scores);
  {
    TempDir dir("tawl_acceptance");
    streaming_and_performance(dir.path());
  }
  run(10, "static-scene fixed point", static_fixed_point);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
