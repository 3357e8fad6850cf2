#include "tawl/background.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace tawl {

BackgroundKind parse_background_kind(const std::string& name) {
  if (name == "median") return BackgroundKind::TemporalMedian;
  if (name == "mog") return BackgroundKind::GaussianMixture;
  throw ConfigError("unknown background estimator '" + name + "' (expected median or mog)");
}

const char* to_string(BackgroundKind kind) {
  return kind == BackgroundKind::TemporalMedian ? "median" : "mog";
}

void BackgroundModel::check_shape(const Frame& frame, const Frame& reference) const {
  if (!frame.same_shape(reference)) {
    throw ShapeError("background update with " + std::to_string(frame.width()) + "x" +
                     std::to_string(frame.height()) + "x" + std::to_string(frame.channels()) +
                     " frame, model is " + std::to_string(reference.width()) + "x" +
                     std::to_string(reference.height()) + "x" +
                     std::to_string(reference.channels()));
  }
}

// Bitwise selection of the smallest v with #{values <= v} >= rank + 1, one bit
// per pass from the MSB down. Work is done in blocks so the per-sample counters
// stay in cache; the inner loops run over contiguous plane data.
void lower_median(std::span<const std::span<const std::uint8_t>> planes,
                  std::span<std::uint8_t> out) {
  const std::size_t n = out.size();
  const std::size_t length = planes.size();
  if (length == 0) throw InvariantError("lower_median over an empty window");
  const auto target = static_cast<std::uint16_t>((length - 1) / 2 + 1);

  constexpr std::size_t kBlock = 2048;
  std::array<std::uint16_t, kBlock> counts;
  std::array<std::uint8_t, kBlock> probe;

  for (std::size_t begin = 0; begin < n; begin += kBlock) {
    const std::size_t len = std::min(kBlock, n - begin);
    std::uint8_t* result = out.data() + begin;
    std::fill_n(result, len, std::uint8_t{0});
    for (int bit = 7; bit >= 0; --bit) {
      const auto low = static_cast<std::uint8_t>((1u << bit) - 1u);
      for (std::size_t i = 0; i < len; ++i) probe[i] = static_cast<std::uint8_t>(result[i] | low);
      std::fill_n(counts.begin(), len, std::uint16_t{0});
      for (const auto& plane : planes) {
        const std::uint8_t* values = plane.data() + begin;
        for (std::size_t i = 0; i < len; ++i) counts[i] += values[i] <= probe[i] ? 1 : 0;
      }
      const auto mask = static_cast<std::uint8_t>(1u << bit);
      for (std::size_t i = 0; i < len; ++i) {
        if (counts[i] < target) result[i] = static_cast<std::uint8_t>(result[i] | mask);
      }
    }
  }
}

// --- temporal median -------------------------------------------------------

TemporalMedianBackground::TemporalMedianBackground(const Frame& first_frame, int window)
    : window_(window) {
  if (window < 1) throw ConfigError("median window must be at least 1");
  if (window > 65535) throw ConfigError("median window must be at most 65535");
  ring_.reserve(static_cast<std::size_t>(window));
  ring_.push_back(first_frame);
  head_ = 1 % static_cast<std::size_t>(window);
  count_ = 1;
  frames_seen_ = 1;
  estimate_ = first_frame;
  const std::size_t n = first_frame.size();
  if (window <= 255) {
    below8_.assign(n, 0);
    upto8_.assign(n, 1);
  } else {
    below16_.assign(n, 0);
    upto16_.assign(n, 1);
  }
}

const Frame& TemporalMedianBackground::update(const Frame& frame) {
  check_shape(frame, estimate_);
  const bool full = ring_.size() == static_cast<std::size_t>(window_);
  if (!full) ring_.push_back(frame);
  if (window_ <= 255) {
    advance(below8_, upto8_, frame, full);
  } else {
    advance(below16_, upto16_, frame, full);
  }
  head_ = (head_ + 1) % static_cast<std::size_t>(window_);
  count_ = std::min(count_ + 1, static_cast<std::size_t>(window_));
  ++frames_seen_;
  return estimate_;
}

// When `full`, the frame replaces ring_[head_]; otherwise it was just appended.
template <typename Count>
void TemporalMedianBackground::advance(std::vector<Count, memory::TrackedAllocator<Count>>& below,
                                       std::vector<Count, memory::TrackedAllocator<Count>>& upto,
                                       const Frame& frame, bool full) {
  const std::size_t length = full ? count_ : count_ + 1;
  const auto rank = static_cast<Count>((length - 1) / 2);
  const std::uint8_t* in = frame.samples().data();
  std::uint8_t* slot = ring_[full ? head_ : ring_.size() - 1].samples().data();
  std::uint8_t* med = estimate_.samples().data();
  const std::size_t n = frame.size();

  for (std::size_t s = 0; s < n; ++s) {
    const std::uint8_t v = in[s];
    const std::uint8_t m = med[s];
    Count lt = below[s];
    Count le = upto[s];
    lt = static_cast<Count>(lt + (v < m));
    le = static_cast<Count>(le + (v <= m));
    if (full) {
      const std::uint8_t old = slot[s];
      lt = static_cast<Count>(lt - (old < m));
      le = static_cast<Count>(le - (old <= m));
      slot[s] = v;
    }
    if (lt <= rank && rank < le) [[likely]] {
      below[s] = lt;
      upto[s] = le;
      continue;
    }
    // The median moves to the nearest distinct buffered value; repeat until the
    // rank falls inside its run of ties.
    std::uint8_t current = m;
    while (!(lt <= rank && rank < le)) {
      const bool down = rank < lt;
      int next = down ? -1 : 256;
      Count ties = 0;
      for (const Frame& f : ring_) {
        const int u = f.samples()[s];
        if (down ? (u < current && u > next) : (u > current && u < next)) {
          next = u;
          ties = 1;
        } else if (u == next) {
          ++ties;
        }
      }
      if (next < 0 || next > 255) throw InvariantError("median rank outside buffered window");
      current = static_cast<std::uint8_t>(next);
      if (down) {
        le = lt;
        lt = static_cast<Count>(lt - ties);
      } else {
        lt = le;
        le = static_cast<Count>(le + ties);
      }
    }
    med[s] = current;
    below[s] = lt;
    upto[s] = le;
  }
}

const Frame& TemporalMedianBackground::buffered_frame(std::size_t age) const {
  if (age >= count_) throw InvariantError("buffered_frame age out of range");
  const std::size_t w = static_cast<std::size_t>(window_);
  const std::size_t oldest = (head_ + w - count_) % w;
  return ring_[(oldest + age) % w];
}

// --- Gaussian mixture ------------------------------------------------------

GaussianMixtureBackground::GaussianMixtureBackground(const Frame& first_frame,
                                                     const BackgroundConfig& config)
    : config_(config), stride_(static_cast<std::size_t>(config.max_components)) {
  if (config.max_components < 1) throw ConfigError("mixture needs at least one component");
  if (!(config.learning_rate > 0.0 && config.learning_rate <= 1.0)) {
    throw ConfigError("mixture learning rate must be in (0,1]");
  }
  if (!(config.variance_floor > 0.0) || config.initial_variance < config.variance_floor) {
    throw ConfigError("mixture variances must satisfy 0 < floor <= initial");
  }
  const auto samples = first_frame.samples();
  components_.assign(samples.size() * stride_, MixtureComponent{});
  active_.assign(samples.size(), 1);
  for (std::size_t s = 0; s < samples.size(); ++s) {
    components_[s * stride_] = {static_cast<double>(samples[s]), config_.initial_variance, 1.0};
  }
  frames_seen_ = 1;
  estimate_ = first_frame;
}

std::span<const MixtureComponent> GaussianMixtureBackground::components(
    std::size_t sample) const noexcept {
  return {components_.data() + sample * stride_, active_[sample]};
}

const Frame& GaussianMixtureBackground::update(const Frame& frame) {
  check_shape(frame, estimate_);
  const double alpha = config_.learning_rate;
  const double match2 = config_.match_sigmas * config_.match_sigmas;
  const auto samples = frame.samples();
  auto out = estimate_.samples();

  for (std::size_t s = 0; s < samples.size(); ++s) {
    MixtureComponent* comp = components_.data() + s * stride_;
    std::size_t active = active_[s];
    const double x = samples[s];

    std::size_t matched = active;
    for (std::size_t k = 0; k < active; ++k) {
      const double diff = x - comp[k].mean;
      if (diff * diff <= match2 * comp[k].variance) {
        matched = k;
        break;
      }
    }

    for (std::size_t k = 0; k < active; ++k) comp[k].weight *= (1.0 - alpha);
    if (matched < active) {
      MixtureComponent& c = comp[matched];
      c.weight += alpha;
      c.mean += alpha * (x - c.mean);
      const double diff = x - c.mean;
      c.variance = std::max(config_.variance_floor,
                            (1.0 - alpha) * c.variance + alpha * diff * diff);
    } else {
      // Replace the lightest component, or grow if there is room.
      const std::size_t slot = active < stride_ ? active++ : active - 1;
      comp[slot] = {x, config_.initial_variance, alpha};
    }

    double total = 0.0;
    for (std::size_t k = 0; k < active; ++k) total += comp[k].weight;
    for (std::size_t k = 0; k < active; ++k) comp[k].weight /= total;

    // Insertion sort by descending weight; at most a handful of components.
    for (std::size_t k = 1; k < active; ++k) {
      for (std::size_t j = k; j > 0 && comp[j].weight > comp[j - 1].weight; --j) {
        std::swap(comp[j], comp[j - 1]);
      }
    }
    active_[s] = static_cast<std::uint8_t>(active);
    out[s] = static_cast<std::uint8_t>(std::clamp(std::floor(comp[0].mean + 0.5), 0.0, 255.0));
  }
  ++frames_seen_;
  return estimate_;
}

std::unique_ptr<BackgroundModel> make_background(const Frame& first_frame,
                                                 const BackgroundConfig& config) {
  if (first_frame.empty()) throw ShapeError("background model needs a non-empty first frame");
  if (config.kind == BackgroundKind::TemporalMedian) {
    return std::make_unique<TemporalMedianBackground>(first_frame, config.window);
  }
  return std::make_unique<GaussianMixtureBackground>(first_frame, config);
}

}  // namespace tawl
