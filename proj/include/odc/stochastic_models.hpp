// Copyright 2026 The ODC Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ODC_STOCHASTIC_MODELS_HPP_
#define ODC_STOCHASTIC_MODELS_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace odc {

// Raised for malformed model inputs (bad distributions, exhausted streams,
// invalid transition matrices).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Probability weights over a finite support. Weights are validated on
// construction: non-negative and summing to one within 1e-9.
class DiscreteDistribution {
 public:
  explicit DiscreteDistribution(std::vector<double> weights);

  std::span<const double> weights() const { return weights_; }
  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }

 private:
  std::vector<double> weights_;
};

// KL divergence D(p || q) in nats. Throws ModelError when supports differ or
// q vanishes where p does not.
double kl_divergence(const DiscreteDistribution& p,
                     const DiscreteDistribution& q);

// Histogram estimate of D(observed || reference). Both windows share
// `bin_count` equal-width bins over their joint range; each bin receives an
// additive 1/n mass (n = window length) before normalisation. A constant
// joint range yields 0.
double voi_from_window(std::span<const double> observed,
                       std::span<const double> reference, int bin_count);

// Per-slot VoI of a sensed signal: the divergence of the latest `window`
// samples from the `window` samples preceding them.
std::vector<double> sliding_window_voi(std::span<const double> signal,
                                       std::size_t window, int bin_count);

class VoiSource {
 public:
  enum class Kind { kGaussian, kTrace };

  // Draws from N(mean, variance), clamped below at zero.
  static VoiSource Gaussian(double mean, double variance, std::uint64_t seed);
  static VoiSource Trace(std::vector<double> values);

  Kind kind() const { return kind_; }

  // VoI of the datum available in `slot`. Gaussian sources draw one value
  // per call; slots are expected in increasing order.
  double Next(std::size_t slot);

  std::vector<double> Take(std::size_t horizon);

 private:
  VoiSource() = default;

  Kind kind_ = Kind::kGaussian;
  double mean_ = 0.0;
  double stddev_ = 0.0;
  std::mt19937_64 rng_;
  std::vector<double> values_;
};

struct HarvestSample {
  double power = 0.0;  // mA over the slot
  bool solar = false;  // power >= threshold
};

// Inclusive slot range [first, last].
struct SlotRange {
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t length() const { return last - first + 1; }
};

class HarvestProcess {
 public:
  enum class Kind { kMarkov, kTrace, kPhaseSchedule };

  // First-order chain over discrete power levels. Each row of `transition`
  // must sum to one.
  static HarvestProcess Markov(std::vector<double> state_power,
                               std::vector<std::vector<double>> transition,
                               std::size_t start_state, double threshold,
                               std::uint64_t seed);
  static HarvestProcess Trace(std::vector<double> power, double threshold);
  static HarvestProcess Schedule(std::vector<double> power, double threshold);

  Kind kind() const { return kind_; }
  double threshold() const { return threshold_; }

  HarvestSample Next(std::size_t slot);
  std::vector<HarvestSample> Take(std::size_t horizon);

  // Markov only: index of the state emitted by the most recent Next().
  std::size_t state() const { return state_; }

 private:
  HarvestProcess() = default;

  Kind kind_ = Kind::kTrace;
  double threshold_ = 0.0;
  std::vector<double> power_;  // trace/schedule stream or markov levels
  std::vector<std::vector<double>> transition_;
  std::size_t state_ = 0;
  bool started_ = false;
  std::mt19937_64 rng_;
};

bool solar_state(double power, double threshold);

// Spreads `total_energy` uniformly over the slots covered by `phases`.
// The returned stream has length max(horizon, last phase slot + 1).
HarvestProcess phase_schedule(double total_energy,
                              std::span<const SlotRange> phases,
                              double threshold, std::size_t horizon = 0);

// Splits `total_energy` into `units` equal parts, each dropped into a slot
// drawn uniformly from [0, horizon). Collisions stack.
std::vector<double> random_unit_schedule(double total_energy, int units,
                                         std::size_t horizon,
                                         std::mt19937_64& rng);

struct StoreResult {
  double stored = 0.0;  // energy that reached the battery
  double wasted = 0.0;  // charge lost to the capacity clamp
};

// Energy store with imperfect charge efficiency. Levels are in mA·slot.
class Battery {
 public:
  Battery(double capacity, double level, double efficiency);

  double level() const { return level_; }
  double capacity() const { return capacity_; }
  double efficiency() const { return efficiency_; }

  StoreResult Store(double harvested);
  bool CanDraw(double amount) const;
  void Draw(double amount);

 private:
  double capacity_;
  double level_;
  double efficiency_;
};

}  // namespace odc

#endif  // ODC_STOCHASTIC_MODELS_HPP_
