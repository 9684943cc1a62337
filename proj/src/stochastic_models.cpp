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

#include "odc/stochastic_models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace odc {

namespace {

constexpr double kWeightTolerance = 1e-9;

std::vector<double> smoothed_histogram(std::span<const double> samples,
                                       double lo, double width,
                                       int bin_count) {
  std::vector<double> counts(static_cast<std::size_t>(bin_count), 0.0);
  for (double x : samples) {
    auto bin = static_cast<long>((x - lo) / width);
    bin = std::clamp(bin, 0L, static_cast<long>(bin_count) - 1);
    counts[static_cast<std::size_t>(bin)] += 1.0;
  }
  const double n = static_cast<double>(samples.size());
  const double eps = 1.0 / n;
  double total = 0.0;
  for (double& c : counts) {
    c = c / n + eps;
    total += c;
  }
  for (double& c : counts) c /= total;
  return counts;
}

}  // namespace

DiscreteDistribution::DiscreteDistribution(std::vector<double> weights)
    : weights_(std::move(weights)) {
  if (weights_.empty()) throw ModelError("distribution has empty support");
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ModelError("distribution weight is negative or not finite");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > kWeightTolerance) {
    throw ModelError("distribution weights sum to " + std::to_string(sum));
  }
}

double kl_divergence(const DiscreteDistribution& p,
                     const DiscreteDistribution& q) {
  if (p.size() != q.size()) {
    throw ModelError("kl_divergence: support mismatch (" +
                     std::to_string(p.size()) + " vs " +
                     std::to_string(q.size()) + ")");
  }
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) {
      throw ModelError("kl_divergence: q vanishes at index " +
                       std::to_string(i) + " where p is positive");
    }
    d += p[i] * std::log(p[i] / q[i]);
  }
  // Rounding can leave a tiny negative residue for p ~= q.
  return std::max(d, 0.0);
}

double voi_from_window(std::span<const double> observed,
                       std::span<const double> reference, int bin_count) {
  if (observed.empty() || reference.empty()) {
    throw ModelError("voi_from_window: empty window");
  }
  if (bin_count < 2) throw ModelError("voi_from_window: bin_count < 2");

  const auto [olo, ohi] = std::minmax_element(observed.begin(), observed.end());
  const auto [rlo, rhi] =
      std::minmax_element(reference.begin(), reference.end());
  const double lo = std::min(*olo, *rlo);
  const double hi = std::max(*ohi, *rhi);
  if (!(hi > lo)) return 0.0;

  const double width = (hi - lo) / bin_count;
  DiscreteDistribution p(smoothed_histogram(observed, lo, width, bin_count));
  DiscreteDistribution q(smoothed_histogram(reference, lo, width, bin_count));
  return kl_divergence(p, q);
}

std::vector<double> sliding_window_voi(std::span<const double> signal,
                                       std::size_t window, int bin_count) {
  if (window == 0) throw ModelError("sliding_window_voi: window is 0");
  std::vector<double> out(signal.size(), 0.0);
  for (std::size_t t = 0; t < signal.size(); ++t) {
    if (t < window) continue;  // no reference yet
    const std::size_t obs_begin = t + 1 - window;
    const std::size_t ref_begin = obs_begin >= window ? obs_begin - window : 0;
    out[t] = voi_from_window(signal.subspan(obs_begin, window),
                             signal.subspan(ref_begin, obs_begin - ref_begin),
                             bin_count);
  }
  return out;
}

VoiSource VoiSource::Gaussian(double mean, double variance,
                              std::uint64_t seed) {
  if (variance < 0.0) throw ModelError("VoiSource: negative variance");
  VoiSource s;
  s.kind_ = Kind::kGaussian;
  s.mean_ = mean;
  s.stddev_ = std::sqrt(variance);
  s.rng_.seed(seed);
  return s;
}

VoiSource VoiSource::Trace(std::vector<double> values) {
  for (double v : values) {
    if (v < 0.0) throw ModelError("VoiSource: negative trace value");
  }
  VoiSource s;
  s.kind_ = Kind::kTrace;
  s.values_ = std::move(values);
  return s;
}

double VoiSource::Next(std::size_t slot) {
  if (kind_ == Kind::kTrace) {
    if (slot >= values_.size()) {
      throw ModelError("VoI trace exhausted at slot " + std::to_string(slot));
    }
    return values_[slot];
  }
  if (stddev_ == 0.0) return std::max(mean_, 0.0);
  std::normal_distribution<double> normal(mean_, stddev_);
  return std::max(normal(rng_), 0.0);
}

std::vector<double> VoiSource::Take(std::size_t horizon) {
  std::vector<double> out(horizon);
  for (std::size_t t = 0; t < horizon; ++t) out[t] = Next(t);
  return out;
}

bool solar_state(double power, double threshold) { return power >= threshold; }

HarvestProcess HarvestProcess::Markov(
    std::vector<double> state_power,
    std::vector<std::vector<double>> transition, std::size_t start_state,
    double threshold, std::uint64_t seed) {
  const std::size_t n = state_power.size();
  if (n == 0) throw ModelError("markov harvest: no states");
  if (transition.size() != n) {
    throw ModelError("markov harvest: transition matrix must be " +
                     std::to_string(n) + "x" + std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (transition[i].size() != n) {
      throw ModelError("markov harvest: row " + std::to_string(i) +
                       " has wrong length");
    }
    double sum = 0.0;
    for (double p : transition[i]) {
      if (p < 0.0) {
        throw ModelError("markov harvest: negative probability in row " +
                         std::to_string(i));
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kWeightTolerance) {
      throw ModelError("markov harvest: row " + std::to_string(i) +
                       " sums to " + std::to_string(sum));
    }
  }
  for (double p : state_power) {
    if (p < 0.0) throw ModelError("markov harvest: negative power level");
  }
  if (start_state >= n) throw ModelError("markov harvest: bad start state");

  HarvestProcess h;
  h.kind_ = Kind::kMarkov;
  h.threshold_ = threshold;
  h.power_ = std::move(state_power);
  h.transition_ = std::move(transition);
  h.state_ = start_state;
  h.rng_.seed(seed);
  return h;
}

HarvestProcess HarvestProcess::Trace(std::vector<double> power,
                                     double threshold) {
  for (std::size_t t = 0; t < power.size(); ++t) {
    if (power[t] < 0.0) {
      throw ModelError("harvest trace: negative power at slot " +
                       std::to_string(t));
    }
  }
  HarvestProcess h;
  h.kind_ = Kind::kTrace;
  h.threshold_ = threshold;
  h.power_ = std::move(power);
  return h;
}

HarvestProcess HarvestProcess::Schedule(std::vector<double> power,
                                        double threshold) {
  HarvestProcess h = Trace(std::move(power), threshold);
  h.kind_ = Kind::kPhaseSchedule;
  return h;
}

HarvestSample HarvestProcess::Next(std::size_t slot) {
  double p = 0.0;
  if (kind_ == Kind::kMarkov) {
    // The start state is emitted first; the chain advances once per slot
    // afterwards.
    if (started_) {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      const double r = u(rng_);
      const auto& row = transition_[state_];
      double acc = 0.0;
      std::size_t next = row.size() - 1;
      for (std::size_t j = 0; j < row.size(); ++j) {
        acc += row[j];
        if (r < acc) {
          next = j;
          break;
        }
      }
      // Never land on a zero-probability tail state through rounding.
      while (row[next] == 0.0 && next > 0) --next;
      state_ = next;
    }
    started_ = true;
    p = power_[state_];
  } else {
    if (slot >= power_.size()) {
      throw ModelError("harvest trace exhausted at slot " +
                       std::to_string(slot));
    }
    p = power_[slot];
  }
  return {p, solar_state(p, threshold_)};
}

std::vector<HarvestSample> HarvestProcess::Take(std::size_t horizon) {
  std::vector<HarvestSample> out(horizon);
  for (std::size_t t = 0; t < horizon; ++t) out[t] = Next(t);
  return out;
}

HarvestProcess phase_schedule(double total_energy,
                              std::span<const SlotRange> phases,
                              double threshold, std::size_t horizon) {
  if (phases.empty()) throw ModelError("phase_schedule: empty phase list");
  if (!(total_energy > 0.0)) {
    throw ModelError("phase_schedule: total energy must be positive");
  }
  std::vector<SlotRange> sorted(phases.begin(), phases.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const SlotRange& a, const SlotRange& b) {
              return a.first < b.first;
            });
  std::size_t covered = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i].last < sorted[i].first) {
      throw ModelError("phase_schedule: phase ends before it starts");
    }
    if (i > 0 && sorted[i].first <= sorted[i - 1].last) {
      throw ModelError("phase_schedule: phases overlap");
    }
    covered += sorted[i].length();
  }
  const std::size_t needed = sorted.back().last + 1;
  if (horizon != 0 && horizon < needed) {
    throw ModelError("phase_schedule: phase extends past the horizon");
  }
  std::vector<double> power(std::max(horizon, needed), 0.0);
  const double per_slot = total_energy / static_cast<double>(covered);
  for (const SlotRange& r : sorted) {
    for (std::size_t t = r.first; t <= r.last; ++t) power[t] = per_slot;
  }
  return HarvestProcess::Schedule(std::move(power), threshold);
}

std::vector<double> random_unit_schedule(double total_energy, int units,
                                         std::size_t horizon,
                                         std::mt19937_64& rng) {
  if (units <= 0 || horizon == 0) {
    throw ModelError("random_unit_schedule: need units > 0 and horizon > 0");
  }
  std::vector<double> power(horizon, 0.0);
  const double unit = total_energy / units;
  std::uniform_int_distribution<std::size_t> pick(0, horizon - 1);
  for (int i = 0; i < units; ++i) power[pick(rng)] += unit;
  return power;
}

Battery::Battery(double capacity, double level, double efficiency)
    : capacity_(capacity), level_(level), efficiency_(efficiency) {
  if (!(capacity >= 0.0)) throw ModelError("battery: negative capacity");
  if (level < 0.0 || level > capacity) {
    throw ModelError("battery: initial level outside [0, capacity]");
  }
  if (!(efficiency > 0.0 && efficiency <= 1.0)) {
    throw ModelError("battery: charge efficiency must lie in (0, 1]");
  }
}

StoreResult Battery::Store(double harvested) {
  if (harvested < 0.0) throw ModelError("battery: negative harvest");
  const double incoming = efficiency_ * harvested;
  const double room = capacity_ - level_;
  StoreResult r;
  r.stored = std::min(incoming, room);
  r.wasted = incoming - r.stored;
  level_ = std::min(capacity_, level_ + r.stored);
  return r;
}

bool Battery::CanDraw(double amount) const {
  return amount <= level_ + 1e-9;
}

void Battery::Draw(double amount) {
  if (amount < 0.0) throw ModelError("battery: negative draw");
  if (!CanDraw(amount)) {
    throw ModelError("battery: draw of " + std::to_string(amount) +
                     " exceeds level " + std::to_string(level_));
  }
  level_ = std::max(0.0, level_ - amount);
}

}  // namespace odc
