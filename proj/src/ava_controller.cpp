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

#include "odc/ava_controller.hpp"

#include <algorithm>

namespace odc {

Vec3 to_parameters(const SystemCoefficients& c) {
  return {c.a + c.g, c.b, c.g};
}

SystemCoefficients from_parameters(const Vec3& theta) {
  return {theta[0] - theta[2], theta[1], theta[2]};
}

double control_law(double a, double b, double g, double harvest,
                   double consumed) {
  if (b == 0.0) throw DegenerateEstimate("control law with b = 0");
  const double r = (harvest - (a + b) * consumed + g * harvest) / b;
  return std::max(r, 0.0);
}

Vec3 gradient_update(const Vec3& theta, const Vec3& phi, double step_size,
                     double observed_next) {
  const double norm_sq = phi[0] * phi[0] + phi[1] * phi[1] + phi[2] * phi[2];
  if (norm_sq == 0.0) return theta;
  const double predicted =
      phi[0] * theta[0] + phi[1] * theta[1] + phi[2] * theta[2];
  const double gain = step_size * (observed_next - predicted) / norm_sq;
  return {theta[0] + gain * phi[0], theta[1] + gain * phi[1],
          theta[2] + gain * phi[2]};
}

AvaController::AvaController() : AvaController(Options{}) {}

AvaController::AvaController(Options options)
    : options_(options), theta_(options.initial_theta) {
  if (!(options_.step_size > 0.0)) {
    throw std::invalid_argument("AVA step size must be positive");
  }
  if (!(options_.initial_theta[1] < 0.0)) {
    throw std::invalid_argument("AVA initial b estimate must be negative");
  }
}

void AvaController::Project() {
  theta_[1] = std::min(theta_[1], options_.b_ceiling);
}

double AvaController::Step(double harvest, double consumed, double remaining) {
  if (steps_ > 0) {
    theta_ = gradient_update(theta_, phi_, options_.step_size, consumed);
    Project();
  }
  phi_ = {consumed, threshold_, -harvest};

  const SystemCoefficients c = coefficients();
  try {
    threshold_ = control_law(c.a, c.b, c.g, harvest, consumed);
  } catch (const DegenerateEstimate&) {
    theta_ = options_.initial_theta;
    const SystemCoefficients d = coefficients();
    threshold_ = control_law(d.a, d.b, d.g, harvest, consumed);
  }

  ++steps_;
  remaining_sq_sum_ += (remaining - consumed) * (remaining - consumed);
  harvest_sq_sum_ += (harvest - consumed) * (harvest - consumed);
  return threshold_;
}

double AvaController::tracking_metric() const {
  return steps_ == 0 ? 0.0 : remaining_sq_sum_ / static_cast<double>(steps_);
}

double AvaController::harvest_tracking_metric() const {
  return steps_ == 0 ? 0.0 : harvest_sq_sum_ / static_cast<double>(steps_);
}

}  // namespace odc
