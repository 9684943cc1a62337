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

#ifndef ODC_AVA_CONTROLLER_HPP_
#define ODC_AVA_CONTROLLER_HPP_

#include <array>
#include <cstddef>
#include <stdexcept>

namespace odc {

using Vec3 = std::array<double, 3>;

// Coefficients of c(τ+1) = a c(τ) + b R_th(τ) + g ω_τ + ω_{τ+1}.
struct SystemCoefficients {
  double a = 0.0;
  double b = 0.0;
  double g = 0.0;
};

// θ = (a + g, b, g).
Vec3 to_parameters(const SystemCoefficients& c);
SystemCoefficients from_parameters(const Vec3& theta);

class DegenerateEstimate : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// R_th = [e_h - (a + b) c + g e_h] / b, clamped below at zero.
// Throws DegenerateEstimate when b == 0.
double control_law(double a, double b, double g, double harvest,
                   double consumed);

// Normalised gradient step on the one-step prediction error of c_{τ+1}.
// Returns theta unchanged when phi is the zero vector.
Vec3 gradient_update(const Vec3& theta, const Vec3& phi, double step_size,
                     double observed_next);

// Adaptive VoI threshold: identifies (a, b, g) online and applies the
// tracking control law with the current estimate.
class AvaController {
 public:
  struct Options {
    Vec3 initial_theta = {0.5, -1.0, 0.0};
    double step_size = 0.1;
    double b_ceiling = -1e-6;  // b estimates are projected to <= this
  };

  AvaController();
  explicit AvaController(Options options);

  // Feeds the harvest of the current slot and the energy consumed in the
  // previous one; returns the threshold for the next slot. `remaining` is
  // E(τ), used only for the tracking metric.
  double Step(double harvest, double consumed, double remaining);

  // Threshold currently in force.
  double threshold() const { return threshold_; }
  const Vec3& theta() const { return theta_; }
  const Vec3& phi() const { return phi_; }
  SystemCoefficients coefficients() const { return from_parameters(theta_); }
  const Options& options() const { return options_; }
  std::size_t steps() const { return steps_; }

  // Running means of [E(τ) - c(τ)]^2 and [e_h(τ) - c(τ)]^2.
  double tracking_metric() const;
  double harvest_tracking_metric() const;

 private:
  void Project();

  Options options_;
  Vec3 theta_;
  Vec3 phi_ = {0.0, 0.0, 0.0};
  double threshold_ = 0.0;
  std::size_t steps_ = 0;
  double remaining_sq_sum_ = 0.0;
  double harvest_sq_sum_ = 0.0;
};

}  // namespace odc

#endif  // ODC_AVA_CONTROLLER_HPP_
