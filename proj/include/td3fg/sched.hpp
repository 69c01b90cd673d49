#pragma once

#include <cstdint>

namespace td3fg {

// max(1 - t/T, 0). Throws ScheduleError unless T > 0 and t >= 0.
double linear_decay(std::int64_t t, std::int64_t horizon);

// Decay horizons (in environment steps) for the three weight schedules plus
// the RL-loss head start. Stock presets keep T3 = T2 = 0.5*T1. A horizon of 0
// disables that schedule: its weight is identically 0, which is what lets a
// run with all horizons zeroed degenerate to the plain algorithm.
struct ScheduleSet {
  std::int64_t t1 = 600000;  // OU-noise horizon
  std::int64_t t2 = 300000;  // generator-noise horizon
  std::int64_t t3 = 300000;  // imitation-loss horizon
  double theta_offset = 0.2; // RL-loss weight at t = 0

  double alpha(std::int64_t t) const;  // OU-noise weight
  double beta(std::int64_t t) const;   // generator-noise weight
  double gamma_w(std::int64_t t) const;  // imitation-loss weight
  double delta_w(std::int64_t t) const;  // RL-loss weight

  void validate() const;  // horizons >= 0, theta_offset in [0, 1]
};

// min(theta_offset + 1 - gamma(t), 1): ramps from theta_offset to 1 as the
// imitation weight decays.
double rl_weight(std::int64_t t, const ScheduleSet& s);

}  // namespace td3fg
