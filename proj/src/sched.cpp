#include "td3fg/sched.hpp"

#include <algorithm>

#include "td3fg/errors.hpp"

namespace td3fg {

double linear_decay(std::int64_t t, std::int64_t horizon) {
  if (horizon <= 0) throw ScheduleError("linear_decay: horizon must be > 0");
  if (t < 0) throw ScheduleError("linear_decay: step must be >= 0");
  const double w = 1.0 - static_cast<double>(t) / static_cast<double>(horizon);
  return std::max(w, 0.0);
}

namespace {
double decay_or_zero(std::int64_t t, std::int64_t horizon) {
  return horizon > 0 ? linear_decay(t, horizon) : 0.0;
}
}  // namespace

double ScheduleSet::alpha(std::int64_t t) const { return decay_or_zero(t, t1); }
double ScheduleSet::beta(std::int64_t t) const { return decay_or_zero(t, t2); }
double ScheduleSet::gamma_w(std::int64_t t) const { return decay_or_zero(t, t3); }
double ScheduleSet::delta_w(std::int64_t t) const { return rl_weight(t, *this); }

void ScheduleSet::validate() const {
  if (t1 < 0 || t2 < 0 || t3 < 0)
    throw ScheduleError("schedule horizons must be >= 0");
  if (theta_offset < 0.0 || theta_offset > 1.0)
    throw ScheduleError("theta_offset must be in [0, 1]");
}

double rl_weight(std::int64_t t, const ScheduleSet& s) {
  if (t < 0) throw ScheduleError("rl_weight: step must be >= 0");
  const double gamma = s.gamma_w(t);
  // Clamped below as well: theta_offset + 1 - gamma can land one ulp under
  // theta_offset when gamma = 1.
  return std::clamp(s.theta_offset + 1.0 - gamma, s.theta_offset, 1.0);
}

}  // namespace td3fg
