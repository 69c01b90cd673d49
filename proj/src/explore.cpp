#include "td3fg/explore.hpp"

#include <algorithm>
#include <cmath>

#include "td3fg/errors.hpp"

namespace td3fg {

OuNoise::OuNoise(int dim, double theta_, double mu_, double sigma_, double dt_)
    : x(dim, mu_), theta(theta_), mu(mu_), sigma(sigma_), dt(dt_) {
  validate();
}

void OuNoise::validate() const {
  if (x.empty()) throw ConfigError("ou: dimension must be >= 1");
  if (theta <= 0.0) throw ConfigError("ou: theta must be > 0");
  if (sigma < 0.0) throw ConfigError("ou: sigma must be >= 0");
  if (dt <= 0.0) throw ConfigError("ou: dt must be > 0");
}

void OuNoise::reset() { std::fill(x.begin(), x.end(), mu); }

void OuNoise::step_with(std::span<const double> normals) {
  if (normals.size() != x.size()) throw ShapeError("ou: normal draw count mismatch");
  const double diffusion = sigma * std::sqrt(dt);
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] += theta * (mu - x[i]) * dt + diffusion * normals[i];
}

const std::vector<double>& OuNoise::step(Rng& rng) {
  std::vector<double> z(x.size());
  for (auto& v : z) v = rng.normal();
  step_with(z);
  return x;
}

std::vector<double> generator_noise(const MlpNet& generator,
                                    std::span<const double> obs) {
  return forward(generator, obs);
}

std::vector<double> exploration_action(const MlpNet& actor,
                                       const MlpNet* generator,
                                       std::span<const double> obs,
                                       std::int64_t t, const ScheduleSet& sched,
                                       OuNoise& ou, Rng& rng) {
  std::vector<double> action = forward(actor, obs);
  if (action.size() != ou.x.size())
    throw ShapeError("exploration_action: actor/ou dimension mismatch");

  ou.step(rng);  // always consumes act_dim normals

  const double alpha = sched.alpha(t);
  if (alpha != 0.0)
    for (std::size_t i = 0; i < action.size(); ++i) action[i] += alpha * ou.x[i];

  const double beta = sched.beta(t);
  if (beta != 0.0 && generator != nullptr) {
    const std::vector<double> bias = generator_noise(*generator, obs);
    for (std::size_t i = 0; i < action.size(); ++i) action[i] += beta * bias[i];
  }

  for (auto& a : action) a = std::clamp(a, -1.0, 1.0);
  return action;
}

}  // namespace td3fg
