#pragma once

#include <span>
#include <vector>

#include "td3fg/nn.hpp"
#include "td3fg/rng.hpp"
#include "td3fg/sched.hpp"

namespace td3fg {

// Ornstein-Uhlenbeck process, Euler-Maruyama discretized with one step per
// environment step:  x <- x + theta*(mu - x)*dt + sigma*sqrt(dt)*z.
// Correlated noise suits dynamics with momentum better than white noise.
struct OuNoise {
  std::vector<double> x;
  double theta = 0.15;
  double mu = 0.0;
  double sigma = 0.2;
  double dt = 1.0;

  OuNoise() = default;
  OuNoise(int dim, double theta, double mu, double sigma, double dt);

  void validate() const;
  void reset();  // back to the long-run mean at episode start

  // Advances using exactly dim pre-drawn standard normals.
  void step_with(std::span<const double> normals);
  // Draws its own normals (dim of them) from rng.
  const std::vector<double>& step(Rng& rng);
};

// The generator's reference action for this observation: exactly
// forward(generator, obs).
std::vector<double> generator_noise(const MlpNet& generator,
                                    std::span<const double> obs);

// clip(pi(s) + alpha(t)*ou + beta(t)*pi_bc(s), -1, 1). The OU state always
// advances (one draw per dimension) so rng streams stay aligned with runs
// whose weights have decayed to zero.
std::vector<double> exploration_action(const MlpNet& actor,
                                       const MlpNet* generator,
                                       std::span<const double> obs,
                                       std::int64_t t, const ScheduleSet& sched,
                                       OuNoise& ou, Rng& rng);

}  // namespace td3fg
