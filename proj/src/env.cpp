#include "td3fg/env.hpp"

#include <algorithm>
#include <cmath>

#include "td3fg/errors.hpp"

namespace td3fg {

void EnvSpec::validate() const {
  if (obs_dim < 1 || act_dim < 1) throw ConfigError("env: dims must be >= 1");
  if (horizon < 1) throw ConfigError("env: horizon must be >= 1");
  if (dt <= 0.0) throw ConfigError("env: dt must be > 0");
  if (y_max <= 0.0) throw ConfigError("env: y_max must be > 0");
  if (drag < 0.0 || drag >= 1.0) throw ConfigError("env: drag must be in [0, 1)");
}

CorridorWalker::CorridorWalker(EnvSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
}

std::vector<double> CorridorWalker::reset(std::uint64_t seed) {
  Rng rng(seed);
  px_ = 0.0;
  py_ = rng.uniform(-spec_.reset_noise, spec_.reset_noise);
  vx_ = rng.uniform(-spec_.reset_noise, spec_.reset_noise);
  vy_ = rng.uniform(-spec_.reset_noise, spec_.reset_noise);
  steps_ = 0;
  done_ = false;
  return observe();
}

std::vector<double> CorridorWalker::observe() const {
  const double remaining =
      1.0 - static_cast<double>(steps_) / static_cast<double>(spec_.horizon);
  return {vx_, vy_, py_, remaining};
}

void CorridorWalker::set_state(double px, double py, double vx, double vy) {
  px_ = px;
  py_ = py;
  vx_ = vx;
  vy_ = vy;
  steps_ = 0;
  done_ = false;
}

StepResult CorridorWalker::step(std::span<const double> action) {
  if (done_) throw EpisodeDoneError("step: episode already finished");
  if (action.size() != static_cast<std::size_t>(spec_.act_dim))
    throw ShapeError("step: action dimension mismatch");
  for (double a : action)
    if (!std::isfinite(a)) throw NumericError("step: non-finite action");

  const double ax = std::clamp(action[0], -1.0, 1.0);
  const double ay = std::clamp(action[1], -1.0, 1.0);

  const double px_old = px_;
  vx_ = (1.0 - spec_.drag) * vx_ + spec_.force_scale * ax * spec_.dt;
  vy_ = (1.0 - spec_.drag) * vy_ + spec_.force_scale * ay * spec_.dt;
  px_ += vx_ * spec_.dt;
  py_ += vy_ * spec_.dt;
  steps_ += 1;

  const bool healthy = std::fabs(py_) <= spec_.y_max;
  RewardParts parts;
  parts.fr = (px_ - px_old) / spec_.dt;
  parts.hr = healthy ? spec_.healthy_bonus : 0.0;
  parts.cc = spec_.c_ctrl * (ax * ax + ay * ay);
  parts.tc = healthy ? 0.0 : spec_.c_contact;

  done_ = !healthy || steps_ >= spec_.horizon;

  StepResult res;
  res.obs = observe();
  res.reward = parts.total();
  res.done = done_;
  res.parts = parts;
  return res;
}

EnvSpec default_env_spec(const std::string& name) {
  if (name == "corridor-walker") return EnvSpec{};
  throw ConfigError("unknown environment: '" + name + "'");
}

std::unique_ptr<Env> make_env(const EnvSpec& spec) {
  if (spec.name == "corridor-walker")
    return std::make_unique<CorridorWalker>(spec);
  throw ConfigError("unknown environment: '" + spec.name + "'");
}

const char* to_string(DemoTier tier) {
  switch (tier) {
    case DemoTier::Expert: return "expert";
    case DemoTier::Suboptimal: return "suboptimal";
    case DemoTier::Failing: return "failing";
  }
  return "?";
}

DemoTier tier_from_string(const std::string& s) {
  if (s == "expert") return DemoTier::Expert;
  if (s == "suboptimal") return DemoTier::Suboptimal;
  if (s == "failing") return DemoTier::Failing;
  throw ConfigError("unknown demo tier: '" + s + "'");
}

ExpertPolicy::ExpertPolicy(DemoTier tier) : tier_(tier) {}

void ExpertPolicy::reset(std::uint64_t seed) {
  rng_ = Rng(seed);
  step_ = 0;
  fail_after_ = 10 + static_cast<int>(rng_.uniform_index(51));  // 10..60
  fail_dir_ = rng_.uniform() < 0.5 ? -1.0 : 1.0;
}

std::vector<double> ExpertPolicy::act(std::span<const double> obs) {
  const double vy = obs[1];
  const double py = obs[2];
  const int step = step_++;

  auto clip = [](double v) { return std::clamp(v, -1.0, 1.0); };

  switch (tier_) {
    case DemoTier::Expert:
      return {1.0, clip(-2.5 * py - 1.2 * vy)};
    case DemoTier::Suboptimal: {
      const double nx = 0.35 * rng_.normal();
      const double ny = 0.35 * rng_.normal();
      return {clip(0.5 + nx), clip(-1.0 * py - 0.4 * vy + ny)};
    }
    case DemoTier::Failing:
      if (step < fail_after_) return {1.0, clip(-2.5 * py - 1.2 * vy)};
      return {0.3, fail_dir_};
  }
  return std::vector<double>(2, 0.0);
}

Trajectory rollout(const EnvSpec& spec, Policy& policy, std::uint64_t seed,
                   int max_steps) {
  auto env = make_env(spec);
  std::vector<double> obs = env->reset(Rng::derive(seed, 0));
  policy.reset(Rng::derive(seed, 1));

  Trajectory traj;
  traj.seed = seed;
  for (int t = 0; t < max_steps; ++t) {
    Transition tr;
    tr.s = obs;
    tr.a = policy.act(obs);
    StepResult res = env->step(tr.a);
    tr.r = res.reward;
    tr.s_next = res.obs;
    tr.done = res.done;
    tr.parts = res.parts;
    tr.origin = Origin::Agent;
    traj.total_return += tr.r;
    obs = res.obs;
    traj.transitions.push_back(std::move(tr));
    if (res.done) break;
  }
  return traj;
}

}  // namespace td3fg
