#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "td3fg/rng.hpp"

namespace td3fg {

// Physics and reward constants for one environment. The action space is
// always the box [-1, 1]^act_dim.
struct EnvSpec {
  std::string name = "corridor-walker";
  int obs_dim = 4;
  int act_dim = 2;
  int horizon = 200;
  double dt = 0.05;
  double mass = 1.0;
  double drag = 0.05;
  double force_scale = 2.0;
  double y_max = 1.0;           // corridor half-width
  double healthy_bonus = 1.0;
  double c_ctrl = 0.05;
  double c_contact = 0.5;
  double reset_noise = 0.05;

  void validate() const;
};

// Reward decomposition: total = fr + hr - cc - tc.
struct RewardParts {
  double fr = 0.0;  // forward progress
  double hr = 0.0;  // healthy-alive bonus
  double cc = 0.0;  // control cost
  double tc = 0.0;  // contact cost
  double total() const { return fr + hr - cc - tc; }
};

enum class Origin { Agent, Demo };

struct Transition {
  std::vector<double> s;
  std::vector<double> a;
  double r = 0.0;
  std::vector<double> s_next;
  bool done = false;
  RewardParts parts;
  Origin origin = Origin::Agent;
};

struct StepResult {
  std::vector<double> obs;
  double reward = 0.0;
  bool done = false;
  RewardParts parts;
};

class Env {
 public:
  virtual ~Env() = default;
  virtual const EnvSpec& spec() const = 0;
  virtual std::vector<double> reset(std::uint64_t seed) = 0;
  virtual StepResult step(std::span<const double> action) = 0;
  virtual bool done() const = 0;
};

// Point mass pushed along a corridor. Observation (v_x, v_y, p_y, remaining
// fraction of the step budget); p_x is intentionally not observed so no
// feature grows without bound. Dynamics per step:
//   v <- (1 - drag) * v + force_scale * a * dt,  p <- p + v * dt
// Reward: fr = dp_x/dt, hr = healthy_bonus while |p_y| <= y_max, cc =
// c_ctrl*|a|^2, tc = c_contact on the step that leaves the corridor. The
// episode ends on corridor exit or when the step budget is spent.
class CorridorWalker : public Env {
 public:
  explicit CorridorWalker(EnvSpec spec);

  const EnvSpec& spec() const override { return spec_; }
  std::vector<double> reset(std::uint64_t seed) override;
  StepResult step(std::span<const double> action) override;
  bool done() const override { return done_; }

  std::vector<double> observe() const;
  // Direct state access for tests.
  void set_state(double px, double py, double vx, double vy);

 private:
  EnvSpec spec_;
  double px_ = 0.0, py_ = 0.0, vx_ = 0.0, vy_ = 0.0;
  int steps_ = 0;
  bool done_ = true;  // must reset() before stepping
};

// Registry of built-in environments (currently just corridor-walker).
EnvSpec default_env_spec(const std::string& name);
std::unique_ptr<Env> make_env(const EnvSpec& spec);

// A policy maps observations to actions; reset(seed) re-draws any internal
// randomness at episode start.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual void reset(std::uint64_t /*seed*/) {}
  virtual std::vector<double> act(std::span<const double> obs) = 0;
};

enum class DemoTier { Expert, Suboptimal, Failing };

const char* to_string(DemoTier tier);
DemoTier tier_from_string(const std::string& s);

// Scripted demonstration controller. The expert drives +x at full force and
// centers p_y with a PD law. The suboptimal tier detunes the gains and adds
// Gaussian action noise. The failing tier behaves like the expert for a
// randomly drawn prefix, then saturates the lateral action until the episode
// terminates at the corridor boundary.
class ExpertPolicy : public Policy {
 public:
  explicit ExpertPolicy(DemoTier tier);

  void reset(std::uint64_t seed) override;
  std::vector<double> act(std::span<const double> obs) override;

 private:
  DemoTier tier_;
  Rng rng_{0};
  int step_ = 0;
  int fail_after_ = 0;
  double fail_dir_ = 1.0;
};

struct Trajectory {
  std::vector<Transition> transitions;
  double total_return = 0.0;
  DemoTier tier = DemoTier::Expert;
  std::uint64_t seed = 0;
};

// Runs policy in a fresh environment until done or max_steps. Deterministic
// per (spec, policy, seed).
Trajectory rollout(const EnvSpec& spec, Policy& policy, std::uint64_t seed,
                   int max_steps);

}  // namespace td3fg
