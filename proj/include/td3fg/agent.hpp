#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "td3fg/demo.hpp"
#include "td3fg/env.hpp"
#include "td3fg/nn.hpp"
#include "td3fg/rng.hpp"
#include "td3fg/sched.hpp"

namespace td3fg {

// Training variants. td3 is the plain baseline; td3fg adds the scheduled
// imitation loss; the others cover the ablations (Q-filter gate, generator
// action noise, noise without imitation loss, demo-preloaded buffer) and the
// BC+finetune baseline.
enum class Variant {
  Td3,
  Td3fg,
  Td3fgQfilter,
  Bcft,
  PreloadBuffer,
  Td3fgNoise,
  Td3fgNoiseOnly,
};

const char* to_string(Variant v);
Variant variant_from_string(const std::string& s);

bool variant_uses_generator(Variant v);       // needs a pretrained generator
bool variant_uses_bc_loss(Variant v);         // scheduled imitation blend
bool variant_uses_qfilter(Variant v);
bool variant_uses_generator_noise(Variant v); // beta-weighted action bias
bool variant_uses_ou_noise(Variant v);        // OU vs Gaussian exploration

struct TrainCfg {
  double gamma = 0.99;
  double tau = 0.005;
  int policy_delay = 2;
  double smoothing_sigma = 0.2;
  double smoothing_clip = 0.5;
  int batch_size = 64;
  double lr = 1e-3;
  double l2_coef = 1e-4;
  double explore_sigma = 0.1;  // Gaussian exploration scale (td3 / bcft)
  double bc_scale = 1.0;       // extra multiplier on the imitation weight
  Variant variant = Variant::Td3fg;

  void validate() const;
};

// Replay store with a protected demonstration region: preloaded transitions
// are never evicted, live agent transitions sit in a FIFO ring. Sampling is
// uniform over the union.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void preload(std::vector<Transition> demo_transitions);
  void push(Transition t);  // agent-origin transitions only
  std::vector<const Transition*> sample(std::size_t n, Rng& rng) const;

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return demo_.size() + live_.size(); }
  std::size_t demo_size() const { return demo_.size(); }
  std::size_t live_size() const { return live_.size(); }
  const std::vector<Transition>& demo_region() const { return demo_; }
  const std::vector<Transition>& live_region() const { return live_; }

 private:
  std::size_t capacity_;
  std::vector<Transition> demo_;
  std::vector<Transition> live_;
  std::size_t next_ = 0;
};

// Ranks trajectories by total return, takes the top best_k, and fills the
// buffer's demo region with n_transitions from their union: the exact union
// when it has n_transitions or fewer members (with-replacement resampling
// tops up a short union), otherwise a uniform without-replacement subset.
void preload_demos(ReplayBuffer& buffer, const DemoSet& demos, int best_k,
                   int n_transitions, Rng& rng);

struct AgentNets {
  MlpNet actor, critic1, critic2;
  MlpNet target_actor, target_critic1, target_critic2;
  std::optional<MlpNet> generator;  // frozen after pretraining
  AdamState actor_opt, critic1_opt, critic2_opt;
};

AgentNets make_agent_nets(int obs_dim, int act_dim,
                          const std::vector<int>& hidden_sizes, double lr,
                          double l2_coef, std::uint64_t seed);

struct TransitionBatch {
  Matrix s;    // states
  Matrix sa;   // states | actions, critic input
  Matrix s2;   // next states
  std::vector<double> r;
  std::vector<double> not_done;  // 1 - done
};

TransitionBatch make_batch(std::span<const Transition* const> sampled);

// y_i = r_i + gamma * (1 - done_i) * min(Q1'(s', a~), Q2'(s', a~)) with
// a~ = clip(pi'(s') + clipped normal noise, action box).
std::vector<double> critic_targets(const TransitionBatch& batch,
                                   const AgentNets& nets, const TrainCfg& cfg,
                                   Rng& rng);

// One Adam step per critic on the mean squared Bellman error against y.
// Returns the pre-update MSE averaged over the two critics.
double critic_update(AgentNets& nets, const TransitionBatch& batch,
                     std::span<const double> y, const TrainCfg& cfg);

struct ActorObjective {
  double bc_weight = 0.0;  // bc_scale * gamma(t); 0 skips the imitation term
  double rl_weight = 1.0;  // delta(t)
  bool qfilter = false;
};

struct ActorLossResult {
  double loss = 0.0;
  Gradients grads;  // w.r.t. the actor only; critic and generator frozen
};

ActorLossResult actor_objective_grad(const MlpNet& actor, const MlpNet& critic1,
                                     const MlpNet* generator,
                                     const Matrix& states,
                                     const ActorObjective& objective);

// L = bc_scale*gamma(t) * mean|pi_bc(s) - pi(s)|^2 - delta(t) * mean Q1(s, pi(s))
ActorLossResult actor_loss_td3fg(const AgentNets& nets, const Matrix& states,
                                 std::int64_t t, const ScheduleSet& sched,
                                 double bc_scale);

// Per-sample gate: the imitation term applies only where
// Q1(s, pi_bc(s)) > Q1(s, pi(s)) (strictly); no schedules.
ActorLossResult actor_loss_qfilter(const AgentNets& nets, const Matrix& states);

// theta_target <- tau * theta_source + (1 - tau) * theta_target
void soft_update(const MlpNet& source, MlpNet& target, double tau);

struct StepMetrics {
  double critic_loss = 0.0;
  double actor_loss = 0.0;  // last computed value; 0 before the first update
  double alpha = 0.0, beta = 0.0, gamma_w = 0.0, delta_w = 0.0;
  bool actor_updated = false;
};

// Owns the nets and the update counter; one trainer per run.
class Trainer {
 public:
  Trainer(AgentNets nets, TrainCfg cfg);

  // Sample, update critics, and every policy_delay-th call update the actor
  // (objective per cfg.variant) and soft-update all three targets.
  StepMetrics train_step(ReplayBuffer& buffer, std::int64_t t,
                         const ScheduleSet& sched, Rng& rng);

  const AgentNets& nets() const { return nets_; }
  AgentNets& nets() { return nets_; }
  const TrainCfg& cfg() const { return cfg_; }
  std::int64_t update_count() const { return updates_; }

 private:
  AgentNets nets_;
  TrainCfg cfg_;
  std::int64_t updates_ = 0;
  double last_actor_loss_ = 0.0;
};

}  // namespace td3fg
