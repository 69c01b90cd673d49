#include "td3fg/agent.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "td3fg/errors.hpp"

namespace td3fg {

const char* to_string(Variant v) {
  switch (v) {
    case Variant::Td3: return "td3";
    case Variant::Td3fg: return "td3fg";
    case Variant::Td3fgQfilter: return "td3fg_qfilter";
    case Variant::Bcft: return "bcft";
    case Variant::PreloadBuffer: return "preload_buffer";
    case Variant::Td3fgNoise: return "td3fg_noise";
    case Variant::Td3fgNoiseOnly: return "td3fg_noise_only";
  }
  return "?";
}

Variant variant_from_string(const std::string& s) {
  if (s == "td3") return Variant::Td3;
  if (s == "td3fg") return Variant::Td3fg;
  if (s == "td3fg_qfilter") return Variant::Td3fgQfilter;
  if (s == "bcft") return Variant::Bcft;
  if (s == "preload_buffer") return Variant::PreloadBuffer;
  if (s == "td3fg_noise") return Variant::Td3fgNoise;
  if (s == "td3fg_noise_only") return Variant::Td3fgNoiseOnly;
  throw ConfigError("unknown variant: '" + s + "'");
}

bool variant_uses_generator(Variant v) {
  switch (v) {
    case Variant::Td3fg:
    case Variant::Td3fgQfilter:
    case Variant::Bcft:
    case Variant::Td3fgNoise:
    case Variant::Td3fgNoiseOnly:
      return true;
    default:
      return false;
  }
}

bool variant_uses_bc_loss(Variant v) {
  return v == Variant::Td3fg || v == Variant::Td3fgNoise;
}

bool variant_uses_qfilter(Variant v) { return v == Variant::Td3fgQfilter; }

bool variant_uses_generator_noise(Variant v) {
  return v == Variant::Td3fgNoise || v == Variant::Td3fgNoiseOnly;
}

bool variant_uses_ou_noise(Variant v) {
  // td3 and bcft keep Gaussian action noise; everything else uses OU.
  return v != Variant::Td3 && v != Variant::Bcft;
}

void TrainCfg::validate() const {
  if (gamma < 0.0 || gamma >= 1.0) throw ConfigError("train: gamma must be in [0, 1)");
  if (tau < 0.0 || tau > 1.0) throw ConfigError("train: tau must be in [0, 1]");
  if (policy_delay < 1) throw ConfigError("train: policy_delay must be >= 1");
  if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
  if (lr <= 0.0) throw ConfigError("train: lr must be > 0");
  if (l2_coef < 0.0) throw ConfigError("train: l2_coef must be >= 0");
  if (smoothing_sigma < 0.0 || smoothing_clip < 0.0)
    throw ConfigError("train: smoothing parameters must be >= 0");
  if (explore_sigma < 0.0) throw ConfigError("train: explore_sigma must be >= 0");
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity < 1) throw ConfigError("replay buffer capacity must be >= 1");
}

void ReplayBuffer::preload(std::vector<Transition> demo_transitions) {
  for (auto& tr : demo_transitions) tr.origin = Origin::Demo;
  demo_ = std::move(demo_transitions);
}

void ReplayBuffer::push(Transition t) {
  if (t.origin != Origin::Agent)
    throw ConfigError("replay push: only agent transitions; demos are preloaded");
  if (live_.size() < capacity_) {
    live_.push_back(std::move(t));
  } else {
    live_[next_] = std::move(t);
    next_ = (next_ + 1) % capacity_;
  }
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t n,
                                                    Rng& rng) const {
  const std::size_t total = size();
  if (total == 0) throw EmptyError("replay sample: buffer is empty");
  if (n < 1) throw ConfigError("replay sample: n must be >= 1");
  std::vector<const Transition*> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = rng.uniform_index(total);
    out[i] = k < demo_.size() ? &demo_[k] : &live_[k - demo_.size()];
  }
  return out;
}

void preload_demos(ReplayBuffer& buffer, const DemoSet& demos, int best_k,
                   int n_transitions, Rng& rng) {
  const int count = static_cast<int>(demos.trajectories.size());
  if (best_k < 1 || best_k > count)
    throw ConfigError("preload_demos: best_k out of range");
  if (n_transitions < 0)
    throw ConfigError("preload_demos: n_transitions must be >= 0");

  std::vector<int> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return demos.trajectories[a].total_return > demos.trajectories[b].total_return;
  });

  std::vector<const Transition*> pool;
  for (int i = 0; i < best_k; ++i)
    for (const auto& tr : demos.trajectories[order[i]].transitions)
      pool.push_back(&tr);

  std::vector<Transition> region;
  region.reserve(n_transitions);
  const int pool_n = static_cast<int>(pool.size());
  if (pool_n <= n_transitions) {
    for (const auto* tr : pool) region.push_back(*tr);
    for (int i = pool_n; i < n_transitions; ++i)
      region.push_back(*pool[rng.uniform_index(pool.size())]);
  } else {
    std::vector<int> idx(pool_n);
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < n_transitions; ++i) {
      const std::size_t j = i + rng.uniform_index(pool_n - i);
      std::swap(idx[i], idx[j]);
      region.push_back(*pool[idx[i]]);
    }
  }
  buffer.preload(std::move(region));
}

AgentNets make_agent_nets(int obs_dim, int act_dim,
                          const std::vector<int>& hidden_sizes, double lr,
                          double l2_coef, std::uint64_t seed) {
  std::vector<int> actor_sizes, critic_sizes;
  actor_sizes.push_back(obs_dim);
  critic_sizes.push_back(obs_dim + act_dim);
  for (int h : hidden_sizes) {
    actor_sizes.push_back(h);
    critic_sizes.push_back(h);
  }
  actor_sizes.push_back(act_dim);
  critic_sizes.push_back(1);

  AgentNets nets;
  nets.actor = mlp_init(actor_sizes, Activation::Tanh, Activation::Tanh,
                        Rng::derive(seed, 11));
  nets.critic1 = mlp_init(critic_sizes, Activation::Relu, Activation::Identity,
                          Rng::derive(seed, 12));
  nets.critic2 = mlp_init(critic_sizes, Activation::Relu, Activation::Identity,
                          Rng::derive(seed, 13));
  nets.target_actor = nets.actor;
  nets.target_critic1 = nets.critic1;
  nets.target_critic2 = nets.critic2;
  nets.actor_opt = adam_init(nets.actor, lr, l2_coef);
  nets.critic1_opt = adam_init(nets.critic1, lr, l2_coef);
  nets.critic2_opt = adam_init(nets.critic2, lr, l2_coef);
  return nets;
}

TransitionBatch make_batch(std::span<const Transition* const> sampled) {
  if (sampled.empty()) throw EmptyError("make_batch: empty sample");
  const std::size_t n = sampled.size();
  const std::size_t obs_dim = sampled[0]->s.size();
  const std::size_t act_dim = sampled[0]->a.size();

  TransitionBatch b;
  b.s = Matrix(n, obs_dim);
  b.sa = Matrix(n, obs_dim + act_dim);
  b.s2 = Matrix(n, obs_dim);
  b.r.resize(n);
  b.not_done.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Transition& tr = *sampled[i];
    std::copy(tr.s.begin(), tr.s.end(), b.s.row(i));
    std::copy(tr.s.begin(), tr.s.end(), b.sa.row(i));
    std::copy(tr.a.begin(), tr.a.end(), b.sa.row(i) + obs_dim);
    std::copy(tr.s_next.begin(), tr.s_next.end(), b.s2.row(i));
    b.r[i] = tr.r;
    b.not_done[i] = tr.done ? 0.0 : 1.0;
  }
  return b;
}

std::vector<double> critic_targets(const TransitionBatch& batch,
                                   const AgentNets& nets, const TrainCfg& cfg,
                                   Rng& rng) {
  const std::size_t n = batch.s2.rows;
  const std::size_t obs_dim = batch.s2.cols;
  const std::size_t act_dim =
      static_cast<std::size_t>(nets.target_actor.output_dim());

  ForwardCache pi2 = forward_batch(nets.target_actor, batch.s2);
  Matrix s2a2(n, obs_dim + act_dim);
  for (std::size_t i = 0; i < n; ++i) {
    const double* s2 = batch.s2.row(i);
    const double* a2 = pi2.output().row(i);
    double* dst = s2a2.row(i);
    std::copy(s2, s2 + obs_dim, dst);
    for (std::size_t j = 0; j < act_dim; ++j) {
      const double noise = std::clamp(cfg.smoothing_sigma * rng.normal(),
                                      -cfg.smoothing_clip, cfg.smoothing_clip);
      dst[obs_dim + j] = std::clamp(a2[j] + noise, -1.0, 1.0);
    }
  }

  ForwardCache q1 = forward_batch(nets.target_critic1, s2a2);
  ForwardCache q2 = forward_batch(nets.target_critic2, s2a2);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double q_min = std::min(q1.output()(i, 0), q2.output()(i, 0));
    y[i] = batch.r[i] + cfg.gamma * batch.not_done[i] * q_min;
  }
  return y;
}

namespace {

double critic_mse_step(MlpNet& critic, AdamState& opt, const Matrix& sa,
                       std::span<const double> y) {
  ForwardCache cache = forward_batch(critic, sa);
  const Matrix& q = cache.output();
  Matrix upstream(q.rows, 1);
  double loss = 0.0;
  for (std::size_t i = 0; i < q.rows; ++i) {
    const double diff = q(i, 0) - y[i];
    upstream(i, 0) = 2.0 * diff;
    loss += diff * diff;
  }
  loss /= static_cast<double>(q.rows);
  Gradients grads = backward(critic, cache, upstream);
  adam_step(critic, grads, opt);
  return loss;
}

}  // namespace

double critic_update(AgentNets& nets, const TransitionBatch& batch,
                     std::span<const double> y, const TrainCfg& cfg) {
  (void)cfg;
  if (y.size() != batch.sa.rows)
    throw ShapeError("critic_update: target count mismatch");
  const double l1 = critic_mse_step(nets.critic1, nets.critic1_opt, batch.sa, y);
  const double l2 = critic_mse_step(nets.critic2, nets.critic2_opt, batch.sa, y);
  return 0.5 * (l1 + l2);
}

ActorLossResult actor_objective_grad(const MlpNet& actor, const MlpNet& critic1,
                                     const MlpNet* generator,
                                     const Matrix& states,
                                     const ActorObjective& objective) {
  const std::size_t n = states.rows;
  const std::size_t obs_dim = states.cols;
  const std::size_t act_dim = static_cast<std::size_t>(actor.output_dim());

  ForwardCache pi = forward_batch(actor, states);
  const Matrix& actions = pi.output();

  Matrix sa(n, obs_dim + act_dim);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(states.row(i), states.row(i) + obs_dim, sa.row(i));
    std::copy(actions.row(i), actions.row(i) + act_dim, sa.row(i) + obs_dim);
  }
  ForwardCache q = forward_batch(critic1, sa);

  // dQ/d(s,a) per row; the action slice feeds the actor's upstream.
  Matrix ones(n, 1);
  for (auto& v : ones.data) v = 1.0;
  Gradients q_grads = backward(critic1, q, ones);

  const bool bc_active = objective.qfilter || objective.bc_weight != 0.0;
  Matrix gen_actions;
  std::vector<char> include;
  if (bc_active) {
    if (generator == nullptr)
      throw ConfigError("actor objective: imitation term needs a generator");
    gen_actions = forward_batch(*generator, states).output();
    if (objective.qfilter) {
      Matrix sg(n, obs_dim + act_dim);
      for (std::size_t i = 0; i < n; ++i) {
        std::copy(states.row(i), states.row(i) + obs_dim, sg.row(i));
        std::copy(gen_actions.row(i), gen_actions.row(i) + act_dim,
                  sg.row(i) + obs_dim);
      }
      ForwardCache qg = forward_batch(critic1, sg);
      include.resize(n);
      for (std::size_t i = 0; i < n; ++i)
        include[i] = qg.output()(i, 0) > q.output()(i, 0) ? 1 : 0;
    }
  }

  Matrix upstream(n, act_dim);
  double bc_loss = 0.0;
  double q_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    q_sum += q.output()(i, 0);
    const double* dq_da = q_grads.inputs.row(i) + obs_dim;
    double* u = upstream.row(i);
    for (std::size_t j = 0; j < act_dim; ++j)
      u[j] = -objective.rl_weight * dq_da[j];
    if (!bc_active) continue;
    const double w = objective.qfilter ? (include[i] ? 1.0 : 0.0)
                                       : objective.bc_weight;
    if (w == 0.0) continue;
    const double* g = gen_actions.row(i);
    const double* a = actions.row(i);
    for (std::size_t j = 0; j < act_dim; ++j) {
      const double diff = a[j] - g[j];
      u[j] += w * 2.0 * diff;
      bc_loss += w * diff * diff;
    }
  }

  ActorLossResult res;
  res.loss = bc_loss / static_cast<double>(n) -
             objective.rl_weight * q_sum / static_cast<double>(n);
  res.grads = backward(actor, pi, upstream);
  return res;
}

ActorLossResult actor_loss_td3fg(const AgentNets& nets, const Matrix& states,
                                 std::int64_t t, const ScheduleSet& sched,
                                 double bc_scale) {
  ActorObjective obj;
  obj.bc_weight = bc_scale * sched.gamma_w(t);
  obj.rl_weight = sched.delta_w(t);
  const MlpNet* gen = nets.generator ? &*nets.generator : nullptr;
  return actor_objective_grad(nets.actor, nets.critic1, gen, states, obj);
}

ActorLossResult actor_loss_qfilter(const AgentNets& nets, const Matrix& states) {
  ActorObjective obj;
  obj.qfilter = true;
  obj.rl_weight = 1.0;
  const MlpNet* gen = nets.generator ? &*nets.generator : nullptr;
  return actor_objective_grad(nets.actor, nets.critic1, gen, states, obj);
}

void soft_update(const MlpNet& source, MlpNet& target, double tau) {
  if (!source.same_architecture(target))
    throw ShapeError("soft_update: architecture mismatch");
  for (std::size_t l = 0; l < source.num_layers(); ++l) {
    for (std::size_t i = 0; i < source.weights[l].size(); ++i)
      target.weights[l][i] =
          tau * source.weights[l][i] + (1.0 - tau) * target.weights[l][i];
    for (std::size_t i = 0; i < source.biases[l].size(); ++i)
      target.biases[l][i] =
          tau * source.biases[l][i] + (1.0 - tau) * target.biases[l][i];
  }
}

Trainer::Trainer(AgentNets nets, TrainCfg cfg)
    : nets_(std::move(nets)), cfg_(cfg) {
  cfg_.validate();
  if (variant_uses_generator(cfg_.variant) && !nets_.generator)
    throw ConfigError("trainer: variant needs a generator net");
}

StepMetrics Trainer::train_step(ReplayBuffer& buffer, std::int64_t t,
                                const ScheduleSet& sched, Rng& rng) {
  auto sampled = buffer.sample(cfg_.batch_size, rng);
  TransitionBatch batch = make_batch(sampled);
  std::vector<double> y = critic_targets(batch, nets_, cfg_, rng);

  StepMetrics m;
  m.critic_loss = critic_update(nets_, batch, y, cfg_);
  m.alpha = sched.alpha(t);
  m.beta = sched.beta(t);
  m.gamma_w = sched.gamma_w(t);
  m.delta_w = sched.delta_w(t);

  updates_ += 1;
  if (updates_ % cfg_.policy_delay == 0) {
    ActorLossResult res;
    if (variant_uses_qfilter(cfg_.variant)) {
      res = actor_loss_qfilter(nets_, batch.s);
    } else if (variant_uses_bc_loss(cfg_.variant)) {
      res = actor_loss_td3fg(nets_, batch.s, t, sched, cfg_.bc_scale);
    } else {
      ActorObjective plain;  // pure -Q objective
      res = actor_objective_grad(nets_.actor, nets_.critic1, nullptr, batch.s,
                                 plain);
    }
    adam_step(nets_.actor, res.grads, nets_.actor_opt);
    soft_update(nets_.actor, nets_.target_actor, cfg_.tau);
    soft_update(nets_.critic1, nets_.target_critic1, cfg_.tau);
    soft_update(nets_.critic2, nets_.target_critic2, cfg_.tau);
    last_actor_loss_ = res.loss;
    m.actor_updated = true;
  }
  m.actor_loss = last_actor_loss_;
  return m;
}

}  // namespace td3fg
