#include "td3fg/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>

#include "td3fg/errors.hpp"
#include "td3fg/report.hpp"
#include "td3fg/textio.hpp"

namespace td3fg {

namespace {

// Sub-stream ids for deriving independent rngs from the run seed.
enum Stream : std::uint64_t {
  kNets = 1,
  kPreload = 2,
  kActions = 3,
  kTraining = 4,
  kWarmup = 5,
  kEpisodes = 6,
  kEval = 7,
  kPretrain = 8,
};

}  // namespace

std::vector<double> ActorPolicy::act(std::span<const double> obs) {
  std::vector<double> a = forward(*net_, obs);
  for (auto& v : a) v = std::clamp(v, -1.0, 1.0);
  return a;
}

EvalResult evaluate(const MlpNet& actor, const EnvSpec& spec, int episodes,
                    std::uint64_t seed) {
  if (episodes < 1) throw ConfigError("evaluate: episodes must be >= 1");
  ActorPolicy policy(actor);
  EvalResult res;
  for (int e = 0; e < episodes; ++e) {
    Trajectory traj = rollout(spec, policy, Rng::derive(seed, e), spec.horizon);
    res.mean_return += traj.total_return;
    for (const auto& tr : traj.transitions) {
      res.fr += tr.parts.fr;
      res.hr += tr.parts.hr;
      res.cc += tr.parts.cc;
      res.tc += tr.parts.tc;
    }
  }
  const double inv = 1.0 / static_cast<double>(episodes);
  res.mean_return *= inv;
  res.fr *= inv;
  res.hr *= inv;
  res.cc *= inv;
  res.tc *= inv;
  return res;
}

std::vector<double> select_action(const AgentNets& nets, const TrainCfg& cfg,
                                  std::span<const double> obs, std::int64_t t,
                                  const ScheduleSet& sched, OuNoise& ou,
                                  Rng& rng) {
  if (variant_uses_ou_noise(cfg.variant)) {
    const MlpNet* gen = variant_uses_generator_noise(cfg.variant) && nets.generator
                            ? &*nets.generator
                            : nullptr;
    return exploration_action(nets.actor, gen, obs, t, sched, ou, rng);
  }
  // Gaussian exploration, same decay horizon and same draw count as OU.
  std::vector<double> action = forward(nets.actor, obs);
  std::vector<double> z(action.size());
  for (auto& v : z) v = rng.normal();
  const double scale = sched.alpha(t) * cfg.explore_sigma;
  if (scale != 0.0)
    for (std::size_t i = 0; i < action.size(); ++i) action[i] += scale * z[i];
  for (auto& a : action) a = std::clamp(a, -1.0, 1.0);
  return action;
}

RunLog run_experiment(const ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const auto t_start = std::chrono::steady_clock::now();

  RunLog log;
  log.config = cfg;
  log.seed = seed;

  // Demo set and generator are seeded from demo_seed, not the run seed: one
  // demonstration corpus per experiment, shared across a seed sweep.
  DemoSet demos;
  if (cfg.needs_demos()) {
    if (!cfg.demo_file.empty()) {
      demos = load_demo_set(cfg.demo_file);
    } else {
      std::map<DemoTier, int> mix = {{DemoTier::Expert, cfg.demo_expert},
                                     {DemoTier::Suboptimal, cfg.demo_suboptimal},
                                     {DemoTier::Failing, cfg.demo_failing}};
      demos = generate_demo_set(cfg.env, mix, cfg.demo_seed);
    }
  }

  AgentNets nets = make_agent_nets(cfg.env.obs_dim, cfg.env.act_dim,
                                   cfg.hidden_sizes, cfg.train.lr,
                                   cfg.train.l2_coef, Rng::derive(seed, kNets));
  if (variant_uses_generator(cfg.train.variant)) {
    PretrainNetCfg net_cfg{cfg.hidden_sizes, cfg.pretrain_lr, 0.0};
    PretrainBatchCfg batch_cfg{cfg.pretrain_traj, cfg.pretrain_trans};
    nets.generator = pretrain_generator(demos, cfg.pretrain_iters, batch_cfg,
                                        net_cfg,
                                        Rng::derive(cfg.demo_seed, kPretrain))
                         .net;
    if (cfg.train.variant == Variant::Bcft) {
      nets.actor = bc_finetune_init(*nets.generator, nets.actor);
      nets.target_actor = nets.actor;
    }
  }

  ReplayBuffer buffer(cfg.replay_capacity);
  if (cfg.preload_transitions > 0) {
    Rng preload_rng(Rng::derive(seed, kPreload));
    preload_demos(buffer, demos, cfg.preload_best_k, cfg.preload_transitions,
                  preload_rng);
  }

  Trainer trainer(std::move(nets), cfg.train);
  auto env = make_env(cfg.env);
  OuNoise ou(cfg.env.act_dim, cfg.ou_theta, 0.0, cfg.ou_sigma, 1.0);
  Rng action_rng(Rng::derive(seed, kActions));
  Rng train_rng(Rng::derive(seed, kTraining));
  Rng warmup_rng(Rng::derive(seed, kWarmup));
  const std::uint64_t episode_base = Rng::derive(seed, kEpisodes);
  const std::uint64_t eval_seed = Rng::derive(seed, kEval);

  StepMetrics metrics;
  auto push_eval_row = [&](std::int64_t step) {
    const EvalResult ev =
        evaluate(trainer.nets().actor, cfg.env, cfg.eval_episodes, eval_seed);
    EvalRow row;
    row.step = step;
    row.mean_return = ev.mean_return;
    row.fr = ev.fr;
    row.hr = ev.hr;
    row.cc = ev.cc;
    row.tc = ev.tc;
    row.alpha = cfg.sched.alpha(step);
    row.beta = cfg.sched.beta(step);
    row.gamma_w = cfg.sched.gamma_w(step);
    row.delta_w = cfg.sched.delta_w(step);
    row.critic_loss = metrics.critic_loss;
    row.actor_loss = metrics.actor_loss;
    log.rows.push_back(row);
  };

  std::vector<double> obs;
  bool need_reset = true;
  std::uint64_t episodes = 0;
  for (std::int64_t t = 0; t < cfg.total_steps; ++t) {
    if (t % cfg.eval_every == 0) push_eval_row(t);
    try {
      if (need_reset) {
        obs = env->reset(Rng::derive(episode_base, episodes++));
        ou.reset();
        need_reset = false;
      }

      std::vector<double> action;
      if (t < cfg.warmup_steps) {
        action.resize(cfg.env.act_dim);
        for (auto& a : action) a = warmup_rng.uniform(-1.0, 1.0);
      } else {
        action = select_action(trainer.nets(), cfg.train, obs, t, cfg.sched,
                               ou, action_rng);
      }

      StepResult res = env->step(action);
      Transition tr;
      tr.s = std::move(obs);
      tr.a = std::move(action);
      tr.r = res.reward;
      tr.s_next = res.obs;
      tr.done = res.done;
      tr.parts = res.parts;
      tr.origin = Origin::Agent;
      buffer.push(std::move(tr));
      obs = std::move(res.obs);
      if (res.done) need_reset = true;

      if (t >= cfg.warmup_steps)
        metrics = trainer.train_step(buffer, t, cfg.sched, train_rng);
    } catch (const NumericError& err) {
      log.abort_step = t;
      log.abort_reason = err.what();
      break;
    }
  }
  if (log.abort_step < 0) push_eval_row(cfg.total_steps);

  log.train_updates = trainer.update_count();
  log.nets = trainer.nets();
  if (!log.rows.empty()) {
    log.final_return = log.rows.back().mean_return;
    log.best_return = log.rows.front().mean_return;
    for (const auto& row : log.rows)
      log.best_return = std::max(log.best_return, row.mean_return);
  }
  log.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return log;
}

RunLog run_experiment(const ExperimentConfig& cfg) {
  if (cfg.seeds.empty()) throw ConfigError("run_experiment: no seeds configured");
  return run_experiment(cfg, cfg.seeds.front());
}

double median(std::vector<double> values) {
  if (values.empty()) throw EmptyError("median: no values");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

SweepResult run_sweep(const ExperimentConfig& cfg, int jobs) {
  cfg.validate();
  if (jobs < 1) jobs = 1;

  SweepResult result;
  result.runs.resize(cfg.seeds.size());
  std::size_t next = 0;
  while (next < cfg.seeds.size()) {
    const std::size_t batch =
        std::min<std::size_t>(jobs, cfg.seeds.size() - next);
    std::vector<std::future<RunLog>> futures;
    for (std::size_t i = 0; i < batch; ++i) {
      const std::uint64_t seed = cfg.seeds[next + i];
      futures.push_back(std::async(std::launch::async, [&cfg, seed] {
        return run_experiment(cfg, seed);
      }));
    }
    for (std::size_t i = 0; i < batch; ++i)
      result.runs[next + i] = futures[i].get();
    next += batch;
  }

  std::vector<double> finals;
  for (const auto& run : result.runs) finals.push_back(run.final_return);
  result.median_final = median(finals);
  return result;
}

void write_run_outputs(const RunLog& log, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::string base = out_dir + "/" + log.config.run_name + "_seed" +
                           std::to_string(log.seed);
  emit_csv(log, base + ".csv");

  if (!log.nets.actor.layer_sizes.empty()) {
    save_net(log.nets.actor, base + "_actor.ckpt");
    save_net(log.nets.critic1, base + "_critic1.ckpt");
    save_net(log.nets.critic2, base + "_critic2.ckpt");
    if (log.nets.generator) save_net(*log.nets.generator, base + "_generator.ckpt");
  }

  std::ofstream meta(base + ".log");
  if (!meta) throw IoError("cannot open for write: " + base + ".log");
  save_config(log.config, meta);
  meta << "seed = " << log.seed << '\n';
  meta << "final_return = " << fmt_double(log.final_return) << '\n';
  meta << "best_return = " << fmt_double(log.best_return) << '\n';
  meta << "train_updates = " << log.train_updates << '\n';
  meta << "wall_seconds = " << fmt_double(log.wall_seconds) << '\n';
  if (log.abort_step >= 0) {
    meta << "abort_step = " << log.abort_step << '\n';
    meta << "abort_reason = " << log.abort_reason << '\n';
  }
}

}  // namespace td3fg
