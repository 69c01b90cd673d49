#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "td3fg/agent.hpp"
#include "td3fg/config.hpp"
#include "td3fg/explore.hpp"

namespace td3fg {

struct EvalRow {
  std::int64_t step = 0;
  double mean_return = 0.0;
  double fr = 0.0, hr = 0.0, cc = 0.0, tc = 0.0;
  double alpha = 0.0, beta = 0.0, gamma_w = 0.0, delta_w = 0.0;
  double critic_loss = 0.0, actor_loss = 0.0;
};

struct EvalResult {
  double mean_return = 0.0;
  double fr = 0.0, hr = 0.0, cc = 0.0, tc = 0.0;
};

struct RunLog {
  ExperimentConfig config;
  std::uint64_t seed = 0;
  std::vector<EvalRow> rows;  // ordered by step
  double final_return = 0.0;
  double best_return = 0.0;
  std::int64_t train_updates = 0;
  double wall_seconds = 0.0;
  std::int64_t abort_step = -1;  // >= 0 when a numeric error stopped the run
  std::string abort_reason;
  AgentNets nets;  // final parameters, for checkpointing and evaluation
};

// Deterministic policy wrapper (no exploration noise).
class ActorPolicy : public Policy {
 public:
  explicit ActorPolicy(const MlpNet& net) : net_(&net) {}
  std::vector<double> act(std::span<const double> obs) override;

 private:
  const MlpNet* net_;
};

// Deterministic rollouts on derived episode seeds; never mutates the actor.
EvalResult evaluate(const MlpNet& actor, const EnvSpec& spec, int episodes,
                    std::uint64_t seed);

// One exploration action. Every call consumes exactly act_dim normal draws
// from rng whatever the variant or decayed weights, so two runs differing
// only in variant keep their action streams aligned. OU-based variants
// advance `ou`; td3/bcft add alpha(t)-weighted Gaussian noise instead.
std::vector<double> select_action(const AgentNets& nets, const TrainCfg& cfg,
                                  std::span<const double> obs, std::int64_t t,
                                  const ScheduleSet& sched, OuNoise& ou,
                                  Rng& rng);

// Full training run for one seed: generate/load demos, pretrain the generator
// when the variant needs one, optionally preload the buffer, then alternate
// environment steps and gradient updates, evaluating every eval_every steps.
RunLog run_experiment(const ExperimentConfig& cfg, std::uint64_t seed);
RunLog run_experiment(const ExperimentConfig& cfg);  // first configured seed

struct SweepResult {
  std::vector<RunLog> runs;  // one per seed, in seed order
  double median_final = 0.0;
};

// Independent runs per seed; jobs > 1 executes them concurrently (runs share
// nothing, so results are identical either way).
SweepResult run_sweep(const ExperimentConfig& cfg, int jobs = 1);

double median(std::vector<double> values);

// Writes <run_name>_seed<k>.csv, .log (config echo + summary) and one
// checkpoint per trained net to out_dir.
void write_run_outputs(const RunLog& log, const std::string& out_dir);

}  // namespace td3fg
