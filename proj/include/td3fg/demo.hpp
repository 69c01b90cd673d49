#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "td3fg/env.hpp"
#include "td3fg/nn.hpp"
#include "td3fg/rng.hpp"

namespace td3fg {

struct DemoStats {
  double max = 0.0;
  double min = 0.0;
  double mean = 0.0;
};

// Immutable once generated; stats always recomputable from the trajectories.
struct DemoSet {
  std::vector<Trajectory> trajectories;
  DemoStats stats;
};

// Rolls out the scripted controller per tier with seeds derived from `seed`.
// The map order fixes the trajectory order (expert, then suboptimal, then
// failing), so the result is byte-reproducible.
DemoSet generate_demo_set(const EnvSpec& spec,
                          const std::map<DemoTier, int>& mix,
                          std::uint64_t seed);

DemoStats demo_stats(const DemoSet& demos);

// n_traj trajectories uniform without replacement, then n_trans transitions
// uniform with replacement from their union.
std::vector<const Transition*> sample_transitions(const DemoSet& demos,
                                                  int n_traj, int n_trans,
                                                  Rng& rng);

struct PretrainBatchCfg {
  int n_traj = 10;
  int n_trans = 64;
};

struct PretrainNetCfg {
  std::vector<int> hidden_sizes = {32, 64, 32};
  double lr = 1e-3;
  double l2_coef = 0.0;
};

struct PretrainResult {
  MlpNet net;
  std::vector<double> loss_history;  // one MSE value per iteration
};

// Supervised regression of demo actions on demo states (mean squared error,
// Adam). The returned net has a tanh head, so reference actions stay inside
// the action box.
PretrainResult pretrain_generator(const DemoSet& demos, int iters,
                                  const PretrainBatchCfg& batch_cfg,
                                  const PretrainNetCfg& net_cfg,
                                  std::uint64_t seed);

// BC+finetune initializer: exact parameter copy of the generator, checked
// against the actor architecture.
MlpNet bc_finetune_init(const MlpNet& generator, const MlpNet& actor_template);

// Line-delimited text format: per trajectory one header line
//   traj <tier> <seed> <total_return> <n_transitions>
// then one line per transition:
//   <s...> <a...> <r> <s'...> <done> <fr> <hr> <cc> <tc>
// Doubles are written with 17 significant digits; round-trips are bit-exact.
void save_demo_set(const DemoSet& demos, std::ostream& out);
DemoSet load_demo_set(std::istream& in);
void save_demo_set(const DemoSet& demos, const std::string& path);
DemoSet load_demo_set(const std::string& path);

}  // namespace td3fg
