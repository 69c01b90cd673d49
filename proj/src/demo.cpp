#include "td3fg/demo.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "td3fg/errors.hpp"
#include "td3fg/textio.hpp"

namespace td3fg {

DemoStats demo_stats(const DemoSet& demos) {
  if (demos.trajectories.empty()) throw EmptyError("demo_stats: empty demo set");
  DemoStats st;
  st.max = demos.trajectories.front().total_return;
  st.min = st.max;
  double sum = 0.0;
  for (const auto& traj : demos.trajectories) {
    st.max = std::max(st.max, traj.total_return);
    st.min = std::min(st.min, traj.total_return);
    sum += traj.total_return;
  }
  st.mean = sum / static_cast<double>(demos.trajectories.size());
  return st;
}

DemoSet generate_demo_set(const EnvSpec& spec,
                          const std::map<DemoTier, int>& mix,
                          std::uint64_t seed) {
  int total = 0;
  for (const auto& [tier, count] : mix) {
    if (count < 0) throw ConfigError("generate_demo_set: negative count");
    total += count;
  }
  if (total == 0) throw ConfigError("generate_demo_set: zero demonstrations requested");

  DemoSet demos;
  demos.trajectories.reserve(total);
  const DemoTier order[] = {DemoTier::Expert, DemoTier::Suboptimal,
                            DemoTier::Failing};
  std::uint64_t index = 0;
  for (DemoTier tier : order) {
    auto it = mix.find(tier);
    if (it == mix.end()) continue;
    ExpertPolicy policy(tier);
    for (int k = 0; k < it->second; ++k) {
      const std::uint64_t traj_seed = Rng::derive(seed, index++);
      Trajectory traj = rollout(spec, policy, traj_seed, spec.horizon);
      traj.tier = tier;
      for (auto& tr : traj.transitions) tr.origin = Origin::Demo;
      demos.trajectories.push_back(std::move(traj));
    }
  }
  demos.stats = demo_stats(demos);
  return demos;
}

std::vector<const Transition*> sample_transitions(const DemoSet& demos,
                                                  int n_traj, int n_trans,
                                                  Rng& rng) {
  const int count = static_cast<int>(demos.trajectories.size());
  if (count == 0) throw EmptyError("sample_transitions: empty demo set");
  if (n_traj < 1 || n_traj > count)
    throw ConfigError("sample_transitions: n_traj out of range");
  if (n_trans < 1) throw ConfigError("sample_transitions: n_trans must be >= 1");

  // Partial Fisher-Yates for the trajectory subset.
  std::vector<int> idx(count);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < n_traj; ++i) {
    const std::size_t j = i + rng.uniform_index(count - i);
    std::swap(idx[i], idx[j]);
  }

  std::vector<const Transition*> pool;
  for (int i = 0; i < n_traj; ++i)
    for (const auto& tr : demos.trajectories[idx[i]].transitions)
      pool.push_back(&tr);

  std::vector<const Transition*> batch(n_trans);
  for (int i = 0; i < n_trans; ++i) batch[i] = pool[rng.uniform_index(pool.size())];
  return batch;
}

PretrainResult pretrain_generator(const DemoSet& demos, int iters,
                                  const PretrainBatchCfg& batch_cfg,
                                  const PretrainNetCfg& net_cfg,
                                  std::uint64_t seed) {
  if (demos.trajectories.empty())
    throw EmptyError("pretrain_generator: empty demo set");
  if (iters < 0) throw ConfigError("pretrain_generator: iters must be >= 0");

  const int obs_dim = static_cast<int>(demos.trajectories[0].transitions[0].s.size());
  const int act_dim = static_cast<int>(demos.trajectories[0].transitions[0].a.size());
  std::vector<int> sizes;
  sizes.push_back(obs_dim);
  for (int h : net_cfg.hidden_sizes) sizes.push_back(h);
  sizes.push_back(act_dim);

  PretrainResult result;
  result.net = mlp_init(sizes, Activation::Tanh, Activation::Tanh,
                        Rng::derive(seed, 0));
  AdamState adam = adam_init(result.net, net_cfg.lr, net_cfg.l2_coef);
  Rng rng(Rng::derive(seed, 1));

  const int n_traj = std::min<int>(batch_cfg.n_traj,
                                   static_cast<int>(demos.trajectories.size()));
  result.loss_history.reserve(iters);
  for (int it = 0; it < iters; ++it) {
    auto batch = sample_transitions(demos, n_traj, batch_cfg.n_trans, rng);
    const std::size_t n = batch.size();
    Matrix states(n, obs_dim);
    Matrix actions(n, act_dim);
    for (std::size_t r = 0; r < n; ++r) {
      std::copy(batch[r]->s.begin(), batch[r]->s.end(), states.row(r));
      std::copy(batch[r]->a.begin(), batch[r]->a.end(), actions.row(r));
    }
    ForwardCache cache = forward_batch(result.net, states);
    const Matrix& out = cache.output();
    Matrix upstream(n, act_dim);
    double loss = 0.0;
    for (std::size_t r = 0; r < n; ++r)
      for (int c = 0; c < act_dim; ++c) {
        const double diff = out(r, c) - actions(r, c);
        upstream(r, c) = 2.0 * diff;
        loss += diff * diff;
      }
    loss /= static_cast<double>(n);
    result.loss_history.push_back(loss);
    Gradients grads = backward(result.net, cache, upstream);
    adam_step(result.net, grads, adam);
  }
  return result;
}

MlpNet bc_finetune_init(const MlpNet& generator, const MlpNet& actor_template) {
  if (!generator.same_architecture(actor_template))
    throw ShapeError("bc_finetune_init: generator/actor architecture mismatch");
  return generator;
}

namespace {

void write_vec(std::ostream& out, const std::vector<double>& v) {
  for (double x : v) out << ' ' << fmt_double(x);
}

}  // namespace

void save_demo_set(const DemoSet& demos, std::ostream& out) {
  std::size_t obs_dim = 0, act_dim = 0;
  for (const auto& traj : demos.trajectories)
    if (!traj.transitions.empty()) {
      obs_dim = traj.transitions[0].s.size();
      act_dim = traj.transitions[0].a.size();
      break;
    }
  out << "demoset-v1 " << demos.trajectories.size() << ' ' << obs_dim << ' '
      << act_dim << '\n';
  for (const auto& traj : demos.trajectories) {
    out << "traj " << to_string(traj.tier) << ' ' << traj.seed << ' '
        << fmt_double(traj.total_return) << ' ' << traj.transitions.size()
        << '\n';
    for (const auto& tr : traj.transitions) {
      std::ostringstream line;
      write_vec(line, tr.s);
      write_vec(line, tr.a);
      line << ' ' << fmt_double(tr.r);
      write_vec(line, tr.s_next);
      line << ' ' << (tr.done ? 1 : 0);
      line << ' ' << fmt_double(tr.parts.fr) << ' ' << fmt_double(tr.parts.hr)
           << ' ' << fmt_double(tr.parts.cc) << ' ' << fmt_double(tr.parts.tc);
      out << line.str().substr(1) << '\n';
    }
  }
}

DemoSet load_demo_set(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("load_demo_set: empty file");
  auto head = split_ws(line);
  if (head.size() != 4 || head[0] != "demoset-v1")
    throw IoError("load_demo_set: bad header");
  const long long n_traj = parse_int(head[1]);
  const std::size_t obs_dim = static_cast<std::size_t>(parse_int(head[2]));
  const std::size_t act_dim = static_cast<std::size_t>(parse_int(head[3]));
  const std::size_t fields = 2 * obs_dim + act_dim + 6;

  DemoSet demos;
  demos.trajectories.reserve(n_traj);
  for (long long k = 0; k < n_traj; ++k) {
    if (!std::getline(in, line)) throw IoError("load_demo_set: truncated file");
    auto tok = split_ws(line);
    if (tok.size() != 5 || tok[0] != "traj")
      throw IoError("load_demo_set: bad trajectory header");
    Trajectory traj;
    traj.tier = tier_from_string(tok[1]);
    traj.seed = static_cast<std::uint64_t>(parse_uint(tok[2]));
    traj.total_return = parse_double(tok[3]);
    const long long n_trans = parse_int(tok[4]);

    for (long long i = 0; i < n_trans; ++i) {
      if (!std::getline(in, line))
        throw IoError("load_demo_set: truncated trajectory");
      auto f = split_ws(line);
      if (f.size() != fields)
        throw IoError("load_demo_set: bad transition field count");
      Transition tr;
      std::size_t p = 0;
      tr.s.resize(obs_dim);
      for (auto& v : tr.s) v = parse_double(f[p++]);
      tr.a.resize(act_dim);
      for (auto& v : tr.a) v = parse_double(f[p++]);
      tr.r = parse_double(f[p++]);
      tr.s_next.resize(obs_dim);
      for (auto& v : tr.s_next) v = parse_double(f[p++]);
      tr.done = f[p++] == "1";
      tr.parts.fr = parse_double(f[p++]);
      tr.parts.hr = parse_double(f[p++]);
      tr.parts.cc = parse_double(f[p++]);
      tr.parts.tc = parse_double(f[p++]);
      tr.origin = Origin::Demo;
      traj.transitions.push_back(std::move(tr));
    }
    demos.trajectories.push_back(std::move(traj));
  }
  if (!demos.trajectories.empty()) demos.stats = demo_stats(demos);
  return demos;
}

void save_demo_set(const DemoSet& demos, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for write: " + path);
  save_demo_set(demos, out);
  if (!out.good()) throw IoError("write failed: " + path);
}

DemoSet load_demo_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  return load_demo_set(in);
}

}  // namespace td3fg
