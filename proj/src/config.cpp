#include "td3fg/config.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "td3fg/errors.hpp"
#include "td3fg/textio.hpp"

namespace td3fg {

EnvSpec desk_corridor_spec() {
  EnvSpec spec;          // registry defaults for corridor-walker
  spec.y_max = 0.15;     // narrow corridor: survival needs real feedback
  spec.drag = 0.01;      // momentum carries mistakes a long way
  spec.c_contact = 2.0;  // leaving the corridor hurts
  return spec;
}

void ExperimentConfig::validate() const {
  env.validate();
  sched.validate();
  train.validate();
  if (total_steps <= 0) throw ConfigError("config: total_steps must be > 0");
  if (warmup_steps < 0) throw ConfigError("config: warmup_steps must be >= 0");
  if (eval_every <= 0) throw ConfigError("config: eval_every must be > 0");
  if (eval_episodes < 1) throw ConfigError("config: eval_episodes must be >= 1");
  if (hidden_sizes.empty()) throw ConfigError("config: hidden_sizes empty");
  if (replay_capacity < 1) throw ConfigError("config: replay_capacity must be >= 1");
  if (seeds.empty()) throw ConfigError("config: need at least one seed");
  if (pretrain_iters < 0) throw ConfigError("config: pretrain_iters must be >= 0");
  if (pretrain_traj < 1 || pretrain_trans < 1)
    throw ConfigError("config: pretrain batch sizes must be >= 1");
  if ((preload_best_k > 0) != (preload_transitions > 0))
    throw ConfigError("config: preload_best_k and preload_transitions go together");
  if (train.variant == Variant::PreloadBuffer && preload_transitions == 0)
    throw ConfigError("config: preload_buffer variant requires a preload");
  if (demo_file.empty() && needs_demos() &&
      demo_expert + demo_suboptimal + demo_failing <= 0)
    throw ConfigError("config: demo mix is empty");
}

bool ExperimentConfig::needs_demos() const {
  return variant_uses_generator(train.variant) || preload_transitions > 0;
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig cfg;  // defaults = desk-scale td3fg
  cfg.run_name = name;
  if (name == "td3fg") {
    cfg.train.variant = Variant::Td3fg;
  } else if (name == "td3") {
    cfg.train.variant = Variant::Td3;
  } else if (name == "bcft") {
    cfg.train.variant = Variant::Bcft;
  } else if (name == "ddpgfd_like") {
    cfg.train.variant = Variant::PreloadBuffer;
    cfg.preload_best_k = 10;
    cfg.preload_transitions = 1000;
  } else if (name == "td3fg_qfilter") {
    cfg.train.variant = Variant::Td3fgQfilter;
  } else if (name == "td3fg_noise") {
    cfg.train.variant = Variant::Td3fgNoise;
  } else if (name == "td3fg_noise_only") {
    cfg.train.variant = Variant::Td3fgNoiseOnly;
  } else if (name == "td3fg_buffer") {
    // Scheduled imitation loss plus a preload drawn from the whole mixed-
    // quality demo set, not just the best trajectories.
    cfg.train.variant = Variant::Td3fg;
    cfg.preload_best_k = 100;
    cfg.preload_transitions = 1000;
  } else if (name == "full") {
    // Full-scale recipe; hours of compute, documented for reference only.
    cfg.train.variant = Variant::Td3fg;
    cfg.total_steps = 750000;
    cfg.warmup_steps = 10000;
    cfg.eval_every = 10000;
    cfg.sched = ScheduleSet{600000, 300000, 300000, 0.2};
    cfg.hidden_sizes = {256, 512, 256};
    cfg.train.lr = 1e-4;
    cfg.train.batch_size = 256;
    cfg.pretrain_iters = 50000;
    cfg.pretrain_trans = 640;
    cfg.pretrain_lr = 1e-4;
    cfg.replay_capacity = 1000000;
  } else {
    throw ConfigError("unknown preset: '" + name + "'");
  }
  return cfg;
}

std::vector<std::string> preset_names() {
  return {"td3",          "td3fg",       "bcft",
          "ddpgfd_like",  "td3fg_qfilter", "td3fg_noise",
          "td3fg_noise_only", "td3fg_buffer", "full"};
}

namespace {

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

std::string join_seeds(const std::vector<std::uint64_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (const auto& part : split(s, ','))
    out.push_back(static_cast<int>(parse_int(trim(part))));
  return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& s) {
  std::vector<std::uint64_t> out;
  for (const auto& part : split(s, ','))
    out.push_back(static_cast<std::uint64_t>(parse_uint(trim(part))));
  return out;
}

}  // namespace

void save_config(const ExperimentConfig& cfg, std::ostream& out) {
  out << "# experiment config\n";
  out << "run_name = " << cfg.run_name << '\n';
  out << "variant = " << to_string(cfg.train.variant) << '\n';
  out << "env = " << cfg.env.name << '\n';
  out << "horizon = " << cfg.env.horizon << '\n';
  out << "env_dt = " << fmt_double(cfg.env.dt) << '\n';
  out << "drag = " << fmt_double(cfg.env.drag) << '\n';
  out << "force_scale = " << fmt_double(cfg.env.force_scale) << '\n';
  out << "y_max = " << fmt_double(cfg.env.y_max) << '\n';
  out << "healthy_bonus = " << fmt_double(cfg.env.healthy_bonus) << '\n';
  out << "c_ctrl = " << fmt_double(cfg.env.c_ctrl) << '\n';
  out << "c_contact = " << fmt_double(cfg.env.c_contact) << '\n';
  out << "reset_noise = " << fmt_double(cfg.env.reset_noise) << '\n';
  out << "total_steps = " << cfg.total_steps << '\n';
  out << "warmup_steps = " << cfg.warmup_steps << '\n';
  out << "eval_every = " << cfg.eval_every << '\n';
  out << "eval_episodes = " << cfg.eval_episodes << '\n';
  out << "t1 = " << cfg.sched.t1 << '\n';
  out << "t2 = " << cfg.sched.t2 << '\n';
  out << "t3 = " << cfg.sched.t3 << '\n';
  out << "theta_offset = " << fmt_double(cfg.sched.theta_offset) << '\n';
  out << "bc_scale = " << fmt_double(cfg.train.bc_scale) << '\n';
  out << "gamma = " << fmt_double(cfg.train.gamma) << '\n';
  out << "tau = " << fmt_double(cfg.train.tau) << '\n';
  out << "policy_delay = " << cfg.train.policy_delay << '\n';
  out << "smoothing_sigma = " << fmt_double(cfg.train.smoothing_sigma) << '\n';
  out << "smoothing_clip = " << fmt_double(cfg.train.smoothing_clip) << '\n';
  out << "batch_size = " << cfg.train.batch_size << '\n';
  out << "lr = " << fmt_double(cfg.train.lr) << '\n';
  out << "l2_coef = " << fmt_double(cfg.train.l2_coef) << '\n';
  out << "explore_sigma = " << fmt_double(cfg.train.explore_sigma) << '\n';
  out << "ou_theta = " << fmt_double(cfg.ou_theta) << '\n';
  out << "ou_sigma = " << fmt_double(cfg.ou_sigma) << '\n';
  out << "hidden_sizes = " << join_ints(cfg.hidden_sizes) << '\n';
  out << "replay_capacity = " << cfg.replay_capacity << '\n';
  out << "demo_file = " << cfg.demo_file << '\n';
  out << "demo_seed = " << cfg.demo_seed << '\n';
  out << "demo_expert = " << cfg.demo_expert << '\n';
  out << "demo_suboptimal = " << cfg.demo_suboptimal << '\n';
  out << "demo_failing = " << cfg.demo_failing << '\n';
  out << "pretrain_iters = " << cfg.pretrain_iters << '\n';
  out << "pretrain_traj = " << cfg.pretrain_traj << '\n';
  out << "pretrain_trans = " << cfg.pretrain_trans << '\n';
  out << "pretrain_lr = " << fmt_double(cfg.pretrain_lr) << '\n';
  out << "preload_best_k = " << cfg.preload_best_k << '\n';
  out << "preload_transitions = " << cfg.preload_transitions << '\n';
  out << "seeds = " << join_seeds(cfg.seeds) << '\n';
  out << "out_dir = " << cfg.out_dir << '\n';
}

void save_config(const ExperimentConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for write: " + path);
  save_config(cfg, out);
  if (!out.good()) throw IoError("write failed: " + path);
}

ExperimentConfig parse_config(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line without '=': " + t);
    entries.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }

  // A preset line, when present, supplies the baseline; the environment name
  // resets the physics block; every other key is an override. Applied in that
  // order regardless of where the lines sit in the file.
  ExperimentConfig cfg;
  for (const auto& [k, v] : entries)
    if (k == "preset") cfg = preset(v);
  for (const auto& [k, v] : entries)
    if (k == "env") cfg.env = default_env_spec(v);

  for (const auto& [k, v] : entries) {
    if (k == "preset" || k == "env") continue;
    else if (k == "run_name") cfg.run_name = v;
    else if (k == "variant") cfg.train.variant = variant_from_string(v);
    else if (k == "horizon") cfg.env.horizon = static_cast<int>(parse_int(v));
    else if (k == "env_dt") cfg.env.dt = parse_double(v);
    else if (k == "drag") cfg.env.drag = parse_double(v);
    else if (k == "force_scale") cfg.env.force_scale = parse_double(v);
    else if (k == "y_max") cfg.env.y_max = parse_double(v);
    else if (k == "healthy_bonus") cfg.env.healthy_bonus = parse_double(v);
    else if (k == "c_ctrl") cfg.env.c_ctrl = parse_double(v);
    else if (k == "c_contact") cfg.env.c_contact = parse_double(v);
    else if (k == "reset_noise") cfg.env.reset_noise = parse_double(v);
    else if (k == "total_steps") cfg.total_steps = parse_int(v);
    else if (k == "warmup_steps") cfg.warmup_steps = parse_int(v);
    else if (k == "eval_every") cfg.eval_every = parse_int(v);
    else if (k == "eval_episodes") cfg.eval_episodes = static_cast<int>(parse_int(v));
    else if (k == "t1") cfg.sched.t1 = parse_int(v);
    else if (k == "t2") cfg.sched.t2 = parse_int(v);
    else if (k == "t3") cfg.sched.t3 = parse_int(v);
    else if (k == "theta_offset") cfg.sched.theta_offset = parse_double(v);
    else if (k == "bc_scale") cfg.train.bc_scale = parse_double(v);
    else if (k == "gamma") cfg.train.gamma = parse_double(v);
    else if (k == "tau") cfg.train.tau = parse_double(v);
    else if (k == "policy_delay") cfg.train.policy_delay = static_cast<int>(parse_int(v));
    else if (k == "smoothing_sigma") cfg.train.smoothing_sigma = parse_double(v);
    else if (k == "smoothing_clip") cfg.train.smoothing_clip = parse_double(v);
    else if (k == "batch_size") cfg.train.batch_size = static_cast<int>(parse_int(v));
    else if (k == "lr") cfg.train.lr = parse_double(v);
    else if (k == "l2_coef") cfg.train.l2_coef = parse_double(v);
    else if (k == "explore_sigma") cfg.train.explore_sigma = parse_double(v);
    else if (k == "ou_theta") cfg.ou_theta = parse_double(v);
    else if (k == "ou_sigma") cfg.ou_sigma = parse_double(v);
    else if (k == "hidden_sizes") cfg.hidden_sizes = parse_int_list(v);
    else if (k == "replay_capacity") cfg.replay_capacity = static_cast<std::size_t>(parse_int(v));
    else if (k == "demo_file") cfg.demo_file = v;
    else if (k == "demo_seed") cfg.demo_seed = static_cast<std::uint64_t>(parse_uint(v));
    else if (k == "demo_expert") cfg.demo_expert = static_cast<int>(parse_int(v));
    else if (k == "demo_suboptimal") cfg.demo_suboptimal = static_cast<int>(parse_int(v));
    else if (k == "demo_failing") cfg.demo_failing = static_cast<int>(parse_int(v));
    else if (k == "pretrain_iters") cfg.pretrain_iters = static_cast<int>(parse_int(v));
    else if (k == "pretrain_traj") cfg.pretrain_traj = static_cast<int>(parse_int(v));
    else if (k == "pretrain_trans") cfg.pretrain_trans = static_cast<int>(parse_int(v));
    else if (k == "pretrain_lr") cfg.pretrain_lr = parse_double(v);
    else if (k == "preload_best_k") cfg.preload_best_k = static_cast<int>(parse_int(v));
    else if (k == "preload_transitions") cfg.preload_transitions = static_cast<int>(parse_int(v));
    else if (k == "seeds") cfg.seeds = parse_seed_list(v);
    else if (k == "out_dir") cfg.out_dir = v;
    else throw ConfigError("unknown config key: '" + k + "'");
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  return parse_config(in);
}

}  // namespace td3fg
