// Command-line front end: demo generation, generator pretraining, training
// runs, evaluation, seed sweeps and curve plotting.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <map>
#include <thread>

#include "td3fg/demo.hpp"
#include "td3fg/errors.hpp"
#include "td3fg/harness.hpp"
#include "td3fg/report.hpp"
#include "td3fg/textio.hpp"

using namespace td3fg;

namespace {

struct CommonOpts {
  std::string preset_name;
  std::string config_file;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::int64_t steps = 0;
  std::string env_name;
  std::string out;
};

void add_config_flags(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--preset", opts.preset_name, "stock experiment preset");
  cmd->add_option("--config", opts.config_file, "config file (key = value)");
  cmd->add_option("--steps", opts.steps, "override total_steps");
  cmd->add_option("--env", opts.env_name, "override environment name");
}

ExperimentConfig build_config(const CommonOpts& opts) {
  if (!opts.preset_name.empty() && !opts.config_file.empty())
    throw ConfigError("use either --preset or --config, not both");
  ExperimentConfig cfg = !opts.config_file.empty()
                             ? parse_config_file(opts.config_file)
                             : preset(opts.preset_name.empty() ? "td3fg"
                                                               : opts.preset_name);
  if (opts.steps > 0) cfg.total_steps = opts.steps;
  if (!opts.env_name.empty()) cfg.env = default_env_spec(opts.env_name);
  if (!opts.out.empty()) cfg.out_dir = opts.out;
  if (opts.seed_set) cfg.seeds = {opts.seed};
  return cfg;
}

DemoSet demos_for(const ExperimentConfig& cfg) {
  if (!cfg.demo_file.empty()) return load_demo_set(cfg.demo_file);
  std::map<DemoTier, int> mix = {{DemoTier::Expert, cfg.demo_expert},
                                 {DemoTier::Suboptimal, cfg.demo_suboptimal},
                                 {DemoTier::Failing, cfg.demo_failing}};
  return generate_demo_set(cfg.env, mix, cfg.demo_seed);
}

int default_jobs() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"td3fg: continuous-control lab for TD3 with a reference-action generator"};
  app.require_subcommand(1);

  // --- gen-demos ---
  auto* gen_cmd = app.add_subcommand("gen-demos", "roll out scripted demonstrations");
  std::string gen_env = "corridor-walker";
  std::uint64_t gen_seed = 77;
  int n_expert = 60, n_subopt = 30, n_fail = 10;
  std::string gen_out = "demos.txt";
  gen_cmd->add_option("--env", gen_env, "environment name");
  gen_cmd->add_option("--seed", gen_seed, "demo generation seed");
  gen_cmd->add_option("--expert", n_expert, "expert trajectory count");
  gen_cmd->add_option("--suboptimal", n_subopt, "suboptimal trajectory count");
  gen_cmd->add_option("--failing", n_fail, "failing trajectory count");
  gen_cmd->add_option("--out", gen_out, "output demo file");

  // --- pretrain ---
  auto* pre_cmd = app.add_subcommand("pretrain", "behavior-clone the reference generator");
  CommonOpts pre_opts;
  add_config_flags(pre_cmd, pre_opts);
  std::string pre_out = "generator.ckpt";
  pre_cmd->add_option("--out", pre_out, "output checkpoint");
  pre_cmd->add_option("--iters", pre_opts.steps, "pretraining iterations")
      ->excludes("--steps");

  // --- train ---
  auto* train_cmd = app.add_subcommand("train", "run one training experiment");
  CommonOpts train_opts;
  add_config_flags(train_cmd, train_opts);
  train_cmd->add_option("--out", train_opts.out, "output directory");
  auto* train_seed =
      train_cmd->add_option("--seed", train_opts.seed, "run seed");

  // --- eval ---
  auto* eval_cmd = app.add_subcommand("eval", "evaluate an actor checkpoint");
  CommonOpts eval_opts;
  add_config_flags(eval_cmd, eval_opts);
  std::string eval_actor;
  int eval_episodes = 5;
  std::uint64_t eval_seed = 1;
  eval_cmd->add_option("--actor", eval_actor, "actor checkpoint")->required();
  eval_cmd->add_option("--episodes", eval_episodes, "evaluation episodes");
  eval_cmd->add_option("--seed", eval_seed, "evaluation seed");

  // --- plot ---
  auto* plot_cmd = app.add_subcommand("plot", "render run CSVs as an SVG chart");
  std::vector<std::string> plot_csvs;
  std::string plot_out = "curves.svg";
  plot_cmd->add_option("csv", plot_csvs, "run CSV files")->required();
  plot_cmd->add_option("--out", plot_out, "output SVG path");

  // --- sweep ---
  auto* sweep_cmd = app.add_subcommand("sweep", "run every configured seed");
  CommonOpts sweep_opts;
  add_config_flags(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--out", sweep_opts.out, "output directory");
  int jobs = default_jobs();
  sweep_cmd->add_option("--jobs", jobs, "concurrent runs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen_cmd) {
      EnvSpec spec = default_env_spec(gen_env);
      std::map<DemoTier, int> mix = {{DemoTier::Expert, n_expert},
                                     {DemoTier::Suboptimal, n_subopt},
                                     {DemoTier::Failing, n_fail}};
      DemoSet demos = generate_demo_set(spec, mix, gen_seed);
      save_demo_set(demos, gen_out);
      std::printf("wrote %zu trajectories to %s\n", demos.trajectories.size(),
                  gen_out.c_str());
      std::printf("returns: max %.3f  min %.3f  mean %.3f\n", demos.stats.max,
                  demos.stats.min, demos.stats.mean);
    } else if (*pre_cmd) {
      ExperimentConfig cfg = build_config(pre_opts);
      const int iters = pre_opts.steps > 0 ? static_cast<int>(pre_opts.steps)
                                           : cfg.pretrain_iters;
      DemoSet demos = demos_for(cfg);
      PretrainNetCfg net_cfg{cfg.hidden_sizes, cfg.pretrain_lr, 0.0};
      PretrainBatchCfg batch_cfg{cfg.pretrain_traj, cfg.pretrain_trans};
      PretrainResult res =
          pretrain_generator(demos, iters, batch_cfg, net_cfg,
                             Rng::derive(cfg.demo_seed, 8));
      save_net(res.net, pre_out);
      double tail = 0.0;
      const std::size_t window = std::min<std::size_t>(100, res.loss_history.size());
      for (std::size_t i = res.loss_history.size() - window;
           i < res.loss_history.size(); ++i)
        tail += res.loss_history[i];
      std::printf("pretrained %d iters on %zu demos; final window MSE %.6f\n",
                  iters, demos.trajectories.size(),
                  window ? tail / window : 0.0);
      std::printf("wrote %s\n", pre_out.c_str());
    } else if (*train_cmd) {
      ExperimentConfig cfg = build_config(train_opts);
      const std::uint64_t seed =
          train_seed->count() > 0 ? train_opts.seed : cfg.seeds.front();
      RunLog log = run_experiment(cfg, seed);
      write_run_outputs(log, cfg.out_dir);
      std::printf("%s seed %llu: final %.3f  best %.3f  (%.1fs, %lld updates)\n",
                  cfg.run_name.c_str(), static_cast<unsigned long long>(seed),
                  log.final_return, log.best_return, log.wall_seconds,
                  static_cast<long long>(log.train_updates));
      if (log.abort_step >= 0)
        std::printf("aborted at step %lld: %s\n",
                    static_cast<long long>(log.abort_step),
                    log.abort_reason.c_str());
      std::printf("outputs in %s/\n", cfg.out_dir.c_str());
    } else if (*eval_cmd) {
      MlpNet actor = load_net(eval_actor);
      // env physics default to the desk corridor; --preset/--config/--env
      // select something else
      ExperimentConfig cfg = build_config(eval_opts);
      EvalResult res = evaluate(actor, cfg.env, eval_episodes, eval_seed);
      std::printf("mean return %.3f  (fr %.3f  hr %.3f  cc %.3f  tc %.3f)\n",
                  res.mean_return, res.fr, res.hr, res.cc, res.tc);
    } else if (*plot_cmd) {
      std::vector<RunLog> logs;
      for (const auto& path : plot_csvs) {
        RunLog log;
        log.rows = parse_csv(path);
        log.config.run_name = std::filesystem::path(path).stem().string();
        logs.push_back(std::move(log));
      }
      emit_svg_curves(logs, plot_out);
      std::printf("wrote %s (%zu series)\n", plot_out.c_str(), logs.size());
    } else if (*sweep_cmd) {
      ExperimentConfig cfg = build_config(sweep_opts);
      SweepResult sweep = run_sweep(cfg, jobs);
      std::filesystem::create_directories(cfg.out_dir);
      std::vector<RunLog> logs;
      for (const auto& run : sweep.runs) {
        write_run_outputs(run, cfg.out_dir);
        std::printf("seed %llu: final %.3f  best %.3f\n",
                    static_cast<unsigned long long>(run.seed),
                    run.final_return, run.best_return);
        logs.push_back(run);
      }
      emit_svg_curves(logs, cfg.out_dir + "/" + cfg.run_name + ".svg");
      std::ofstream summary(cfg.out_dir + "/" + cfg.run_name + "_summary.txt");
      for (const auto& run : sweep.runs)
        summary << "seed " << run.seed << " final "
                << fmt_double(run.final_return) << " best "
                << fmt_double(run.best_return) << '\n';
      summary << "median_final " << fmt_double(sweep.median_final) << '\n';
      std::printf("median final return: %.3f\n", sweep.median_final);
      std::printf("outputs in %s/\n", cfg.out_dir.c_str());
    }
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  }
  return 0;
}
