// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria 7 and 8 run full desk-scale seed sweeps and dominate the
// runtime; everything else finishes in seconds.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdarg>
#include <cstring>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "td3fg/agent.hpp"
#include "td3fg/demo.hpp"
#include "td3fg/env.hpp"
#include "td3fg/explore.hpp"
#include "td3fg/harness.hpp"
#include "td3fg/report.hpp"

using namespace td3fg;

namespace {

int failures = 0;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(int criterion, bool pass, const std::string& detail,
            double seconds) {
  std::printf("[%s] criterion %d: %s [%.1fs]\n", pass ? "PASS" : "FAIL",
              criterion, detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* format, ...) {
  va_list args;
  va_start(args, format);
  char buf[512];
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

double rel_err(double a, double b) {
  const double diff = std::fabs(a - b);
  if (diff == 0.0) return 0.0;
  return diff / std::max({1.0, std::fabs(a), std::fabs(b)});
}

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng,
                     double scale = 1.0) {
  Matrix m(rows, cols);
  for (auto& v : m.data) v = rng.uniform(-scale, scale);
  return m;
}

// Worst relative error between the analytic actor gradient and a central
// finite difference of the same objective value, over every actor parameter.
double fd_check_actor_objective(const MlpNet& actor, const MlpNet& critic,
                                const MlpNet* generator, const Matrix& states,
                                const ActorObjective& obj, double eps) {
  ActorLossResult analytic =
      actor_objective_grad(actor, critic, generator, states, obj);
  MlpNet probe = actor;
  double worst = 0.0;
  for (std::size_t l = 0; l < probe.num_layers(); ++l) {
    for (int pass = 0; pass < 2; ++pass) {
      std::vector<double>& params = pass == 0 ? probe.weights[l] : probe.biases[l];
      const std::vector<double>& grad =
          pass == 0 ? analytic.grads.weights[l] : analytic.grads.biases[l];
      for (std::size_t i = 0; i < params.size(); ++i) {
        const double orig = params[i];
        params[i] = orig + eps;
        const double lp =
            actor_objective_grad(probe, critic, generator, states, obj).loss;
        params[i] = orig - eps;
        const double lm =
            actor_objective_grad(probe, critic, generator, states, obj).loss;
        params[i] = orig;
        const double fd = (lp - lm) / (2.0 * eps);
        worst = std::max(worst, rel_err(grad[i], fd));
      }
    }
  }
  return worst;
}

// Smallest |Q(s, pi_bc) - Q(s, pi)| margin across the batch; the q-filter
// indicator must stay fixed under the finite-difference perturbation.
double qfilter_margin(const AgentNets& nets, const Matrix& states) {
  double margin = 1e9;
  for (std::size_t r = 0; r < states.rows; ++r) {
    std::span<const double> s(states.row(r), states.cols);
    std::vector<double> pi = forward(nets.actor, s);
    std::vector<double> g = forward(*nets.generator, s);
    std::vector<double> sa(states.row(r), states.row(r) + states.cols);
    std::vector<double> sg = sa;
    sa.insert(sa.end(), pi.begin(), pi.end());
    sg.insert(sg.end(), g.begin(), g.end());
    const double qa = forward(nets.critic1, sa)[0];
    const double qg = forward(nets.critic1, sg)[0];
    margin = std::min(margin, std::fabs(qg - qa));
  }
  return margin;
}

void criterion_1_gradient_fidelity() {
  Timer timer;
  const double eps = 1e-6;
  double worst = 0.0;
  int checks = 0;

  // critic and behavior-cloning regressions: grad_check's MSE objective is
  // exactly those losses.
  for (int k = 0; k < 4; ++k) {
    Rng rng(900 + k);
    MlpNet critic = mlp_init({5, 8, 6, 1}, Activation::Relu,
                             Activation::Identity, 300 + k);
    Matrix sa = random_matrix(6, 5, rng);
    Matrix y = random_matrix(6, 1, rng, 2.0);
    worst = std::max(worst, grad_check(critic, sa, y, eps));
    ++checks;
  }
  for (int k = 0; k < 4; ++k) {
    Rng rng(910 + k);
    MlpNet bc = mlp_init({4, 8, 6, 2}, Activation::Tanh, Activation::Tanh,
                         310 + k);
    Matrix states = random_matrix(6, 4, rng);
    Matrix actions = random_matrix(6, 2, rng, 0.9);
    worst = std::max(worst, grad_check(bc, states, actions, eps));
    ++checks;
  }

  // composed actor objectives: plain td3, blended td3fg, q-filter
  for (int k = 0; k < 12; ++k) {
    Rng rng(920 + k);
    AgentNets nets = make_agent_nets(3, 2, {6, 5}, 1e-3, 0.0, 320 + k);
    nets.generator =
        mlp_init({3, 6, 5, 2}, Activation::Tanh, Activation::Tanh, 350 + k);
    Matrix states = random_matrix(5, 3, rng);

    ActorObjective obj;
    const char* kind;
    if (k % 3 == 0) {
      obj = ActorObjective{};  // plain -Q actor objective
      kind = "actor";
    } else if (k % 3 == 1) {
      obj.bc_weight = 0.4 + 0.2 * (k % 4);  // mid-schedule blend
      obj.rl_weight = 0.6;
      kind = "blend";
    } else {
      obj.qfilter = true;
      kind = "qfilter";
    }
    if (obj.qfilter && qfilter_margin(nets, states) < 1e-4) {
      std::printf("  (criterion 1: %s seed %d skipped, degenerate margin)\n",
                  kind, k);
      continue;
    }
    const MlpNet* gen = (obj.qfilter || obj.bc_weight != 0.0)
                            ? &*nets.generator
                            : nullptr;
    worst = std::max(worst, fd_check_actor_objective(nets.actor, nets.critic1,
                                                     gen, states, obj, eps));
    ++checks;
  }

  const double elapsed = timer.seconds();
  report(1, worst <= 1e-5 && checks >= 20 && elapsed < 10.0,
         fmt("gradient fidelity over %d nets/objectives, worst rel err %.2e "
             "(limit 1e-05)",
             checks, worst),
         elapsed);
}

void criterion_2_schedules() {
  Timer timer;
  const std::int64_t T = 1000;
  ScheduleSet s{T, T / 2, T / 2, 0.2};
  bool ok = true;
  double prev_a = 1.1, prev_b = 1.1, prev_g = 1.1, prev_d = -1.0;
  for (std::int64_t t = 0; t <= 2 * T && ok; ++t) {
    const double a = s.alpha(t), b = s.beta(t), g = s.gamma_w(t),
                 d = s.delta_w(t);
    ok = ok && a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0 && g >= 0.0 &&
         g <= 1.0;
    ok = ok && a <= prev_a && b <= prev_b && g <= prev_g;
    ok = ok && d >= s.theta_offset && d <= 1.0 && d >= prev_d;
    if (t >= s.t1) ok = ok && a == 0.0;
    if (t >= s.t2) ok = ok && b == 0.0;
    if (t >= s.t3) ok = ok && g == 0.0 && d == 1.0;
    if (static_cast<double>(t) <= s.t3 * (1.0 - s.theta_offset))
      ok = ok && std::fabs(g + d - (1.0 + s.theta_offset)) < 1e-12;
    prev_a = a;
    prev_b = b;
    prev_g = g;
    prev_d = d;
  }
  const double elapsed = timer.seconds();
  report(2, ok && elapsed < 1.0,
         fmt("schedule ranges, monotonicity, horizon zeros and the "
             "gamma+delta identity over t in [0, %lld]",
             static_cast<long long>(2 * T)),
         elapsed);
}

void criterion_3_ou_statistics() {
  Timer timer;
  bool ok = true;

  // noiseless path vs the exponential solution
  const double theta = 0.15;
  OuNoise drift(1, theta, 0.0, 0.0, 1.0);
  drift.x[0] = 1.0;
  Rng drift_rng(1);
  for (int t = 1; t <= 40; ++t) {
    drift.step(drift_rng);
    ok = ok && std::fabs(drift.x[0] - std::exp(-theta * t)) < 0.05;
  }

  // stationary variance of the discrete recursion, 1e6 steps
  OuNoise ou(1, 0.15, 0.0, 0.2, 1.0);
  Rng rng(4242);
  for (int t = 0; t < 1000; ++t) ou.step(rng);
  double sum = 0.0, sum2 = 0.0;
  const long n = 1000000;
  for (long t = 0; t < n; ++t) {
    ou.step(rng);
    sum += ou.x[0];
    sum2 += ou.x[0] * ou.x[0];
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  const double a = 1.0 - 0.15;
  const double analytic = 0.2 * 0.2 / (1.0 - a * a);
  const double rel = std::fabs(var - analytic) / analytic;
  ok = ok && rel < 0.05;

  const double elapsed = timer.seconds();
  report(3, ok && elapsed < 5.0,
         fmt("OU closed-form drift and stationary variance %.5f vs analytic "
             "%.5f (rel %.3f, limit 0.05)",
             var, analytic, rel),
         elapsed);
}

Transition synth_transition(Rng& rng) {
  Transition tr;
  tr.s = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1),
          rng.uniform(0, 1)};
  tr.a = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
  tr.r = rng.uniform(-1, 3);
  tr.s_next = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1),
               rng.uniform(0, 1)};
  tr.done = rng.uniform() < 0.05;
  return tr;
}

void criterion_4_post_horizon_equivalence() {
  Timer timer;
  const ScheduleSet sched{100, 50, 50, 0.2};
  const std::int64_t t0 = 100;
  const int steps = 1000;

  TrainCfg cfg_td3;
  cfg_td3.batch_size = 32;
  cfg_td3.variant = Variant::Td3;
  TrainCfg cfg_fg = cfg_td3;
  cfg_fg.variant = Variant::Td3fg;

  AgentNets nets_a = make_agent_nets(4, 2, {16, 16}, 1e-3, 1e-4, 5151);
  AgentNets nets_b = make_agent_nets(4, 2, {16, 16}, 1e-3, 1e-4, 5151);
  nets_b.generator =
      mlp_init({4, 16, 16, 2}, Activation::Tanh, Activation::Tanh, 5252);

  ReplayBuffer buf_a(100000), buf_b(100000);
  {
    Rng fill(77);
    for (int i = 0; i < 2000; ++i) buf_a.push(synth_transition(fill));
    Rng fill2(77);
    for (int i = 0; i < 2000; ++i) buf_b.push(synth_transition(fill2));
  }

  Trainer td3(std::move(nets_a), cfg_td3);
  Trainer fg(std::move(nets_b), cfg_fg);

  EnvSpec spec;
  auto env_a = make_env(spec);
  auto env_b = make_env(spec);
  std::vector<double> obs_a = env_a->reset(909);
  std::vector<double> obs_b = env_b->reset(909);

  OuNoise ou_a(2, 0.15, 0.0, 0.2, 1.0), ou_b(2, 0.15, 0.0, 0.2, 1.0);
  Rng act_a(11), act_b(11), train_a(22), train_b(22);

  bool actions_equal = true;
  std::uint64_t episode = 0;
  for (int k = 0; k < steps; ++k) {
    const std::int64_t t = t0 + k;
    auto a1 = select_action(td3.nets(), cfg_td3, obs_a, t, sched, ou_a, act_a);
    auto a2 = select_action(fg.nets(), cfg_fg, obs_b, t, sched, ou_b, act_b);
    actions_equal = actions_equal &&
                    std::memcmp(a1.data(), a2.data(),
                                a1.size() * sizeof(double)) == 0;

    StepResult r1 = env_a->step(a1);
    StepResult r2 = env_b->step(a2);
    Transition tr1{obs_a, a1, r1.reward, r1.obs, r1.done, r1.parts, Origin::Agent};
    Transition tr2{obs_b, a2, r2.reward, r2.obs, r2.done, r2.parts, Origin::Agent};
    buf_a.push(tr1);
    buf_b.push(tr2);
    obs_a = r1.obs;
    obs_b = r2.obs;
    if (r1.done) {
      ++episode;
      obs_a = env_a->reset(Rng::derive(909, episode));
      obs_b = env_b->reset(Rng::derive(909, episode));
      ou_a.reset();
      ou_b.reset();
    }

    td3.train_step(buf_a, t, sched, train_a);
    fg.train_step(buf_b, t, sched, train_b);
  }

  const bool params_equal =
      td3.nets().actor.same_parameters(fg.nets().actor) &&
      td3.nets().critic1.same_parameters(fg.nets().critic1) &&
      td3.nets().critic2.same_parameters(fg.nets().critic2) &&
      td3.nets().target_actor.same_parameters(fg.nets().target_actor) &&
      td3.nets().target_critic1.same_parameters(fg.nets().target_critic1) &&
      td3.nets().target_critic2.same_parameters(fg.nets().target_critic2);

  report(4, actions_equal && params_equal,
         fmt("td3fg == td3 past every horizon for %d steps (actions %s, "
             "parameters %s)",
             steps, actions_equal ? "bitwise equal" : "DIVERGED",
             params_equal ? "bitwise equal" : "DIVERGED"),
         timer.seconds());
}

void criterion_5_buffer_protection() {
  Timer timer;
  ExperimentConfig cfg = preset("td3fg");
  std::map<DemoTier, int> mix = {{DemoTier::Expert, cfg.demo_expert},
                                 {DemoTier::Suboptimal, cfg.demo_suboptimal},
                                 {DemoTier::Failing, cfg.demo_failing}};
  DemoSet demos = generate_demo_set(cfg.env, mix, cfg.demo_seed);

  ReplayBuffer buf(5000);
  Rng preload_rng(3);
  preload_demos(buf, demos, 10, 1000, preload_rng);
  const std::vector<Transition> before = buf.demo_region();

  for (int i = 0; i < 20000; ++i) {
    Transition tr;
    tr.s = {static_cast<double>(i), 0.0, 0.0, 1.0};
    tr.a = {0.0, 0.0};
    tr.s_next = tr.s;
    buf.push(std::move(tr));
  }

  bool ok = buf.demo_size() == 1000 && before.size() == 1000;
  for (std::size_t i = 0; i < before.size() && ok; ++i)
    ok = buf.demo_region()[i].s == before[i].s &&
         buf.demo_region()[i].a == before[i].a &&
         buf.demo_region()[i].r == before[i].r;

  // every live transition is one of the newest `capacity`
  ok = ok && buf.live_size() == 5000;
  for (const auto& tr : buf.live_region())
    ok = ok && tr.s[0] >= 15000.0 && tr.s[0] < 20000.0;

  // preloaded transitions still reachable through sampling
  Rng rng(9);
  bool demo_seen = false;
  for (const auto* tr : buf.sample(2000, rng))
    if (tr->origin == Origin::Demo) demo_seen = true;
  ok = ok && demo_seen;

  report(5, ok,
         "demo region intact after 20000 pushes at capacity 5000; live ring "
         "holds exactly the newest transitions",
         timer.seconds());
}

void criterion_6_pretraining_convergence() {
  Timer timer;
  ExperimentConfig cfg = preset("td3fg");
  std::map<DemoTier, int> mix = {{DemoTier::Expert, cfg.demo_expert},
                                 {DemoTier::Suboptimal, cfg.demo_suboptimal},
                                 {DemoTier::Failing, cfg.demo_failing}};
  DemoSet demos = generate_demo_set(cfg.env, mix, cfg.demo_seed);

  PretrainResult stock = pretrain_generator(
      demos, cfg.pretrain_iters, {cfg.pretrain_traj, cfg.pretrain_trans},
      {cfg.hidden_sizes, cfg.pretrain_lr, 0.0}, Rng::derive(cfg.demo_seed, 8));
  auto window = [](const std::vector<double>& h, std::size_t start) {
    double s = 0.0;
    for (std::size_t i = start; i < start + 100; ++i) s += h[i];
    return s / 100.0;
  };
  const double first = window(stock.loss_history, 0);
  const double last = window(stock.loss_history, stock.loss_history.size() - 100);
  const bool stock_ok = last < 0.5 * first;

  DemoSet tiny;
  {
    Trajectory traj;
    auto add = [&](std::vector<double> s, std::vector<double> a) {
      Transition tr;
      tr.s = std::move(s);
      tr.a = std::move(a);
      tr.s_next = tr.s;
      traj.transitions.push_back(std::move(tr));
    };
    add({0.1, 0.2, 0.3, 0.4}, {0.3, -0.2});
    add({-0.5, 0.1, 0.0, 0.9}, {-0.4, 0.5});
    add({0.7, -0.3, 0.2, 0.5}, {0.1, 0.6});
    tiny.trajectories.push_back(std::move(traj));
  }
  PretrainResult fit =
      pretrain_generator(tiny, 4000, {1, 16}, {{16, 16}, 1e-2, 0.0}, 7);
  const double fit_final = window(fit.loss_history, fit.loss_history.size() - 100);
  const bool fit_ok = fit_final < 1e-4;

  report(6, stock_ok && fit_ok,
         fmt("stock set window %.4f -> %.4f (< 50%%: %s); 3-pair final MSE "
             "%.2e (< 1e-4: %s)",
             first, last, stock_ok ? "yes" : "NO", fit_final,
             fit_ok ? "yes" : "NO"),
         timer.seconds());
}

struct OrderingResult {
  double td3fg = 0.0, td3 = 0.0, bcft = 0.0, qfilter = 0.0;
  std::string detail;
};

OrderingResult run_ordering_sweeps(int jobs) {
  OrderingResult res;
  std::ostringstream detail;
  for (const char* name : {"td3fg", "td3", "bcft", "td3fg_qfilter"}) {
    ExperimentConfig cfg = preset(name);
    SweepResult sweep = run_sweep(cfg, jobs);
    detail << name << " finals:";
    for (const auto& run : sweep.runs)
      detail << ' ' << fmt("%.1f", run.final_return);
    detail << " median " << fmt("%.1f", sweep.median_final) << "; ";
    if (std::strcmp(name, "td3fg") == 0) res.td3fg = sweep.median_final;
    else if (std::strcmp(name, "td3") == 0) res.td3 = sweep.median_final;
    else if (std::strcmp(name, "bcft") == 0) res.bcft = sweep.median_final;
    else res.qfilter = sweep.median_final;
    std::printf("  (sweep %s done: median %.2f)\n", name, sweep.median_final);
    std::fflush(stdout);
  }
  res.detail = detail.str();
  return res;
}

void criteria_7_8_ordering(const OrderingResult& res, double seconds) {
  // Ties break toward failure: equality within 1% fails.
  const bool beats_td3 = res.td3fg > 1.01 * res.td3;
  const bool beats_bcft = res.td3fg > 1.01 * res.bcft;
  report(7, beats_td3 && beats_bcft,
         fmt("medians over 5 seeds: td3fg %.1f vs td3 %.1f vs bcft %.1f "
             "(needs td3fg > 1.01x both). %s",
             res.td3fg, res.td3, res.bcft, res.detail.c_str()),
         seconds);

  const bool qfilter_ok = res.qfilter <= res.td3fg;
  const bool within_5pct = res.qfilter > 0.95 * res.td3fg;
  report(8, qfilter_ok,
         fmt("q-filter median %.1f <= td3fg median %.1f%s", res.qfilter,
             res.td3fg,
             qfilter_ok && within_5pct
                 ? " (informational: within 5%, direction holds but gap is "
                   "small)"
                 : ""),
         0.0);
}

void criterion_9_determinism(int jobs) {
  Timer timer;
  ExperimentConfig cfg = preset("td3fg");
  cfg.seeds = {1};
  SweepResult first = run_sweep(cfg, jobs);
  RunLog again = run_experiment(cfg, 1);

  std::ostringstream csv_a, csv_b;
  emit_csv(first.runs[0], csv_a);
  emit_csv(again, csv_b);
  report(9, csv_a.str() == csv_b.str(),
         "two executions of preset td3fg at seed 1 emit byte-identical CSV",
         timer.seconds());
}

}  // namespace

int main(int argc, char** argv) {
  int jobs = 2;
  bool quick = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--jobs") == 0 && i + 1 < argc)
      jobs = std::atoi(argv[++i]);
    if (std::strcmp(argv[i], "--quick") == 0) quick = true;  // skip sweeps
  }

  criterion_1_gradient_fidelity();
  criterion_2_schedules();
  criterion_3_ou_statistics();
  criterion_4_post_horizon_equivalence();
  criterion_5_buffer_protection();
  criterion_6_pretraining_convergence();
  if (quick) {
    std::printf("[SKIP] criteria 7-9: --quick\n");
  } else {
    Timer sweeps;
    OrderingResult ordering = run_ordering_sweeps(jobs);
    criteria_7_8_ordering(ordering, sweeps.seconds());
    criterion_9_determinism(jobs);
  }

  std::printf("%s: %d criterion failure(s)\n", failures ? "FAILURE" : "SUCCESS",
              failures);
  return failures;
}
