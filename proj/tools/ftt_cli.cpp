// Command-line front end: dataset generation, training, evaluation, and
// density-grid dumps. Subcommand flags mirror the flat configuration keys;
// exit code 0 on success, nonzero with one diagnostic line otherwise.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ftt/config.hpp"
#include "ftt/trainer.hpp"
#include "ftt/treatment_env.hpp"

namespace fs = std::filesystem;
using namespace ftt;

namespace {

Vector parse_state_csv(const std::string& csv) {
  std::vector<double> vals;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    vals.push_back(parse_double(tok));
  }
  if (vals.empty()) throw std::invalid_argument("empty state vector");
  Vector v(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) v[i] = vals[i];
  return v;
}

int cmd_gen_data(const std::string& out, long episodes, long horizon,
                 std::uint64_t seed, double noise_scale, const std::string& init) {
  TreatmentEnvConfig cfg;
  cfg.horizon = horizon;
  cfg.seed = seed;
  cfg.noise_scale = noise_scale;
  if (init == "zero") {
    cfg.init = TreatmentEnvConfig::InitScheme::kZero;
  } else if (init == "uniform") {
    cfg.init = TreatmentEnvConfig::InitScheme::kUniform;
  } else {
    throw std::invalid_argument("gen-data: init must be zero or uniform");
  }
  const OfflineDataset d = generate_dataset(cfg, episodes);
  save_dataset(d, out);
  double a_min = cfg.action_high, a_max = cfg.action_low, r_min = 1e300,
         r_max = -1e300;
  for (const Transition& t : d.transitions) {
    a_min = std::min(a_min, t.a[0]);
    a_max = std::max(a_max, t.a[0]);
    r_min = std::min(r_min, t.r);
    r_max = std::max(r_max, t.r);
  }
  std::cout << "wrote " << d.size() << " transitions (" << episodes << " x "
            << horizon << ") to " << out << " seed=" << seed
            << " action_range=[" << format_double(a_min) << ","
            << format_double(a_max) << "]"
            << " reward_range=[" << format_double(r_min) << ","
            << format_double(r_max) << "]\n";
  return 0;
}

int cmd_train(const ConfigBuilder& builder) {
  const ExperimentConfig cfg = builder.build();
  if (cfg.dataset_path.empty()) {
    throw std::invalid_argument("train: dataset is required");
  }
  if (cfg.outdir.empty()) {
    throw std::invalid_argument("train: outdir is required");
  }
  fs::create_directories(cfg.outdir);
  write_config_echo(cfg, fs::path(cfg.outdir) / "config.txt");
  const OfflineDataset dataset = load_dataset(cfg.dataset_path);

  const fs::path summary_path = fs::path(cfg.outdir) / "summary.txt";
  try {
    const TrainResult res = train(cfg, dataset);
    std::ofstream summary(summary_path);
    summary << "status=ok\n"
            << "algo=" << algorithm_name(cfg.algo) << "\n"
            << "iterations=" << cfg.iterations << "\n"
            << "final_eval_mean=" << format_double(res.final_eval_mean) << "\n"
            << "final_eval_std=" << format_double(res.final_eval_std) << "\n"
            << "nonfinite_events=" << res.nonfinite_events << "\n";
    std::cout << "train " << algorithm_name(cfg.algo) << " seed=" << cfg.seed
              << " final_eval_mean=" << format_double(res.final_eval_mean)
              << " final_eval_std=" << format_double(res.final_eval_std)
              << " nonfinite_events=" << res.nonfinite_events << "\n";
    return 0;
  } catch (const TrainAbortError& e) {
    std::ofstream summary(summary_path);
    summary << "status=aborted\n"
            << "algo=" << algorithm_name(cfg.algo) << "\n"
            << "diagnosis=" << e.what() << "\n";
    std::cerr << "train aborted: " << e.what() << "\n";
    return 3;
  }
}

int cmd_eval(const std::string& snapshot, long episodes, std::uint64_t seed,
             double noise_scale, long horizon) {
  const QGaussianPolicy policy = load_policy_file(snapshot);
  TreatmentEnvConfig cfg;
  cfg.noise_scale = noise_scale;
  cfg.horizon = horizon;
  Rng rng(derive_seed(seed, "eval"));
  const EvalResult res = evaluate_policy(policy, cfg, episodes, rng);
  std::cout << "eval episodes=" << episodes
            << " mean=" << format_double(res.mean)
            << " std=" << format_double(res.stddev) << "\n";
  return 0;
}

int cmd_dump_policy(const std::string& proposal_path,
                    const std::string& actor_path, const std::string& state_csv,
                    double lo, double hi, long n, const std::string& out) {
  if (proposal_path.empty() && actor_path.empty()) {
    throw std::invalid_argument("dump-policy: need --proposal and/or --actor");
  }
  if (n < 2) throw std::invalid_argument("dump-policy: grid needs n >= 2");
  if (!(hi > lo)) throw std::invalid_argument("dump-policy: need hi > lo");
  const Vector state = parse_state_csv(state_csv);

  std::optional<QGaussianProduct> prop_dist, actor_dist;
  if (!proposal_path.empty()) {
    const QGaussianPolicy p = load_policy_file(proposal_path);
    if (p.action_dim() != 1) {
      throw std::invalid_argument("dump-policy: action dimension must be 1");
    }
    prop_dist = policy_forward(p, state);
  }
  if (!actor_path.empty()) {
    const QGaussianPolicy p = load_policy_file(actor_path);
    if (p.action_dim() != 1) {
      throw std::invalid_argument("dump-policy: action dimension must be 1");
    }
    actor_dist = policy_forward(p, state);
  }

  std::ofstream os(out);
  if (!os) throw std::runtime_error("dump-policy: cannot open " + out);
  os << "action";
  if (prop_dist) os << ",proposal_density";
  if (actor_dist) os << ",actor_density";
  os << "\n";
  Vector a(1);
  for (long i = 0; i < n; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) /
                              static_cast<double>(n - 1);
    a[0] = x;
    os << format_double(x);
    if (prop_dist) os << ',' << format_double(std::exp(log_density(*prop_dist, a)));
    if (actor_dist) os << ',' << format_double(std::exp(log_density(*actor_dist, a)));
    os << "\n";
  }
  if (!os) throw std::runtime_error("dump-policy: write failed " + out);
  std::cout << "wrote " << n << " grid rows to " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fat-to-thin policy optimization on the treatment simulator"};
  app.require_subcommand(1);

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "generate an offline dataset");
  std::string gen_out;
  long gen_episodes = 50, gen_horizon = 24;
  std::uint64_t gen_seed = 0;
  double gen_noise = 0.05;
  std::string gen_init = "zero";
  gen->add_option("--out", gen_out, "output dataset path")->required();
  gen->add_option("--episodes", gen_episodes, "number of episodes");
  gen->add_option("--horizon", gen_horizon, "steps per episode");
  gen->add_option("--seed", gen_seed, "generation seed");
  gen->add_option("--noise-scale", gen_noise, "observation noise std");
  gen->add_option("--init", gen_init, "initial latent mean: zero|uniform");

  // train
  auto* tr = app.add_subcommand("train", "run a training experiment");
  std::string tr_config;
  tr->add_option("--config", tr_config, "key=value configuration file");
  // every configuration key is also a flag
  const std::vector<std::string> keys = {
      "algo",       "q_f",        "q_s",          "q_w",
      "tau",        "alpha_spot", "w_max",        "rar_k",
      "lr_policy",  "lr_critic",  "tau_e",        "gamma",
      "polyak",     "batch_size", "iterations",   "eval_interval",
      "eval_episodes", "seed",    "dataset",      "outdir",
      "sigma_min",  "sigma_max",  "hidden",       "layers",
      "behavior_fit_steps", "reparam_actor", "keep_snapshots"};
  std::map<std::string, std::string> flag_values;
  for (const std::string& key : keys) {
    std::string flag = "--" + key;
    for (char& c : flag) {
      if (c == '_') c = '-';
    }
    tr->add_option(flag, flag_values[key], "config key " + key);
  }

  // eval
  auto* ev = app.add_subcommand("eval", "evaluate a policy snapshot");
  std::string ev_snapshot;
  long ev_episodes = 100, ev_horizon = 24;
  std::uint64_t ev_seed = 0;
  double ev_noise = 0.05;
  ev->add_option("--snapshot", ev_snapshot, "policy snapshot path")->required();
  ev->add_option("--episodes", ev_episodes, "evaluation episodes");
  ev->add_option("--seed", ev_seed, "evaluation seed");
  ev->add_option("--noise-scale", ev_noise, "observation noise std");
  ev->add_option("--horizon", ev_horizon, "steps per episode");

  // dump-policy
  auto* dp = app.add_subcommand("dump-policy",
                                "dump densities over an action grid");
  std::string dp_proposal, dp_actor, dp_state, dp_out;
  double dp_lo = -10.0, dp_hi = 10.0;
  long dp_n = 0;
  dp->add_option("--proposal", dp_proposal, "proposal snapshot path");
  dp->add_option("--actor", dp_actor, "actor snapshot path");
  dp->add_option("--state", dp_state, "probe state, comma-separated")->required();
  dp->add_option("--lo", dp_lo, "grid lower bound")->required();
  dp->add_option("--hi", dp_hi, "grid upper bound")->required();
  dp->add_option("--n", dp_n, "grid points")->required();
  dp->add_option("--out", dp_out, "output CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      return cmd_gen_data(gen_out, gen_episodes, gen_horizon, gen_seed,
                          gen_noise, gen_init);
    }
    if (tr->parsed()) {
      ConfigBuilder builder;
      if (!tr_config.empty()) builder.load_file(tr_config);
      for (const std::string& key : keys) {
        std::string flag = "--" + key;
        for (char& c : flag) {
          if (c == '_') c = '-';
        }
        if (tr->count(flag) > 0) builder.set(key, flag_values[key]);
      }
      return cmd_train(builder);
    }
    if (ev->parsed()) {
      return cmd_eval(ev_snapshot, ev_episodes, ev_seed, ev_noise, ev_horizon);
    }
    if (dp->parsed()) {
      return cmd_dump_policy(dp_proposal, dp_actor, dp_state, dp_lo, dp_hi,
                             dp_n, dp_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
