#pragma once

#include <functional>
#include <optional>
#include <string>

#include "ftt/losses.hpp"
#include "ftt/treatment_env.hpp"

namespace ftt {

enum class Algorithm {
  kFtt,            // weighted proposal step + mean copy + actor KL step
  kForwardKlOnly,  // dataset-action NLL; survives non-finite batches
  kReverseKlOnly,  // reverse KL against the fitted behavior model
  kRar,            // dataset-action NLL, out-of-support actions replaced first
  kSpotActor,      // fat-to-thin scaffold with the SPOT actor step
  kProposalOnly,   // weighted proposal step only; the proposal acts
};

std::string algorithm_name(Algorithm a);
std::optional<Algorithm> parse_algorithm(const std::string& name);

struct ExperimentConfig {
  Algorithm algo = Algorithm::kFtt;
  double q_f = 2.0;  // proposal entropic index (fat)
  double q_s = 0.0;  // actor entropic index (thin)
  double q_w = 0.0;  // weighting index
  double tau = 0.5;
  double alpha_spot = 0.1;
  double w_max = 100.0;
  int rar_k = 32;
  double lr_policy = 3e-4;
  double lr_critic = 3e-4;
  double tau_e = 0.7;
  double gamma = 0.9;
  double polyak = 0.005;
  int batch_size = 256;
  long iterations = 50000;
  long eval_interval = 2500;
  long eval_episodes = 20;
  std::uint64_t seed = 0;
  std::string dataset_path;
  std::string outdir;  // empty: keep everything in memory, write no files
  double sigma_min = 1e-3;
  double sigma_max = 100.0;
  int hidden = 256;
  int layers = 2;
  long behavior_fit_steps = 3000;
  bool reparam_actor = false;   // pathwise actor-KL gradients instead of the
                                // constant-sample form
  bool keep_snapshots = false;  // numbered checkpoint dirs per eval interval
};

struct MetricsRow {
  long iteration = 0;
  double eval_mean = 0.0;
  double eval_std = 0.0;
  double proposal_loss = 0.0;
  double actor_loss = 0.0;
  double q_loss = 0.0;
  double v_loss = 0.0;
  double support_width = 0.0;  // mean actor support width over probe states
  long nonfinite_events = 0;
};

struct TrainResult {
  std::optional<QGaussianPolicy> proposal;
  std::optional<QGaussianPolicy> actor;  // the acting policy when present
  std::optional<Critic> critic;
  std::vector<MetricsRow> metrics;
  long nonfinite_events = 0;
  double final_eval_mean = 0.0;
  double final_eval_std = 0.0;
};

// Raised when a non-finite training loss is encountered by a variant that
// must not continue past one (everything except forward-kl-only, which
// records and skips).
struct TrainAbortError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Called right after the mean copy, before the actor update.
using PostCopyHook = std::function<void(
    long iteration, const QGaussianPolicy& proposal, const QGaussianPolicy& actor)>;

// The FtTPO loop: per iteration a minibatch, one critic step (expectile V,
// TD Q, Polyak on the Q target), one weighted proposal step, the mean copy,
// and one actor KL step on fresh actor samples. The copy runs before the
// samples are drawn so every sample is inside the updated actor's support.
TrainResult train_ftt(const ExperimentConfig& cfg, const OfflineDataset& dataset,
                      const PostCopyHook& hook = {});

// Ablation loops sharing the critic schedule.
TrainResult train_variant(const ExperimentConfig& cfg, const OfflineDataset& dataset,
                          const PostCopyHook& hook = {});

// Dispatch on cfg.algo.
TrainResult train(const ExperimentConfig& cfg, const OfflineDataset& dataset,
                  const PostCopyHook& hook = {});

}  // namespace ftt
