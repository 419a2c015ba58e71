#include "ftt/treatment_env.hpp"

#include <cmath>

namespace ftt {

Vector transition_mean(const Vector& mu, double a) {
  if (mu.size() != kTreatmentStateDim) {
    throw std::invalid_argument("transition_mean: state must be 8-dimensional");
  }
  Vector out(kTreatmentStateDim);
  const double dose = a / 100.0;
  for (int j = 0; j < 4; ++j) out[j] = std::tanh(dose + mu[j]);
  for (int j = 4; j < 8; ++j) out[j] = std::tanh(-dose + mu[j]);
  return out;
}

double reward_from_observation(const Vector& s) {
  if (s.size() != kTreatmentStateDim) {
    throw std::invalid_argument("reward_from_observation: state must be 8-dimensional");
  }
  auto cube = [](double x) { return x * x * x; };
  return cube(s[0] / 2.0) + cube(s[1] / 2.0) + s[2] + s[3] +
         2.0 * (cube(s[4] / 2.0) + cube(s[5] / 2.0)) + 0.5 * (s[6] + s[7]);
}

Vector TreatmentEnv::reset(Rng& rng) {
  state_.mu = Vector::Zero(kTreatmentStateDim);
  if (cfg_.init == TreatmentEnvConfig::InitScheme::kUniform) {
    for (int j = 0; j < kTreatmentStateDim; ++j) {
      state_.mu[j] = rng.uniform(-1.0, 1.0);
    }
  }
  state_.t = 0;
  started_ = true;
  Vector obs = state_.mu;
  for (int j = 0; j < kTreatmentStateDim; ++j) {
    obs[j] += cfg_.noise_scale * rng.normal();
  }
  return obs;
}

StepResult TreatmentEnv::step(double a, Rng& rng) {
  if (!started_) throw std::logic_error("TreatmentEnv::step before reset");
  if (done()) throw std::logic_error("TreatmentEnv::step on a finished episode");
  state_.mu = transition_mean(state_.mu, a);
  StepResult res;
  res.observation = state_.mu;
  for (int j = 0; j < kTreatmentStateDim; ++j) {
    res.observation[j] += cfg_.noise_scale * rng.normal();
  }
  res.reward = reward_from_observation(res.observation);
  state_.t += 1;
  res.timeout = state_.t >= cfg_.horizon;
  return res;
}

OfflineDataset generate_dataset(const TreatmentEnvConfig& cfg, long episodes) {
  if (episodes < 1) {
    throw std::invalid_argument("generate_dataset: episodes must be >= 1");
  }
  Rng rng(derive_seed(cfg.seed, "dataset"));
  OfflineDataset d;
  d.meta.env_id = "treatment";
  d.meta.state_dim = kTreatmentStateDim;
  d.meta.action_dim = 1;
  d.meta.episodes = episodes;
  d.meta.horizon = cfg.horizon;
  d.meta.seed = cfg.seed;
  d.meta.noise_scale = cfg.noise_scale;
  d.transitions.reserve(static_cast<std::size_t>(episodes) * cfg.horizon);
  for (long ep = 0; ep < episodes; ++ep) {
    TreatmentEnv env(cfg);
    Vector obs = env.reset(rng);
    while (!env.done()) {
      // open interval: the uniform draw hits the bounds with probability 0,
      // and a 0 draw maps to action_low which we reject to keep it open
      double a;
      do {
        a = rng.uniform(cfg.action_low, cfg.action_high);
      } while (a == cfg.action_low);
      const StepResult res = env.step(a, rng);
      Transition t;
      t.s.assign(obs.data(), obs.data() + obs.size());
      t.a = {a};
      t.r = res.reward;
      t.s_next.assign(res.observation.data(),
                      res.observation.data() + res.observation.size());
      t.terminal = false;
      t.timeout = res.timeout;
      d.transitions.push_back(std::move(t));
      obs = res.observation;
    }
  }
  return d;
}

EvalResult evaluate_policy(const QGaussianPolicy& policy,
                           const TreatmentEnvConfig& cfg, long episodes,
                           Rng& rng) {
  if (episodes < 1) {
    throw std::invalid_argument("evaluate_policy: episodes must be >= 1");
  }
  EvalResult res;
  res.returns.reserve(episodes);
  for (long ep = 0; ep < episodes; ++ep) {
    TreatmentEnv env(cfg);
    Vector obs = env.reset(rng);
    double ret = 0.0;
    while (!env.done()) {
      const Vector a = sample_action(policy, obs, rng);
      const StepResult r = env.step(a[0], rng);
      ret += r.reward;
      obs = r.observation;
    }
    res.returns.push_back(ret);
  }
  double sum = 0.0;
  for (double r : res.returns) sum += r;
  res.mean = sum / static_cast<double>(episodes);
  if (episodes > 1) {
    double ss = 0.0;
    for (double r : res.returns) ss += (r - res.mean) * (r - res.mean);
    res.stddev = std::sqrt(ss / static_cast<double>(episodes - 1));
  }
  return res;
}

}  // namespace ftt
