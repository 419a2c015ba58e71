#include "ftt/losses.hpp"

#include <cmath>
#include <limits>

namespace ftt {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_infinite_support(const QGaussianPolicy& p, const char* who) {
  if (p.q.value() < 1.0) {
    throw std::invalid_argument(std::string(who) +
                                ": requires an infinite-support policy (q >= 1)");
  }
}

Matrix sample_batch_actions(const PolicyEval& ev, EntropicIndex q, Rng& rng,
                            Matrix* noise_out = nullptr) {
  Matrix z = sample_standard_batch(q, ev.mean.rows(), ev.mean.cols(), rng);
  if (noise_out) *noise_out = z;
  return ev.mean + ev.sigma.cwiseProduct(z);
}
}  // namespace

double qexp_advantage_weight(double adv, const AdvantageWeightConfig& cfg) {
  return std::min(cfg.w_max, exp_q(adv / cfg.tau, cfg.q_w));
}

double proposal_loss(const QGaussianPolicy& proposal, const Critic& critic,
                     const Matrix& states, const Matrix& actions,
                     const AdvantageWeightConfig& cfg, PolicyGrads* grads) {
  require_infinite_support(proposal, "proposal_loss");
  const Eigen::Index B = states.rows();
  const Vector adv = advantages(critic, states, actions);
  Vector w(B);
  for (Eigen::Index i = 0; i < B; ++i) {
    w[i] = qexp_advantage_weight(adv[i], cfg);
  }
  const PolicyEval ev = policy_eval_batch(proposal, states);
  const LogProbParts parts = log_prob_parts(proposal.q, ev, actions);
  if (!parts.logp.allFinite()) {
    throw std::runtime_error("proposal_loss: non-finite log-probability");
  }
  const double loss = -(w.array() * parts.logp.array()).mean();
  if (grads) {
    const Vector scale = -w / static_cast<double>(B);
    const Matrix dmean = parts.dlp_dmean.array().colwise() * scale.array();
    const Matrix dsigma = parts.dlp_dsigma.array().colwise() * scale.array();
    policy_backward(proposal, ev, dmean, dsigma, grads->mean, grads->logsigma);
  }
  return loss;
}

namespace {

// Shared body of the two actor-KL forms. In pathwise mode `actions` is
// mean + sigma (.) noise and the extra sample-path terms are chained in.
double actor_kl_impl(const QGaussianPolicy& actor,
                     const QGaussianPolicy& proposal, const Matrix& states,
                     const Matrix& actions, const Matrix* noise,
                     PolicyGrads* actor_grads, const PolicyEval& actor_ev) {
  require_infinite_support(proposal, "actor_kl_loss");
  const Eigen::Index B = states.rows();
  const LogProbParts pa = log_prob_parts(actor.q, actor_ev, actions);
  if (!pa.logp.allFinite()) {
    throw std::logic_error(
        "actor_kl_loss: actor density non-finite at its own sample");
  }
  const PolicyEval prop_ev = policy_eval_batch(proposal, states);
  const LogProbParts pp = log_prob_parts(proposal.q, prop_ev, actions);

  const Vector log_r = pp.logp - pa.logp;
  const Vector r = log_r.array().exp();
  const double loss = (r.array() - 1.0 - log_r.array()).mean();

  if (actor_grads) {
    // d(r - 1 - ln r)/d lp_actor = 1 - r; the proposal is a constant here.
    const Vector s_actor = (1.0 - r.array()) / static_cast<double>(B);
    Matrix dmean = pa.dlp_dmean.array().colwise() * s_actor.array();
    Matrix dsigma = pa.dlp_dsigma.array().colwise() * s_actor.array();
    if (noise) {
      const Vector s_prop = -s_actor;
      const Matrix dL_da =
          (pa.dlp_daction.array().colwise() * s_actor.array()) +
          (pp.dlp_daction.array().colwise() * s_prop.array());
      dmean += dL_da;
      dsigma += dL_da.cwiseProduct(*noise);
    }
    policy_backward(actor, actor_ev, dmean, dsigma, actor_grads->mean,
                    actor_grads->logsigma);
  }
  return loss;
}

}  // namespace

double actor_kl_loss_at(const QGaussianPolicy& actor,
                        const QGaussianPolicy& proposal, const Matrix& states,
                        const Matrix& sampled_actions, PolicyGrads* actor_grads) {
  const PolicyEval ev = policy_eval_batch(actor, states);
  return actor_kl_impl(actor, proposal, states, sampled_actions, nullptr,
                       actor_grads, ev);
}

double actor_kl_loss_pathwise(const QGaussianPolicy& actor,
                              const QGaussianPolicy& proposal,
                              const Matrix& states, const Matrix& noise,
                              PolicyGrads* actor_grads) {
  const PolicyEval ev = policy_eval_batch(actor, states);
  const Matrix actions = ev.mean + ev.sigma.cwiseProduct(noise);
  return actor_kl_impl(actor, proposal, states, actions, &noise, actor_grads,
                       ev);
}

double actor_kl_loss(const QGaussianPolicy& actor,
                     const QGaussianPolicy& proposal, const Matrix& states,
                     Rng& rng, bool pathwise, PolicyGrads* actor_grads) {
  const PolicyEval ev = policy_eval_batch(actor, states);
  Matrix noise;
  const Matrix actions = sample_batch_actions(ev, actor.q, rng, &noise);
  return actor_kl_impl(actor, proposal, states, actions,
                       pathwise ? &noise : nullptr, actor_grads, ev);
}

double forward_kl_loss(const QGaussianPolicy& policy, const Matrix& states,
                       const Matrix& actions, PolicyGrads* grads) {
  const Eigen::Index B = states.rows();
  const PolicyEval ev = policy_eval_batch(policy, states);
  const LogProbParts parts = log_prob_parts(policy.q, ev, actions);
  if (!parts.logp.allFinite()) {
    return kInf;  // out-of-support dataset action: the documented failure mode
  }
  const double loss = -parts.logp.mean();
  if (grads) {
    const double scale = -1.0 / static_cast<double>(B);
    policy_backward(policy, ev, scale * parts.dlp_dmean,
                    scale * parts.dlp_dsigma, grads->mean, grads->logsigma);
  }
  return loss;
}

double reverse_kl_loss_at(const QGaussianPolicy& policy,
                          const QGaussianPolicy& behavior, const Matrix& states,
                          const Matrix& sampled_actions, PolicyGrads* grads) {
  require_infinite_support(behavior, "reverse_kl_loss");
  const Eigen::Index B = states.rows();
  const PolicyEval ev = policy_eval_batch(policy, states);
  const LogProbParts pp = log_prob_parts(policy.q, ev, sampled_actions);
  if (!pp.logp.allFinite()) {
    throw std::logic_error(
        "reverse_kl_loss: policy density non-finite at its own sample");
  }
  const PolicyEval bev = policy_eval_batch(behavior, states);
  const LogProbParts pb = log_prob_parts(behavior.q, bev, sampled_actions);
  const double loss = (pp.logp - pb.logp).mean();
  if (grads) {
    const double scale = 1.0 / static_cast<double>(B);
    policy_backward(policy, ev, scale * pp.dlp_dmean, scale * pp.dlp_dsigma,
                    grads->mean, grads->logsigma);
  }
  return loss;
}

double reverse_kl_loss(const QGaussianPolicy& policy,
                       const QGaussianPolicy& behavior, const Matrix& states,
                       Rng& rng, PolicyGrads* grads) {
  const PolicyEval ev = policy_eval_batch(policy, states);
  const Matrix actions = sample_batch_actions(ev, policy.q, rng);
  return reverse_kl_loss_at(policy, behavior, states, actions, grads);
}

Vector rar_replace(const Vector& action, const QGaussianPolicy& policy,
                   const Vector& state, int k, Rng& rng) {
  if (k < 1) throw std::invalid_argument("rar_replace: k must be >= 1");
  if (std::isfinite(log_prob(policy, state, action))) {
    return action;
  }
  const QGaussianProduct d = policy_forward(policy, state);
  Vector best;
  double best_dist = kInf;
  for (int i = 0; i < k; ++i) {
    Vector cand = sample(d, rng);
    const double dist = (cand - action).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = std::move(cand);
    }
  }
  return best;
}

double spot_actor_loss_at(const QGaussianPolicy& actor, const Critic& critic,
                          const QGaussianPolicy& behavior, const Matrix& states,
                          double alpha, const Matrix& noise,
                          PolicyGrads* actor_grads) {
  require_infinite_support(behavior, "spot_actor_loss");
  if (!(alpha >= 0.0)) {
    throw std::invalid_argument("spot_actor_loss: alpha must be >= 0");
  }
  const Eigen::Index B = states.rows();
  const PolicyEval ev = policy_eval_batch(actor, states);
  const Matrix actions = ev.mean + ev.sigma.cwiseProduct(noise);

  Matrix sa(B, states.cols() + actions.cols());
  sa << states, actions;
  Mlp::Cache q_cache;
  const Vector q = critic.q_net.forward(sa, q_cache);

  const PolicyEval bev = policy_eval_batch(behavior, states);
  const LogProbParts pb = log_prob_parts(behavior.q, bev, actions);

  const double loss = (-q.array() - alpha * pb.logp.array()).mean();

  if (actor_grads) {
    // dL/da arrives two ways: through the critic input and through the
    // behavior density; both ride the sample path a = mean + sigma (.) z.
    Vector q_param_sink = Vector::Zero(critic.q_net.param_count());
    const Matrix q_grad_out =
        Matrix::Constant(B, 1, -1.0 / static_cast<double>(B));
    const Matrix dQ_dinput = critic.q_net.backward(q_cache, q_grad_out, q_param_sink);
    const Matrix dL_da =
        dQ_dinput.rightCols(actions.cols()) +
        (-alpha / static_cast<double>(B)) * pb.dlp_daction;
    policy_backward(actor, ev, dL_da, dL_da.cwiseProduct(noise),
                    actor_grads->mean, actor_grads->logsigma);
  }
  return loss;
}

double spot_actor_loss(const QGaussianPolicy& actor, const Critic& critic,
                       const QGaussianPolicy& behavior, const Matrix& states,
                       double alpha, Rng& rng, PolicyGrads* actor_grads) {
  const Matrix noise = sample_standard_batch(
      actor.q, states.rows(), actor.action_dim(), rng);
  return spot_actor_loss_at(actor, critic, behavior, states, alpha, noise,
                            actor_grads);
}

QGaussianPolicy fit_behavior_model(const OfflineDataset& dataset,
                                   const BehaviorFitConfig& cfg, Rng& rng,
                                   std::vector<double>* nll_history) {
  if (dataset.transitions.empty()) {
    throw std::invalid_argument("fit_behavior_model: empty dataset");
  }
  QGaussianPolicy model =
      make_policy(EntropicIndex{1.0}, dataset.meta.state_dim,
                  dataset.meta.action_dim, cfg.hidden, cfg.layers,
                  cfg.sigma_min, cfg.sigma_max, rng);
  AdamState mean_opt, logsig_opt;
  mean_opt.lr = cfg.lr;
  logsig_opt.lr = cfg.lr;
  const std::size_t n = dataset.size();
  PolicyGrads grads;
  for (long step = 0; step < cfg.steps; ++step) {
    std::vector<std::size_t> idx(cfg.batch_size);
    for (auto& i : idx) i = static_cast<std::size_t>(rng.uniform() * n);
    const Batch batch = make_batch(dataset, idx);
    grads.mean = Vector::Zero(model.mean_net.param_count());
    grads.logsigma = Vector::Zero(model.logsigma_net.param_count());
    const double nll = forward_kl_loss(model, batch.states, batch.actions, &grads);
    adam_step(model.mean_net.params(), grads.mean, mean_opt);
    adam_step(model.logsigma_net.params(), grads.logsigma, logsig_opt);
    if (nll_history) nll_history->push_back(nll);
  }
  return model;
}

}  // namespace ftt
