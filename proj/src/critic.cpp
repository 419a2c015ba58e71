#include "ftt/critic.hpp"

namespace ftt {

namespace {
std::vector<int> net_sizes(int in, int hidden, int layers) {
  std::vector<int> sizes;
  sizes.push_back(in);
  for (int i = 0; i < layers; ++i) sizes.push_back(hidden);
  sizes.push_back(1);
  return sizes;
}

Matrix concat_sa(const Matrix& states, const Matrix& actions) {
  Matrix X(states.rows(), states.cols() + actions.cols());
  X << states, actions;
  return X;
}
}  // namespace

Critic make_critic(int state_dim, int action_dim, int hidden, int layers,
                   double tau_e, double gamma, Rng& rng) {
  if (!(tau_e > 0.0 && tau_e < 1.0)) {
    throw std::invalid_argument("make_critic: tau_e must be in (0,1)");
  }
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("make_critic: gamma must be in [0,1)");
  }
  Critic c;
  c.q_net = Mlp::fan_in_init(net_sizes(state_dim + action_dim, hidden, layers), rng);
  c.v_net = Mlp::fan_in_init(net_sizes(state_dim, hidden, layers), rng);
  c.q_target = c.q_net;
  c.tau_e = tau_e;
  c.gamma = gamma;
  return c;
}

double expectile_value_loss(const Critic& c, const Matrix& states,
                            const Matrix& actions, Vector* v_grad) {
  const Eigen::Index B = states.rows();
  const Vector qt = c.q_target.forward(concat_sa(states, actions));
  Mlp::Cache cache;
  const Vector v = c.v_net.forward(states, cache);
  const Vector u = qt - v;
  Vector w(B);
  for (Eigen::Index i = 0; i < B; ++i) {
    w[i] = u[i] < 0.0 ? 1.0 - c.tau_e : c.tau_e;
  }
  const double loss = (w.array() * u.array().square()).mean();
  if (v_grad) {
    if (v_grad->size() != c.v_net.param_count()) {
      *v_grad = Vector::Zero(c.v_net.param_count());
    }
    // d/dv of w*u^2 is -2*w*u
    const Matrix grad_out =
        (-2.0 * w.array() * u.array() / static_cast<double>(B)).matrix();
    c.v_net.backward(cache, grad_out, *v_grad);
  }
  return loss;
}

double q_td_loss(const Critic& c, const Batch& batch, Vector* q_grad) {
  const Eigen::Index B = batch.states.rows();
  const Vector v_next = c.v_net.forward(batch.next_states);
  const Vector target =
      batch.rewards.array() +
      c.gamma * (1.0 - batch.terminal.array()) * v_next.array();
  Mlp::Cache cache;
  const Vector q = c.q_net.forward(concat_sa(batch.states, batch.actions), cache);
  const Vector d = q - target;
  const double loss = d.array().square().mean();
  if (q_grad) {
    if (q_grad->size() != c.q_net.param_count()) {
      *q_grad = Vector::Zero(c.q_net.param_count());
    }
    const Matrix grad_out = (2.0 * d.array() / static_cast<double>(B)).matrix();
    c.q_net.backward(cache, grad_out, *q_grad);
  }
  return loss;
}

double advantage(const Critic& c, const Vector& state, const Vector& action) {
  Vector sa(state.size() + action.size());
  sa << state, action;
  return c.q_net.forward(sa)[0] - c.v_net.forward(state)[0];
}

Vector advantages(const Critic& c, const Matrix& states, const Matrix& actions) {
  return c.q_net.forward(concat_sa(states, actions)) - c.v_net.forward(states);
}

void polyak_target_update(Critic& c, double alpha) {
  polyak_update(c.q_target.params(), c.q_net.params(), alpha);
}

}  // namespace ftt
