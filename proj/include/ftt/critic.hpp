#pragma once

#include "ftt/dataset.hpp"
#include "ftt/mlp.hpp"

namespace ftt {

// Q(s, a) and V(s) approximators in the in-sample style: V regresses an
// expectile of the target Q at dataset actions, Q does a one-step backup
// onto V. Neither ever queries actions outside the dataset. The Q target
// copy moves only through polyak_update.
struct Critic {
  Mlp q_net;     // (state ++ action) -> 1
  Mlp v_net;     // state -> 1
  Mlp q_target;  // slow copy of q_net
  double tau_e = 0.7;
  double gamma = 0.9;

  int state_dim() const { return v_net.input_dim(); }
  int action_dim() const { return q_net.input_dim() - v_net.input_dim(); }
};

Critic make_critic(int state_dim, int action_dim, int hidden, int layers,
                   double tau_e, double gamma, Rng& rng);

// Asymmetric squared loss |tau_e - 1{u<0}| u^2 with u = q_target(s,a) - v(s),
// batch-mean. Gradients flow to v_net only.
double expectile_value_loss(const Critic& c, const Matrix& states,
                            const Matrix& actions, Vector* v_grad = nullptr);

// MSE of q_net(s,a) against the stop-gradient target
// r + gamma * (1 - terminal) * v(s'). Timeout transitions bootstrap.
double q_td_loss(const Critic& c, const Batch& batch, Vector* q_grad = nullptr);

// q_net(s,a) - v_net(s); no gradients tracked.
double advantage(const Critic& c, const Vector& state, const Vector& action);
Vector advantages(const Critic& c, const Matrix& states, const Matrix& actions);

void polyak_target_update(Critic& c, double alpha);

}  // namespace ftt
