#include "ftt/policy.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace ftt {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr char kPolicyMagic[] = "ftt-policy-v1";

std::vector<int> net_sizes(int in, int out, int hidden, int layers) {
  std::vector<int> sizes;
  sizes.push_back(in);
  for (int i = 0; i < layers; ++i) sizes.push_back(hidden);
  sizes.push_back(out);
  return sizes;
}
}  // namespace

QGaussianPolicy make_policy(EntropicIndex q, int state_dim, int action_dim,
                            int hidden, int layers, double sigma_min,
                            double sigma_max, Rng& rng) {
  if (!(sigma_min > 0.0) || !(sigma_max >= sigma_min)) {
    throw std::invalid_argument("make_policy: bad sigma bounds");
  }
  QGaussianPolicy p{q,
                    Mlp::fan_in_init(net_sizes(state_dim, action_dim, hidden, layers), rng),
                    Mlp::fan_in_init(net_sizes(state_dim, action_dim, hidden, layers), rng),
                    sigma_min, sigma_max};
  return p;
}

QGaussianProduct policy_forward(const QGaussianPolicy& p, const Vector& state) {
  Vector mu = p.mean_net.forward(state);
  Vector ls = p.logsigma_net.forward(state);
  Vector sigma = ls.array().exp().max(p.sigma_min).min(p.sigma_max);
  return QGaussianProduct{p.q, std::move(mu), std::move(sigma)};
}

double log_prob(const QGaussianPolicy& p, const Vector& state,
                const Vector& action) {
  return log_density(policy_forward(p, state), action);
}

Vector sample_action(const QGaussianPolicy& p, const Vector& state, Rng& rng) {
  return sample(policy_forward(p, state), rng);
}

void copy_mean_parameters(const QGaussianPolicy& source, QGaussianPolicy& dest) {
  if (!source.mean_net.same_architecture(dest.mean_net)) {
    throw std::invalid_argument("copy_mean_parameters: architecture mismatch");
  }
  dest.mean_net.params() = source.mean_net.params();
}

Vector support_width(const QGaussianPolicy& p, const Vector& state) {
  const QGaussianProduct d = policy_forward(p, state);
  Vector w(d.dim());
  if (p.q.value() < 1.0) {
    w = 2.0 * std::sqrt(2.0 / (1.0 - p.q.value())) * d.sigma;
  } else {
    w.setConstant(std::numeric_limits<double>::infinity());
  }
  return w;
}

PolicyEval policy_eval_batch(const QGaussianPolicy& p, const Matrix& states) {
  PolicyEval ev;
  ev.mean = p.mean_net.forward(states, ev.mean_cache);
  const Matrix ls = p.logsigma_net.forward(states, ev.logsig_cache);
  const Matrix raw = ls.array().exp();
  ev.sigma = raw.array().max(p.sigma_min).min(p.sigma_max);
  ev.dsigma_dls =
      ((raw.array() > p.sigma_min) && (raw.array() < p.sigma_max))
          .select(raw, Matrix::Zero(raw.rows(), raw.cols()));
  return ev;
}

LogProbParts log_prob_parts(EntropicIndex q, const PolicyEval& eval,
                            const Matrix& actions) {
  const Eigen::Index B = actions.rows();
  const Eigen::Index A = actions.cols();
  if (eval.mean.rows() != B || eval.mean.cols() != A) {
    throw std::invalid_argument("log_prob_parts: shape mismatch");
  }
  const double qv = q.value();
  LogProbParts out;
  out.logp.resize(B);
  out.dlp_dmean = Matrix::Zero(B, A);
  out.dlp_dsigma = Matrix::Zero(B, A);
  out.dlp_daction = Matrix::Zero(B, A);
  for (Eigen::Index i = 0; i < B; ++i) {
    double lp = 0.0;
    bool in_support = true;
    for (Eigen::Index j = 0; j < A && in_support; ++j) {
      const double sigma = eval.sigma(i, j);
      const double t = (actions(i, j) - eval.mean(i, j)) / sigma;
      const double u = 0.5 * t * t;
      const double log_z = std::log(normalizer(q, sigma));
      double bracket = 1.0;
      if (qv < 1.0) {
        bracket = 1.0 - (1.0 - qv) * u;
        if (bracket <= 0.0) {
          in_support = false;
          break;
        }
        lp += std::log(bracket) / (1.0 - qv) - log_z;
      } else if (qv > 1.0) {
        bracket = 1.0 + (qv - 1.0) * u;
        lp += -std::log(bracket) / (qv - 1.0) - log_z;
      } else {
        lp += -u - log_z;
      }
      out.dlp_dmean(i, j) = t / (sigma * bracket);
      out.dlp_dsigma(i, j) = t * t / (sigma * bracket) - 1.0 / sigma;
      out.dlp_daction(i, j) = -t / (sigma * bracket);
    }
    if (in_support) {
      out.logp[i] = lp;
    } else {
      out.logp[i] = kNegInf;
      out.dlp_dmean.row(i).setZero();
      out.dlp_dsigma.row(i).setZero();
      out.dlp_daction.row(i).setZero();
    }
  }
  return out;
}

void policy_backward(const QGaussianPolicy& p, const PolicyEval& eval,
                     const Matrix& dL_dmean, const Matrix& dL_dsigma,
                     Vector& mean_grad, Vector& logsig_grad) {
  if (mean_grad.size() != p.mean_net.param_count()) {
    mean_grad = Vector::Zero(p.mean_net.param_count());
  }
  if (logsig_grad.size() != p.logsigma_net.param_count()) {
    logsig_grad = Vector::Zero(p.logsigma_net.param_count());
  }
  p.mean_net.backward(eval.mean_cache, dL_dmean, mean_grad);
  const Matrix dL_dls = dL_dsigma.cwiseProduct(eval.dsigma_dls);
  p.logsigma_net.backward(eval.logsig_cache, dL_dls, logsig_grad);
}

Matrix sample_standard_batch(EntropicIndex q, Eigen::Index rows,
                             Eigen::Index cols, Rng& rng) {
  Matrix z(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      z(i, j) = sample_standard(q, rng);
    }
  }
  return z;
}

void save_policy(const QGaussianPolicy& p, std::ostream& out) {
  out << kPolicyMagic << "\n";
  out << "q=" << format_double(p.q.value())
      << " sigma_min=" << format_double(p.sigma_min)
      << " sigma_max=" << format_double(p.sigma_max)
      << " state_dim=" << p.state_dim() << " action_dim=" << p.action_dim()
      << "\n";
  save_mlp(p.mean_net, out);
  save_mlp(p.logsigma_net, out);
}

QGaussianPolicy load_policy(std::istream& in) {
  std::string magic;
  if (!(in >> magic) || magic != kPolicyMagic) {
    throw std::runtime_error("load_policy: unknown format/version");
  }
  double q = 1.0, sigma_min = 0.0, sigma_max = 0.0;
  int state_dim = 0, action_dim = 0;
  for (int k = 0; k < 5; ++k) {
    std::string tok;
    if (!(in >> tok)) throw std::runtime_error("load_policy: truncated header");
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw std::runtime_error("load_policy: bad header");
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    if (key == "q") q = parse_double(val);
    else if (key == "sigma_min") sigma_min = parse_double(val);
    else if (key == "sigma_max") sigma_max = parse_double(val);
    else if (key == "state_dim") state_dim = static_cast<int>(parse_double(val));
    else if (key == "action_dim") action_dim = static_cast<int>(parse_double(val));
    else throw std::runtime_error("load_policy: unknown header key " + key);
  }
  QGaussianPolicy p{EntropicIndex{q}, load_mlp(in), load_mlp(in), sigma_min,
                    sigma_max};
  if (p.state_dim() != state_dim || p.action_dim() != action_dim) {
    throw std::runtime_error("load_policy: header/network dimension mismatch");
  }
  return p;
}

void save_policy_file(const QGaussianPolicy& p, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_policy_file: cannot open " + path.string());
  save_policy(p, out);
  if (!out) throw std::runtime_error("save_policy_file: write failed " + path.string());
}

QGaussianPolicy load_policy_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_policy_file: cannot open " + path.string());
  return load_policy(in);
}

}  // namespace ftt
