#include "ftt/mlp.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ftt {

namespace {
constexpr char kMlpMagic[] = "ftt-mlp-v1";
}

Mlp::Mlp(std::vector<int> layer_sizes) : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) {
    throw std::invalid_argument("Mlp: need at least input and output sizes");
  }
  for (int s : sizes_) {
    if (s <= 0) throw std::invalid_argument("Mlp: layer sizes must be positive");
  }
  build_offsets();
}

void Mlp::build_offsets() {
  Eigen::Index total = 0;
  w_off_.clear();
  b_off_.clear();
  for (int l = 0; l + 1 < static_cast<int>(sizes_.size()); ++l) {
    w_off_.push_back(total);
    total += static_cast<Eigen::Index>(sizes_[l + 1]) * sizes_[l];
    b_off_.push_back(total);
    total += sizes_[l + 1];
  }
  params_ = Vector::Zero(total);
}

Mlp Mlp::fan_in_init(std::vector<int> layer_sizes, Rng& rng) {
  Mlp net(std::move(layer_sizes));
  for (int l = 0; l < net.num_layers(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(net.sizes_[l]));
    auto W = net.weight(l);
    for (Eigen::Index j = 0; j < W.cols(); ++j) {
      for (Eigen::Index i = 0; i < W.rows(); ++i) {
        W(i, j) = rng.uniform(-bound, bound);
      }
    }
    auto b = net.bias(l);
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      b[i] = rng.uniform(-bound, bound);
    }
  }
  return net;
}

Eigen::Map<const Matrix> Mlp::weight(int layer) const {
  return {params_.data() + w_off_[layer], sizes_[layer + 1], sizes_[layer]};
}

Eigen::Map<const Vector> Mlp::bias(int layer) const {
  return {params_.data() + b_off_[layer], sizes_[layer + 1]};
}

Eigen::Map<Matrix> Mlp::weight(int layer) {
  return {params_.data() + w_off_[layer], sizes_[layer + 1], sizes_[layer]};
}

Eigen::Map<Vector> Mlp::bias(int layer) {
  return {params_.data() + b_off_[layer], sizes_[layer + 1]};
}

void Mlp::check_input(Eigen::Index cols) const {
  if (cols != sizes_.front()) {
    throw std::invalid_argument("Mlp: input dimension mismatch");
  }
}

Vector Mlp::forward(const Vector& x) const {
  check_input(x.size());
  Vector a = x;
  const int L = num_layers();
  for (int l = 0; l < L; ++l) {
    Vector z = weight(l) * a + bias(l);
    if (l + 1 < L) z = z.cwiseMax(0.0);
    a = std::move(z);
  }
  return a;
}

Matrix Mlp::forward(const Matrix& X) const {
  check_input(X.cols());
  Matrix a = X;
  const int L = num_layers();
  for (int l = 0; l < L; ++l) {
    Matrix z = a * weight(l).transpose();
    z.rowwise() += bias(l).transpose();
    if (l + 1 < L) z = z.cwiseMax(0.0);
    a = std::move(z);
  }
  return a;
}

Matrix Mlp::forward(const Matrix& X, Cache& cache) const {
  check_input(X.cols());
  const int L = num_layers();
  cache.act.assign(L + 1, Matrix());
  cache.act[0] = X;
  for (int l = 0; l < L; ++l) {
    Matrix z = cache.act[l] * weight(l).transpose();
    z.rowwise() += bias(l).transpose();
    if (l + 1 < L) z = z.cwiseMax(0.0);
    cache.act[l + 1] = std::move(z);
  }
  return cache.act[L];
}

Matrix Mlp::backward(const Cache& cache, const Matrix& grad_out,
                     Vector& grad) const {
  const int L = num_layers();
  if (grad.size() != params_.size()) {
    throw std::invalid_argument("Mlp::backward: grad buffer size mismatch");
  }
  Matrix g = grad_out;
  for (int l = L - 1; l >= 0; --l) {
    Eigen::Map<Matrix> gW(grad.data() + w_off_[l], sizes_[l + 1], sizes_[l]);
    Eigen::Map<Vector> gb(grad.data() + b_off_[l], sizes_[l + 1]);
    gW.noalias() += g.transpose() * cache.act[l];
    gb.noalias() += g.colwise().sum().transpose();
    Matrix gi = g * weight(l);
    if (l > 0) {
      // ReLU kept cache.act[l] = max(0, z); derivative is 1 where it stayed
      // positive.
      gi = gi.cwiseProduct(
          (cache.act[l].array() > 0.0).cast<double>().matrix());
    }
    g = std::move(gi);
  }
  return g;
}

double mlp_loss_and_gradient(const Mlp& net, const Matrix& X,
                             const RowLoss& loss, Vector& grad) {
  Mlp::Cache cache;
  const Matrix out = net.forward(X, cache);
  const Eigen::Index B = X.rows();
  Matrix grad_out(B, out.cols());
  double total = 0.0;
  Eigen::RowVectorXd row_grad(out.cols());
  for (Eigen::Index i = 0; i < B; ++i) {
    row_grad.setZero();
    total += loss(out.row(i), row_grad);
    grad_out.row(i) = row_grad / static_cast<double>(B);
  }
  if (grad.size() != net.param_count()) grad = Vector::Zero(net.param_count());
  net.backward(cache, grad_out, grad);
  return total / static_cast<double>(B);
}

void adam_step(Vector& params, const Vector& grad, AdamState& state) {
  if (grad.size() != params.size()) {
    throw std::invalid_argument("adam_step: shape mismatch");
  }
  if (state.m.size() != params.size()) {
    state.m = Vector::Zero(params.size());
    state.v = Vector::Zero(params.size());
  }
  state.step_count += 1;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grad;
  state.v = state.beta2 * state.v +
            (1.0 - state.beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(state.beta1, state.step_count);
  const double c2 = 1.0 - std::pow(state.beta2, state.step_count);
  params.array() -= state.lr * (state.m.array() / c1) /
                    ((state.v.array() / c2).sqrt() + state.eps);
}

void polyak_update(Vector& target, const Vector& online, double alpha) {
  if (target.size() != online.size()) {
    throw std::invalid_argument("polyak_update: shape mismatch");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("polyak_update: alpha must be in [0, 1]");
  }
  target = (1.0 - alpha) * target + alpha * online;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("parse_double: bad number '" + std::string(s) + "'");
  }
  return v;
}

void save_mlp(const Mlp& net, std::ostream& out) {
  out << kMlpMagic << "\n";
  out << net.layer_sizes().size();
  for (int s : net.layer_sizes()) out << ' ' << s;
  out << "\n";
  const Vector& p = net.params();
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    out << format_double(p[i]) << "\n";
  }
}

Mlp load_mlp(std::istream& in) {
  std::string magic;
  if (!(in >> magic) || magic != kMlpMagic) {
    throw std::runtime_error("load_mlp: unknown format/version");
  }
  std::size_t n = 0;
  if (!(in >> n) || n < 2) throw std::runtime_error("load_mlp: bad layer count");
  std::vector<int> sizes(n);
  for (auto& s : sizes) {
    if (!(in >> s)) throw std::runtime_error("load_mlp: bad layer sizes");
  }
  Mlp net(std::move(sizes));
  std::string tok;
  for (Eigen::Index i = 0; i < net.param_count(); ++i) {
    if (!(in >> tok)) throw std::runtime_error("load_mlp: truncated parameters");
    net.params()[i] = parse_double(tok);
  }
  return net;
}

void save_mlp_file(const Mlp& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_mlp_file: cannot open " + path.string());
  save_mlp(net, out);
  if (!out) throw std::runtime_error("save_mlp_file: write failed " + path.string());
}

Mlp load_mlp_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_mlp_file: cannot open " + path.string());
  return load_mlp(in);
}

}  // namespace ftt
