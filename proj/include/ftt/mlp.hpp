#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <vector>

#include "ftt/rng.hpp"

namespace ftt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Fully connected net with rectified-linear hidden layers and an affine
// output layer. Parameters live in one flat vector (weights then bias per
// layer), which keeps optimizer steps, target copies, and serialization
// trivial. Batches are row-major: one sample per row.
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<int> layer_sizes);  // zero-initialized

  // Fan-in-scaled uniform init, U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  static Mlp fan_in_init(std::vector<int> layer_sizes, Rng& rng);

  const std::vector<int>& layer_sizes() const { return sizes_; }
  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  int num_layers() const { return static_cast<int>(sizes_.size()) - 1; }
  Eigen::Index param_count() const { return params_.size(); }

  Vector& params() { return params_; }
  const Vector& params() const { return params_; }

  Eigen::Map<const Matrix> weight(int layer) const;
  Eigen::Map<const Vector> bias(int layer) const;
  Eigen::Map<Matrix> weight(int layer);
  Eigen::Map<Vector> bias(int layer);

  Vector forward(const Vector& x) const;
  Matrix forward(const Matrix& X) const;

  // Post-activation values per layer, kept for the backward pass.
  struct Cache {
    std::vector<Matrix> act;  // act[0] = input, act[L] = output
  };
  Matrix forward(const Matrix& X, Cache& cache) const;

  // Reverse-mode pass. grad_out is dL/d(output) row-per-sample; parameter
  // gradients are accumulated into grad (flat, same layout as params) and
  // dL/d(input) is returned.
  Matrix backward(const Cache& cache, const Matrix& grad_out,
                  Vector& grad) const;

  bool same_architecture(const Mlp& other) const {
    return sizes_ == other.sizes_;
  }

 private:
  void build_offsets();
  void check_input(Eigen::Index cols) const;

  std::vector<int> sizes_;
  std::vector<Eigen::Index> w_off_, b_off_;
  Vector params_;
};

// Gradient of the batch-mean of a per-row loss with respect to net
// parameters. The row loss returns the scalar loss and fills dloss/doutput.
using RowLoss =
    std::function<double(const Eigen::RowVectorXd& out, Eigen::RowVectorXd& grad_out)>;
double mlp_loss_and_gradient(const Mlp& net, const Matrix& X,
                             const RowLoss& loss, Vector& grad);

// Adam with bias correction. Moment buffers are lazily shaped on first step.
struct AdamState {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.99;
  double eps = 1e-8;
  long step_count = 0;
  Vector m, v;
};

void adam_step(Vector& params, const Vector& grad, AdamState& state);

// target <- (1 - alpha) * target + alpha * online
void polyak_update(Vector& target, const Vector& online, double alpha);

// Versioned text snapshot: layer sizes then parameters in layer order, one
// number per line using shortest round-trip formatting (read-back is
// bit-exact).
void save_mlp(const Mlp& net, std::ostream& out);
Mlp load_mlp(std::istream& in);
void save_mlp_file(const Mlp& net, const std::filesystem::path& path);
Mlp load_mlp_file(const std::filesystem::path& path);

// Shortest round-trip double formatting used by every text format in the
// project.
std::string format_double(double v);
double parse_double(std::string_view s);

}  // namespace ftt
