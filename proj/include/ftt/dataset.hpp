#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace ftt {

// One logged step. terminal marks a true environment termination (bootstrap
// masked); timeout marks an episode cut by the horizon (bootstrap continues).
struct Transition {
  std::vector<double> s;
  std::vector<double> a;
  double r = 0.0;
  std::vector<double> s_next;
  bool terminal = false;
  bool timeout = false;
};

struct DatasetMeta {
  std::string env_id;
  int state_dim = 0;
  int action_dim = 0;
  long episodes = 0;
  long horizon = 0;
  std::uint64_t seed = 0;
  double noise_scale = 0.0;
};

struct OfflineDataset {
  DatasetMeta meta;
  std::vector<Transition> transitions;

  std::size_t size() const { return transitions.size(); }
};

// Line-oriented versioned text format: one header line, then one transition
// per line (s, a, r, s_next, terminal, timeout), all numbers in shortest
// round-trip form. Readers reject unknown versions and transition counts
// inconsistent with episodes x horizon.
void save_dataset(const OfflineDataset& d, const std::filesystem::path& path);
OfflineDataset load_dataset(const std::filesystem::path& path);

// Batch views used by training: rows are samples.
struct Batch {
  Eigen::MatrixXd states;       // B x state_dim
  Eigen::MatrixXd actions;      // B x action_dim
  Eigen::VectorXd rewards;      // B
  Eigen::MatrixXd next_states;  // B x state_dim
  Eigen::VectorXd terminal;     // B, 0/1
};

Batch make_batch(const OfflineDataset& d, const std::vector<std::size_t>& idx);

}  // namespace ftt
