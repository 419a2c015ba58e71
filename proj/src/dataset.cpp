#include "ftt/dataset.hpp"

#include <fstream>
#include <sstream>

#include "ftt/mlp.hpp"

namespace ftt {

namespace {
constexpr char kDatasetMagic[] = "ftt-dataset-v1";
}

void save_dataset(const OfflineDataset& d, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_dataset: cannot open " + path.string());
  const DatasetMeta& m = d.meta;
  out << kDatasetMagic << " env=" << m.env_id << " state_dim=" << m.state_dim
      << " action_dim=" << m.action_dim << " episodes=" << m.episodes
      << " horizon=" << m.horizon << " seed=" << m.seed
      << " noise_scale=" << format_double(m.noise_scale) << "\n";
  for (const Transition& t : d.transitions) {
    for (double v : t.s) out << format_double(v) << ' ';
    for (double v : t.a) out << format_double(v) << ' ';
    out << format_double(t.r) << ' ';
    for (double v : t.s_next) out << format_double(v) << ' ';
    out << (t.terminal ? 1 : 0) << ' ' << (t.timeout ? 1 : 0) << "\n";
  }
  if (!out) throw std::runtime_error("save_dataset: write failed " + path.string());
}

OfflineDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_dataset: cannot open " + path.string());
  std::string header;
  if (!std::getline(in, header)) {
    throw std::runtime_error("load_dataset: empty file " + path.string());
  }
  std::istringstream hs(header);
  std::string magic;
  hs >> magic;
  if (magic != kDatasetMagic) {
    throw std::runtime_error("load_dataset: unknown format/version '" + magic + "'");
  }
  OfflineDataset d;
  std::string tok;
  while (hs >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("load_dataset: bad header token '" + tok + "'");
    }
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    if (key == "env") d.meta.env_id = val;
    else if (key == "state_dim") d.meta.state_dim = std::stoi(val);
    else if (key == "action_dim") d.meta.action_dim = std::stoi(val);
    else if (key == "episodes") d.meta.episodes = std::stol(val);
    else if (key == "horizon") d.meta.horizon = std::stol(val);
    else if (key == "seed") d.meta.seed = std::stoull(val);
    else if (key == "noise_scale") d.meta.noise_scale = parse_double(val);
    else throw std::runtime_error("load_dataset: unknown header key '" + key + "'");
  }
  if (d.meta.state_dim <= 0 || d.meta.action_dim <= 0) {
    throw std::runtime_error("load_dataset: missing dimensions in header");
  }
  const std::size_t ncols =
      2 * static_cast<std::size_t>(d.meta.state_dim) + d.meta.action_dim + 3;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<std::string> cols;
    while (ls >> tok) cols.push_back(tok);
    if (cols.size() != ncols) {
      throw std::runtime_error("load_dataset: malformed transition line");
    }
    Transition t;
    std::size_t k = 0;
    t.s.resize(d.meta.state_dim);
    for (double& v : t.s) v = parse_double(cols[k++]);
    t.a.resize(d.meta.action_dim);
    for (double& v : t.a) v = parse_double(cols[k++]);
    t.r = parse_double(cols[k++]);
    t.s_next.resize(d.meta.state_dim);
    for (double& v : t.s_next) v = parse_double(cols[k++]);
    t.terminal = cols[k++] == "1";
    t.timeout = cols[k++] == "1";
    d.transitions.push_back(std::move(t));
  }
  if (d.meta.episodes > 0 && d.meta.horizon > 0 &&
      d.transitions.size() !=
          static_cast<std::size_t>(d.meta.episodes) * d.meta.horizon) {
    throw std::runtime_error("load_dataset: transition count != episodes*horizon");
  }
  return d;
}

Batch make_batch(const OfflineDataset& d, const std::vector<std::size_t>& idx) {
  const Eigen::Index B = static_cast<Eigen::Index>(idx.size());
  Batch b;
  b.states.resize(B, d.meta.state_dim);
  b.actions.resize(B, d.meta.action_dim);
  b.rewards.resize(B);
  b.next_states.resize(B, d.meta.state_dim);
  b.terminal.resize(B);
  for (Eigen::Index i = 0; i < B; ++i) {
    const Transition& t = d.transitions.at(idx[i]);
    for (int j = 0; j < d.meta.state_dim; ++j) {
      b.states(i, j) = t.s[j];
      b.next_states(i, j) = t.s_next[j];
    }
    for (int j = 0; j < d.meta.action_dim; ++j) b.actions(i, j) = t.a[j];
    b.rewards[i] = t.r;
    b.terminal[i] = t.terminal ? 1.0 : 0.0;
  }
  return b;
}

}  // namespace ftt
