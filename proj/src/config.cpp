#include "ftt/config.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include "ftt/mlp.hpp"

namespace ftt {

namespace {

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("config: bad boolean for '" + key + "': " + v);
}

long parse_long(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    throw std::invalid_argument("config: bad integer for '" + key + "': " + v);
  }
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    return parse_double(v);
  } catch (...) {
    throw std::invalid_argument("config: bad number for '" + key + "': " + v);
  }
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key,
                                  const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"algo",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         const auto a = parse_algorithm(v);
         if (!a) throw std::invalid_argument("config: unknown algorithm '" + v + "'");
         c.algo = *a;
         (void)k;
       }},
      {"q_f", [](auto& c, auto& k, auto& v) { c.q_f = parse_real(k, v); }},
      {"q_s", [](auto& c, auto& k, auto& v) { c.q_s = parse_real(k, v); }},
      {"q_w", [](auto& c, auto& k, auto& v) { c.q_w = parse_real(k, v); }},
      {"tau", [](auto& c, auto& k, auto& v) { c.tau = parse_real(k, v); }},
      {"alpha_spot", [](auto& c, auto& k, auto& v) { c.alpha_spot = parse_real(k, v); }},
      {"w_max", [](auto& c, auto& k, auto& v) { c.w_max = parse_real(k, v); }},
      {"rar_k", [](auto& c, auto& k, auto& v) { c.rar_k = static_cast<int>(parse_long(k, v)); }},
      {"lr_policy", [](auto& c, auto& k, auto& v) { c.lr_policy = parse_real(k, v); }},
      {"lr_critic", [](auto& c, auto& k, auto& v) { c.lr_critic = parse_real(k, v); }},
      {"tau_e", [](auto& c, auto& k, auto& v) { c.tau_e = parse_real(k, v); }},
      {"gamma", [](auto& c, auto& k, auto& v) { c.gamma = parse_real(k, v); }},
      {"polyak", [](auto& c, auto& k, auto& v) { c.polyak = parse_real(k, v); }},
      {"batch_size", [](auto& c, auto& k, auto& v) { c.batch_size = static_cast<int>(parse_long(k, v)); }},
      {"iterations", [](auto& c, auto& k, auto& v) { c.iterations = parse_long(k, v); }},
      {"eval_interval", [](auto& c, auto& k, auto& v) { c.eval_interval = parse_long(k, v); }},
      {"eval_episodes", [](auto& c, auto& k, auto& v) { c.eval_episodes = parse_long(k, v); }},
      {"seed",
       [](auto& c, auto& k, auto& v) {
         try {
           c.seed = std::stoull(v);
         } catch (...) {
           throw std::invalid_argument("config: bad seed: " + v);
         }
         (void)k;
       }},
      {"dataset", [](auto& c, auto&, auto& v) { c.dataset_path = v; }},
      {"outdir", [](auto& c, auto&, auto& v) { c.outdir = v; }},
      {"sigma_min", [](auto& c, auto& k, auto& v) { c.sigma_min = parse_real(k, v); }},
      {"sigma_max", [](auto& c, auto& k, auto& v) { c.sigma_max = parse_real(k, v); }},
      {"hidden", [](auto& c, auto& k, auto& v) { c.hidden = static_cast<int>(parse_long(k, v)); }},
      {"layers", [](auto& c, auto& k, auto& v) { c.layers = static_cast<int>(parse_long(k, v)); }},
      {"behavior_fit_steps", [](auto& c, auto& k, auto& v) { c.behavior_fit_steps = parse_long(k, v); }},
      {"reparam_actor", [](auto& c, auto& k, auto& v) { c.reparam_actor = parse_bool(k, v); }},
      {"keep_snapshots", [](auto& c, auto& k, auto& v) { c.keep_snapshots = parse_bool(k, v); }},
  };
  return table;
}

bool uses_proposal(Algorithm a) {
  return a == Algorithm::kFtt || a == Algorithm::kSpotActor ||
         a == Algorithm::kProposalOnly;
}

bool uses_behavior(Algorithm a) {
  return a == Algorithm::kReverseKlOnly || a == Algorithm::kSpotActor;
}

// Keys that only make sense for particular variants; supplying one for a
// variant that ignores it is treated as a typo.
void check_variant_keys(const ExperimentConfig& cfg,
                        const std::map<std::string, std::string>& values) {
  auto forbid = [&](const std::string& key, bool allowed) {
    if (!allowed && values.count(key)) {
      throw std::invalid_argument("config: key '" + key +
                                  "' does not apply to algorithm '" +
                                  algorithm_name(cfg.algo) + "'");
    }
  };
  forbid("alpha_spot", cfg.algo == Algorithm::kSpotActor);
  forbid("rar_k", cfg.algo == Algorithm::kRar);
  forbid("reparam_actor", cfg.algo == Algorithm::kFtt);
  forbid("behavior_fit_steps", uses_behavior(cfg.algo));
  forbid("q_f", uses_proposal(cfg.algo));
  forbid("q_s", cfg.algo != Algorithm::kProposalOnly);
  forbid("tau", uses_proposal(cfg.algo));
  forbid("q_w", uses_proposal(cfg.algo));
  forbid("w_max", uses_proposal(cfg.algo));
}

}  // namespace

void ConfigBuilder::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("config: cannot open " + path.string());
  }
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    // trim
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " is not key=value: " + line);
    }
    set(line.substr(0, eq), line.substr(eq + 1));
  }
}

void ConfigBuilder::set(const std::string& key, const std::string& value) {
  if (!setters().count(key)) {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
  values_[key] = value;
}

ExperimentConfig ConfigBuilder::build() const {
  ExperimentConfig cfg;
  // algo first so validation can refer to it
  if (auto it = values_.find("algo"); it != values_.end()) {
    setters().at("algo")(cfg, "algo", it->second);
  }
  for (const auto& [key, value] : values_) {
    if (key == "algo") continue;
    setters().at(key)(cfg, key, value);
  }
  check_variant_keys(cfg, values_);
  return cfg;
}

void write_config_echo(const ExperimentConfig& cfg,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("config echo: cannot open " + path.string());
  }
  out << "algo=" << algorithm_name(cfg.algo) << "\n";
  out << "dataset=" << cfg.dataset_path << "\n";
  out << "outdir=" << cfg.outdir << "\n";
  out << "seed=" << cfg.seed << "\n";
  out << "iterations=" << cfg.iterations << "\n";
  out << "eval_interval=" << cfg.eval_interval << "\n";
  out << "eval_episodes=" << cfg.eval_episodes << "\n";
  out << "batch_size=" << cfg.batch_size << "\n";
  out << "hidden=" << cfg.hidden << "\n";
  out << "layers=" << cfg.layers << "\n";
  out << "lr_policy=" << format_double(cfg.lr_policy) << "\n";
  out << "lr_critic=" << format_double(cfg.lr_critic) << "\n";
  out << "tau_e=" << format_double(cfg.tau_e) << "\n";
  out << "gamma=" << format_double(cfg.gamma) << "\n";
  out << "polyak=" << format_double(cfg.polyak) << "\n";
  out << "sigma_min=" << format_double(cfg.sigma_min) << "\n";
  out << "sigma_max=" << format_double(cfg.sigma_max) << "\n";
  out << "keep_snapshots=" << (cfg.keep_snapshots ? "true" : "false") << "\n";
  if (cfg.algo != Algorithm::kProposalOnly) {
    out << "q_s=" << format_double(cfg.q_s) << "\n";
  }
  if (uses_proposal(cfg.algo)) {
    out << "q_f=" << format_double(cfg.q_f) << "\n";
    out << "q_w=" << format_double(cfg.q_w) << "\n";
    out << "tau=" << format_double(cfg.tau) << "\n";
    out << "w_max=" << format_double(cfg.w_max) << "\n";
  }
  if (cfg.algo == Algorithm::kFtt) {
    out << "reparam_actor=" << (cfg.reparam_actor ? "true" : "false") << "\n";
  }
  if (cfg.algo == Algorithm::kSpotActor) {
    out << "alpha_spot=" << format_double(cfg.alpha_spot) << "\n";
  }
  if (cfg.algo == Algorithm::kRar) {
    out << "rar_k=" << cfg.rar_k << "\n";
  }
  if (uses_behavior(cfg.algo)) {
    out << "behavior_fit_steps=" << cfg.behavior_fit_steps << "\n";
  }
  if (!out) {
    throw std::runtime_error("config echo: write failed " + path.string());
  }
}

}  // namespace ftt
