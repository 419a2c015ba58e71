#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ftt {

// All run randomness is derived from one base seed through labeled streams,
// so independent components (dataset, init, sampling, env noise, eval)
// consume disjoint deterministic sequences. derive_seed(base, label, k)
// is stable across platforms.
std::uint64_t derive_seed(std::uint64_t base, std::string_view label,
                          std::uint64_t counter = 0);

// mt19937_64-backed source producing doubles with an implementation-
// independent mapping (53-bit mantissa), so identical seeds give identical
// streams on any standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // uniform on [0, 1)
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // uniform on (0, 1): rejects the measure-zero 0 draw
  double uniform_open() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  // uniform on [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // standard normal via Box-Muller (one deviate per call, no caching, so the
  // stream position is a pure function of the call count)
  double normal() {
    const double u1 = uniform_open();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ftt
