#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace gmatch {

// Deterministic random source. The engine is std::mt19937_64, which the
// standard pins bit-exactly; all distribution transforms are done by hand
// because the std distributions are implementation-defined.
class Rng {
 public:
  Rng() : Rng(0) {}
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of mantissa.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; consumes two uniforms per draw.
  double normal();

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Uniform integer in [0, n) by rejection, bias-free.
  std::uint64_t uniform_index(std::uint64_t n);

  // Fisher-Yates permutation of {0, ..., n-1}.
  std::vector<int> permutation(int n);

  // Engine state round-trips through text (portable per the standard).
  std::string state() const;
  void set_state(const std::string& text);

  // Derives an independent stream for a named phase of an experiment.
  static Rng derive(std::uint64_t seed, std::uint64_t stream);

 private:
  std::mt19937_64 engine_;
};

}  // namespace gmatch
