#ifndef DEFINETTI_CONFIG_HPP
#define DEFINETTI_CONFIG_HPP

#include <cstdint>
#include <string>

namespace definetti {

/// Numeric tolerances and resource caps shared across the library.
///
/// A fixed Config (including the seed) makes every pipeline in this library
/// reproduce bit-identical results; nothing consults wall clocks or
/// unordered containers.
struct Config {
  double tol = 1e-7;           // membership / feasibility slack
  double interior_tol = 1e-9;  // strict-interior threshold on facet values
  double bisect_tol = 1e-8;    // termination width for scalar bisection
  double rank_tol = 1e-10;     // singular-value threshold for rank checks
  double solver_tol = 1e-9;    // LP pivot / residual tolerance
  double gap_tol = 1e-6;       // acceptable primal-dual gap
  double p_floor = 1e-10;      // outcome-probability floor in rounding

  int cap_dim = 64;            // largest tensor-space dimension
  long cap_enum = 200000;      // largest enumeration (outcomes, strategies, rays)
  int cap_level = 8;           // largest hierarchy level

  std::uint64_t seed = 0;
  std::string cache_dir;       // vertex-enumeration cache; empty disables
  std::string out_dir;         // report persistence; empty disables
  std::string backend = "bundled";
};

/// Deterministic splitmix64 stream; used instead of <random> engines so that
/// sampled data does not depend on the standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed + 0x9e3779b97f4a7c15ULL) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

 private:
  std::uint64_t state_;
};

}  // namespace definetti

#endif
