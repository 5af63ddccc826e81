#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace tqx {

// All solver-path arithmetic runs in 80-bit extended precision. The
// ill-conditioned states at N = 8 (Q coefficients up to ~1e15) need the
// extra ~3 digits; double alone cannot reach the 1e-8 residual target.
using Real = long double;
using Complex = std::complex<Real>;

inline constexpr Real kPoleGuard = 1e-3L;      // keep-out radius around u = -1/2
inline constexpr Real kRootTol = 1e-10L;       // scaled residual for root finding
inline constexpr Real kLambdaFitTol = 1e-6L;   // held-out Lambda fit gate
inline constexpr Real kDegenerateGap = 1e-8L;  // relative eigenvalue gap threshold

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Deterministic uniform draws. std::uniform_real_distribution is
// implementation-defined, so records and tests map raw mt19937_64 output
// explicitly: 53 high bits -> [0,1).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  double sign() { return (gen_() & 1u) ? 1.0 : -1.0; }
  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace tqx
