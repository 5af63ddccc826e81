// Compares the serial reference kernels against the OpenMP versions: same
// results (bitwise, by construction) and wall-clock timings side by side.

#include <chrono>
#include <cstdio>
#include <string>

#include "tqx/common.hpp"
#include "tqx/kernels.hpp"

using tqx::MatR;
using tqx::Real;
using tqx::VecR;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

MatR random_matrix(tqx::Rng& rng, int n) {
  MatR m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = Real(rng.uniform(-1, 1));
  return m;
}

template <typename F>
double time_best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, seconds_since(t0));
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::stoi(argv[1]) : 256;
  const int reps = argc > 2 ? std::stoi(argv[2]) : 3;
  tqx::Rng rng(12345);
  MatR a = random_matrix(rng, n);
  MatR b = random_matrix(rng, n);
  VecR v(n);
  for (int i = 0; i < n; ++i) v(i) = Real(rng.uniform(-1, 1));
  v /= v.norm();

  std::printf("dense long-double kernels, n = %d (best of %d)\n", n, reps);

  MatR m1, m2;
  const double t_mm_s = time_best_of(reps, [&] { m1 = tqx::kernels::matmul_serial(a, b); });
  const double t_mm_p = time_best_of(reps, [&] { m2 = tqx::kernels::matmul(a, b); });
  const bool mm_same = (m1 - m2).cwiseAbs().maxCoeff() == Real(0);
  std::printf("matmul   serial %8.4f s   parallel %8.4f s   speedup %5.2fx   identical: %s\n",
              t_mm_s, t_mm_p, t_mm_s / t_mm_p, mm_same ? "yes" : "NO");

  VecR x1, x2;
  const double t_mv_s =
      time_best_of(reps, [&] { for (int k = 0; k < 50; ++k) x1 = tqx::kernels::matvec_serial(a, v); });
  const double t_mv_p =
      time_best_of(reps, [&] { for (int k = 0; k < 50; ++k) x2 = tqx::kernels::matvec(a, v); });
  const bool mv_same = (x1 - x2).cwiseAbs().maxCoeff() == Real(0);
  std::printf("matvec   serial %8.4f s   parallel %8.4f s   speedup %5.2fx   identical: %s (50 calls)\n",
              t_mv_s, t_mv_p, t_mv_s / t_mv_p, mv_same ? "yes" : "NO");

  VecR y1, y2;
  const double t_tv_s =
      time_best_of(reps, [&] { for (int k = 0; k < 50; ++k) y1 = tqx::kernels::matvec_t_serial(a, v); });
  const double t_tv_p =
      time_best_of(reps, [&] { for (int k = 0; k < 50; ++k) y2 = tqx::kernels::matvec_t(a, v); });
  const bool tv_same = (y1 - y2).cwiseAbs().maxCoeff() == Real(0);
  std::printf("matvec_t serial %8.4f s   parallel %8.4f s   speedup %5.2fx   identical: %s (50 calls)\n",
              t_tv_s, t_tv_p, t_tv_s / t_tv_p, tv_same ? "yes" : "NO");

  Real r1 = 0, r2 = 0;
  const double t_rq_s =
      time_best_of(reps, [&] { for (int k = 0; k < 50; ++k) r1 = tqx::kernels::rayleigh_serial(a, v); });
  const double t_rq_p =
      time_best_of(reps, [&] { for (int k = 0; k < 50; ++k) r2 = tqx::kernels::rayleigh(a, v); });
  std::printf("rayleigh serial %8.4f s   parallel %8.4f s   speedup %5.2fx   identical: %s (50 calls)\n",
              t_rq_s, t_rq_p, t_rq_s / t_rq_p, r1 == r2 ? "yes" : "NO");
  return 0;
}
