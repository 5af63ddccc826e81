#include "tqx/kernels.hpp"

namespace tqx::kernels {

namespace {

template <typename Mat>
Mat matmul_rows(const Mat& a, const Mat& b, bool parallel) {
  Mat c(a.rows(), b.cols());
  const Eigen::Index n = a.rows();
#pragma omp parallel for schedule(static) if (parallel)
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      typename Mat::Scalar acc(0);
      for (Eigen::Index k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      c(i, j) = acc;
    }
  }
  return c;
}

VecR matvec_rows(const MatR& a, const VecR& x, bool parallel) {
  VecR y(a.rows());
  const Eigen::Index n = a.rows();
#pragma omp parallel for schedule(static) if (parallel)
  for (Eigen::Index i = 0; i < n; ++i) {
    Real acc = 0;
    for (Eigen::Index k = 0; k < a.cols(); ++k) acc += a(i, k) * x(k);
    y(i) = acc;
  }
  return y;
}

Real column_dot(const Real* col, const Real* x, Eigen::Index n) {
  // Four independent accumulators hide the x87 add latency; the serial and
  // parallel entry points share this routine, so their results stay bitwise
  // identical.
  Real s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  Eigen::Index k = 0;
  for (; k + 4 <= n; k += 4) {
    s0 += col[k] * x[k];
    s1 += col[k + 1] * x[k + 1];
    s2 += col[k + 2] * x[k + 2];
    s3 += col[k + 3] * x[k + 3];
  }
  for (; k < n; ++k) s0 += col[k] * x[k];
  return (s0 + s1) + (s2 + s3);
}

VecR matvec_t_cols(const MatR& a, const VecR& x, bool parallel) {
  VecR y(a.cols());
  const Eigen::Index m = a.cols();
  const Eigen::Index n = a.rows();
  const Real* data = a.data();
#pragma omp parallel for schedule(static) if (parallel)
  for (Eigen::Index j = 0; j < m; ++j) {
    y(j) = column_dot(data + j * n, x.data(), n);
  }
  return y;
}

}  // namespace

MatR matmul_serial(const MatR& a, const MatR& b) { return matmul_rows(a, b, false); }
MatR matmul(const MatR& a, const MatR& b) { return matmul_rows(a, b, true); }
MatC matmul_serial(const MatC& a, const MatC& b) { return matmul_rows(a, b, false); }
MatC matmul(const MatC& a, const MatC& b) { return matmul_rows(a, b, true); }

VecR matvec_serial(const MatR& a, const VecR& x) { return matvec_rows(a, x, false); }
VecR matvec(const MatR& a, const VecR& x) { return matvec_rows(a, x, true); }

VecR matvec_t_serial(const MatR& a, const VecR& x) { return matvec_t_cols(a, x, false); }
VecR matvec_t(const MatR& a, const VecR& x) { return matvec_t_cols(a, x, true); }

Real rayleigh_serial(const MatR& a, const VecR& v) {
  VecR av = matvec_serial(a, v);
  Real acc = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) acc += v(i) * av(i);
  return acc;
}

Real rayleigh(const MatR& a, const VecR& v) {
  VecR av = matvec(a, v);
  Real acc = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) acc += v(i) * av(i);
  return acc;
}

}  // namespace tqx::kernels
