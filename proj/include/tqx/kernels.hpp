#pragma once

#include "tqx/algebra.hpp"

namespace tqx::kernels {

// Dense kernels on extended-precision matrices. The OpenMP versions
// parallelize over output rows only, so every element is accumulated in a
// fixed serial order and results are bitwise identical to the serial
// reference (which stays around for tests and benchmarking).

MatR matmul_serial(const MatR& a, const MatR& b);
MatR matmul(const MatR& a, const MatR& b);
MatC matmul_serial(const MatC& a, const MatC& b);
MatC matmul(const MatC& a, const MatC& b);

VecR matvec_serial(const MatR& a, const VecR& x);
VecR matvec(const MatR& a, const VecR& x);

// y = a^T x without materializing the transpose: each output entry is a dot
// product with one stored column, so access stays contiguous.
VecR matvec_t_serial(const MatR& a, const VecR& x);
VecR matvec_t(const MatR& a, const VecR& x);

// v . (A v) for symmetric real A: the Rayleigh quotient numerator used to
// sample transfer-matrix eigenvalues (vectors are normalized upstream).
Real rayleigh_serial(const MatR& a, const VecR& v);
Real rayleigh(const MatR& a, const VecR& v);

}  // namespace tqx::kernels
