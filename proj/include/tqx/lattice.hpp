#pragma once

#include <array>

#include "tqx/algebra.hpp"

namespace tqx {

struct BoundaryParams {
  Real p = 1;
  Real q = 1;
  Real xi = 1;
  Real alpha = 0;  // sqrt(1 + xi^2), stored so exact values (xi^2 = 3) survive

  static BoundaryParams make(Real p, Real q, Real xi);
  static BoundaryParams with_alpha(Real p, Real q, Real xi, Real alpha);
};

enum class Sign { plus, minus };

struct ChainSpec {
  int n_sites = 2;
  BoundaryParams params;
  Sign sign = Sign::plus;
  int site_cap = 10;

  int dim() const { return 1 << n_sites; }
  void validate() const;
};

Eigen::Matrix<Complex, 4, 4> r_matrix(Complex u);
Eigen::Matrix<Complex, 2, 2> k_minus(Complex u, const BoundaryParams& bp);
Eigen::Matrix<Complex, 2, 2> k_plus(Complex u, const BoundaryParams& bp);

MatR hamiltonian(const ChainSpec& spec);
MatC transfer_matrix(Complex u, const ChainSpec& spec);

// 2x2 auxiliary-space blocks of the monodromy T_0(u) at real u. Since every
// R-factor is symmetric, the reversed monodromy is the full transpose of
// T_0, so these four blocks carry everything the transfer matrix needs.
struct MonodromyBlocks {
  std::array<MatR, 4> t;  // t[2*a + b] = block (a, b)
  const MatR& block(int a, int b) const { return t[2 * a + b]; }
};
MonodromyBlocks monodromy_blocks(Real u, const ChainSpec& spec);

// v . t(u) v without materializing t(u); v must be normalized.
Real transfer_rayleigh(const MonodromyBlocks& m, Real u, const ChainSpec& spec, const VecR& v);

Real yang_baxter_residual(Complex u, Complex v);
Real r_unitarity_residual(Complex u);

}  // namespace tqx
