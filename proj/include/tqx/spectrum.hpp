#pragma once

#include <functional>
#include <map>
#include <memory>
#include <shared_mutex>
#include <span>

#include "tqx/lattice.hpp"

namespace tqx {

struct EigenSystem {
  std::vector<double> energies;  // ascending
  Eigen::MatrixXd vectors;       // orthonormal columns, degeneracies resolved
  double h_norm = 0;             // max |eigenvalue|
  std::vector<std::vector<int>> degenerate_groups;
};

// Full dense eigendecomposition of H. Near-degenerate clusters (relative gap
// below kDegenerateGap) are resolved by jointly diagonalizing t(u*) on the
// cluster subspace at a generic real point, so every vector is a transfer-
// matrix eigenvector too.
EigenSystem diagonalize_h(const ChainSpec& spec);

// Monodromy blocks cached per real node. Thread safe: concurrent Rayleigh
// evaluations share prepared nodes; missing nodes are built lazily under an
// exclusive lock (scans pre-populate to keep the parallel loop contention
// free).
class TransferCache {
 public:
  explicit TransferCache(const ChainSpec& spec) : spec_(spec) {}
  void ensure(std::span<const Real> nodes);
  Real rayleigh(Real u, const VecR& v);
  const ChainSpec& spec() const { return spec_; }

 private:
  const MonodromyBlocks& blocks_for(Real u);
  ChainSpec spec_;
  std::map<Real, MonodromyBlocks> blocks_;
  std::shared_mutex mutex_;
};

struct LambdaFunction {
  int state_index = -1;
  XBasisPolynomial lam_x;  // monic-times-2, x-degree N+1
  Polynomial lam;          // u-basis expansion, degree 2N+2
  Real fit_residual = 0;   // held-out relative mismatch
  // Exact evaluator (Rayleigh quotient); the fitted polynomial is the
  // portable representation, the evaluator is the low-noise one.
  std::function<Real(Real)> exact_eval;

  Real eval(Real u) const {
    return exact_eval ? exact_eval(u) : lam.eval(Complex(u)).real();
  }
};

// Sample nodes for the Lambda fit: 0.25 + 0.5 j, j = 0..N+2, all clear of
// the u = -1/2 pole; held-out validation nodes are fixed at {0.1, 1.05, 2.9}.
std::vector<Real> lambda_sample_nodes(int n_sites);
const std::vector<Real>& lambda_heldout_nodes();

LambdaFunction lambda_for_state(const ChainSpec& spec, const EigenSystem& es, int k,
                                const std::shared_ptr<TransferCache>& cache);
LambdaFunction lambda_for_state(const ChainSpec& spec, const EigenSystem& es, int k);

// Cross-check fit performed directly in the u basis (degree 2N+2) using the
// sample nodes and their crossing images; used by tests.
Polynomial lambda_fit_ubasis(const ChainSpec& spec, const EigenSystem& es, int k,
                             const std::shared_ptr<TransferCache>& cache);

}  // namespace tqx
