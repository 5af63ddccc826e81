#include "tqx/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "tqx/kernels.hpp"

namespace tqx {

EigenSystem diagonalize_h(const ChainSpec& spec) {
  spec.validate();
  MatR h = hamiltonian(spec);
  Eigen::MatrixXd hd = h.cast<double>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hd);
  EigenSystem out;
  const int dim = spec.dim();
  out.energies.resize(dim);
  for (int i = 0; i < dim; ++i) out.energies[i] = es.eigenvalues()(i);
  out.vectors = es.eigenvectors();
  out.h_norm = std::max(std::abs(out.energies.front()), std::abs(out.energies.back()));

  // Cluster near-degenerate levels and refine each cluster with t(u*) so the
  // vectors diagonalize the whole commuting family, not just H.
  const double gap = static_cast<double>(kDegenerateGap) * out.h_norm;
  int i = 0;
  std::vector<std::vector<int>> groups;
  while (i < dim) {
    int j = i;
    while (j + 1 < dim && out.energies[j + 1] - out.energies[j] < gap) ++j;
    if (j > i) {
      std::vector<int> g;
      for (int k = i; k <= j; ++k) g.push_back(k);
      groups.push_back(std::move(g));
    }
    i = j + 1;
  }
  if (!groups.empty()) {
    const Real ustar = Real(0.8L);
    Eigen::MatrixXd t = transfer_matrix(Complex(ustar), spec)
                            .real()
                            .cast<double>();
    for (const auto& g : groups) {
      const int gs = static_cast<int>(g.size());
      Eigen::MatrixXd vg(dim, gs);
      for (int c = 0; c < gs; ++c) vg.col(c) = out.vectors.col(g[c]);
      Eigen::MatrixXd sub = vg.transpose() * t * vg;
      sub = 0.5 * (sub + sub.transpose().eval());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ses(sub);
      Eigen::MatrixXd rot = vg * ses.eigenvectors();
      for (int c = 0; c < gs; ++c) out.vectors.col(g[c]) = rot.col(c);
    }
  }
  out.degenerate_groups = std::move(groups);
  return out;
}

void TransferCache::ensure(std::span<const Real> nodes) {
  for (Real u : nodes) blocks_for(u);
}

const MonodromyBlocks& TransferCache::blocks_for(Real u) {
  {
    std::shared_lock lk(mutex_);
    auto it = blocks_.find(u);
    if (it != blocks_.end()) return it->second;
  }
  MonodromyBlocks mb = monodromy_blocks(u, spec_);
  std::unique_lock lk(mutex_);
  return blocks_.emplace(u, std::move(mb)).first->second;
}

Real TransferCache::rayleigh(Real u, const VecR& v) {
  return transfer_rayleigh(blocks_for(u), u, spec_, v);
}

std::vector<Real> lambda_sample_nodes(int n_sites) {
  std::vector<Real> nodes;
  for (int j = 0; j <= n_sites + 2; ++j) nodes.push_back(Real(0.25L) + Real(0.5L) * j);
  return nodes;
}

const std::vector<Real>& lambda_heldout_nodes() {
  static const std::vector<Real> nodes{Real(0.1L), Real(1.05L), Real(2.9L)};
  return nodes;
}

namespace {

VecR state_vector(const EigenSystem& es, int k) {
  return es.vectors.col(k).cast<Real>();
}

}  // namespace

LambdaFunction lambda_for_state(const ChainSpec& spec, const EigenSystem& es, int k,
                                const std::shared_ptr<TransferCache>& cache) {
  spec.validate();
  if (k < 0 || k >= spec.dim()) throw UsageError("state index out of range");
  const int n = spec.n_sites;
  std::vector<Real> nodes = lambda_sample_nodes(n);
  std::vector<Real> held = lambda_heldout_nodes();
  std::vector<Real> all = nodes;
  all.insert(all.end(), held.begin(), held.end());
  cache->ensure(all);

  VecR v = state_vector(es, k);
  auto y = [&](Real u) { return cache->rayleigh(u, v); };

  // Fit 2 x^{N+1} + sum_m c_m x^m in x = u(u+1); the exact leading
  // coefficient moves to the right-hand side.
  const int m = static_cast<int>(nodes.size());
  MatR A(m, n + 1);
  VecR b(m);
  for (int i = 0; i < m; ++i) {
    const Real x = nodes[i] * (nodes[i] + 1);
    Real xp = 1;
    for (int col = 0; col <= n; ++col) {
      A(i, col) = xp;
      xp *= x;
    }
    b(i) = y(nodes[i]) - 2 * xp;  // xp = x^{N+1} after the loop
    Real rs = std::max(A.row(i).cwiseAbs().maxCoeff(), std::abs(b(i)));
    A.row(i) /= rs;
    b(i) /= rs;
  }
  VecR c = lsq_solve(A, b);

  LambdaFunction lf;
  lf.state_index = k;
  lf.lam_x.xcoeffs.resize(n + 2);
  for (int col = 0; col <= n; ++col) lf.lam_x.xcoeffs[col] = Complex(c(col));
  lf.lam_x.xcoeffs[n + 1] = Complex(2);
  lf.lam = lf.lam_x.to_u();

  Real res = 0;
  for (Real u : held) {
    Real yu = y(u);
    res = std::max(res, std::abs(lf.lam_x.eval_u(Complex(u)).real() - yu) /
                            std::max(Real(1), std::abs(yu)));
  }
  lf.fit_residual = res;
  if (res > kLambdaFitTol)
    throw NumericError("lambda reconstruction failed for state " + std::to_string(k));

  auto cache_ref = cache;
  lf.exact_eval = [cache_ref, v](Real u) { return cache_ref->rayleigh(u, v); };
  return lf;
}

LambdaFunction lambda_for_state(const ChainSpec& spec, const EigenSystem& es, int k) {
  auto cache = std::make_shared<TransferCache>(spec);
  return lambda_for_state(spec, es, k, cache);
}

Polynomial lambda_fit_ubasis(const ChainSpec& spec, const EigenSystem& es, int k,
                             const std::shared_ptr<TransferCache>& cache) {
  const int n = spec.n_sites;
  std::vector<Real> nodes = lambda_sample_nodes(n);
  cache->ensure(nodes);
  VecR v = state_vector(es, k);

  // Same data plus the crossing images -u-1 (same Rayleigh values), fitted
  // as a free polynomial of degree 2N+2 in u.
  std::vector<std::pair<Complex, Complex>> samples;
  for (Real u : nodes) {
    Real yu = cache->rayleigh(u, v);
    samples.push_back({Complex(u), Complex(yu)});
    samples.push_back({Complex(-u - 1), Complex(yu)});
  }
  return poly_fit(samples, 2 * n + 2).poly;
}

}  // namespace tqx
