#include "tqx/lattice.hpp"

#include <cmath>

#include "tqx/kernels.hpp"

namespace tqx {

BoundaryParams BoundaryParams::make(Real p, Real q, Real xi) {
  return with_alpha(p, q, xi, std::sqrt(Real(1) + xi * xi));
}

BoundaryParams BoundaryParams::with_alpha(Real p, Real q, Real xi, Real alpha) {
  if (p == Real(0) || q == Real(0))
    throw UsageError("boundary parameters p and q must be nonzero");
  BoundaryParams bp;
  bp.p = p;
  bp.q = q;
  bp.xi = xi;
  bp.alpha = alpha;
  return bp;
}

void ChainSpec::validate() const {
  if (n_sites < 1 || n_sites > site_cap)
    throw UsageError("n_sites out of range (1.." + std::to_string(site_cap) + ")");
  if (params.alpha <= Real(0)) throw UsageError("boundary params not initialized");
}

Eigen::Matrix<Complex, 4, 4> r_matrix(Complex u) {
  Eigen::Matrix<Complex, 4, 4> r = Eigen::Matrix<Complex, 4, 4>::Zero();
  // permutation of the two 2-dimensional factors
  r(0, 0) = r(3, 3) = Complex(1);
  r(1, 2) = r(2, 1) = Complex(1);
  for (int i = 0; i < 4; ++i) r(i, i) += u;
  return r;
}

Eigen::Matrix<Complex, 2, 2> k_minus(Complex u, const BoundaryParams& bp) {
  Eigen::Matrix<Complex, 2, 2> k = Eigen::Matrix<Complex, 2, 2>::Zero();
  k(0, 0) = bp.p + u;
  k(1, 1) = bp.p - u;
  return k;
}

Eigen::Matrix<Complex, 2, 2> k_plus(Complex u, const BoundaryParams& bp) {
  Eigen::Matrix<Complex, 2, 2> k;
  k(0, 0) = bp.q + u + Real(1);
  k(0, 1) = bp.xi * (u + Real(1));
  k(1, 0) = bp.xi * (u + Real(1));
  k(1, 1) = bp.q - u - Real(1);
  return k;
}

namespace {

MatR kron(const MatR& a, const MatR& b) {
  MatR c(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      c.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return c;
}

MatR identity(int n) { return MatR::Identity(n, n); }

// single-site operator embedded in the chain; site 1 is the leftmost
// (most significant) tensor factor
MatR embed1(const MatR& op, int site, int n_sites) {
  return kron(kron(identity(1 << (site - 1)), op),
              identity(1 << (n_sites - site)));
}

// Right-multiply a dense chain matrix by the single-site unit operator
// |b><c| at the given site: column t (with site state c) receives the
// column of the input whose site state is b; all other columns vanish.
template <typename Mat>
void apply_unit_right(const Mat& in, Mat& out, int bitpos, int b, int c) {
  const Eigen::Index dim = in.rows();
  const Eigen::Index mask = Eigen::Index(1) << bitpos;
  for (Eigen::Index t = 0; t < dim; ++t) {
    if (((t >> bitpos) & 1) != c) continue;
    Eigen::Index src = (t & ~mask) | (Eigen::Index(b) << bitpos);
    out.col(t) += in.col(src);
  }
}

template <typename Scalar>
std::array<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>, 4> monodromy_blocks_impl(
    Scalar u, const ChainSpec& spec) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const int n = spec.n_sites;
  const Eigen::Index dim = spec.dim();
  std::array<Mat, 4> m;
  m[0] = Mat::Identity(dim, dim);
  m[1] = Mat::Zero(dim, dim);
  m[2] = Mat::Zero(dim, dim);
  m[3] = Mat::Identity(dim, dim);
  std::array<Mat, 4> next;
  for (int site = 1; site <= n; ++site) {
    const int bitpos = n - site;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        Mat& nb = next[2 * a + b];
        nb = u * m[2 * a + b];
        for (int c = 0; c < 2; ++c) apply_unit_right(m[2 * a + c], nb, bitpos, b, c);
      }
    std::swap(m, next);
  }
  return m;
}

}  // namespace

MonodromyBlocks monodromy_blocks(Real u, const ChainSpec& spec) {
  spec.validate();
  return {monodromy_blocks_impl<Real>(u, spec)};
}

Real transfer_rayleigh(const MonodromyBlocks& m, Real u, const ChainSpec& spec,
                       const VecR& v) {
  // t(u) = sum_{a,b,c} Kp(a,b) Km(c,c) T_{bc} That_{ca}, with That = T
  // transposed, so v.t(u)v reduces to dots of the four w_{xy} = T_{xy}^T v.
  auto kp = k_plus(Complex(u), spec.params);
  auto km = k_minus(Complex(u), spec.params);
  std::array<VecR, 4> w;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      w[2 * x + y] = kernels::matvec_t(m.block(x, y), v);
  Real acc = 0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) {
        Real kpv = kp(a, b).real();
        Real kmv = km(c, c).real();
        Real dot = 0;
        const VecR& wb = w[2 * b + c];
        const VecR& wa = w[2 * a + c];
        for (Eigen::Index i = 0; i < v.size(); ++i) dot += wb(i) * wa(i);
        acc += kpv * kmv * dot;
      }
  return acc;
}

MatC transfer_matrix(Complex u, const ChainSpec& spec) {
  spec.validate();
  const Eigen::Index dim = spec.dim();
  auto blocks = monodromy_blocks_impl<Complex>(u, spec);
  auto kp = k_plus(u, spec.params);
  auto km = k_minus(u, spec.params);
  MatC t = MatC::Zero(dim, dim);
  for (int b = 0; b < 2; ++b)
    for (int c = 0; c < 2; ++c) {
      // weight block (b,c) by sum_a Kp(a,b) (...) and That_{ca} = T_{ac}^T
      for (int a = 0; a < 2; ++a) {
        Complex wgt = kp(a, b) * km(c, c);
        if (wgt == Complex(0)) continue;
        t += wgt * kernels::matmul(blocks[2 * b + c], MatC(blocks[2 * a + c].transpose()));
      }
    }
  return t;
}

MatR hamiltonian(const ChainSpec& spec) {
  spec.validate();
  if (spec.n_sites < 2) throw UsageError("hamiltonian needs at least 2 sites");
  const int n = spec.n_sites;
  const Eigen::Index dim = spec.dim();
  const BoundaryParams& bp = spec.params;

  MatR sx(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sz << 1, 0, 0, -1;
  // sigma.sigma on two adjacent sites (sy x sy is real)
  MatR ss(4, 4);
  ss << 1, 0, 0, 0,
        0, -1, 2, 0,
        0, 2, -1, 0,
        0, 0, 0, 1;

  MatR h = MatR::Zero(dim, dim);
  for (int site = 1; site < n; ++site)
    h += kron(kron(identity(1 << (site - 1)), ss), identity(1 << (n - site - 1)));
  h += (Real(1) / bp.p) * embed1(sz, n, n);
  h += (Real(1) / bp.q) * (embed1(sz, 1, n) + bp.xi * embed1(sx, 1, n));
  return h;
}

namespace {

Eigen::Matrix<Complex, 8, 8> r_embed(Complex u, int slot_i, int slot_j) {
  Eigen::Matrix<Complex, 8, 8> m = Eigen::Matrix<Complex, 8, 8>::Zero();
  auto bit = [](int idx, int slot) { return (idx >> (3 - slot)) & 1; };  // slot 1 = MSB
  for (int s = 0; s < 8; ++s) {
    // permutation part: swap slots i and j
    int t = s;
    int bi = bit(s, slot_i), bj = bit(s, slot_j);
    t &= ~((1 << (3 - slot_i)) | (1 << (3 - slot_j)));
    t |= bi << (3 - slot_j);
    t |= bj << (3 - slot_i);
    m(t, s) += Complex(1);
    m(s, s) += u;
  }
  return m;
}

}  // namespace

Real yang_baxter_residual(Complex u, Complex v) {
  auto r12 = r_embed(u - v, 1, 2);
  auto r13 = r_embed(u, 1, 3);
  auto r23 = r_embed(v, 2, 3);
  Eigen::Matrix<Complex, 8, 8> lhs = r12 * r13 * r23;
  Eigen::Matrix<Complex, 8, 8> rhs = r23 * r13 * r12;
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

Real r_unitarity_residual(Complex u) {
  Eigen::Matrix<Complex, 4, 4> lhs = r_matrix(u) * r_matrix(-u);
  Eigen::Matrix<Complex, 4, 4> rhs =
      (Complex(1) - u * u) * Eigen::Matrix<Complex, 4, 4>::Identity();
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

}  // namespace tqx
