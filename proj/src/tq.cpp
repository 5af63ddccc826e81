#include "tqx/tq.hpp"

#include <algorithm>
#include <cmath>

namespace tqx {

namespace {

Complex ipow(Complex b, int e) {
  Complex r(1);
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

struct EffectiveParams {
  Real p, q, alpha;
  int n;
};

EffectiveParams effective(const ChainSpec& spec) {
  const Real s = spec.sign == Sign::plus ? Real(1) : Real(-1);
  return {s * spec.params.p, s * spec.params.q, spec.params.alpha, spec.n_sites};
}

Complex a_bar_eff(Complex u, const EffectiveParams& ep) {
  return (Real(2) * u + Real(2)) / (Real(2) * u + Real(1)) * (u + ep.p) *
         (ep.alpha * u + ep.q) * ipow(u + Real(1), 2 * ep.n);
}

Complex delta_eff(Complex u, const EffectiveParams& ep) {
  return Real(2) * (Real(1) - ep.alpha) * ipow(u * (u + Real(1)), 2 * ep.n + 1);
}

void pole_check(Complex u) {
  if (std::abs(u + Real(0.5L)) < kPoleGuard)
    throw NumericError("T-Q coefficient evaluated inside the u = -1/2 pole guard");
}

struct TQTerms {
  Complex t1, t2, t3, t4;
  Complex residual() const { return t1 - t2 - t3 - t4; }
  Real scale() const {
    return std::max(std::max(std::abs(t1), std::abs(t2)),
                    std::max(std::abs(t3), std::abs(t4)));
  }
};

// Single assembly point for the T-Q combination; the solver (product-form Q,
// trivial Q1/Q2) and the general verifier (polynomial Q's) both route here.
TQTerms tq_terms(Complex lam_u, Complex qu, Complex qum, Complex qup, Complex q1u,
                 Complex q1um, Complex q2u, Complex q2up, Complex ab, Complex db,
                 Complex dl) {
  return {lam_u * qu * q1u * q2u, ab * qum * q1um * q1u, db * qup * q2up * q2u, dl};
}

}  // namespace

Complex a_bar(Complex u, const ChainSpec& spec) {
  spec.validate();
  pole_check(u);
  return a_bar_eff(u, effective(spec));
}

Complex d_bar(Complex u, const ChainSpec& spec) {
  spec.validate();
  pole_check(u);
  return a_bar_eff(-u - Real(1), effective(spec));
}

Complex delta_term(Complex u, const ChainSpec& spec) {
  spec.validate();
  return delta_eff(u, effective(spec));
}

Real energy_shift_c(const ChainSpec& spec) {
  // The additive constant follows the branch: matching the derivative of the
  // transfer eigenvalue at u = 0 through either parametrization gives
  // c = N - 1 +- (1/p + alpha/q), with the signs of the coefficient
  // functions. (Both branches share Lambda'(0), but a-bar'(0) flips the
  // boundary part, so the root sums differ by exactly this offset.)
  const EffectiveParams ep = effective(spec);
  return Real(spec.n_sites) - 1 + 1 / ep.p + ep.alpha / ep.q;
}

std::vector<Real> q_collocation_nodes(int n_sites) {
  std::vector<Real> nodes;
  for (int j = 0; j <= 4 * n_sites + 5; ++j)
    nodes.push_back(Real(0.25L) + Real(0.35L) * j);
  return nodes;
}

std::vector<Real> q_heldout_nodes(int n_sites) {
  // Interleaved across the collocation window, never on a collocation node.
  std::vector<Real> nodes;
  const Real m = Real(4 * n_sites + 6);
  for (int j = 0; j < 10; ++j)
    nodes.push_back(Real(0.25L) + Real(0.35L) * ((Real(j) + Real(0.5L)) * m / Real(10)));
  return nodes;
}

Complex canonical_root(Complex x) {
  Complex lam = (Complex(-1) + std::sqrt(Complex(1) + Real(4) * x)) / Real(2);
  if (std::abs(lam.real() + Real(0.5L)) < Real(1e-9L) && lam.imag() < 0)
    lam = -lam - Real(1);
  return lam;
}

Real energy_from_roots(std::span<const Complex> roots, const ChainSpec& spec) {
  Complex sum(0);
  for (const Complex& l : roots) {
    if (std::abs(l) < Real(1e-12L) || std::abs(l + Real(1)) < Real(1e-12L))
      throw NumericError("Bethe root at a pole of the energy formula (0 or -1)");
    sum += Complex(1) / (l * (l + Real(1)));
  }
  Complex e = Real(2) * sum + energy_shift_c(spec);
  if (std::abs(e.imag()) > Real(1e-8L))
    throw NumericError("energy has non-cancelling imaginary part");
  return e.real();
}

Real cysw_energy(std::span<const Complex> lambdas, std::span<const Complex> mus,
                 std::span<const Complex> nus, const ChainSpec& spec) {
  if (mus.size() != nus.size())
    throw UsageError("cysw_energy: mu and nu lists must have equal length");
  Complex sum(0);
  for (const Complex& l : lambdas) {
    if (std::abs(l) < Real(1e-12L) || std::abs(l + Real(1)) < Real(1e-12L))
      throw NumericError("Bethe root at a pole of the energy formula (0 or -1)");
    sum += Complex(1) / (l * (l + Real(1)));
  }
  for (size_t j = 0; j < mus.size(); ++j) {
    if (std::abs(nus[j]) < Real(1e-12L))
      throw NumericError("nu root at the 1/nu pole");
    if (std::abs(mus[j] + Real(1)) < Real(1e-12L))
      throw NumericError("mu root at the 1/(mu+1) pole");
    sum += Complex(1) / nus[j] - Complex(1) / (mus[j] + Real(1));
  }
  Complex e = Real(2) * sum + energy_shift_c(spec);
  if (std::abs(e.imag()) > Real(1e-8L))
    throw NumericError("energy has non-cancelling imaginary part");
  return e.real();
}

namespace {

TQTerms cysw_terms(const LambdaFunction& lam, const Polynomial& Q, const Polynomial& Q1,
                   const Polynomial& Q2, const ChainSpec& spec, Complex u) {
  pole_check(u);
  const EffectiveParams ep = effective(spec);
  Complex lam_u = (u.imag() == Real(0) && lam.exact_eval)
                      ? Complex(lam.eval(u.real()))
                      : lam.lam.eval(u);
  return tq_terms(lam_u, Q.eval(u), Q.eval(u - Real(1)), Q.eval(u + Real(1)),
                  Q1.eval(u), Q1.eval(u - Real(1)), Q2.eval(u), Q2.eval(u + Real(1)),
                  a_bar_eff(u, ep), a_bar_eff(-u - Real(1), ep), delta_eff(u, ep));
}

}  // namespace

Complex cysw_residual(const LambdaFunction& lam, const Polynomial& Q,
                      const Polynomial& Q1, const Polynomial& Q2,
                      const ChainSpec& spec, Complex u) {
  return cysw_terms(lam, Q, Q1, Q2, spec, u).residual();
}

Real cysw_scale(const LambdaFunction& lam, const Polynomial& Q, const Polynomial& Q1,
                const Polynomial& Q2, const ChainSpec& spec, Complex u) {
  return cysw_terms(lam, Q, Q1, Q2, spec, u).scale();
}

namespace {

Real heldout_residual_x(const LambdaFunction& lam, const std::vector<Complex>& xs,
                        const EffectiveParams& ep, const std::vector<Real>& hnodes) {
  Real worst = 0;
  for (Real u : hnodes) {
    auto qprod = [&](Real uu) {
      Complex prod(1);
      const Real x = uu * (uu + 1);
      for (const Complex& r : xs) prod *= (x - r);
      return prod;
    };
    TQTerms t = tq_terms(Complex(lam.eval(u)), qprod(u), qprod(u - 1), qprod(u + 1),
                         Complex(1), Complex(1), Complex(1), Complex(1),
                         a_bar_eff(Complex(u), ep), a_bar_eff(Complex(-u - 1), ep),
                         delta_eff(Complex(u), ep));
    worst = std::max(worst, std::abs(t.residual()) / t.scale());
  }
  return worst;
}

}  // namespace

Real tq_residual_for_roots(const LambdaFunction& lam, std::span<const Complex> roots,
                           const ChainSpec& spec) {
  spec.validate();
  std::vector<Complex> xs;
  xs.reserve(roots.size());
  for (const Complex& l : roots) xs.push_back(l * (l + Real(1)));
  return heldout_residual_x(lam, xs, effective(spec), q_heldout_nodes(spec.n_sites));
}

namespace {

// ---- root refinement on the parameter-only Bethe system -------------------
//
// G_j(x) = a(l_j) prod_m (xm_j - x_m) + d(l_j) prod_m (xp_j - x_m) + Delta(l_j)
// with l_j = (-1+sqrt(1+4 x_j))/2, xm_j = x_j - 2 l_j, xp_j = x_j + 2 l_j + 2.
// G is invariant under l -> -l-1, so it is a function of x alone. Newton with
// the analytic Jacobian, damped steps, and the caller keeps the result only
// if the held-out residual actually improves.

struct BetheSystem {
  EffectiveParams ep;

  Complex ab(Complex l) const { return a_bar_eff(l, ep); }
  Complex ab_logder(Complex l) const {
    return Real(2) / (Real(2) * l + Real(2)) - Real(2) / (Real(2) * l + Real(1)) +
           Complex(1) / (l + ep.p) + ep.alpha / (ep.alpha * l + ep.q) +
           Real(2 * ep.n) / (l + Real(1));
  }
  Complex dl(Complex l) const { return delta_eff(l, ep); }
  Complex dl_der(Complex l) const {
    return dl(l) * Real(2 * ep.n + 1) * (Real(2) * l + Real(1)) / (l * (l + Real(1)));
  }

  void eval(const std::vector<Complex>& xs, std::vector<Complex>& g,
            std::vector<Real>& scale, MatC* jac) const {
    const int n = static_cast<int>(xs.size());
    g.assign(n, Complex(0));
    scale.assign(n, Real(0));
    if (jac) jac->setZero(n, n);
    for (int j = 0; j < n; ++j) {
      Complex lj = (Complex(-1) + std::sqrt(Complex(1) + Real(4) * xs[j])) / Real(2);
      Complex xmj = xs[j] - Real(2) * lj;
      Complex xpj = xs[j] + Real(2) * lj + Real(2);
      std::vector<Complex> fm(n), fp(n);
      Complex qm(1), qp(1);
      for (int m = 0; m < n; ++m) {
        fm[m] = xmj - xs[m];
        fp[m] = xpj - xs[m];
        qm *= fm[m];
        qp *= fp[m];
      }
      Complex a = ab(lj);
      Complex d = ab(-lj - Real(1));
      Complex dd = dl(lj);
      g[j] = a * qm + d * qp + dd;
      scale[j] = std::max(std::max(std::abs(a * qm), std::abs(d * qp)), std::abs(dd));
      if (!jac) continue;

      auto partial = [n](const std::vector<Complex>& f, int skip) {
        Complex prod(1);
        for (int m = 0; m < n; ++m)
          if (m != skip) prod *= f[m];
        return prod;
      };
      Complex sum_qm(0), sum_qp(0);
      for (int m = 0; m < n; ++m) {
        Complex qm_m = partial(fm, m);
        Complex qp_m = partial(fp, m);
        (*jac)(j, m) += -a * qm_m - d * qp_m;
        sum_qm += qm_m;
        sum_qp += qp_m;
      }
      Complex dldx = Complex(1) / (Real(2) * lj + Real(1));
      Complex dxm = Complex(1) - Real(2) * dldx;
      Complex dxp = Complex(1) + Real(2) * dldx;
      (*jac)(j, j) += a * dxm * sum_qm + d * dxp * sum_qp;
      (*jac)(j, j) +=
          dldx * (a * ab_logder(lj) * qm - d * ab_logder(-lj - Real(1)) * qp + dl_der(lj));
    }
  }

  Real max_scaled(const std::vector<Complex>& g, const std::vector<Real>& s) const {
    Real worst = 0;
    for (size_t i = 0; i < g.size(); ++i)
      worst = std::max(worst, std::abs(g[i]) / std::max(s[i], Real(1e-300L)));
    return worst;
  }
};

std::vector<Complex> newton_polish(const std::vector<Complex>& seed,
                                   const BetheSystem& sys) {
  const int n = static_cast<int>(seed.size());
  std::vector<Complex> xs = seed;
  std::vector<Complex> g;
  std::vector<Real> sc;
  sys.eval(xs, g, sc, nullptr);
  Real rbest = sys.max_scaled(g, sc);
  std::vector<Complex> best = xs;
  MatC jac(n, n);
  for (int it = 0; it < 24; ++it) {
    sys.eval(xs, g, sc, &jac);
    Real r = sys.max_scaled(g, sc);
    if (r < rbest) {
      rbest = r;
      best = xs;
    }
    if (r < Real(1e-17L)) break;
    VecC rhs(n);
    for (int i = 0; i < n; ++i) rhs(i) = g[i];
    VecC step = solve_dense(jac, rhs);
    if (!step.allFinite()) break;
    Real damp = 1;
    bool moved = false;
    for (int half = 0; half < 12; ++half) {
      std::vector<Complex> trial = xs;
      for (int i = 0; i < n; ++i) trial[i] -= damp * step(i);
      std::vector<Complex> g2;
      std::vector<Real> s2;
      sys.eval(trial, g2, s2, nullptr);
      if (sys.max_scaled(g2, s2) < r) {
        xs = std::move(trial);
        moved = true;
        break;
      }
      damp /= 2;
    }
    if (!moved) break;
  }
  sys.eval(xs, g, sc, nullptr);
  if (sys.max_scaled(g, sc) < rbest) best = xs;
  return best;
}

// Pair conjugate x-roots and pin nearly-real ones onto the axis.
void symmetrize_conjugates(std::vector<Complex>& xs) {
  const int n = static_cast<int>(xs.size());
  std::vector<bool> used(n, false);
  for (int i = 0; i < n; ++i) {
    if (used[i]) continue;
    const Real tol = Real(1e-6L) * std::max(Real(1), std::abs(xs[i]));
    if (std::abs(xs[i].imag()) < tol / 2) {
      // best partner is itself: treat as real
      bool self_best = true;
      for (int j = 0; j < n; ++j)
        if (j != i && !used[j] &&
            std::abs(xs[j] - std::conj(xs[i])) < std::abs(xs[i].imag()))
          self_best = false;
      if (self_best) {
        xs[i] = Complex(xs[i].real());
        used[i] = true;
        continue;
      }
    }
    int match = -1;
    Real bestd = tol;
    for (int j = i + 1; j < n; ++j) {
      if (used[j]) continue;
      Real d = std::abs(xs[j] - std::conj(xs[i]));
      if (d < bestd) {
        bestd = d;
        match = j;
      }
    }
    if (match >= 0) {
      Complex mid = (xs[i] + std::conj(xs[match])) / Real(2);
      xs[i] = mid;
      xs[match] = std::conj(mid);
      used[i] = used[match] = true;
    } else {
      used[i] = true;
    }
  }
}

}  // namespace

BetheSolution solve_q(const LambdaFunction& lam, const ChainSpec& spec, Real tol_tq) {
  spec.validate();
  if (spec.params.xi == Real(0))
    throw UsageError(
        "xi = 0 selects diagonal boundaries: the inhomogeneous term vanishes and "
        "the fixed-degree Q ansatz does not apply");
  const int n = spec.n_sites;
  const EffectiveParams ep = effective(spec);

  std::vector<Real> cnodes = q_collocation_nodes(n);
  std::vector<Real> hnodes = q_heldout_nodes(n);

  // Least squares for the non-leading x-coefficients of monic Q.
  const int rows = static_cast<int>(cnodes.size());
  MatR A(rows, n);
  VecR b(rows);
  for (int i = 0; i < rows; ++i) {
    const Real u = cnodes[i];
    const Real lu = lam.eval(u);
    const Real x0 = u * (u + 1);
    const Real xm = (u - 1) * u;
    const Real xp = (u + 1) * (u + 2);
    const Real ab = a_bar_eff(Complex(u), ep).real();
    const Real db = a_bar_eff(Complex(-u - 1), ep).real();
    const Real dl = delta_eff(Complex(u), ep).real();
    Real p0 = 1, pm = 1, pp = 1;
    for (int m = 0; m < n; ++m) {
      A(i, m) = lu * p0 - ab * pm - db * pp;
      p0 *= x0;
      pm *= xm;
      pp *= xp;
    }
    b(i) = dl - (lu * p0 - ab * pm - db * pp);
    Real rs = std::max(A.row(i).cwiseAbs().maxCoeff(), std::abs(b(i)));
    if (rs == Real(0)) rs = 1;
    A.row(i) /= rs;
    b(i) /= rs;
  }
  VecR c = lsq_solve(A, b);

  BetheSolution sol;
  sol.state_index = lam.state_index;
  sol.q_poly.xcoeffs.resize(n + 1);
  for (int m = 0; m < n; ++m) sol.q_poly.xcoeffs[m] = Complex(c(m));
  sol.q_poly.xcoeffs[n] = Complex(1);

  std::vector<Complex> xroots = poly_roots(Polynomial(sol.q_poly.xcoeffs));

  // Held-out residual with product-form Q (stable for huge |x| roots).
  auto residual_at = [&](const std::vector<Complex>& xs) {
    return heldout_residual_x(lam, xs, ep, hnodes);
  };

  Real res_lsq = residual_at(xroots);
  BetheSystem sys{ep};
  std::vector<Complex> polished = newton_polish(xroots, sys);
  Real res_pol = residual_at(polished);
  if (res_pol < res_lsq) {
    xroots = std::move(polished);
    sol.tq_residual = res_pol;
  } else {
    sol.tq_residual = res_lsq;
  }

  symmetrize_conjugates(xroots);
  // Rebuild the stored Q from the final roots so record and roots agree.
  Polynomial qx = Polynomial::from_roots(xroots);
  sol.q_poly.xcoeffs = qx.coeffs;
  for (auto& coef : sol.q_poly.xcoeffs) coef = Complex(coef.real());

  sol.roots.clear();
  for (const Complex& x : xroots) sol.roots.push_back(canonical_root(x));
  std::sort(sol.roots.begin(), sol.roots.end(), [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });

  try {
    sol.energy = energy_from_roots(sol.roots, spec);
  } catch (const NumericError& e) {
    sol.solved = false;
    sol.failure = e.what();
    return sol;
  }
  sol.solved = sol.tq_residual <= tol_tq;
  if (!sol.solved) sol.failure = "tq residual above tolerance";
  return sol;
}

CompletenessReport completeness_scan(const ChainSpec& spec, Real tol_tq, Real tol_energy) {
  spec.validate();
  const int dim = spec.dim();
  CompletenessReport rep;
  rep.spec = spec;
  rep.tol_tq = tol_tq;
  rep.tol_energy = tol_energy;
  rep.levels.resize(dim);

  EigenSystem es = diagonalize_h(spec);
  rep.degenerate_groups = es.degenerate_groups;

  auto cache = std::make_shared<TransferCache>(spec);
  std::vector<Real> all = lambda_sample_nodes(spec.n_sites);
  for (Real u : lambda_heldout_nodes()) all.push_back(u);
  for (Real u : q_collocation_nodes(spec.n_sites)) all.push_back(u);
  for (Real u : q_heldout_nodes(spec.n_sites)) all.push_back(u);
  cache->ensure(all);

#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < dim; ++k) {
    LevelRecord& lr = rep.levels[k];
    lr.index = k;
    lr.energy_direct = es.energies[k];
    try {
      LambdaFunction lf = lambda_for_state(spec, es, k, cache);
      lr.lambda_fit_residual = lf.fit_residual;
      lr.lambda_coefficients = lf.lam.coeffs;
      BetheSolution bs = solve_q(lf, spec, tol_tq);
      lr.energy_bethe = static_cast<double>(bs.energy);
      lr.tq_residual = bs.tq_residual;
      lr.roots = bs.roots;
      lr.q_poly = bs.q_poly;
      lr.solved = bs.solved &&
                  std::abs(Real(lr.energy_bethe) - Real(lr.energy_direct)) <= tol_energy;
      if (!lr.solved) lr.failure = bs.solved ? "energy mismatch" : bs.failure;
    } catch (const std::exception& e) {
      lr.solved = false;
      lr.failure = e.what();
    }
  }

  rep.max_energy_mismatch = 0;
  rep.max_residual = 0;
  rep.all_solved = true;
  for (const LevelRecord& lr : rep.levels) {
    rep.max_energy_mismatch = std::max(
        rep.max_energy_mismatch, std::abs(Real(lr.energy_bethe) - Real(lr.energy_direct)));
    rep.max_residual = std::max(rep.max_residual, lr.tq_residual);
    rep.all_solved = rep.all_solved && lr.solved;
  }
  return rep;
}

}  // namespace tqx
