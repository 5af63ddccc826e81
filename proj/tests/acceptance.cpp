// Acceptance gate: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Tolerances and runtime budgets are pinned here on purpose;
// loosening them is a product decision, not a test fix.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tqx/fusion.hpp"
#include "tqx/lattice.hpp"
#include "tqx/records.hpp"
#include "tqx/spectrum.hpp"
#include "tqx/tq.hpp"

using namespace tqx;

namespace {

const Real kSqrt3 = std::sqrt(Real(3));

ChainSpec benchmark_spec(int n) {
  ChainSpec spec;
  spec.n_sites = n;
  spec.params = BoundaryParams::with_alpha(0.25L, 0.5L, -kSqrt3, 2.0L);
  return spec;
}

struct GoldenRow {
  double energy;
  std::vector<Complex> roots;
};

// N = 3 benchmark: eight levels, energies ascending.
const std::vector<GoldenRow>& table1() {
  static const std::vector<GoldenRow> t = {
      {-10.4854, {Complex(-0.301706L), Complex(-0.228269L), Complex(1.90659L)}},
      {-6.3650,
       {Complex(-0.202149L), Complex(0.0000179L, 0.0760986L),
        Complex(0.0000179L, -0.0760986L)}},
      {-1.6983, {Complex(-0.5L, -1.36473L), Complex(-0.234301L), Complex(1.80106L)}},
      {-0.5138, {Complex(-0.5L, -1.35297L), Complex(-0.278630L), Complex(1.79670L)}},
      {0.8170, {Complex(-0.244206L), Complex(0.829712L), Complex(1.99163L)}},
      {1.2142, {Complex(-0.257109L), Complex(0.816209L), Complex(1.99041L)}},
      {7.2463,
       {Complex(1.79880L), Complex(-0.064122L, 0.726059L),
        Complex(-0.064122L, -0.726059L)}},
      {9.78493,
       {Complex(-0.5L, 2.64170L), Complex(1.75921L, 1.91745L),
        Complex(1.75921L, -1.91745L)}},
  };
  return t;
}

// N = 4 benchmark: sixteen levels, energies ascending.
const std::vector<GoldenRow>& table2() {
  static const std::vector<GoldenRow> t = {
      {-11.7918,
       {Complex(-0.5L, 0.929239L), Complex(-0.267373L), Complex(-0.239061L),
        Complex(2.63465L)}},
      {-9.54275,
       {Complex(-0.260299L), Complex(-0.242542L), Complex(1.59304L), Complex(2.39063L)}},
      {-7.52344,
       {Complex(-0.2479L, 0.0109844L), Complex(-0.2479L, -0.0109844L),
        Complex(0.498355L), Complex(2.56045L)}},
      {-5.21618,
       {Complex(-0.288548L), Complex(-0.233564L), Complex(0.383076L, 0.239546L),
        Complex(0.383076L, -0.239546L)}},
      {-3.62486,
       {Complex(-0.5L, 0.427847L), Complex(-0.243628L), Complex(1.37433L),
        Complex(2.46576L)}},
      {-3.21479,
       {Complex(-0.5L, 0.426563L), Complex(-0.25838L), Complex(1.36582L),
        Complex(2.46791L)}},
      {-0.211513,
       {Complex(-0.243935L), Complex(0.455242L, 1.65563L), Complex(0.455242L, -1.65563L),
        Complex(2.60442L)}},
      {0.182165,
       {Complex(-0.257897L), Complex(0.455108L, 1.65296L), Complex(0.455108L, -1.65296L),
        Complex(2.60409L)}},
      {1.02751,
       {Complex(-0.5L, 1.49328L), Complex(-0.247673L), Complex(0.810822L),
        Complex(2.66003L)}},
      {1.17576,
       {Complex(-0.5L, 1.48929L), Complex(-0.252564L), Complex(0.805474L),
        Complex(2.65973L)}},
      {2.29919,
       {Complex(-0.249424L), Complex(0.754748L), Complex(2.26241L, 0.572603L),
        Complex(2.26241L, -0.572603L)}},
      {2.33595,
       {Complex(-0.250589L), Complex(0.753578L), Complex(2.26201L, 0.571944L),
        Complex(2.26201L, -0.571944L)}},
      {5.66788,
       {Complex(-0.5L, 0.392135L), Complex(0.451997L, 1.56424L),
        Complex(0.451997L, -1.56424L), Complex(2.59575L)}},
      {8.13696,
       {Complex(0.000191345L, 0.337831L), Complex(0.000191345L, -0.337831L),
        Complex(1.62674L), Complex(2.36175L)}},
      {9.45442,
       {Complex(-0.5L, 1.00956L), Complex(0.694733L, 1.28851L),
        Complex(0.694733L, -1.28851L), Complex(2.49691L)}},
      {10.8455,
       {Complex(0.613599L, 3.18391L), Complex(0.613599L, -3.18391L),
        Complex(2.74696L, 2.01537L), Complex(2.74696L, -2.01537L)}},
  };
  return t;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Complex canon(Complex lambda) { return canonical_root(lambda * (lambda + Real(1))); }

// Greedy multiset match after mapping both sides to canonical representatives.
// Returns the largest matched distance, or a negative value on failure.
Real match_roots(std::span<const Complex> got, std::span<const Complex> want, Real tol) {
  if (got.size() != want.size()) return Real(-1);
  std::vector<bool> used(got.size(), false);
  Real worst = 0;
  for (const Complex& w : want) {
    Complex cw = canon(w);
    Real best = Real(1e30L);
    size_t pick = got.size();
    for (size_t i = 0; i < got.size(); ++i) {
      if (used[i]) continue;
      Real d = std::abs(canon(got[i]) - cw);
      if (d < best) {
        best = d;
        pick = i;
      }
    }
    if (pick == got.size() || best > tol) return Real(-1);
    used[pick] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

struct CriterionResult {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

CriterionResult check_table(const ChainSpec& spec, const std::vector<GoldenRow>& golden,
                            double budget_s) {
  const auto t0 = std::chrono::steady_clock::now();
  CompletenessReport rep = completeness_scan(spec);
  const double elapsed = seconds_since(t0);

  CriterionResult r;
  if (rep.levels.size() != golden.size()) {
    r.detail = "level count " + std::to_string(rep.levels.size()) + " != " +
               std::to_string(golden.size());
    return r;
  }
  double max_de = 0;
  double max_droot = 0;
  for (size_t k = 0; k < golden.size(); ++k) {
    const LevelRecord& lv = rep.levels[k];
    if (!lv.solved) {
      r.detail = "level " + std::to_string(k) + " unsolved: " + lv.failure;
      return r;
    }
    const double de = std::abs(lv.energy_direct - golden[k].energy);
    max_de = std::max(max_de, de);
    if (de > 5e-4) {
      r.detail = "level " + std::to_string(k) + " energy off by " + fmt(de);
      return r;
    }
    const Real dr = match_roots(lv.roots, golden[k].roots, Real(1e-4L));
    if (dr < 0) {
      r.detail = "level " + std::to_string(k) + " root multiset mismatch";
      return r;
    }
    max_droot = std::max(max_droot, static_cast<double>(dr));
  }
  r.pass = elapsed < budget_s;
  r.detail = std::to_string(golden.size()) + "/" + std::to_string(golden.size()) +
             " levels, max |dE| " + fmt(max_de) + " <= 5e-4, max root dev " +
             fmt(max_droot) + " <= 1e-4, " + fmt(elapsed) + " s" +
             (r.pass ? " < " : " >= ") + fmt(budget_s) + " s";
  return r;
}

CriterionResult check_completeness_sweep() {
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  double worst_res = 0;
  double worst_de = 0;
  int states = 0;
  for (long long seed : {101LL, 202LL, 303LL}) {
    for (int n = 2; n <= 8; ++n) {
      Rng rng(static_cast<unsigned long long>(seed) * 1000 + n);
      const Real p = Real(rng.uniform(0.2, 2.0));
      const Real q = Real(rng.uniform(0.2, 2.0));
      const Real xi = Real(rng.uniform(0.5, 2.0)) * Real(rng.sign());
      ChainSpec spec;
      spec.n_sites = n;
      spec.params = BoundaryParams::make(p, q, xi);
      CompletenessReport rep = completeness_scan(spec, Real(1e-8L), Real(1e-6L));
      states += static_cast<int>(rep.levels.size());
      worst_res = std::max(worst_res, static_cast<double>(rep.max_residual));
      worst_de = std::max(worst_de, static_cast<double>(rep.max_energy_mismatch));
      if (!rep.all_solved) {
        for (const LevelRecord& lv : rep.levels)
          if (!lv.solved) {
            r.detail = "seed " + std::to_string(seed) + ", N=" + std::to_string(n) +
                       ", level " + std::to_string(lv.index) + ": " + lv.failure;
            return r;
          }
      }
    }
  }
  const double elapsed = seconds_since(t0);
  r.pass = elapsed < 120.0;
  r.detail = std::to_string(states) +
             " states across N=2..8 x 3 seeds, max residual " + fmt(worst_res) +
             " <= 1e-8, max |E_bethe - E_direct| " + fmt(worst_de) + " <= 1e-6, " +
             fmt(elapsed) + " s" + (r.pass ? " < 120 s" : " >= 120 s");
  return r;
}

CriterionResult check_structure() {
  CriterionResult r;
  double worst_comm = 0;
  double worst_ruy = 0;
  double worst_lead = 0;
  double worst_cross = 0;
  Rng rng(7);
  for (int n = 2; n <= 6; ++n) {
    ChainSpec spec;
    spec.n_sites = n;
    spec.params = BoundaryParams::make(Real(rng.uniform(0.2, 2.0)),
                                       Real(rng.uniform(0.2, 2.0)),
                                       Real(rng.uniform(0.5, 2.0)) * Real(rng.sign()));
    const MatR h = hamiltonian(spec);
    const Real hn = h.norm();
    for (int j = 0; j < 5; ++j) {
      const Complex u(Real(rng.uniform(0.1, 2.0)), Real(rng.uniform(-0.5, 0.5)));
      const Complex v(Real(rng.uniform(0.1, 2.0)), Real(rng.uniform(-0.5, 0.5)));
      const MatC tu = transfer_matrix(u, spec);
      const MatC tv = transfer_matrix(v, spec);
      const double ctt =
          static_cast<double>((tu * tv - tv * tu).norm() / (tu.norm() * tv.norm()));
      const MatC hc = h.cast<Complex>();
      const double cht =
          static_cast<double>((hc * tu - tu * hc).norm() / (hn * tu.norm()));
      worst_comm = std::max({worst_comm, ctt, cht});
      if (ctt > 1e-9 || cht > 1e-9) {
        r.detail = "commutator residual " + fmt(std::max(ctt, cht)) + " at N=" +
                   std::to_string(n);
        return r;
      }
      const double yb = static_cast<double>(yang_baxter_residual(u, v));
      const double ru = static_cast<double>(r_unitarity_residual(u));
      worst_ruy = std::max({worst_ruy, yb, ru});
      if (yb > 1e-12 || ru > 1e-12) {
        r.detail = "R-matrix residual " + fmt(std::max(yb, ru));
        return r;
      }
    }
    EigenSystem es = diagonalize_h(spec);
    auto cache = std::make_shared<TransferCache>(spec);
    for (int k = 0; k < spec.dim(); ++k) {
      Polynomial free_fit = lambda_fit_ubasis(spec, es, k, cache);
      if (free_fit.degree() != 2 * n + 2) {
        r.detail = "Lambda degree " + std::to_string(free_fit.degree()) + " != " +
                   std::to_string(2 * n + 2) + " (N=" + std::to_string(n) + ", state " +
                   std::to_string(k) + ")";
        return r;
      }
      const double lead = static_cast<double>(std::abs(free_fit.coeffs.back() - Real(2)));
      worst_lead = std::max(worst_lead, lead);
      if (lead > 1e-6) {
        r.detail = "Lambda leading coefficient off by " + fmt(lead) + " (N=" +
                   std::to_string(n) + ", state " + std::to_string(k) + ")";
        return r;
      }
      const double cross = static_cast<double>(u_to_x(free_fit).second);
      worst_cross = std::max(worst_cross, cross);
      if (cross > 1e-8) {
        r.detail = "crossing defect " + fmt(cross) + " (N=" + std::to_string(n) +
                   ", state " + std::to_string(k) + ")";
        return r;
      }
    }
  }
  r.pass = true;
  r.detail = "N=2..6: max commutator " + fmt(worst_comm) +
             " <= 1e-9, max YB/unitarity " + fmt(worst_ruy) +
             " <= 1e-12, max |lead-2| " + fmt(worst_lead) +
             " <= 1e-6, max crossing defect " + fmt(worst_cross) + " <= 1e-8";
  return r;
}

CriterionResult check_general_tq_reduction() {
  CriterionResult r;
  const Polynomial one = Polynomial::constant(Complex(1));
  double worst_rel = 0;
  int states = 0;
  for (int n : {3, 4}) {
    ChainSpec spec = benchmark_spec(n);
    EigenSystem es = diagonalize_h(spec);
    auto cache = std::make_shared<TransferCache>(spec);
    const std::vector<Real> nodes = q_heldout_nodes(n);
    for (int k = 0; k < spec.dim(); ++k) {
      LambdaFunction lf = lambda_for_state(spec, es, k, cache);
      BetheSolution sol = solve_q(lf, spec);
      if (!sol.solved) {
        r.detail = "N=" + std::to_string(n) + " state " + std::to_string(k) +
                   " unsolved: " + sol.failure;
        return r;
      }
      const Polynomial qu = x_to_u(sol.q_poly);
      for (Real u : nodes) {
        const Real scale = cysw_scale(lf, qu, one, one, spec, Complex(u));
        const Real res = std::abs(cysw_residual(lf, qu, one, one, spec, Complex(u)));
        const double rel = static_cast<double>(res / scale);
        worst_rel = std::max(worst_rel, rel);
        if (res > Real(1e-8L) * scale) {
          r.detail = "general relation residual " + fmt(rel) + " at N=" +
                     std::to_string(n) + ", state " + std::to_string(k);
          return r;
        }
      }
      const Real e_general = cysw_energy(sol.roots, {}, {}, spec);
      const Real e_simplified = energy_from_roots(sol.roots, spec);
      if (!(e_general == e_simplified)) {
        r.detail = "M=0 general energy differs from simplified energy at N=" +
                   std::to_string(n) + ", state " + std::to_string(k);
        return r;
      }
      ++states;
    }
  }
  r.pass = true;
  r.detail = std::to_string(states) +
             " solved states (N=3,4): max relative residual " + fmt(worst_rel) +
             " <= 1e-8 at 10 nodes each; M=0 energy identical to simplified form";
  return r;
}

Monomial make_mono(std::vector<ShiftedSymbol> factors) {
  Monomial m;
  m.factors = std::move(factors);
  m.canonicalize();
  return m;
}

bool same_monomial_set(std::vector<Monomial> got, std::vector<Monomial> want) {
  got = combine(std::move(got));
  want = combine(std::move(want));
  if (got.size() != want.size()) return false;
  for (size_t i = 0; i < got.size(); ++i)
    if (got[i].coeff != want[i].coeff || !got[i].same_shape(want[i])) return false;
  return true;
}

CriterionResult check_fusion_counts() {
  CriterionResult r;
  const long long expected[] = {1, 3, 8, 21, 55};
  for (int s = 0; s <= 4; ++s) {
    if (term_count(s, true) != expected[s]) {
      r.detail = "term_count(" + std::to_string(s) + ") = " +
                 std::to_string(term_count(s, true)) + " != " +
                 std::to_string(expected[s]);
      return r;
    }
    if (term_count(s, false) != s + 1) {
      r.detail = "diagonal term_count(" + std::to_string(s) + ") != s+1";
      return r;
    }
  }

  constexpr SymbolKind A = SymbolKind::A;
  constexpr SymbolKind B = SymbolKind::B;
  constexpr SymbolKind C = SymbolKind::C;
  auto full = expand_w(2, true);
  const std::vector<Monomial> eight = {
      make_mono({ShiftedSymbol{A, 1}, ShiftedSymbol{A, -1}}),
      make_mono({ShiftedSymbol{A, -1}, ShiftedSymbol{B, 1}}),
      make_mono({ShiftedSymbol{B, 1}, ShiftedSymbol{B, -1}}),
      make_mono({ShiftedSymbol{C, 1}, ShiftedSymbol{A, -1}}),
      make_mono({ShiftedSymbol{C, 1}, ShiftedSymbol{B, -1}}),
      make_mono({ShiftedSymbol{C, -1}, ShiftedSymbol{A, 1}}),
      make_mono({ShiftedSymbol{C, -1}, ShiftedSymbol{B, 1}}),
      make_mono({ShiftedSymbol{C, 1}, ShiftedSymbol{C, -1}}),
  };
  if (!same_monomial_set(full[2].monomials, eight)) {
    r.detail = "inhomogeneous spin-1 expansion does not match the eight-term form";
    return r;
  }
  auto hom = expand_w(2, false);
  const std::vector<Monomial> three = {
      make_mono({ShiftedSymbol{A, 1}, ShiftedSymbol{A, -1}}),
      make_mono({ShiftedSymbol{A, -1}, ShiftedSymbol{B, 1}}),
      make_mono({ShiftedSymbol{B, 1}, ShiftedSymbol{B, -1}}),
  };
  if (!same_monomial_set(hom[2].monomials, three)) {
    r.detail = "homogeneous spin-1 expansion does not match the three-term form";
    return r;
  }
  r.pass = true;
  r.detail = "term counts 1,3,8,21,55 and s+1 (diagonal); spin-1 expansions match "
             "the published monomial sets";
  return r;
}

CriterionResult check_hirota() {
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  Rng rng(1234);
  double worst14 = 0;
  double worst15 = 0;
  for (bool diagonal : {false, true}) {
    ChainSpec spec;
    spec.n_sites = 2;
    const Real p = Real(rng.uniform(0.2, 2.0));
    const Real q = Real(rng.uniform(0.2, 2.0));
    spec.params =
        BoundaryParams::make(p, q, diagonal ? Real(0) : Real(rng.uniform(0.5, 2.0)));
    for (int s = 1; s <= 4; ++s) {
      const int degree = 1 + static_cast<int>(rng.uniform(0, 4)) % 4;
      const Polynomial qpoly = random_q(rng, degree);
      int tested = 0;
      int guard = 0;
      while (tested < 20 && guard < 2000) {
        ++guard;
        const Complex u(Real(rng.uniform(0.1, 2.5)), Real(rng.uniform(-0.8, 0.8)));
        if (!safe_point(u, 2 * s + 4, qpoly, spec)) continue;
        const HirotaResidual hr = hirota_residual(s, qpoly, spec, u);
        const double rel14 = static_cast<double>(std::abs(hr.r14) / hr.scale14);
        const double rel15 = static_cast<double>(std::abs(hr.r15) / hr.scale15);
        worst14 = std::max(worst14, rel14);
        worst15 = std::max(worst15, rel15);
        if (rel14 >= 1e-10 || rel15 >= 1e-12) {
          r.detail = "bilinear residual " + fmt(std::max(rel14, rel15)) + " at s=" +
                     std::to_string(s) + (diagonal ? " (diagonal)" : " (generic)");
          return r;
        }
        ++tested;
      }
      if (tested < 20) {
        r.detail = "could not find 20 safe evaluation points at s=" + std::to_string(s);
        return r;
      }
    }
  }
  const double elapsed = seconds_since(t0);
  r.pass = elapsed < 30.0;
  r.detail = "s=1..4, 20 points each, generic and diagonal: max first-row residual " +
             fmt(worst14) + " < 1e-10, max second-row residual " + fmt(worst15) +
             " < 1e-12, " + fmt(elapsed) + " s" + (r.pass ? " < 30 s" : " >= 30 s");
  return r;
}

CriterionResult check_reduction() {
  CriterionResult r;
  if (!reduction_check_diag(4)) {
    r.detail = "diagonal reduction failed for s <= 4";
    return r;
  }
  if (reduction_check_diag(4, true)) {
    r.detail = "negative control failed: C-bearing expansion matched the diagonal one";
    return r;
  }
  r.pass = true;
  r.detail = "C=0 expansion equals the diagonal functional for s <= 4 "
             "(and differs once the inhomogeneous term is kept)";
  return r;
}

}  // namespace

int main() {
  using Check = std::function<CriterionResult()>;
  struct Criterion {
    const char* name;
    Check run;
  };
  const std::vector<Criterion> criteria = {
      {"table 1 reproduction (N=3)",
       [] { return check_table(benchmark_spec(3), table1(), 5.0); }},
      {"table 2 reproduction (N=4)",
       [] { return check_table(benchmark_spec(4), table2(), 10.0); }},
      {"completeness sweep N=2..8", check_completeness_sweep},
      {"structural invariants", check_structure},
      {"general T-Q reduction at M=0", check_general_tq_reduction},
      {"fusion term counts and expansions", check_fusion_counts},
      {"Hirota bilinear identities", check_hirota},
      {"diagonal reduction identity", check_reduction},
  };

  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    CriterionResult res;
    try {
      res = criteria[i].run();
    } catch (const std::exception& e) {
      res.pass = false;
      res.detail = std::string("exception: ") + e.what();
    }
    if (!res.pass) ++failures;
    std::printf("criterion %zu (%s): %s — %s\n", i + 1, criteria[i].name,
                res.pass ? "PASS" : "FAIL", res.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("acceptance: %zu/%zu criteria passed\n", criteria.size() - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
