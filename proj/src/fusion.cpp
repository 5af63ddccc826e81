#include "tqx/fusion.hpp"

#include <algorithm>
#include <cmath>

#include "tqx/tq.hpp"

namespace tqx {

void Monomial::canonicalize() { std::sort(factors.begin(), factors.end()); }

bool Monomial::same_shape(const Monomial& other) const {
  return d_power == other.d_power && factors == other.factors;
}

Monomial Monomial::times(const Monomial& other) const {
  Monomial r;
  r.coeff = coeff * other.coeff;
  r.factors = factors;
  for (ShiftedSymbol s : other.factors) {
    s.shift -= d_power;  // D^d f = f^{[-d]} D^d
    r.factors.push_back(s);
  }
  r.d_power = d_power + other.d_power;
  r.canonicalize();
  return r;
}

Monomial Monomial::shifted(int n) const {
  Monomial r = *this;
  for (ShiftedSymbol& s : r.factors) s.shift += n;
  return r;
}

std::vector<Monomial> combine(std::vector<Monomial> terms) {
  for (Monomial& m : terms) m.canonicalize();
  std::sort(terms.begin(), terms.end(), [](const Monomial& a, const Monomial& b) {
    if (a.d_power != b.d_power) return a.d_power < b.d_power;
    return a.factors < b.factors;
  });
  std::vector<Monomial> out;
  for (const Monomial& m : terms) {
    if (!out.empty() && out.back().same_shape(m))
      out.back().coeff += m.coeff;
    else
      out.push_back(m);
  }
  std::erase_if(out, [](const Monomial& m) { return m.coeff == 0; });
  return out;
}

std::vector<Monomial> expr_product(const std::vector<Monomial>& lhs,
                                   const std::vector<Monomial>& rhs) {
  std::vector<Monomial> out;
  for (const Monomial& a : lhs)
    for (const Monomial& b : rhs) out.push_back(a.times(b));
  return combine(std::move(out));
}

Monomial normal_order(std::span<const RawFactor> raw) {
  Monomial m;
  int d = 0;
  for (const RawFactor& f : raw) {
    if (std::holds_alternative<int>(f)) {
      d += std::get<int>(f);
    } else {
      ShiftedSymbol s = std::get<ShiftedSymbol>(f);
      s.shift -= d;  // pass the accumulated D's through from the left
      m.factors.push_back(s);
    }
  }
  m.d_power = d;
  m.canonicalize();
  return m;
}

namespace {

std::vector<Monomial> geometric_series(const std::vector<Monomial>& x, int max_grade) {
  std::vector<Monomial> all{Monomial{1, {}, 0}};
  std::vector<Monomial> cur = all;
  while (!cur.empty()) {
    std::vector<Monomial> next;
    for (const Monomial& m : cur)
      for (const Monomial& f : x) {
        Monomial p = m.times(f);
        if (p.d_power <= max_grade) next.push_back(p);
      }
    cur = combine(std::move(next));
    all.insert(all.end(), cur.begin(), cur.end());
  }
  return all;
}

OperatorSeries bucket_by_grade(std::vector<Monomial> monos, int max_grade) {
  OperatorSeries w;
  w.max_grade = max_grade;
  for (Monomial& m : monos) w.terms[m.d_power].push_back(std::move(m));
  for (auto& [g, lst] : w.terms) lst = combine(std::move(lst));
  std::erase_if(w.terms, [](const auto& kv) { return kv.second.empty(); });
  return w;
}

}  // namespace

OperatorSeries w_series(int max_s, bool include_c) {
  const int max_grade = 2 * max_s;
  std::vector<Monomial> x{
      Monomial{1, {{SymbolKind::A, -1}}, 2},
      Monomial{1, {{SymbolKind::B, -1}}, 2},
  };
  if (include_c) x.push_back(Monomial{1, {{SymbolKind::C, -1}}, 2});
  x.push_back(Monomial{-1, {{SymbolKind::A, -1}, {SymbolKind::B, -3}}, 4});
  return bucket_by_grade(geometric_series(x, max_grade), max_grade);
}

OperatorSeries w_diag_series(int max_s) {
  const int max_grade = 2 * max_s;
  std::vector<Monomial> xb{Monomial{1, {{SymbolKind::B, -1}}, 2}};
  std::vector<Monomial> xa{Monomial{1, {{SymbolKind::A, -1}}, 2}};
  std::vector<Monomial> left = geometric_series(xb, max_grade);
  std::vector<Monomial> right = geometric_series(xa, max_grade);
  std::vector<Monomial> prod;
  for (const Monomial& b : left)
    for (const Monomial& a : right) {
      Monomial p = b.times(a);
      if (p.d_power <= max_grade) prod.push_back(p);
    }
  return bucket_by_grade(combine(std::move(prod)), max_grade);
}

std::vector<TExpression> expand_w(int max_s, bool include_c) {
  if (max_s < 0) throw UsageError("expand_w: max_s must be nonnegative");
  OperatorSeries w = w_series(max_s, include_c);
  std::vector<TExpression> tower(max_s + 1);
  for (int s = 0; s <= max_s; ++s) {
    tower[s].s = s;
    auto it = w.terms.find(2 * s);
    if (it == w.terms.end()) continue;
    for (const Monomial& m : it->second) {
      Monomial t = m.shifted(s);  // sandwich identity D^s g D^s = g^{[-s]} D^{2s}
      t.d_power = 0;
      tower[s].monomials.push_back(std::move(t));
    }
    tower[s].monomials = combine(std::move(tower[s].monomials));
  }
  return tower;
}

TExpression t2s_expression(int s) {
  if (s < 0) throw UsageError("t2s_expression: s must be nonnegative");
  Monomial m;
  for (int j = 0; j < s; ++j) {
    const int a_shift = 2 * j - s + 2;  // runs over 2k+1, k = -(s-1)/2 .. (s-1)/2
    m.factors.push_back({SymbolKind::A, a_shift});
    m.factors.push_back({SymbolKind::B, -a_shift});
  }
  m.canonicalize();
  TExpression t;
  t.s = s;
  t.monomials.push_back(std::move(m));
  return t;
}

long long term_count(int s, bool include_c) {
  if (s < 0) throw UsageError("term_count: s must be nonnegative");
  std::vector<TExpression> tower = expand_w(s, include_c);
  long long n = 0;
  for (const Monomial& m : tower[s].monomials) n += std::llabs(m.coeff);
  return n;
}

TExpression shift_expression(const TExpression& expr, int n) {
  TExpression out;
  out.s = expr.s;
  for (const Monomial& m : expr.monomials) out.monomials.push_back(m.shifted(n));
  return out;
}

namespace {

Complex q_checked(const Polynomial& q, Complex w, Real qscale) {
  Complex v = q.eval(w);
  if (std::abs(v) < Real(1e-6L) * qscale)
    throw NumericError("fusion evaluation too close to a zero of Q");
  return v;
}

Real q_scale(const Polynomial& q) {
  Real s = 1;
  for (const Complex& c : q.coeffs) s = std::max(s, std::abs(c));
  return s;
}

}  // namespace

Complex eval_expression(const TExpression& expr, const Polynomial& q,
                        const ChainSpec& spec, Complex u) {
  const Real qscale = q_scale(q);
  Complex total(0);
  for (const Monomial& m : expr.monomials) {
    if (m.d_power != 0)
      throw UsageError("eval_expression requires pure function monomials");
    Complex prod(static_cast<Real>(m.coeff));
    for (const ShiftedSymbol& s : m.factors) {
      const Complex w = u + Complex(Real(s.shift) / 2);
      switch (s.kind) {
        case SymbolKind::A:
          prod *= a_bar(w, spec) * q_checked(q, w - Real(1), qscale) /
                  q_checked(q, w, qscale);
          break;
        case SymbolKind::B:
          prod *= d_bar(w, spec) * q_checked(q, w + Real(1), qscale) /
                  q_checked(q, w, qscale);
          break;
        case SymbolKind::C:
          prod *= delta_term(w, spec) / q_checked(q, w, qscale);
          break;
      }
    }
    total += prod;
  }
  return total;
}

HirotaResidual hirota_residual(int s, const Polynomial& q, const ChainSpec& spec,
                               Complex u) {
  if (s < 1) throw UsageError("hirota_residual: s must be >= 1");
  std::vector<TExpression> t1 = expand_w(s + 1, true);
  auto ev = [&](const TExpression& e, int n) {
    return eval_expression(shift_expression(e, n), q, spec, u);
  };
  HirotaResidual r;
  const Complex lhs14 = ev(t1[s], 1) * ev(t1[s], -1);
  const Complex mid14 = ev(t2s_expression(s), 0);
  const Complex rhs14 = ev(t1[s + 1], 0) * ev(t1[s - 1], 0);
  r.r14 = lhs14 - mid14 - rhs14;
  r.scale14 = std::max({std::abs(lhs14), std::abs(mid14), std::abs(rhs14)});

  const Complex lhs15 = ev(t2s_expression(s), 1) * ev(t2s_expression(s), -1);
  const Complex rhs15 = ev(t2s_expression(s + 1), 0) * ev(t2s_expression(s - 1), 0);
  r.r15 = lhs15 - rhs15;
  r.scale15 = std::max(std::abs(lhs15), std::abs(rhs15));
  return r;
}

bool reduction_check_diag(int max_s, bool compare_inhomogeneous) {
  std::vector<TExpression> lhs = expand_w(max_s, compare_inhomogeneous);
  OperatorSeries diag = w_diag_series(max_s);
  for (int s = 0; s <= max_s; ++s) {
    std::vector<Monomial> rhs;
    auto it = diag.terms.find(2 * s);
    if (it != diag.terms.end()) {
      for (const Monomial& m : it->second) {
        Monomial t = m.shifted(s);
        t.d_power = 0;
        rhs.push_back(std::move(t));
      }
    }
    rhs = combine(std::move(rhs));
    const std::vector<Monomial>& l = lhs[s].monomials;
    if (l.size() != rhs.size()) return false;
    for (size_t i = 0; i < l.size(); ++i)
      if (l[i].coeff != rhs[i].coeff || !l[i].same_shape(rhs[i])) return false;
  }
  return true;
}

Polynomial random_q(Rng& rng, int degree) {
  if (degree < 0) throw UsageError("random_q: degree must be nonnegative");
  std::vector<Complex> roots;
  if (degree % 2 == 1) roots.emplace_back(rng.uniform(-2, 2), Real(0));
  while (static_cast<int>(roots.size()) < degree) {
    Complex z(rng.uniform(-2, 2), rng.uniform(Real(0.05L), 1));
    roots.push_back(z);
    roots.push_back(std::conj(z));
  }
  Polynomial q = Polynomial::from_roots(roots);
  for (Complex& c : q.coeffs) c = Complex(c.real());  // conjugate pairing => real
  return q;
}

bool safe_point(Complex u, int max_halfshift, const Polynomial& q,
                const ChainSpec& spec) {
  (void)spec;
  const Real qscale = q_scale(q);
  for (int m = -max_halfshift; m <= max_halfshift; ++m) {
    const Complex w = u + Complex(Real(m) / 2);
    if (std::abs(w + Real(0.5L)) < Real(1e-3L)) return false;
    if (std::abs(q.eval(w)) < Real(1e-3L) * qscale) return false;
  }
  return true;
}

}  // namespace tqx
