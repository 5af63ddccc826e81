#pragma once

#include <compare>
#include <map>
#include <span>
#include <variant>
#include <vector>

#include "tqx/algebra.hpp"
#include "tqx/common.hpp"
#include "tqx/lattice.hpp"

namespace tqx {

// Noncommutative shift-operator algebra over the symbols A, B, C and the
// half-unit shift operator D, with the commutation rule  D f = f^{[-1]} D.
// A^{[n]} denotes the function evaluated at u + n/2.

enum class SymbolKind { A, B, C };

struct ShiftedSymbol {
  SymbolKind kind;
  int shift;  // argument offset in half-units: f^{[n]}(u) = f(u + n/2)

  friend bool operator==(const ShiftedSymbol&, const ShiftedSymbol&) = default;
  friend auto operator<=>(const ShiftedSymbol& a, const ShiftedSymbol& b) {
    if (auto c = static_cast<int>(a.kind) <=> static_cast<int>(b.kind); c != 0)
      return c;
    return a.shift <=> b.shift;
  }
};

struct Monomial {
  long long coeff = 1;
  std::vector<ShiftedSymbol> factors;  // kept canonically sorted
  int d_power = 0;                     // trailing power of D after normal ordering

  void canonicalize();
  bool same_shape(const Monomial& other) const;
  Monomial times(const Monomial& other) const;
  Monomial shifted(int n) const;  // add n to every factor shift
};

// Sorts, merges equal shapes, and drops zero coefficients.
std::vector<Monomial> combine(std::vector<Monomial> terms);
std::vector<Monomial> expr_product(const std::vector<Monomial>& lhs,
                                   const std::vector<Monomial>& rhs);

// A word in the algebra: integers are powers of D, symbols carry their shift.
using RawFactor = std::variant<int, ShiftedSymbol>;
Monomial normal_order(std::span<const RawFactor> raw);

struct TExpression {
  int s = 0;
  std::vector<Monomial> monomials;  // all with d_power = 0
};

struct OperatorSeries {
  int max_grade = 0;
  std::map<int, std::vector<Monomial>> terms;  // keyed by d_power
};

// Truncated geometric expansion of W = [1 - D(A+B[+C])D + D A D^2 B D]^{-1}.
OperatorSeries w_series(int max_s, bool include_c);
// Independent expansion of the diagonal form (1 - D B D)^{-1} (1 - D A D)^{-1}.
OperatorSeries w_diag_series(int max_s);

// T_{1,s} for s = 0..max_s: the grade-2s part of W with every shift raised by s.
std::vector<TExpression> expand_w(int max_s, bool include_c);

// T_{2,s}: the single product monomial over A^{[2k+1]} B^{[-2k-1]},
// k = -(s-1)/2 .. (s-1)/2 in integer steps.
TExpression t2s_expression(int s);

long long term_count(int s, bool include_c);

TExpression shift_expression(const TExpression& expr, int n);

Complex eval_expression(const TExpression& expr, const Polynomial& q,
                        const ChainSpec& spec, Complex u);

struct HirotaResidual {
  Complex r14;  // T1s+ T1s- - T2s - T1,s+1 T1,s-1
  Complex r15;  // T2s+ T2s- - T2,s+1 T2,s-1
  Real scale14 = 0;
  Real scale15 = 0;
};

HirotaResidual hirota_residual(int s, const Polynomial& q, const ChainSpec& spec,
                               Complex u);

// True iff expand_w(s, include_c=false) matches the independently expanded
// diagonal generating functional for every s <= max_s. Passing
// compare_inhomogeneous=true compares the C-bearing expansion instead
// (expected to disagree for s >= 1).
bool reduction_check_diag(int max_s, bool compare_inhomogeneous = false);

// Monic random polynomial with conjugate-paired roots in [-2,2] x [-1,1]i.
Polynomial random_q(Rng& rng, int degree);

// True when every half-shifted argument u + m/2 (|m| <= max_halfshift) is
// clear of the u = -1/2 coefficient pole and of zeros of q.
bool safe_point(Complex u, int max_halfshift, const Polynomial& q,
                const ChainSpec& spec);

}  // namespace tqx
