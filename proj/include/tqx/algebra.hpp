#pragma once

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tqx/common.hpp"

namespace tqx {

using MatR = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using VecR = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
using MatC = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
using VecC = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

// Complex univariate polynomial, coeffs[k] multiplies u^k.
struct Polynomial {
  std::vector<Complex> coeffs;

  Polynomial() = default;
  explicit Polynomial(std::vector<Complex> c) : coeffs(std::move(c)) { trim(); }
  static Polynomial constant(Complex c) { return Polynomial({c}); }
  static Polynomial from_roots(std::span<const Complex> roots, Complex lead = Complex(1));

  bool is_zero() const { return coeffs.empty(); }
  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  void trim();

  Complex eval(Complex u) const;
  Polynomial shifted(Real delta) const;  // p(u + delta)
  Polynomial derivative() const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial scaled(Complex s) const;
};

// Polynomial in x = u(u+1); crossing symmetry u -> -u-1 is automatic.
struct XBasisPolynomial {
  std::vector<Complex> xcoeffs;

  bool is_zero() const { return xcoeffs.empty(); }
  int xdegree() const { return static_cast<int>(xcoeffs.size()) - 1; }
  Complex eval_x(Complex x) const;
  Complex eval_u(Complex u) const { return eval_x(u * (u + Real(1))); }
  Polynomial to_u() const;
};

Polynomial x_to_u(const XBasisPolynomial& p);
// Best x-basis representative of an (even-degree) u-polynomial, plus the
// crossing-symmetry defect max |p(u) - p(-u-1)| / scale over probe nodes.
std::pair<XBasisPolynomial, Real> u_to_x(const Polynomial& p);

struct FitResult {
  Polynomial poly;
  Real residual = 0;  // max relative equation mismatch over the samples
};

// Row-equilibrated least squares fit of the given degree.
FitResult poly_fit(std::span<const std::pair<Complex, Complex>> samples, int degree);

// All roots with multiplicity: Aberth iteration, companion-matrix fallback.
std::vector<Complex> poly_roots(const Polynomial& p);

// Least squares min ||A c - b|| in long double with column equilibration
// (callers equilibrate rows). Thin wrapper over Householder QR.
VecR lsq_solve(const MatR& A, const VecR& b);

// Dense complex linear solve (Newton steps); partial-pivot LU.
VecC solve_dense(const MatC& A, const VecC& b);

}  // namespace tqx
