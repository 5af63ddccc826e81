#include "tqx/algebra.hpp"

#include <algorithm>
#include <cmath>

namespace tqx {

namespace {

Real coeff_scale(const std::vector<Complex>& c) {
  Real m = 0;
  for (const auto& v : c) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

void Polynomial::trim() {
  while (!coeffs.empty() && coeffs.back() == Complex(0)) coeffs.pop_back();
}

Polynomial Polynomial::from_roots(std::span<const Complex> roots, Complex lead) {
  std::vector<Complex> c{lead};
  for (const Complex& r : roots) {
    c.push_back(Complex(0));
    for (int k = static_cast<int>(c.size()) - 1; k > 0; --k)
      c[k] = c[k - 1] - r * c[k];
    c[0] *= -r;
  }
  Polynomial p;
  p.coeffs = std::move(c);
  p.trim();
  return p;
}

Complex Polynomial::eval(Complex u) const {
  Complex acc(0);
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * u + *it;
  return acc;
}

Polynomial Polynomial::shifted(Real delta) const {
  // p(u + delta) by repeated synthetic division (exact binomial re-expansion).
  std::vector<Complex> c = coeffs;
  const int n = static_cast<int>(c.size());
  for (int i = 0; i < n; ++i)
    for (int k = n - 2; k >= i; --k) c[k] += delta * c[k + 1];
  Polynomial p;
  p.coeffs = std::move(c);
  p.trim();
  return p;
}

Polynomial Polynomial::derivative() const {
  std::vector<Complex> c;
  for (size_t k = 1; k < coeffs.size(); ++k) c.push_back(Real(k) * coeffs[k]);
  Polynomial p;
  p.coeffs = std::move(c);
  p.trim();
  return p;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  if (is_zero() || o.is_zero()) return {};
  std::vector<Complex> c(coeffs.size() + o.coeffs.size() - 1, Complex(0));
  for (size_t i = 0; i < coeffs.size(); ++i)
    for (size_t j = 0; j < o.coeffs.size(); ++j) c[i + j] += coeffs[i] * o.coeffs[j];
  Polynomial p;
  p.coeffs = std::move(c);
  p.trim();
  return p;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  std::vector<Complex> c(std::max(coeffs.size(), o.coeffs.size()), Complex(0));
  for (size_t i = 0; i < coeffs.size(); ++i) c[i] += coeffs[i];
  for (size_t i = 0; i < o.coeffs.size(); ++i) c[i] += o.coeffs[i];
  Polynomial p;
  p.coeffs = std::move(c);
  p.trim();
  return p;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  return *this + o.scaled(Complex(-1));
}

Polynomial Polynomial::scaled(Complex s) const {
  Polynomial p = *this;
  for (auto& c : p.coeffs) c *= s;
  p.trim();
  return p;
}

Complex XBasisPolynomial::eval_x(Complex x) const {
  Complex acc(0);
  for (auto it = xcoeffs.rbegin(); it != xcoeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Polynomial XBasisPolynomial::to_u() const { return x_to_u(*this); }

Polynomial x_to_u(const XBasisPolynomial& p) {
  Polynomial result;
  Polynomial xpow = Polynomial::constant(Complex(1));
  Polynomial x({Complex(0), Complex(1), Complex(1)});  // u + u^2
  for (const Complex& c : p.xcoeffs) {
    result = result + xpow.scaled(c);
    xpow = xpow * x;
  }
  return result;
}

std::pair<XBasisPolynomial, Real> u_to_x(const Polynomial& p) {
  if (!p.is_zero() && p.degree() % 2 != 0)
    throw UsageError("u_to_x: odd-degree polynomial is never crossing symmetric");
  XBasisPolynomial q;
  if (p.is_zero()) return {q, Real(0)};

  // Peel leading x-coefficients: the u-coefficient of u^{2m} in x^m is 1.
  const int nx = p.degree() / 2;
  std::vector<Complex> rem = p.coeffs;
  q.xcoeffs.assign(nx + 1, Complex(0));
  for (int m = nx; m >= 0; --m) {
    Complex c = rem[2 * m];
    q.xcoeffs[m] = c;
    // subtract c * x^m from rem
    Polynomial xm = x_to_u(XBasisPolynomial{[&] {
      std::vector<Complex> v(m + 1, Complex(0));
      v[m] = Complex(1);
      return v;
    }()});
    for (size_t k = 0; k < xm.coeffs.size(); ++k) rem[k] -= c * xm.coeffs[k];
  }

  // Crossing-symmetry defect measured on probe nodes, relative to coeff scale.
  Real scale = std::max(Real(1), coeff_scale(p.coeffs));
  Real defect = 0;
  for (int i = 0; i < 8; ++i) {
    Complex u(Real(0.17) + Real(0.41) * i, Real(0.09) * i);
    defect = std::max(defect, std::abs(p.eval(u) - p.eval(-u - Real(1))) / scale);
  }
  return {q, defect};
}

VecR lsq_solve(const MatR& A, const VecR& b) {
  VecR colsc(A.cols());
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    Real m = A.col(j).cwiseAbs().maxCoeff();
    colsc(j) = (m == Real(0)) ? Real(1) : m;
  }
  MatR As = A.array().rowwise() / colsc.transpose().array();
  VecR c = As.colPivHouseholderQr().solve(b);
  return c.array() / colsc.array();
}

VecC solve_dense(const MatC& A, const VecC& b) {
  return A.partialPivLu().solve(b);
}

FitResult poly_fit(std::span<const std::pair<Complex, Complex>> samples, int degree) {
  const int m = static_cast<int>(samples.size());
  const int n = degree + 1;
  if (m < n) throw UsageError("poly_fit: fewer samples than coefficients");
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (samples[i].first == samples[j].first)
        throw UsageError("poly_fit: coincident sample nodes");

  // Complex LSQ as a real system of twice the rows; per-row max equilibration.
  MatR A(2 * m, 2 * n);
  VecR b(2 * m);
  for (int i = 0; i < m; ++i) {
    Complex up(1);
    std::vector<Complex> row(n);
    for (int j = 0; j < n; ++j) {
      row[j] = up;
      up *= samples[i].first;
    }
    Real rs = std::abs(samples[i].second);
    for (int j = 0; j < n; ++j) rs = std::max(rs, std::abs(row[j]));
    if (rs == Real(0)) rs = 1;
    for (int j = 0; j < n; ++j) {
      // (re + i im)(cr + i ci): real part re*cr - im*ci, imag re*ci + im*cr
      A(2 * i, 2 * j) = row[j].real() / rs;
      A(2 * i, 2 * j + 1) = -row[j].imag() / rs;
      A(2 * i + 1, 2 * j) = row[j].imag() / rs;
      A(2 * i + 1, 2 * j + 1) = row[j].real() / rs;
    }
    b(2 * i) = samples[i].second.real() / rs;
    b(2 * i + 1) = samples[i].second.imag() / rs;
  }
  VecR c = lsq_solve(A, b);

  Polynomial p;
  p.coeffs.resize(n);
  for (int j = 0; j < n; ++j) p.coeffs[j] = Complex(c(2 * j), c(2 * j + 1));
  p.trim();

  Real res = 0;
  for (int i = 0; i < m; ++i) {
    Real denom = std::max(Real(1), std::abs(samples[i].second));
    res = std::max(res, std::abs(p.eval(samples[i].first) - samples[i].second) / denom);
  }
  return {std::move(p), res};
}

namespace {

// One Aberth-Ehrlich sweep; returns max scaled correction.
Real aberth_sweep(const Polynomial& p, const Polynomial& dp, std::vector<Complex>& z) {
  const int n = static_cast<int>(z.size());
  Real worst = 0;
  for (int i = 0; i < n; ++i) {
    Complex pv = p.eval(z[i]);
    Complex dv = dp.eval(z[i]);
    if (pv == Complex(0)) continue;
    Complex newton = (dv == Complex(0)) ? Complex(0) : pv / dv;
    Complex sum(0);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      Complex d = z[i] - z[j];
      if (std::abs(d) < Real(1e-30)) d = Complex(Real(1e-30));
      sum += Complex(1) / d;
    }
    Complex denom = Complex(1) - newton * sum;
    Complex step = (std::abs(denom) < Real(1e-30)) ? newton : newton / denom;
    z[i] -= step;
    worst = std::max(worst, std::abs(step) / std::max(Real(1), std::abs(z[i])));
  }
  return worst;
}

bool roots_converged(const Polynomial& p, const std::vector<Complex>& z) {
  const Real cs = coeff_scale(p.coeffs);
  for (const Complex& r : z) {
    Real bound = cs * std::pow(std::max(Real(1), std::abs(r)), Real(p.degree()));
    if (std::abs(p.eval(r)) > kRootTol * bound) return false;
  }
  return true;
}

std::vector<Complex> companion_roots(const Polynomial& p) {
  const int n = p.degree();
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
  std::complex<double> lead(static_cast<double>(p.coeffs[n].real()),
                            static_cast<double>(p.coeffs[n].imag()));
  for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) {
    std::complex<double> ci(static_cast<double>(p.coeffs[i].real()),
                            static_cast<double>(p.coeffs[i].imag()));
    C(i, n - 1) = -ci / lead;
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
  std::vector<Complex> z(n);
  for (int i = 0; i < n; ++i)
    z[i] = Complex(Real(es.eigenvalues()(i).real()), Real(es.eigenvalues()(i).imag()));
  // A few Newton steps in extended precision to polish the double eigenvalues.
  Polynomial dp = p.derivative();
  for (auto& r : z)
    for (int it = 0; it < 6; ++it) {
      Complex dv = dp.eval(r);
      if (std::abs(dv) < Real(1e-30)) break;
      r -= p.eval(r) / dv;
    }
  return z;
}

}  // namespace

std::vector<Complex> poly_roots(const Polynomial& p) {
  if (p.is_zero()) throw UsageError("poly_roots: zero polynomial");
  const int n = p.degree();
  if (n == 0) return {};
  if (n == 1) return {-p.coeffs[0] / p.coeffs[1]};

  // Cauchy bound initial ring, slightly de-symmetrized.
  Real bound = 0;
  for (int i = 0; i < n; ++i) bound = std::max(bound, std::abs(p.coeffs[i] / p.coeffs[n]));
  Real radius = Real(0.6) * (Real(1) + bound);
  std::vector<Complex> z(n);
  for (int i = 0; i < n; ++i) {
    Real th = Real(2) * Real(M_PI) * (Real(i) + Real(0.35)) / Real(n) + Real(0.4);
    z[i] = radius * Complex(std::cos(th), std::sin(th));
  }

  Polynomial dp = p.derivative();
  bool ok = false;
  for (int it = 0; it < 200; ++it) {
    Real step = aberth_sweep(p, dp, z);
    if (step < Real(1e-18)) {
      ok = true;
      break;
    }
  }
  if (!ok || !roots_converged(p, z)) z = companion_roots(p);

  // Cluster near-coincident roots (reported as repeated roots).
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(z[i] - z[j]) < Real(1e-6)) {
        Complex mid = (z[i] + z[j]) / Real(2);
        z[i] = z[j] = mid;
      }
  std::sort(z.begin(), z.end(), [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return z;
}

}  // namespace tqx
