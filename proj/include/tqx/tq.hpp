#pragma once

#include "tqx/spectrum.hpp"

namespace tqx {

// Coefficient functions of the T-Q relation. The minus branch flips the
// signs of p and q; the inhomogeneous term is branch independent.
Complex a_bar(Complex u, const ChainSpec& spec);
Complex d_bar(Complex u, const ChainSpec& spec);
Complex delta_term(Complex u, const ChainSpec& spec);
Real energy_shift_c(const ChainSpec& spec);

struct BetheSolution {
  int state_index = -1;
  XBasisPolynomial q_poly;      // monic in x = u(u+1), x-degree N
  std::vector<Complex> roots;   // canonical representatives, Re >= -1/2
  Real tq_residual = 0;         // max relative mismatch on held-out nodes
  Real energy = 0;
  bool solved = false;
  std::string failure;          // set when !solved
};

struct LevelRecord {
  int index = -1;
  double energy_direct = 0;
  double energy_bethe = 0;
  Real tq_residual = 0;
  Real lambda_fit_residual = 0;
  std::vector<Complex> roots;
  std::vector<Complex> lambda_coefficients;  // u-basis, ascending
  XBasisPolynomial q_poly;
  bool solved = false;
  std::string failure;
};

struct CompletenessReport {
  ChainSpec spec;
  Real tol_tq = 0;
  Real tol_energy = 0;
  std::vector<LevelRecord> levels;
  std::vector<std::vector<int>> degenerate_groups;
  Real max_energy_mismatch = 0;
  Real max_residual = 0;
  bool all_solved = false;
};

// Collocation and held-out nodes for the linear Q solve (all clear of -1/2).
std::vector<Real> q_collocation_nodes(int n_sites);
std::vector<Real> q_heldout_nodes(int n_sites);

// Linear collocation solve of the T-Q relation for monic Q of x-degree N,
// followed by root extraction and a guarded root polish; the residual is
// evaluated on held-out nodes only.
BetheSolution solve_q(const LambdaFunction& lam, const ChainSpec& spec,
                      Real tol_tq = Real(1e-8L));

Real energy_from_roots(std::span<const Complex> roots, const ChainSpec& spec);

// Held-out relative residual of the simplified relation for a given set of
// Bethe roots (Q rebuilt in product form from the roots). This is the same
// quantity solve_q reports, so records can be re-checked from roots alone.
Real tq_residual_for_roots(const LambdaFunction& lam, std::span<const Complex> roots,
                           const ChainSpec& spec);

CompletenessReport completeness_scan(const ChainSpec& spec, Real tol_tq = Real(1e-8L),
                                     Real tol_energy = Real(1e-6L));

// Residual of the general (M >= 0) T-Q relation at a point: LHS - RHS with
// the structure Lambda Q Q1 Q2 - a Q^- Q1^- Q1 - d Q^+ Q2^+ Q2 - Delta.
Complex cysw_residual(const LambdaFunction& lam, const Polynomial& Q,
                      const Polynomial& Q1, const Polynomial& Q2,
                      const ChainSpec& spec, Complex u);
// Largest term magnitude of the same combination (for relative comparisons).
Real cysw_scale(const LambdaFunction& lam, const Polynomial& Q, const Polynomial& Q1,
                const Polynomial& Q2, const ChainSpec& spec, Complex u);

Real cysw_energy(std::span<const Complex> lambdas, std::span<const Complex> mus,
                 std::span<const Complex> nus, const ChainSpec& spec);

// Map an x-root to its canonical Bethe root: Re(lambda) >= -1/2, and on the
// boundary Im(lambda) >= 0.
Complex canonical_root(Complex x);

}  // namespace tqx
