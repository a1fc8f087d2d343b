#pragma once

#include <vector>

#include "actionlab/identity.hpp"
#include "actionlab/lattice.hpp"

namespace actionlab {

// ---------------------------------------------------------------------------
// Classical / fluctuation decomposition for quadratic actions
// ---------------------------------------------------------------------------

// S(classical + xi) = s_classical + 1/2 xi^T A xi exactly (no higher terms) for
// every interior fluctuation xi; A is the path-independent Hessian.
struct QuadraticDecomposition {
    double s_classical = 0.0;
    Path classical;
    Tridiag fluctuation;  // A, symmetric positive definite tridiagonal
};

// Errors with UnsupportedError unless the potential is Free or Harmonic
// (or Quartic with g == 0, which is Harmonic in disguise).
QuadraticDecomposition decompose_quadratic(const LatticeAction& action);

// ---------------------------------------------------------------------------
// Propagator G = hbar A^{-1} on interior sites
// ---------------------------------------------------------------------------

struct Propagator {
    int n = 0;                    // interior dimension N-1
    std::vector<double> dense;    // row-major n*n, symmetric

    // 1-based interior site indices (1..n).
    double at(int site_i, int site_j) const { return dense[(site_i - 1) * n + (site_j - 1)]; }
};

// Dense inverse via per-column tridiagonal solves; guarded by a dimension
// limit (4096) and pivot positivity.
Propagator propagator(const QuadraticDecomposition& decomp, double hbar);

// Diagonal propagator in an eigenbasis (used by the mode-factorized evaluator;
// also handy for single-mode tests).
Propagator diagonal_propagator(const std::vector<double>& variances);

// ---------------------------------------------------------------------------
// Wick / Isserlis moments
// ---------------------------------------------------------------------------

// <xi_{i1} ... xi_{ik}> for the centered Gaussian with covariance G:
// 0 for odd k, 1 for k == 0, else the Isserlis sum over all (k-1)!! perfect
// pairings. k > 12 refuses with LimitError (10395 pairings at k = 12).
double wick_moment(const Propagator& prop, const std::vector<int>& sites);

// ---------------------------------------------------------------------------
// Exact identity checks
// ---------------------------------------------------------------------------

// Exact LHS/RHS per lhs_rhs_spec with zero statistical error. Supported:
// EHRENFEST, POWER(n <= 4), EXP(lambda), SECOND_VAR, CHAIN(m). NEGPOWER has no
// Gaussian closed form -> UnsupportedError. Odd-parity sides are evaluated
// through the Wick engine (mode factorization), not returned as hard-coded
// zeros, so the machinery itself is exercised.
CheckResult exact_check(const LatticeAction& action, const QuadraticDecomposition& decomp,
                        double hbar, const IdentityId& id, int sigma, int tau,
                        bool flip_hbar_sign = false);

// Exact <S^n>, n = 1..4, from the cumulants of Q = 1/2 xi^T A xi
// (Q is hbar/2 times a chi-square with N-1 degrees of freedom):
// kappa_p = hbar^p (p-1)! (N-1)/2, binomially combined with s_classical.
double action_moment(const QuadraticDecomposition& decomp, double hbar, int n);

}  // namespace actionlab
