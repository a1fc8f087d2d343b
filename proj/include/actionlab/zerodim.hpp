#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "actionlab/errors.hpp"
#include "actionlab/identity.hpp"

namespace actionlab {

// ---------------------------------------------------------------------------
// Zero-dimensional model: ordinary integrals as a non-stochastic oracle
// ---------------------------------------------------------------------------

enum class Signature { Euclidean, Minkowski };

// s(x) = c0 + c1 x + c2 x^2/2 + c3 x^3 + c4 x^4
struct ZeroDimModel {
    std::array<double, 5> c{0.0, 0.0, 0.0, 0.0, 0.0};
    double hbar = 1.0;
    Signature signature = Signature::Euclidean;

    double s(double x) const;
    // d^order s / dx^order for order 0..4 (0 is s itself; > 4 returns 0).
    double ds(int order, double x) const;
};

// Validates integrability: hbar > 0; Euclidean requires c4 > 0, or
// c4 == 0 with c3 == 0 and c2 > 0 (a bare cubic tail is unbounded below).
// Minkowski accepts any real polynomial (the epsilon regulator integrates it).
ZeroDimModel make_zerodim_model(double c0, double c1, double c2, double c3, double c4,
                                double hbar, Signature signature);

// Global minimum of s over the real line (coarse scan + Newton polish).
// Returns -infinity for polynomials unbounded below (possible only in
// Minkowski signature).
double model_min_s(const ZeroDimModel& model);

// ---------------------------------------------------------------------------
// Regulator ladder
// ---------------------------------------------------------------------------

struct RegulatorLadder {
    std::vector<double> epsilons;                 // strictly decreasing, > 0
    std::vector<std::complex<double>> residuals;  // one per epsilon
    std::complex<double> intercept{0.0, 0.0};
    std::complex<double> slope{0.0, 0.0};
    double intercept_err = 0.0;  // quadrature sum of real/imag OLS errors
    double slope_err = 0.0;
    bool fitted = false;
};

// {0.1, 0.05, 0.025, 0.0125}
std::vector<double> default_ladder();

// Least-squares line residual = intercept + slope * epsilon (real and
// imaginary parts fitted separately). Requires >= 3 points.
void extrapolate_residual(RegulatorLadder& ladder);

// Confirmation rule: |intercept| <= 1e-6 * max(1, |slope| * eps_max).
bool ladder_confirms(const RegulatorLadder& ladder);

// ---------------------------------------------------------------------------
// Expectations and identity residuals
// ---------------------------------------------------------------------------

// Self-normalized <O> = integral(O w)/integral(w) by adaptive quadrature.
// Euclidean: w = exp(-(s - min s)/hbar), epsilon ignored. Minkowski:
// w = exp(i s/hbar - epsilon x^2), epsilon > 0 required. ExpAction atoms are
// exp(-lambda s/hbar) in Euclidean and exp(+i lambda s/hbar) in Minkowski
// signature; site-indexed atoms read the corresponding derivative of s.
std::complex<double> quad_expectation(const ZeroDimModel& model,
                                      const ObservableSpec& observable,
                                      double epsilon = 0.0);

// Literal Minkowski master form for the identity's observable O:
//   R(eps) = <dO/dx> + (i/hbar) <O ds/dx>,
// which equals 2 eps <O x> exactly by integration by parts.
struct MinkowskiResidual {
    std::complex<double> r;           // lhs_term + rhs_term
    std::complex<double> two_eps_ox;  // independently quadratured 2 eps <O x>
    std::complex<double> lhs_term;    // <dO/dx>
    std::complex<double> rhs_term;    // (i/hbar) <O ds/dx> (sign flipped by the control)
};

MinkowskiResidual minkowski_identity_residual(const ZeroDimModel& model,
                                              const IdentityId& id, double epsilon,
                                              bool flip_hbar_sign = false);

// Euclidean zero-dimensional check of the identity via lhs_rhs_spec. The
// hbar argument is authoritative for both the weight and the identity
// coefficients. Pass iff |residual| <= 1e-8 * (1 + max(|lhs|, |rhs|)).
CheckResult euclidean_identity_check(const ZeroDimModel& model, const IdentityId& id,
                                     double hbar, bool flip_hbar_sign = false);

// ---------------------------------------------------------------------------
// Fixed five-model battery
// ---------------------------------------------------------------------------

struct ZeroDimBatteryEntry {
    std::string name;
    std::array<double, 5> c;
    double eps_head;  // Minkowski ladder head; ladder = head * {1, 2^-1/2, 2^-1, 2^-3/2}
};

// pure_gaussian, shifted_gaussian, bounded_quartic, tilted_quartic,
// strong_quartic. Ladder heads are sized so the linear-in-epsilon regime
// holds at the smallest epsilon for every battery row.
const std::vector<ZeroDimBatteryEntry>& zerodim_battery();

// Minkowski battery instantiates each family once (POWER at n = 1: higher
// powers on quartic models exceed double-precision conditioning in the
// oscillatory signature; they remain covered by the Euclidean battery below
// and by the lattice backends). Euclidean battery runs the full default
// parameter set.
std::vector<IdentityId> minkowski_battery_identities();
std::vector<IdentityId> euclidean_battery_identities();

// Raw per-epsilon pieces of one battery row; a = <dO/dx>, b = (i/h)<O s'>,
// x = 2 eps <O x>. Both hbar orientations recombine from the same pieces:
// R = a + b, D = a + b - x; flipped: R = a - b, D = a - b - x.
struct MinkowskiLadderRow {
    IdentityId id;
    bool skipped = false;
    std::string skip_reason;
    std::vector<double> epsilons;
    std::vector<std::complex<double>> a, b, x;
};

struct MinkowskiModelRows {
    std::string model_name;
    ZeroDimModel model;
    std::vector<MinkowskiLadderRow> rows;
};

// One shared quadrature pass per (model, epsilon) evaluates every row's
// components together. The identity-list overload serves arbitrary instance
// selections; rows that are ill-conditioned in double precision (POWER(n >= 2)
// on quartic models: the boundary truncation term of the regulated integral
// exceeds the intercept bound at any representable epsilon) become declared
// skips rather than spurious failures.
std::vector<MinkowskiModelRows> run_minkowski_battery(double hbar = 1.0);
std::vector<MinkowskiModelRows> run_minkowski_battery(
    double hbar, const std::vector<IdentityId>& identities);

struct MinkowskiVerdict {
    std::string model_name;
    IdentityId id;
    bool skipped = false;
    std::string skip_reason;
    RegulatorLadder d_ladder;  // residuals = R - 2 eps <O x>
    RegulatorLadder r_ladder;  // residuals = R
    double bound = 0.0;        // 1e-6 * max(1, |slope_D| * eps_max)
    bool intercept_ok = false;
    double linearity_lhs = 0.0;  // |slope_R * eps_min - R(eps_min)|
    double linearity_rhs = 0.0;  // 0.1 * |R(eps_min)|
    bool linearity_ok = false;
    bool nontrivial = false;  // |a| and |b| both > 1e-3 at eps_min
    CheckResult check;
};

std::vector<MinkowskiVerdict> minkowski_battery_verdicts(
    const std::vector<MinkowskiModelRows>& rows, bool flip_hbar_sign);

// All Euclidean battery rows as CheckResults (declared skips included).
// check_id carries a "@model/euclidean" suffix to keep rows distinct.
std::vector<CheckResult> run_euclidean_battery(double hbar = 1.0,
                                               bool flip_hbar_sign = false);

}  // namespace actionlab
