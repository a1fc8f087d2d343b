#pragma once

#include <string>
#include <vector>

#include "actionlab/errors.hpp"

namespace actionlab {

// ---------------------------------------------------------------------------
// Identity families
// ---------------------------------------------------------------------------

enum class IdentityKind { Ehrenfest, Power, NegPower, Exp, SecondVar, Chain };

// One concrete identity instance (family + parameter).
struct IdentityId {
    IdentityKind kind = IdentityKind::Ehrenfest;
    int n = 0;           // Power / NegPower exponent, >= 1
    double lambda = 0.0; // Exp parameter, > -1
    int m = 0;           // Chain order, >= 3

    static IdentityId ehrenfest();
    static IdentityId power(int n);
    static IdentityId negpower(int n);
    static IdentityId exponential(double lambda);
    static IdentityId second_var();
    static IdentityId chain(int m);

    // Uses sites (sigma, tau) rather than sigma alone?
    bool uses_tau() const {
        return kind == IdentityKind::SecondVar || kind == IdentityKind::Chain;
    }

    // Stable display name: "EHRENFEST", "POWER(2)", "EXP(0.5)", "CHAIN(3)", ...
    std::string name() const;

    bool operator==(const IdentityId&) const = default;
};

// Equation tag attached to every check row (external report contract).
std::string paper_tag(const IdentityId& id);
std::string paper_tag(IdentityKind kind);

// Stable row identifier: name() plus site annotation, e.g.
// "SECOND_VAR[sigma=8,tau=12]". Zero-dimensional rows use sigma = tau = 0.
std::string make_check_id(const IdentityId& id, int sigma, int tau);

// ---------------------------------------------------------------------------
// Observable specifications
// ---------------------------------------------------------------------------

enum class AtomKind {
    Const,        // the constant value
    ActionPower,  // S^p (p may be negative)
    ExpAction,    // Euclidean e^{-lambda S / hbar}; Minkowski e^{+i lambda s / hbar}
    GradAt,       // dS/dx_tau
    LocalDerivAt, // d^order S / dx_tau^order; order 2 is the full Hessian
                  // diagonal, order >= 3 the purely local dt V^(order)
    HessianAt,    // d^2 S / dx_tau dx_sigma (tridiagonal entry)
    MixedDerivAt  // d^m S / dx_sigma dx_tau^{m-1}, m >= 3: nonzero only at
                  // sigma == tau, value dt V^(m)(x_tau)
};

struct Atom {
    AtomKind kind = AtomKind::Const;
    double value = 1.0;   // Const
    int power = 0;        // ActionPower
    double lambda = 0.0;  // ExpAction
    int tau = 0;          // site argument
    int sigma = 0;        // second site (HessianAt, MixedDerivAt)
    int order = 0;        // LocalDerivAt order / MixedDerivAt total order

    bool operator==(const Atom&) const = default;
};

// coeff * hbar^{hbar_power} * product(factors). An identically-zero side is
// coeff == 0 with no factors. Product length <= 3.
struct ObservableSpec {
    double coeff = 1.0;
    int hbar_power = 0;
    std::vector<Atom> factors;

    bool is_zero() const { return coeff == 0.0; }
    bool operator==(const ObservableSpec&) const = default;
};

struct LhsRhs {
    ObservableSpec lhs;
    ObservableSpec rhs;
};

// Single source of truth for identity orientation (Euclidean form: the RHS
// carries the 1/hbar factor; every backend consumes this table).
//   EHRENFEST      : <Grad(s)>                          = 0
//   POWER(n)       : <S^n Grad(s)>                      = 0
//   EXP(l)         : <e^{-l S/h} Grad(s)>               = 0          (l > -1)
//   NEGPOWER(n)    : n <S^{-n-1} Grad(s)>               = -(1/h) <S^{-n} Grad(s)>
//   SECOND_VAR     : <Hess(t,s)>                        = (1/h) <Grad(t) Grad(s)>
//   CHAIN(m)       : <d^m S/dx_s dx_t^{m-1}>            = (1/h) <LocalDeriv(t,m-1) Grad(s)>
// flip_hbar_sign negates every coefficient multiplying 1/hbar (negative
// control; makes two-sided identities fail).
LhsRhs lhs_rhs_spec(const IdentityId& id, int sigma, int tau,
                    bool flip_hbar_sign = false);

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

struct CatalogEntry {
    IdentityKind kind;
    std::string family;       // "EHRENFEST", "POWER", ...
    std::string tag;          // paper equation tag
    bool on_exact;            // gaussian exact backend support
    bool on_monte_carlo;      // note: NEGPOWER additionally needs x_start != x_end
    bool on_zerodim;
    std::string note;
};

// Exactly the six families with backend applicability.
std::vector<CatalogEntry> catalog();

// ---------------------------------------------------------------------------
// Check results (shared across backends)
// ---------------------------------------------------------------------------

struct CheckResult {
    std::string check_id;
    std::string paper_eq;
    int sigma = 0;
    int tau = 0;
    double lhs = 0.0;
    double lhs_err = 0.0;
    double rhs = 0.0;
    double rhs_err = 0.0;
    double residual = 0.0;
    double residual_err = 0.0;
    double pull = 0.0;
    bool pass = false;
    bool skipped = false;
    std::string skip_reason;  // "error: ..." prefix marks an operational failure
    // Diagnostics for the text rendering only (estimator choice, ESS,
    // degeneracy); never serialized to JSON/CSV.
    std::string note;
};

}  // namespace actionlab
