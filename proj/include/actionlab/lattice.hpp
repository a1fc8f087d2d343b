#pragma once

#include <string>
#include <vector>

#include "actionlab/errors.hpp"

namespace actionlab {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

// Natural units throughout: mass carries mass units, hbar action units; all
// values are dimensionless reals with these documented roles.
struct PhysicalParams {
    double mass = 1.0;
    double hbar = 1.0;
};

struct TimeGrid {
    double t_total = 0.0;
    int n_slices = 0;  // N; node count is N+1, nodes at j*dt
    double dt = 0.0;
};

// Fixed endpoints; interior sites 1..N-1 are the dynamical degrees of freedom.
struct BoundaryConditions {
    double x_start = 0.0;
    double x_end = 0.0;
};

enum class PotentialKind { Free, Harmonic, Quartic };

// V(x) = 1/2 m omega^2 x^2 + g x^4  (Free: omega = g = 0).
// Derivatives of order >= 5 vanish identically.
struct Potential {
    PotentialKind kind = PotentialKind::Free;
    double omega = 0.0;
    double g = 0.0;

    static Potential free_particle();
    static Potential harmonic(double omega);
    static Potential quartic(double omega, double g);

    bool is_quadratic() const { return g == 0.0; }
    // order 0 -> V, 1 -> V', 2 -> V'', 3 -> V''', 4 -> V''''; >= 5 -> 0
    double derivative(int order, double x, double mass) const;
};

// Trajectory node values; values[0] and values[N] equal the boundary values.
struct Path {
    std::vector<double> values;
};

struct LatticeAction {
    PhysicalParams params;
    TimeGrid grid;
    BoundaryConditions bc;
    Potential potential;

    int n_interior() const { return grid.n_slices - 1; }
};

// Symmetric tridiagonal matrix over interior sites (dimension N-1).
struct Tridiag {
    std::vector<double> diag;  // size n
    std::vector<double> off;   // size n-1, sub/super diagonal

    int size() const { return static_cast<int>(diag.size()); }
    std::vector<double> matvec(const std::vector<double>& x) const;
    // Thomas elimination; throws NumericalError if a pivot is not positive
    // (the matrices built here are positive definite whenever valid).
    std::vector<double> solve(std::vector<double> rhs) const;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// dt = t_total / n_slices, stored exactly as computed.
TimeGrid make_grid(double t_total, int n_slices);

LatticeAction make_action(PhysicalParams params, TimeGrid grid,
                          BoundaryConditions bc, Potential potential);

// A path pinned to the action's boundary values; interior nodes linearly
// interpolated between them.
Path linear_path(const LatticeAction& action);

// Validates length and pinned endpoints.
void check_path(const LatticeAction& action, const Path& path);

// Interior site index check: 1 <= j <= N-1.
void check_site(const LatticeAction& action, int j, const std::string& name);

// S_E = sum_{j=0}^{N-1} [ (m/2) (x_{j+1}-x_j)^2 / dt + dt V(x_j) ]
// (forward-difference kinetic term, left-node potential rule).
double action_value(const LatticeAction& action, const Path& path);

// dS/dx_j = m (2 x_j - x_{j+1} - x_{j-1}) / dt + dt V'(x_j), interior j;
// returned array index i corresponds to site j = i + 1.
std::vector<double> action_gradient(const LatticeAction& action, const Path& path);

// d2S/dx_j dx_k: diagonal 2m/dt + dt V''(x_j), off-diagonal -m/dt.
Tridiag action_hessian(const LatticeAction& action, const Path& path);

// d^m S / dx_j^m = dt V^(m)(x_j) for m >= 3 (purely local).
// order < 3 is a contract violation: use the gradient / Hessian instead.
double local_derivative(const LatticeAction& action, const Path& path, int j,
                        int order);

// Solves the discrete equations of motion. Quadratic potentials: one
// tridiagonal solve. Quartic: damped Newton from the linear interpolant,
// max-norm tolerance 1e-10, 100 iteration cap.
Path classical_path(const LatticeAction& action);

}  // namespace actionlab
