#include "actionlab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace actionlab {

Potential Potential::free_particle() { return Potential{PotentialKind::Free, 0.0, 0.0}; }

Potential Potential::harmonic(double omega) {
    if (!(omega > 0.0)) throw ConfigError("harmonic potential requires omega > 0");
    return Potential{PotentialKind::Harmonic, omega, 0.0};
}

Potential Potential::quartic(double omega, double g) {
    if (omega < 0.0) throw ConfigError("quartic potential requires omega >= 0");
    if (g < 0.0) throw ConfigError("quartic potential requires g >= 0");
    return Potential{PotentialKind::Quartic, omega, g};
}

double Potential::derivative(int order, double x, double mass) const {
    const double mw2 = mass * omega * omega;
    switch (order) {
        case 0: return 0.5 * mw2 * x * x + g * x * x * x * x;
        case 1: return mw2 * x + 4.0 * g * x * x * x;
        case 2: return mw2 + 12.0 * g * x * x;
        case 3: return 24.0 * g * x;
        case 4: return 24.0 * g;
        default:
            if (order < 0) throw ConfigError("potential derivative order must be >= 0");
            return 0.0;
    }
}

std::vector<double> Tridiag::matvec(const std::vector<double>& x) const {
    const int n = size();
    if (static_cast<int>(x.size()) != n) throw ShapeError("tridiagonal matvec: size mismatch");
    std::vector<double> y(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double v = diag[i] * x[i];
        if (i > 0) v += off[i - 1] * x[i - 1];
        if (i + 1 < n) v += off[i] * x[i + 1];
        y[i] = v;
    }
    return y;
}

std::vector<double> Tridiag::solve(std::vector<double> rhs) const {
    const int n = size();
    if (static_cast<int>(rhs.size()) != n) throw ShapeError("tridiagonal solve: size mismatch");
    std::vector<double> c(n > 1 ? n - 1 : 0);
    std::vector<double> d(n);
    double piv = diag[0];
    if (!(piv > 0.0)) throw NumericalError("tridiagonal solve: non-positive pivot");
    d[0] = rhs[0] / piv;
    if (n > 1) c[0] = off[0] / piv;
    for (int i = 1; i < n; ++i) {
        piv = diag[i] - off[i - 1] * c[i - 1];
        if (!(piv > 0.0)) throw NumericalError("tridiagonal solve: non-positive pivot");
        d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / piv;
        if (i + 1 < n) c[i] = off[i] / piv;
    }
    for (int i = n - 2; i >= 0; --i) d[i] -= c[i] * d[i + 1];
    return d;
}

TimeGrid make_grid(double t_total, int n_slices) {
    if (!(t_total > 0.0)) throw ConfigError("lattice.t_total must be > 0");
    if (n_slices < 2) throw ConfigError("lattice.n_slices must be >= 2");
    return TimeGrid{t_total, n_slices, t_total / n_slices};
}

LatticeAction make_action(PhysicalParams params, TimeGrid grid,
                          BoundaryConditions bc, Potential potential) {
    if (!(params.mass > 0.0)) throw ConfigError("model.mass must be > 0");
    if (!(params.hbar > 0.0)) throw ConfigError("model.hbar must be > 0");
    if (grid.n_slices < 2 || !(grid.dt > 0.0)) throw ConfigError("invalid time grid");
    return LatticeAction{params, grid, bc, potential};
}

Path linear_path(const LatticeAction& action) {
    const int n = action.grid.n_slices;
    Path p;
    p.values.resize(n + 1);
    for (int j = 0; j <= n; ++j) {
        const double f = static_cast<double>(j) / n;
        p.values[j] = action.bc.x_start + f * (action.bc.x_end - action.bc.x_start);
    }
    p.values[0] = action.bc.x_start;
    p.values[n] = action.bc.x_end;
    return p;
}

void check_path(const LatticeAction& action, const Path& path) {
    const int n = action.grid.n_slices;
    if (static_cast<int>(path.values.size()) != n + 1)
        throw ShapeError("path has " + std::to_string(path.values.size()) +
                         " nodes, grid requires " + std::to_string(n + 1));
    if (path.values.front() != action.bc.x_start || path.values.back() != action.bc.x_end)
        throw ShapeError("path endpoints do not match the boundary conditions");
}

void check_site(const LatticeAction& action, int j, const std::string& name) {
    const int n = action.grid.n_slices;
    if (j < 1 || j > n - 1)
        throw ConfigError(name + " = " + std::to_string(j) +
                          " is not an interior site (valid range 1.." + std::to_string(n - 1) + ")");
}

double action_value(const LatticeAction& action, const Path& path) {
    check_path(action, path);
    const double m = action.params.mass;
    const double dt = action.grid.dt;
    const int n = action.grid.n_slices;
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
        const double dx = path.values[j + 1] - path.values[j];
        s += 0.5 * m * dx * dx / dt;
        s += dt * action.potential.derivative(0, path.values[j], m);
    }
    return s;
}

std::vector<double> action_gradient(const LatticeAction& action, const Path& path) {
    check_path(action, path);
    const double m = action.params.mass;
    const double dt = action.grid.dt;
    const int n = action.grid.n_slices;
    std::vector<double> grad(n - 1);
    for (int j = 1; j <= n - 1; ++j) {
        const double x = path.values[j];
        grad[j - 1] = m * (2.0 * x - path.values[j + 1] - path.values[j - 1]) / dt +
                      dt * action.potential.derivative(1, x, m);
    }
    return grad;
}

Tridiag action_hessian(const LatticeAction& action, const Path& path) {
    check_path(action, path);
    const double m = action.params.mass;
    const double dt = action.grid.dt;
    const int n = action.grid.n_slices;
    Tridiag h;
    h.diag.resize(n - 1);
    h.off.assign(n > 2 ? n - 2 : 0, -m / dt);
    for (int j = 1; j <= n - 1; ++j)
        h.diag[j - 1] = 2.0 * m / dt + dt * action.potential.derivative(2, path.values[j], m);
    return h;
}

double local_derivative(const LatticeAction& action, const Path& path, int j, int order) {
    check_path(action, path);
    check_site(action, j, "site");
    if (order < 3)
        throw ConfigError("local_derivative requires order >= 3; "
                          "use the gradient or Hessian for lower orders");
    return action.grid.dt * action.potential.derivative(order, path.values[j], action.params.mass);
}

namespace {

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

Path classical_path(const LatticeAction& action) {
    const double m = action.params.mass;
    const double dt = action.grid.dt;
    const int n = action.grid.n_slices;
    Path path = linear_path(action);

    if (action.potential.is_quadratic()) {
        // EOM is linear: A x = b with A the (path-independent) Hessian and the
        // endpoint couplings moved to the right-hand side.
        Tridiag a = action_hessian(action, path);
        std::vector<double> rhs(n - 1, 0.0);
        rhs.front() += m / dt * action.bc.x_start;
        rhs.back() += m / dt * action.bc.x_end;
        std::vector<double> interior = a.solve(rhs);
        for (int j = 1; j <= n - 1; ++j) path.values[j] = interior[j - 1];
        return path;
    }

    // Damped Newton on the gradient, initialized at the linear interpolant.
    constexpr double kTol = 1e-10;
    constexpr int kMaxIter = 100;
    std::vector<double> grad = action_gradient(action, path);
    double gnorm = max_abs(grad);
    for (int iter = 0; iter < kMaxIter; ++iter) {
        if (gnorm <= kTol) return path;
        Tridiag hess = action_hessian(action, path);
        std::vector<double> step = hess.solve(grad);
        double scale = 1.0;
        Path trial = path;
        for (int halvings = 0; halvings < 40; ++halvings) {
            for (int j = 1; j <= n - 1; ++j)
                trial.values[j] = path.values[j] - scale * step[j - 1];
            std::vector<double> tg = action_gradient(action, trial);
            const double tn = max_abs(tg);
            if (tn < gnorm) {
                path = trial;
                grad = std::move(tg);
                gnorm = tn;
                break;
            }
            scale *= 0.5;
        }
    }
    if (gnorm <= kTol) return path;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", gnorm);
    throw NumericalError(std::string("classical path Newton solve did not converge; "
                                     "last gradient max-norm ") + buf);
}

}  // namespace actionlab
