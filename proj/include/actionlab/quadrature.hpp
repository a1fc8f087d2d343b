#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "actionlab/errors.hpp"

namespace actionlab {

// Evaluates all integrand components at one abscissa; out has size
// n_components and arrives zero-initialized. The abscissa is handed over as
// an exact two-term sum center + offset, where center is the high word of
// the panel midpoint (itself carried in compensated form, exact to ~2^-105)
// and |offset| stays below one ulp of center plus half the panel width.
// Smooth integrands may simply evaluate at center + offset. Integrands with
// fast phases (exp(i g(x)) with |g| huge) should evaluate g at the two-term
// coordinate in compensated arithmetic: collapsing the node to a single
// double first perturbs it by ulp(|x|), and the phase gradient amplifies
// that into value noise ~|g'| * ulp(|x|) that never cancels between a panel
// and its children, stalling refinement. The same argument is why the engine
// carries midpoints in two words: a plain-double midpoint would shift a
// panel's whole node set rigidly by up to ulp(|x|)/2, and against a fast
// phase that rigid shift leaves parent-vs-children split differences
// ~|g'| * ulp(|x|) * panel mass that never close against a gate that also
// scales with panel width.
using VectorIntegrand =
    std::function<void(double, double, std::vector<std::complex<double>>&)>;

struct QuadResult {
    std::vector<std::complex<double>> value;
    std::vector<double> err_estimate;  // per component, summed over panels
    long long n_evals = 0;
    int n_panels = 0;
};

// Adaptive bisection with 15-point Gauss-Legendre panels on [a, b]. A panel
// is accepted when, for every component, |parent - (left + right)| is within
// the component's absolute tolerance prorated by panel length, or within
// 50 ulps of the children's absolute mass (the double-precision floor, which
// keeps tight tolerances from demanding the impossible locally). Panel node
// pairs are summed symmetrically and subtree totals combine bottom-up, so an
// odd integrand over a symmetric interval yields an exact 0.0. abs_tol has
// either n_components entries or a single entry broadcast to all. Throws
// NumericalError when the panel budget or the minimum panel width is reached
// before convergence.
QuadResult integrate_adaptive(const VectorIntegrand& f, int n_components, double a, double b,
                              const std::vector<double>& abs_tol, int max_panels = 40000);

// Scalar real convenience wrapper.
double integrate_real(const std::function<double(double)>& f, double a, double b,
                      double abs_tol, int max_panels = 40000);

struct CompositeResult {
    std::vector<std::complex<double>> value;
    std::vector<double> abs_scale;  // sum over panels of |panel estimate|
};

// Fixed composite pass over n_panels equal panels: cheap pilot used to size
// per-component absolute tolerances before an adaptive pass.
CompositeResult composite_fixed(const VectorIntegrand& f, int n_components, double a,
                                double b, int n_panels);

// The 15 Gauss-Legendre nodes/weights on [-1, 1] used by the panels
// (computed once by Newton iteration on the Legendre polynomial).
const std::vector<double>& gl15_nodes();
const std::vector<double>& gl15_weights();

}  // namespace actionlab
