#include "actionlab/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

namespace actionlab {

namespace {

constexpr int kOrder = 15;
constexpr int kHalf = 7;      // node pairs; node 7 is the center (0)
constexpr int kMaxDepth = 48; // min-width guard triggers well before this

struct Gl15 {
    std::vector<double> nodes;    // ascending, exactly antisymmetric
    std::vector<double> weights;  // exactly symmetric
};

// Legendre P_n and P_n' via the standard recurrence.
void legendre(int n, double x, double& p, double& dp) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    p = p1;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
}

Gl15 compute_gl15() {
    // Compute the 7 positive roots by Newton from Chebyshev guesses, then
    // mirror them so the tables are symmetric to the last bit.
    Gl15 g;
    g.nodes.assign(kOrder, 0.0);
    g.weights.assign(kOrder, 0.0);
    for (int i = 0; i < kHalf; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (kOrder + 0.5));  // positive guesses
        double p, dp;
        for (int it = 0; it < 100; ++it) {
            legendre(kOrder, x, p, dp);
            const double step = p / dp;
            x -= step;
            if (std::abs(step) < 1e-15) break;
        }
        legendre(kOrder, x, p, dp);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        g.nodes[kOrder - 1 - i] = x;
        g.nodes[i] = -x;
        g.weights[kOrder - 1 - i] = w;
        g.weights[i] = w;
    }
    double pc, dpc;
    legendre(kOrder, 0.0, pc, dpc);
    g.nodes[kHalf] = 0.0;
    g.weights[kHalf] = 2.0 / (dpc * dpc);
    return g;
}

const Gl15& gl15() {
    static const Gl15 g = compute_gl15();
    return g;
}

// Panel bound carried as an unevaluated two-term sum hi + lo. Splitting a
// panel in plain double rounds each midpoint by up to ulp(|x|)/2, which
// shifts that panel's entire node set rigidly; against a fast phase the
// shift turns into a value error ~|g'| * ulp(|x|)/2 * panel mass that differs
// between a parent and its children and never decays relative to the
// acceptance gate (both scale linearly with width). Compensated bounds keep
// every realized midpoint exact to ~2^-105, so the rigid shift is gone.
struct Bound {
    double hi = 0.0;
    double lo = 0.0;
};

// Exact-to-~2^-105 midpoint of two compensated bounds (halving is exact).
Bound bound_mid(const Bound& a, const Bound& b) {
    const double s = a.hi + b.hi;
    const double t = s - a.hi;
    const double tail = (a.hi - (s - t)) + (b.hi - t);  // two_sum remainder
    const double lo = tail + (a.lo + b.lo);
    const double hi2 = s + lo;
    const double lo2 = lo - (hi2 - s);
    return {0.5 * hi2, 0.5 * lo2};
}

struct Segment {
    Bound a;
    Bound b;
    std::vector<std::complex<double>> estimate;
    std::vector<double> abs_mass;  // sum |w_i| (|Re f| + |Im f|) * half: roundoff scale
};

struct Level {
    Segment left, right;
    std::vector<std::complex<double>> total_left, total_right;
};

struct Workspace {
    const VectorIntegrand* f = nullptr;
    int n_comp = 0;
    std::vector<double> tol;
    double total_len = 0.0;
    double min_width = 0.0;
    int max_panels = 0;
    std::array<Level, kMaxDepth> levels;
    std::vector<std::complex<double>> scratch_hi, scratch_lo;
    QuadResult* result = nullptr;
};

// Paired-node evaluation: the +xi and -xi nodes of each symmetric pair are
// summed first, so mirror panels produce exactly negated IEEE values and odd
// integrands on symmetric intervals integrate to an exact 0.0. The abscissa
// is handed to the integrand as (mid.hi, mid.lo + t): the node's two-term
// coordinate stays exact to the midpoint's compensated accuracy because
// |mid.lo| stays below one ulp of mid.hi and t below the half width.
void panel_estimate(Workspace& ws, const Bound& a, const Bound& b, Segment& out) {
    const Gl15& g = gl15();
    // Fold the bounds' low words into the half width as well: the node cloud
    // is centered on the compensated midpoint, so a half width taken from the
    // high words alone would offset the panel's realized span by
    // (a.lo + b.lo)/2 relative to the [a.hi, b.hi] tiling, and that offset
    // differs between a parent and its children. The surviving seam error
    // ~offset * |f'| * width tracks the acceptance gate instead of decaying.
    const double half = 0.5 * ((b.hi - a.hi) + (b.lo - a.lo));
    const Bound mid = bound_mid(a, b);
    out.a = a;
    out.b = b;
    out.estimate.assign(ws.n_comp, std::complex<double>(0.0, 0.0));
    out.abs_mass.assign(ws.n_comp, 0.0);
    auto& hi = ws.scratch_hi;
    auto& lo = ws.scratch_lo;
    for (int i = kOrder - 1; i > kHalf; --i) {
        const double t = half * g.nodes[i];
        std::fill(hi.begin(), hi.end(), std::complex<double>(0.0, 0.0));
        std::fill(lo.begin(), lo.end(), std::complex<double>(0.0, 0.0));
        (*ws.f)(mid.hi, mid.lo + t, hi);
        (*ws.f)(mid.hi, mid.lo - t, lo);
        ws.result->n_evals += 2;
        for (int c = 0; c < ws.n_comp; ++c) {
            out.estimate[c] += g.weights[i] * (hi[c] + lo[c]);
            out.abs_mass[c] += g.weights[i] * (std::abs(hi[c].real()) + std::abs(hi[c].imag()) +
                                               std::abs(lo[c].real()) + std::abs(lo[c].imag()));
        }
    }
    std::fill(hi.begin(), hi.end(), std::complex<double>(0.0, 0.0));
    (*ws.f)(mid.hi, mid.lo, hi);
    ws.result->n_evals += 1;
    for (int c = 0; c < ws.n_comp; ++c) {
        out.estimate[c] += g.weights[kHalf] * hi[c];
        out.abs_mass[c] += g.weights[kHalf] * (std::abs(hi[c].real()) + std::abs(hi[c].imag()));
        out.estimate[c] *= half;
        out.abs_mass[c] *= std::abs(half);
    }
    ws.result->n_panels += 1;
    if (ws.result->n_panels > ws.max_panels)
        throw NumericalError("integrate_adaptive: panel budget " +
                             std::to_string(ws.max_panels) +
                             " exhausted before reaching the requested tolerance");
}

// Bottom-up subtree total for seg; out receives the node's per-component
// subtotal. Combining child subtotals exactly once per node keeps mirror
// subtrees bit-exactly negated (IEEE addition is commutative), so parity
// zeros survive the accumulation.
void refine(Workspace& ws, const Segment& seg, int depth,
            std::vector<std::complex<double>>& out) {
    if (depth >= kMaxDepth)
        throw NumericalError("integrate_adaptive: recursion depth exceeded");
    Level& lv = ws.levels[depth];
    const Bound mid = bound_mid(seg.a, seg.b);
    panel_estimate(ws, seg.a, mid, lv.left);
    panel_estimate(ws, mid, seg.b, lv.right);

    const double share = (seg.b.hi - seg.a.hi) / ws.total_len;
    bool accept = true;
    for (int c = 0; c < ws.n_comp && accept; ++c) {
        const double diff =
            std::abs(seg.estimate[c] - (lv.left.estimate[c] + lv.right.estimate[c]));
        const double floor =
            50.0 * 0x1.0p-52 * (lv.left.abs_mass[c] + lv.right.abs_mass[c]);
        if (diff > ws.tol[c] * share && diff > floor) accept = false;
    }

    if (accept) {
        for (int c = 0; c < ws.n_comp; ++c) {
            out[c] = lv.left.estimate[c] + lv.right.estimate[c];
            ws.result->err_estimate[c] +=
                std::abs(seg.estimate[c] - (lv.left.estimate[c] + lv.right.estimate[c]));
        }
        return;
    }
    if ((mid.hi - seg.a.hi) < ws.min_width) {
        // Name the worst offender so the failure is diagnosable from the message.
        int worst_c = 0;
        double worst_excess = 0.0, worst_diff = 0.0, worst_gate = 0.0;
        for (int c = 0; c < ws.n_comp; ++c) {
            const double diff =
                std::abs(seg.estimate[c] - (lv.left.estimate[c] + lv.right.estimate[c]));
            const double floor =
                50.0 * 0x1.0p-52 * (lv.left.abs_mass[c] + lv.right.abs_mass[c]);
            const double gate = std::max(ws.tol[c] * share, floor);
            const double excess = gate > 0.0 ? diff / gate : (diff > 0.0 ? 1e300 : 0.0);
            if (excess > worst_excess) {
                worst_excess = excess;
                worst_diff = diff;
                worst_gate = gate;
                worst_c = c;
            }
        }
        char msg[256];
        std::snprintf(msg, sizeof msg,
                      "integrate_adaptive: minimum panel width reached without "
                      "convergence near x = %.9g (component %d: split difference "
                      "%.3g vs acceptance bound %.3g)",
                      mid.hi, worst_c, worst_diff, worst_gate);
        throw NumericalError(msg);
    }
    refine(ws, lv.left, depth + 1, lv.total_left);
    refine(ws, lv.right, depth + 1, lv.total_right);
    for (int c = 0; c < ws.n_comp; ++c) out[c] = lv.total_left[c] + lv.total_right[c];
}

}  // namespace

const std::vector<double>& gl15_nodes() { return gl15().nodes; }
const std::vector<double>& gl15_weights() { return gl15().weights; }

QuadResult integrate_adaptive(const VectorIntegrand& f, int n_components, double a, double b,
                              const std::vector<double>& abs_tol, int max_panels) {
    if (n_components < 1) throw ConfigError("integrate_adaptive: need >= 1 component");
    if (!(b > a)) throw ConfigError("integrate_adaptive: requires b > a");
    Workspace ws;
    ws.f = &f;
    ws.n_comp = n_components;
    ws.tol.assign(n_components, 0.0);
    if (abs_tol.size() == 1)
        std::fill(ws.tol.begin(), ws.tol.end(), abs_tol[0]);
    else if (static_cast<int>(abs_tol.size()) == n_components)
        ws.tol = abs_tol;
    else
        throw ShapeError("integrate_adaptive: abs_tol must have 1 or n_components entries");
    for (double t : ws.tol)
        if (!(t > 0.0)) throw ConfigError("integrate_adaptive: tolerances must be > 0");

    ws.total_len = b - a;
    ws.min_width = ws.total_len * 0x1.0p-42;
    ws.max_panels = max_panels;
    ws.scratch_hi.assign(n_components, std::complex<double>(0.0, 0.0));
    ws.scratch_lo.assign(n_components, std::complex<double>(0.0, 0.0));
    for (Level& lv : ws.levels) {
        lv.total_left.assign(n_components, std::complex<double>(0.0, 0.0));
        lv.total_right.assign(n_components, std::complex<double>(0.0, 0.0));
    }

    QuadResult result;
    result.value.assign(n_components, std::complex<double>(0.0, 0.0));
    result.err_estimate.assign(n_components, 0.0);
    ws.result = &result;

    Segment root;
    panel_estimate(ws, Bound{a, 0.0}, Bound{b, 0.0}, root);
    std::vector<std::complex<double>> total(n_components, std::complex<double>(0.0, 0.0));
    refine(ws, root, 0, total);
    result.value = std::move(total);
    return result;
}

CompositeResult composite_fixed(const VectorIntegrand& f, int n_components, double a,
                                double b, int n_panels) {
    if (n_components < 1) throw ConfigError("composite_fixed: need >= 1 component");
    if (!(b > a)) throw ConfigError("composite_fixed: requires b > a");
    if (n_panels < 1) throw ConfigError("composite_fixed: need >= 1 panel");
    Workspace ws;
    ws.f = &f;
    ws.n_comp = n_components;
    ws.max_panels = n_panels + 1;
    ws.scratch_hi.assign(n_components, std::complex<double>(0.0, 0.0));
    ws.scratch_lo.assign(n_components, std::complex<double>(0.0, 0.0));
    QuadResult sink;
    sink.value.assign(n_components, std::complex<double>(0.0, 0.0));
    sink.err_estimate.assign(n_components, 0.0);
    ws.result = &sink;

    CompositeResult r;
    r.value.assign(n_components, std::complex<double>(0.0, 0.0));
    r.abs_scale.assign(n_components, 0.0);
    Segment seg;
    const double h = (b - a) / n_panels;
    for (int p = 0; p < n_panels; ++p) {
        panel_estimate(ws, Bound{a + p * h, 0.0},
                       Bound{p + 1 == n_panels ? b : a + (p + 1) * h, 0.0}, seg);
        for (int c = 0; c < n_components; ++c) {
            r.value[c] += seg.estimate[c];
            r.abs_scale[c] += std::abs(seg.estimate[c]);
        }
    }
    return r;
}

double integrate_real(const std::function<double(double)>& f, double a, double b,
                      double abs_tol, int max_panels) {
    VectorIntegrand wrapped = [&f](double xc, double dx,
                                   std::vector<std::complex<double>>& out) {
        out[0] = f(xc + dx);
    };
    const QuadResult r = integrate_adaptive(wrapped, 1, a, b, {abs_tol}, max_panels);
    return r.value[0].real();
}

}  // namespace actionlab
