#include "actionlab/mc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "actionlab/stats.hpp"

namespace actionlab {

void validate_mc_config(const MCConfig& config) {
    if (config.n_sweeps <= 0) throw ConfigError("mc.n_sweeps must be positive");
    if (config.burn_in < 0) throw ConfigError("mc.burn_in must be >= 0");
    if (config.n_sweeps <= config.burn_in)
        throw ConfigError("mc.n_sweeps must exceed mc.burn_in (no retained samples)");
    if (!(config.step_width > 0.0)) throw ConfigError("mc.step_width must be > 0");
    if (config.thinning < 1) throw ConfigError("mc.thinning must be >= 1");
    if (config.bin_size < 2) throw ConfigError("mc.bin_size must be >= 2");
    const long long retained = (config.n_sweeps - config.burn_in) / config.thinning;
    if (retained < 100LL * config.bin_size)
        throw ConfigError("mc: (n_sweeps - burn_in)/thinning = " + std::to_string(retained) +
                          " retained samples; need >= 100*bin_size = " +
                          std::to_string(100LL * config.bin_size));
}

int SampleLayout::site_index(int site) const {
    for (std::size_t i = 0; i < sites.size(); ++i)
        if (sites[i] == site) return static_cast<int>(i);
    throw ShapeError("sample layout does not record site " + std::to_string(site));
}

int SampleLayout::pair_index(int tau, int sigma) const {
    const int lo = std::min(tau, sigma), hi = std::max(tau, sigma);
    for (std::size_t i = 0; i < pairs.size(); ++i)
        if (pairs[i].first == lo && pairs[i].second == hi) return static_cast<int>(i);
    throw ShapeError("sample layout does not record the site pair (" + std::to_string(tau) +
                     ", " + std::to_string(sigma) + ")");
}

int SampleLayout::order_index(int order) const {
    for (std::size_t i = 0; i < orders.size(); ++i)
        if (orders[i] == order) return static_cast<int>(i);
    throw ShapeError("sample layout does not record derivative order " + std::to_string(order));
}

SampleRecord SampleSet::record(int m) const {
    if (m < 0 || m >= size()) throw ShapeError("sample record index out of range");
    SampleRecord r;
    r.action = action[m];
    r.position.reserve(position.size());
    for (const auto& col : position) r.position.push_back(col[m]);
    r.gradient.reserve(gradient.size());
    for (const auto& col : gradient) r.gradient.push_back(col[m]);
    r.hessian.reserve(hessian.size());
    for (const auto& col : hessian) r.hessian.push_back(col[m]);
    r.local.reserve(local.size());
    for (const auto& col : local) r.local.push_back(col[m]);
    return r;
}

double metropolis_sweep(const LatticeAction& action, Path& path, double step_width,
                        SplitMix64& rng) {
    if (!(step_width > 0.0)) throw ConfigError("metropolis_sweep: step_width must be > 0");
    check_path(action, path);
    const int n = action.grid.n_slices;
    const double m = action.params.mass;
    const double hbar = action.params.hbar;
    const double dt = action.grid.dt;
    int accepted = 0;
    for (int j = 1; j <= n - 1; ++j) {
        // Fixed draw pattern: proposal then acceptance uniform, every site.
        const double u = rng.next_symmetric(step_width);
        const double r = rng.next_u01();
        const double xj = path.values[j];
        const double y = xj + u;
        const double xl = path.values[j - 1];
        const double xr = path.values[j + 1];
        const double kin_new = (y - xl) * (y - xl) + (xr - y) * (xr - y);
        const double kin_old = (xj - xl) * (xj - xl) + (xr - xj) * (xr - xj);
        const double d_s = 0.5 * m * (kin_new - kin_old) / dt +
                           dt * (action.potential.derivative(0, y, m) -
                                 action.potential.derivative(0, xj, m));
        bool accept;
        if (d_s <= 0.0) {
            accept = true;
        } else {
            const double arg = d_s / hbar;
            accept = arg < 745.0 && r < std::exp(-arg);  // exp never overflows
        }
        if (accept) {
            path.values[j] = y;
            ++accepted;
        }
    }
    return n > 1 ? static_cast<double>(accepted) / (n - 1) : 1.0;
}

SampleSet run_chain(const LatticeAction& action, const MCConfig& config,
                    const std::vector<int>& sites, const std::vector<int>& derivative_orders) {
    validate_mc_config(config);
    if (sites.empty()) throw ConfigError("run_chain: at least one measurement site required");

    SampleSet s;
    s.hbar = action.params.hbar;
    s.layout.sites = sites;
    std::sort(s.layout.sites.begin(), s.layout.sites.end());
    s.layout.sites.erase(std::unique(s.layout.sites.begin(), s.layout.sites.end()),
                         s.layout.sites.end());
    for (int site : s.layout.sites) check_site(action, site, "measurement site");
    for (std::size_t i = 0; i < s.layout.sites.size(); ++i)
        for (std::size_t j = i; j < s.layout.sites.size(); ++j)
            s.layout.pairs.emplace_back(s.layout.sites[i], s.layout.sites[j]);
    s.layout.orders = derivative_orders;
    std::sort(s.layout.orders.begin(), s.layout.orders.end());
    s.layout.orders.erase(std::unique(s.layout.orders.begin(), s.layout.orders.end()),
                          s.layout.orders.end());
    for (int order : s.layout.orders)
        if (order < 3)
            throw ConfigError("run_chain: local derivative orders must be >= 3 "
                              "(gradient and Hessian are always recorded)");

    const long long retained = (config.n_sweeps - config.burn_in) / config.thinning;
    s.action.reserve(retained);
    s.position.assign(s.layout.sites.size(), {});
    s.gradient.assign(s.layout.sites.size(), {});
    s.hessian.assign(s.layout.pairs.size(), {});
    s.local.assign(s.layout.sites.size() * s.layout.orders.size(), {});
    for (auto& col : s.position) col.reserve(retained);
    for (auto& col : s.gradient) col.reserve(retained);
    for (auto& col : s.hessian) col.reserve(retained);
    for (auto& col : s.local) col.reserve(retained);

    Path path = linear_path(action);
    SplitMix64 rng(config.seed);
    double step = config.step_width;
    double acc_sum = 0.0;
    long long acc_count = 0;

    for (long long sweep = 1; sweep <= config.n_sweeps; ++sweep) {
        const double acc = metropolis_sweep(action, path, step, rng);
        if (sweep <= config.burn_in) {
            if (config.tune_step) {
                // Tune toward 50% acceptance; frozen after burn-in so the
                // retained chain satisfies detailed balance at fixed step.
                step *= acc > 0.5 ? 1.1 : 1.0 / 1.1;
                step = std::min(std::max(step, 1e-6), 1e6);
            }
            continue;
        }
        acc_sum += acc;
        ++acc_count;
        if ((sweep - config.burn_in) % config.thinning != 0) continue;

        s.action.push_back(action_value(action, path));
        const std::vector<double> grad = action_gradient(action, path);
        const Tridiag hess = action_hessian(action, path);
        for (std::size_t i = 0; i < s.layout.sites.size(); ++i) {
            const int site = s.layout.sites[i];
            s.position[i].push_back(path.values[site]);
            s.gradient[i].push_back(grad[site - 1]);
        }
        for (std::size_t p = 0; p < s.layout.pairs.size(); ++p) {
            const auto [lo, hi] = s.layout.pairs[p];
            double h = 0.0;
            if (lo == hi)
                h = hess.diag[lo - 1];
            else if (hi - lo == 1)
                h = hess.off[lo - 1];
            s.hessian[p].push_back(h);
        }
        for (std::size_t i = 0; i < s.layout.sites.size(); ++i)
            for (std::size_t o = 0; o < s.layout.orders.size(); ++o)
                s.local[i * s.layout.orders.size() + o].push_back(
                    local_derivative(action, path, s.layout.sites[i], s.layout.orders[o]));
    }

    s.mean_acceptance = acc_count > 0 ? acc_sum / acc_count : 0.0;
    s.final_step_width = step;
    return s;
}

namespace {

double int_pow(double x, int p) {
    if (p < 0) return 1.0 / int_pow(x, -p);
    double v = 1.0;
    for (int i = 0; i < p; ++i) v *= x;
    return v;
}

double atom_value(const SampleSet& s, const Atom& a, int m) {
    switch (a.kind) {
        case AtomKind::Const:
            return a.value;
        case AtomKind::ActionPower:
            return int_pow(s.action[m], a.power);
        case AtomKind::ExpAction:
            throw UnsupportedError("estimate_identity does not evaluate exp(-lambda S/hbar) "
                                   "factors; use reweighted_estimate");
        case AtomKind::GradAt:
            return s.gradient[s.layout.site_index(a.tau)][m];
        case AtomKind::HessianAt:
            return s.hessian[s.layout.pair_index(a.tau, a.sigma)][m];
        case AtomKind::LocalDerivAt:
            if (a.order == 2) return s.hessian[s.layout.pair_index(a.tau, a.tau)][m];
            return s.local[s.layout.site_index(a.tau) * s.layout.orders.size() +
                           s.layout.order_index(a.order)][m];
        case AtomKind::MixedDerivAt:
            if (a.sigma != a.tau) return 0.0;
            return s.local[s.layout.site_index(a.tau) * s.layout.orders.size() +
                           s.layout.order_index(a.order)][m];
    }
    throw UnsupportedError("unknown observable atom");
}

double side_value(const SampleSet& s, const ObservableSpec& spec, double hbar, int m) {
    if (spec.is_zero()) return 0.0;
    double v = spec.coeff * int_pow(hbar, spec.hbar_power);
    for (const Atom& a : spec.factors) v *= atom_value(s, a, m);
    return v;
}

int effective_bin_size(const SampleSet& samples, int bin_size) {
    const AutocorrResult ac = autocorr_time(samples.action);
    const int from_tau = static_cast<int>(std::ceil(6.0 * ac.tau_int));
    return std::max(bin_size, std::max(2, from_tau));
}

struct BinnedSeries {
    std::vector<std::vector<double>> sums;  // per bin: {sum per component..., count}
};

BinnedSeries bin_components(const std::vector<std::vector<double>>& comps, int bin) {
    const int m = static_cast<int>(comps[0].size());
    const int nb = m / bin;
    BinnedSeries b;
    b.sums.assign(nb, std::vector<double>(comps.size() + 1, 0.0));
    for (int j = 0; j < nb; ++j) {
        for (int i = j * bin; i < (j + 1) * bin; ++i)
            for (std::size_t c = 0; c < comps.size(); ++c) b.sums[j][c] += comps[c][i];
        b.sums[j][comps.size()] = bin;
    }
    return b;
}

}  // namespace

CheckResult estimate_identity(const SampleSet& samples, const IdentityId& id, int sigma,
                              int tau, double hbar, int bin_size, bool flip_hbar_sign,
                              double pull_threshold) {
    if (id.kind == IdentityKind::Exp)
        throw UnsupportedError("EXP identities are estimated by reweighted_estimate");
    if (bin_size < 2) throw ConfigError("estimate_identity: bin_size must be >= 2");
    const int m_total = samples.size();
    if (m_total < 100)
        throw StatisticsError("estimate_identity requires >= 100 retained samples");

    const LhsRhs spec = lhs_rhs_spec(id, sigma, tau, flip_hbar_sign);

    std::string note;
    if (id.kind == IdentityKind::NegPower) {
        double s_min = std::numeric_limits<double>::infinity();
        for (double s : samples.action) s_min = std::min(s_min, s);
        if (s_min <= 0.0)
            throw DomainError("NEGPOWER estimate sampled S <= 0 (min S = " +
                              std::to_string(s_min) +
                              "); the chain requires x_start != x_end so the classical "
                              "minimum bounds S away from zero");
        // Heavy-tail diagnostic on the S^(-n-1) factor, Kish-style.
        std::vector<double> w(samples.action.size());
        for (std::size_t i = 0; i < w.size(); ++i)
            w[i] = int_pow(samples.action[i], -(id.n + 1));
        const double ess = effective_sample_size(w);
        char buf[96];
        std::snprintf(buf, sizeof buf, "negative-power weight ESS = %.1f", ess);
        note = buf;
        if (ess < 100.0) note += " (unreliable: ESS < 100)";
    }

    std::vector<std::vector<double>> comps(3);
    for (auto& c : comps) c.reserve(m_total);
    for (int m = 0; m < m_total; ++m) {
        const double l = side_value(samples, spec.lhs, hbar, m);
        const double r = side_value(samples, spec.rhs, hbar, m);
        comps[0].push_back(l);
        comps[1].push_back(r);
        comps[2].push_back(l - r);
    }

    const int bin = effective_bin_size(samples, bin_size);
    const int nb = m_total / bin;
    if (nb < 20)
        throw StatisticsError("estimate_identity: only " + std::to_string(nb) +
                              " bins at bin size " + std::to_string(bin) +
                              "; need >= 20 for the jackknife");
    const BinnedSeries bins = bin_components(comps, bin);

    const auto mean_of = [](int c) {
        return [c](const std::vector<double>& t) { return t[c] / t[3]; };
    };
    const JackknifeResult jl = jackknife_bins(bins.sums, mean_of(0));
    const JackknifeResult jr = jackknife_bins(bins.sums, mean_of(1));
    const JackknifeResult jres = jackknife_bins(bins.sums, mean_of(2));

    CheckResult r;
    r.check_id = make_check_id(id, sigma, id.uses_tau() ? tau : 0);
    r.paper_eq = paper_tag(id);
    r.sigma = sigma;
    r.tau = id.uses_tau() ? tau : 0;
    r.lhs = jl.value;
    r.lhs_err = jl.err;
    r.rhs = jr.value;
    r.rhs_err = jr.err;
    r.residual = jres.value;
    r.residual_err = jres.err;
    r.note = note;
    if (jres.err > 0.0) {
        r.pull = jres.value / jres.err;
        r.pass = std::abs(r.pull) <= pull_threshold;
    } else if (jres.value == 0.0) {
        // Degenerate row: the residual is identically zero sample by sample.
        r.pull = 0.0;
        r.pass = true;
        r.note = note.empty() ? "degenerate: residual identically zero"
                              : note + "; degenerate: residual identically zero";
    } else {
        r.pull = std::numeric_limits<double>::infinity();
        r.pass = false;
    }
    return r;
}

double reweighting_ess(const SampleSet& samples, double lambda, double hbar) {
    if (samples.size() < 1) throw StatisticsError("reweighting_ess: empty sample set");
    double s_ref = lambda >= 0.0 ? std::numeric_limits<double>::infinity()
                                 : -std::numeric_limits<double>::infinity();
    for (double s : samples.action)
        s_ref = lambda >= 0.0 ? std::min(s_ref, s) : std::max(s_ref, s);
    std::vector<double> w(samples.action.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = std::exp(-lambda * (samples.action[i] - s_ref) / hbar);
    return effective_sample_size(w);
}

CheckResult reweighted_estimate(const SampleSet& samples, double lambda, int sigma,
                                double hbar, int bin_size, bool flip_hbar_sign,
                                double pull_threshold) {
    const IdentityId id = IdentityId::exponential(lambda);  // validates the guard band
    if (bin_size < 2) throw ConfigError("reweighted_estimate: bin_size must be >= 2");
    const int m_total = samples.size();
    if (m_total < 100)
        throw StatisticsError("reweighted_estimate requires >= 100 retained samples");

    const LhsRhs spec = lhs_rhs_spec(id, sigma, /*tau=*/0, flip_hbar_sign);

    // Split the lhs into its exp(-lambda S/hbar) weight and the companion
    // observable; weights are shift-stabilized (self-normalization cancels
    // the shift) so large lambda*S never overflows.
    double s_ref = lambda >= 0.0 ? std::numeric_limits<double>::infinity()
                                 : -std::numeric_limits<double>::infinity();
    for (double s : samples.action)
        s_ref = lambda >= 0.0 ? std::min(s_ref, s) : std::max(s_ref, s);

    std::vector<std::vector<double>> comps(2);
    comps[0].reserve(m_total);  // w * observable
    comps[1].reserve(m_total);  // w
    const double pre = spec.lhs.coeff * int_pow(hbar, spec.lhs.hbar_power);
    for (int m = 0; m < m_total; ++m) {
        double w = 1.0;
        double obs = pre;
        for (const Atom& a : spec.lhs.factors) {
            if (a.kind == AtomKind::ExpAction)
                w *= std::exp(-a.lambda * (samples.action[m] - s_ref) / hbar);
            else
                obs *= atom_value(samples, a, m);
        }
        comps[0].push_back(w * obs);
        comps[1].push_back(w);
    }

    const double ess = reweighting_ess(samples, lambda, hbar);

    const int bin = effective_bin_size(samples, bin_size);
    const int nb = m_total / bin;
    if (nb < 20)
        throw StatisticsError("reweighted_estimate: only " + std::to_string(nb) +
                              " bins at bin size " + std::to_string(bin) +
                              "; need >= 20 for the jackknife");
    const BinnedSeries bins = bin_components(comps, bin);
    const JackknifeResult j = jackknife_bins(bins.sums, [](const std::vector<double>& t) {
        if (t[1] == 0.0) throw StatisticsError("reweighted_estimate: zero total weight");
        return t[0] / t[1];
    });

    CheckResult r;
    r.check_id = make_check_id(id, sigma, 0);
    r.paper_eq = paper_tag(id);
    r.sigma = sigma;
    r.tau = 0;
    r.lhs = j.value;
    r.lhs_err = j.err;
    r.rhs = 0.0;
    r.rhs_err = 0.0;
    r.residual = j.value;
    r.residual_err = j.err;
    char buf[64];
    std::snprintf(buf, sizeof buf, "reweighting ESS = %.1f", ess);
    r.note = buf;
    if (ess < 100.0) r.note += " (unreliable: ESS < 100)";
    if (j.err > 0.0) {
        r.pull = j.value / j.err;
        r.pass = std::abs(r.pull) <= pull_threshold;
    } else if (j.value == 0.0) {
        r.pull = 0.0;
        r.pass = true;
        r.note += "; degenerate: residual identically zero";
    } else {
        r.pull = std::numeric_limits<double>::infinity();
        r.pass = false;
    }
    return r;
}

std::vector<TwoPointResult> two_point_check(const SampleSet& samples,
                                            const LatticeAction& action,
                                            const QuadraticDecomposition& decomp,
                                            double hbar, int bin_size) {
    if (!action.potential.is_quadratic())
        throw UnsupportedError("two_point_check compares against the Gaussian propagator; "
                               "quadratic potentials only");
    const Propagator g = propagator(decomp, hbar);
    const int m_total = samples.size();
    if (m_total < 100) throw StatisticsError("two_point_check requires >= 100 samples");
    const int bin = effective_bin_size(samples, bin_size);
    const int nb = m_total / bin;
    if (nb < 20) throw StatisticsError("two_point_check: fewer than 20 jackknife bins");

    std::vector<TwoPointResult> out;
    for (const auto& [si, sj] : samples.layout.pairs) {
        const auto& xi = samples.position[samples.layout.site_index(si)];
        const auto& xj = samples.position[samples.layout.site_index(sj)];
        const double ci = decomp.classical.values[si];
        const double cj = decomp.classical.values[sj];
        std::vector<std::vector<double>> comps(1);
        comps[0].reserve(m_total);
        for (int m = 0; m < m_total; ++m) comps[0].push_back((xi[m] - ci) * (xj[m] - cj));
        const BinnedSeries bins = bin_components(comps, bin);
        const JackknifeResult j = jackknife_bins(
            bins.sums, [](const std::vector<double>& t) { return t[0] / t[1]; });
        TwoPointResult r;
        r.site_i = si;
        r.site_j = sj;
        r.value = j.value;
        r.err = j.err;
        r.exact = g.at(si, sj);
        r.pull = j.err > 0.0 ? (j.value - r.exact) / j.err
                             : (j.value == r.exact ? 0.0
                                                   : std::numeric_limits<double>::infinity());
        out.push_back(r);
    }
    return out;
}

}  // namespace actionlab
