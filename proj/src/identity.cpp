#include "actionlab/identity.hpp"

#include <cmath>
#include <cstdio>

namespace actionlab {

IdentityId IdentityId::ehrenfest() { return IdentityId{IdentityKind::Ehrenfest, 0, 0.0, 0}; }

IdentityId IdentityId::power(int n) {
    if (n < 1) throw ConfigError("POWER requires n >= 1");
    return IdentityId{IdentityKind::Power, n, 0.0, 0};
}

IdentityId IdentityId::negpower(int n) {
    if (n < 1) throw ConfigError("NEGPOWER requires n >= 1");
    return IdentityId{IdentityKind::NegPower, n, 0.0, 0};
}

IdentityId IdentityId::exponential(double lambda) {
    if (!(lambda > -1.0)) throw ConfigError("EXP requires lambda > -1");
    return IdentityId{IdentityKind::Exp, 0, lambda, 0};
}

IdentityId IdentityId::second_var() { return IdentityId{IdentityKind::SecondVar, 0, 0.0, 0}; }

IdentityId IdentityId::chain(int m) {
    if (m < 3) throw ConfigError("CHAIN requires m >= 3");
    return IdentityId{IdentityKind::Chain, 0, 0.0, m};
}

namespace {

std::string format_real(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace

std::string IdentityId::name() const {
    switch (kind) {
        case IdentityKind::Ehrenfest: return "EHRENFEST";
        case IdentityKind::Power:     return "POWER(" + std::to_string(n) + ")";
        case IdentityKind::NegPower:  return "NEGPOWER(" + std::to_string(n) + ")";
        case IdentityKind::Exp:       return "EXP(" + format_real(lambda) + ")";
        case IdentityKind::SecondVar: return "SECOND_VAR";
        case IdentityKind::Chain:     return "CHAIN(" + std::to_string(m) + ")";
    }
    return "?";
}

std::string paper_tag(IdentityKind kind) {
    switch (kind) {
        case IdentityKind::Ehrenfest: return "Eq. (9)";
        case IdentityKind::Power:     return "Eq. (15)";
        case IdentityKind::NegPower:  return "Eq. (27)";
        case IdentityKind::Exp:       return "Eqs. (16)-(21)";
        case IdentityKind::SecondVar: return "Eq. (29)";
        case IdentityKind::Chain:     return "Eq. (33)";
    }
    return "?";
}

std::string paper_tag(const IdentityId& id) { return paper_tag(id.kind); }

std::string make_check_id(const IdentityId& id, int sigma, int tau) {
    std::string s = id.name() + "[sigma=" + std::to_string(sigma);
    if (id.uses_tau()) s += ",tau=" + std::to_string(tau);
    s += "]";
    return s;
}

namespace {

Atom grad_at(int site) {
    Atom a;
    a.kind = AtomKind::GradAt;
    a.tau = site;
    return a;
}

Atom action_power(int p) {
    Atom a;
    a.kind = AtomKind::ActionPower;
    a.power = p;
    return a;
}

Atom exp_action(double lambda) {
    Atom a;
    a.kind = AtomKind::ExpAction;
    a.lambda = lambda;
    return a;
}

Atom hessian_at(int tau, int sigma) {
    Atom a;
    a.kind = AtomKind::HessianAt;
    a.tau = tau;
    a.sigma = sigma;
    return a;
}

Atom local_deriv_at(int tau, int order) {
    Atom a;
    a.kind = AtomKind::LocalDerivAt;
    a.tau = tau;
    a.order = order;
    return a;
}

Atom mixed_deriv_at(int sigma, int tau, int order) {
    Atom a;
    a.kind = AtomKind::MixedDerivAt;
    a.sigma = sigma;
    a.tau = tau;
    a.order = order;
    return a;
}

ObservableSpec zero_side() {
    ObservableSpec s;
    s.coeff = 0.0;
    return s;
}

}  // namespace

LhsRhs lhs_rhs_spec(const IdentityId& id, int sigma, int tau, bool flip_hbar_sign) {
    const double flip = flip_hbar_sign ? -1.0 : 1.0;
    LhsRhs out;
    switch (id.kind) {
        case IdentityKind::Ehrenfest: {
            out.lhs.factors = {grad_at(sigma)};
            out.rhs = zero_side();
            break;
        }
        case IdentityKind::Power: {
            if (id.n < 1) throw ConfigError("POWER requires n >= 1");
            out.lhs.factors = {action_power(id.n), grad_at(sigma)};
            out.rhs = zero_side();
            break;
        }
        case IdentityKind::Exp: {
            if (id.lambda <= -0.95)
                throw ConfigError("EXP(lambda) requires lambda > -0.95: the rescaled "
                                  "action (lambda+1) S degenerates at lambda = -1");
            if (id.lambda == 0.0) {
                // EXP(0) is structurally EHRENFEST (unit weight normalized away).
                out.lhs.factors = {grad_at(sigma)};
            } else {
                out.lhs.factors = {exp_action(id.lambda), grad_at(sigma)};
            }
            out.rhs = zero_side();
            break;
        }
        case IdentityKind::NegPower: {
            if (id.n < 1) throw ConfigError("NEGPOWER requires n >= 1");
            out.lhs.coeff = static_cast<double>(id.n);
            out.lhs.factors = {action_power(-id.n - 1), grad_at(sigma)};
            out.rhs.coeff = -1.0 * flip;
            out.rhs.hbar_power = -1;
            out.rhs.factors = {action_power(-id.n), grad_at(sigma)};
            break;
        }
        case IdentityKind::SecondVar: {
            out.lhs.factors = {hessian_at(tau, sigma)};
            out.rhs.coeff = flip;
            out.rhs.hbar_power = -1;
            out.rhs.factors = {grad_at(tau), grad_at(sigma)};
            break;
        }
        case IdentityKind::Chain: {
            if (id.m < 3) throw ConfigError("CHAIN requires m >= 3");
            out.lhs.factors = {mixed_deriv_at(sigma, tau, id.m)};
            out.rhs.coeff = flip;
            out.rhs.hbar_power = -1;
            out.rhs.factors = {local_deriv_at(tau, id.m - 1), grad_at(sigma)};
            break;
        }
    }
    return out;
}

std::vector<CatalogEntry> catalog() {
    std::vector<CatalogEntry> entries;
    entries.push_back({IdentityKind::Ehrenfest, "EHRENFEST", paper_tag(IdentityKind::Ehrenfest),
                       true, true, true, "expectation of the equation of motion vanishes"});
    entries.push_back({IdentityKind::Power, "POWER", paper_tag(IdentityKind::Power),
                       true, true, true, "positive action powers; exact backend up to n = 4"});
    entries.push_back({IdentityKind::NegPower, "NEGPOWER", paper_tag(IdentityKind::NegPower),
                       false, true, true,
                       "no Gaussian closed form; Monte Carlo needs x_start != x_end"});
    entries.push_back({IdentityKind::Exp, "EXP", paper_tag(IdentityKind::Exp),
                       true, true, true, "exponential insertion, lambda > -1"});
    entries.push_back({IdentityKind::SecondVar, "SECOND_VAR", paper_tag(IdentityKind::SecondVar),
                       true, true, true, "second variation vs gradient correlator"});
    entries.push_back({IdentityKind::Chain, "CHAIN", paper_tag(IdentityKind::Chain),
                       true, true, true, "higher-order local derivative ladder, m >= 3"});
    return entries;
}

}  // namespace actionlab
