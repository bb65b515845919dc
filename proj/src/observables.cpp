/// @file observables.cpp

#include "thermodelay/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace thermodelay {

namespace {

std::vector<double> strain(const State& s, const Grid& g) {
    const double inv = 1.0 / g.dx();
    std::vector<double> ux(g.n_cells());
    for (std::size_t j = 0; j < ux.size(); ++j) {
        const double r = j < g.n_nodes() ? s.u[j] : 0.0;
        const double l = j >= 1 ? s.u[j - 1] : 0.0;
        ux[j] = (r - l) * inv;
    }
    return ux;
}

double sumsq(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

void require_shape(const State& s, const Grid& g, const char* who) {
    if (!s.matches(g)) throw std::invalid_argument(std::string(who) + ": state does not match grid");
}

}  // namespace

double energy(const State& s, const Grid& g, const PhysParams& p, double xi) {
    require_shape(s, g, "energy");
    const double dx = g.dx();
    const std::size_t nr = g.n_rho();
    double hist = 0.0;
    for (std::size_t j = 0; j < g.n_cells(); ++j)
        for (std::size_t r = 0; r < nr; ++r) hist += g.rho_weight(r) * s.z[j * nr + r] * s.z[j * nr + r];
    return 0.5 * dx * (sumsq(s.v) + p.alpha * sumsq(strain(s, g)) + sumsq(s.theta)) + xi * dx * hist;
}

double theta_mass(const State& s, const Grid& g) {
    if (s.theta.size() != g.n_theta()) throw std::invalid_argument("theta_mass: size mismatch");
    double m = 0.0;
    for (double t : s.theta) m += t;
    return m * g.dx();
}

LyapunovTerms lyapunov_components(const State& s, const Grid& g, const PhysParams& p,
                                  const LyapunovConstants& c) {
    require_shape(s, g, "lyapunov_components");
    const double dx = g.dx();
    const std::size_t nr = g.n_rho();
    const auto ux = strain(s, g);

    LyapunovTerms out;
    out.V[0] = 0.5 * dx * sumsq(s.v);
    out.V[1] = 0.5 * dx * sumsq(ux);
    out.V[2] = 0.5 * dx * sumsq(s.theta);

    double v4 = 0.0, v5 = 0.0;
    for (std::size_t r = 0; r < nr; ++r) {
        const double rho = g.rho(r);
        const double w4 = g.rho_weight(r) * std::exp(-2.0 * c.lambda * rho);
        const double w5 = g.rho_weight(r) * std::exp(-c.lambda * rho) * f_weight(rho, c.lambda);
        double zz = 0.0, zu = 0.0;
        for (std::size_t j = 0; j < g.n_cells(); ++j) {
            const double zv = s.z[j * nr + r];
            zz += zv * zv;
            zu += zv * ux[j];
        }
        v4 += w4 * zz;
        v5 += w5 * zu;
    }
    out.V[3] = dx * v4;
    out.V[4] = -dx * v5;

    double uv = 0.0;
    for (std::size_t i = 0; i < g.n_nodes(); ++i) uv += s.u[i] * s.v[i];
    out.V[5] = dx * uv;

    const auto& N = c.N;
    out.tilde = N[0] * out.V[0] + p.alpha * N[1] * out.V[1] + N[2] * out.V[2] + N[3] * out.V[3];
    out.total = out.tilde + N[4] * out.V[4] + N[5] * out.V[5];
    return out;
}

DecayFit decay_rate_fit(const std::vector<double>& t, const std::vector<double>& e, double t_lo, double t_hi) {
    if (t.size() != e.size()) throw std::invalid_argument("decay_rate_fit: length mismatch");
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] < t_lo || t[k] > t_hi) continue;
        if (!(e[k] > 0.0) || !std::isfinite(e[k]))
            throw std::domain_error("decay_rate_fit: energy not positive on the window");
        const double x = t[k], y = std::log(e[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        ++n;
    }
    if (n < 2) throw std::domain_error("decay_rate_fit: fewer than two samples in the window");
    const double dn = static_cast<double>(n);
    const double mx = sx / dn, my = sy / dn;
    const double vxx = sxx / dn - mx * mx, vxy = sxy / dn - mx * my, vyy = syy / dn - my * my;
    if (!(vxx > 0.0)) throw std::domain_error("decay_rate_fit: degenerate time window");
    const double slope = vxy / vxx;
    DecayFit fit;
    fit.a0 = -slope;
    fit.C = std::exp(my - slope * mx);
    // A flat log E is fitted exactly by the line.
    const double vyy_floor = 1e-28 * std::max(1.0, my * my);
    fit.r2 = vyy > vyy_floor ? (vxy * vxy) / (vxx * vyy) : 1.0;
    fit.samples = n;
    return fit;
}

DecayFit decay_rate_fit(const Trajectory& traj, double t_lo, double t_hi) {
    return decay_rate_fit(traj.times, traj.E, t_lo, t_hi);
}

DecayInequalityReport check_decay_inequality(const Trajectory& traj, double n0, double safety) {
    const auto& t = traj.times;
    const auto& V = traj.V;
    const auto& W = traj.Vtilde;
    const std::size_t n = t.size();
    if (n < 5 || V.size() != n || W.size() != n)
        throw std::invalid_argument("check_decay_inequality: need at least 5 aligned samples");

    double vmax = 0.0;
    for (double v : V) vmax = std::max(vmax, std::abs(v));

    // Third-difference magnitude on each 4-point stencil; uniform sampling is assumed locally.
    auto third = [&](std::size_t k) {
        const double h = (t[k + 3] - t[k]) / 3.0;
        return std::abs(V[k + 3] - 3.0 * V[k + 2] + 3.0 * V[k + 1] - V[k]) / (h * h * h);
    };

    DecayInequalityReport rep;
    rep.max_excess = -std::numeric_limits<double>::infinity();
    rep.max_band_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double h = 0.5 * (t[k + 1] - t[k - 1]);
        const double dv = (V[k + 1] - V[k - 1]) / (2.0 * h);
        const std::size_t lo = k >= 2 ? k - 2 : 0;
        const std::size_t hi = std::min(k, n - 4);
        double d3 = 0.0;
        for (std::size_t s = lo; s <= hi; ++s) d3 = std::max(d3, third(s));
        const double band = safety * (h * h / 6.0) * d3 + 64.0 * 2.2e-16 * vmax / h;
        const double excess = dv + n0 * W[k];
        rep.max_excess = std::max(rep.max_excess, excess);
        rep.max_band_excess = std::max(rep.max_band_excess, excess - band);
        if (excess > band) ++rep.violations;
        ++rep.samples;
    }
    return rep;
}

EquivalenceBounds equivalence_bounds(const LyapunovConstants& c, const PhysParams& p) {
    const auto& N = c.N;
    const auto& eps = c.eps;
    const double q_kinetic = N[5] / (eps[5] * N[0]);
    const double q_history = N[4] / (2.0 * eps[4] * N[3]);
    const double q_strain = (N[5] * eps[5] * c.c_p + N[4] * c.Phi * eps[4]) / (p.alpha * N[1]);
    const double q = std::max({q_kinetic, q_history, q_strain});
    return {1.0 - q, 1.0 + q};
}

EquivalenceBounds empirical_equivalence(const Trajectory& traj) {
    EquivalenceBounds b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (std::size_t k = 0; k < traj.size(); ++k) {
        if (!(traj.Vtilde[k] > 0.0)) continue;
        const double r = traj.V[k] / traj.Vtilde[k];
        b.lower = std::min(b.lower, r);
        b.upper = std::max(b.upper, r);
    }
    return b;
}

}  // namespace thermodelay
