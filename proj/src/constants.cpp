/// @file constants.cpp

#include "thermodelay/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace thermodelay {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

double f_weight(double rho, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::domain_error("f_weight: lambda must be positive");
    if (!(rho >= 0.0 && rho <= 1.0)) throw std::domain_error("f_weight: rho outside [0, 1]");
    // (1/(2 lambda)) e^{lambda rho} (e^{-2 lambda rho} - e^{-4 lambda})
    return (std::exp(-lambda * rho) - std::exp(lambda * rho - 4.0 * lambda)) / (2.0 * lambda);
}

double poincare_constant(double ell, PoincareChoice choice) {
    if (choice == PoincareChoice::sharp) return (ell / std::numbers::pi) * (ell / std::numbers::pi);
    return 0.5 * ell * ell;
}

LyapunovConstants lyapunov_constants(const PhysParams& p, double lambda, const LyapunovOptions& opts) {
    p.validate();
    if (!(lambda > 0.0)) throw std::domain_error("lyapunov_constants: lambda must be positive");
    if (!(opts.xi_factor > 1.0)) throw std::domain_error("lyapunov_constants: xi_factor must exceed 1");

    LyapunovConstants c;
    c.lambda = lambda;
    c.c_p = poincare_constant(p.ell, opts.poincare);

    const double alpha = p.alpha, beta = p.beta, tau = p.tau;
    const double xi_bound = beta > 0.0 ? 2.0 * tau * alpha * alpha / beta
                                       : std::numeric_limits<double>::infinity();
    c.xi = opts.xi_factor * xi_bound;
    c.m = (beta > 0.0 ? alpha * alpha / beta : std::numeric_limits<double>::infinity()) +
          c.xi / (2.0 * tau);

    // lambda-only part
    const double h = std::exp(-2.0 * lambda);
    c.h = h;
    c.Gamma = -std::expm1(-2.0 * lambda) / (2.0 * lambda);
    c.Psi = f_weight(1.0, lambda) * std::exp(-lambda);
    c.Lambda = f_weight(0.0, lambda);
    c.Phi = (c.Gamma - 2.0 * std::exp(-4.0 * lambda) +
             (std::exp(-6.0 * lambda) - std::exp(-8.0 * lambda)) / (2.0 * lambda)) /
            (4.0 * lambda * lambda);

    const double h2 = h * h, h3 = h2 * h, h4 = h3 * h;
    c.A = 1.0 + h - h2 - 2.0 * h3 - 4.0 * h4;
    c.A_minus_1 = h * (1.0 - h - 2.0 * h2 - 4.0 * h3);
    c.k = -std::expm1(-8.0 * lambda);
    c.window_margin = h3 * (1.0 + 3.0 * h - h2 + h3 + h4) / c.k;

    // k < 1 holds for every finite lambda; for lambda above ~18 it rounds to 1.
    if (!(c.A_minus_1 > 0.0) || !(c.k > 0.0)) {
        c.infeasible = "lambda infeasible: requires A > 1 and 0 < k < 1";
    } else if (!(c.window_margin > 0.0)) {
        c.infeasible = "lambda infeasible: A/k must stay below 2 lambda Lambda^2 / Gamma";
    }

    const double s = std::sqrt(c.A * c.Gamma / (2.0 * lambda * c.k));
    // Lambda - s, written as (Lambda^2 - s^2)/(Lambda + s) with the exact margin.
    const double lambda_minus_s = c.Gamma * c.window_margin / (2.0 * lambda * (c.Lambda + s));
    if (c.feasible() && !(lambda_minus_s > 0.0))
        c.infeasible = "lambda infeasible: Lambda must exceed sqrt(A Gamma / (2 lambda k))";

    c.eps[1] = std::sqrt(2.0 * lambda * c.Gamma * c.k / c.A);
    c.eps[2] = c.A * tau / (4.0 * lambda * c.k * lambda_minus_s);
    c.b = 4.0 * lambda * c.k / (c.eps[1] + tau / c.eps[2]);

    // beta-dependent part
    const double e2l = std::exp(2.0 * lambda);
    c.eps[0] = beta > 0.0 ? alpha / beta : std::numeric_limits<double>::infinity();
    c.a = 0.5 * alpha * c.eps[0] * tau * e2l;
    c.eps[4] = c.b;
    c.eps[5] = 2.0 * c.a * c.b * c.Psi / (tau * alpha);

    const double lo = alpha * p.gamma * c.b * c.Psi * e2l / (4.0 * beta * p.kappa);
    const double hi = 2.0 * alpha * c.A_minus_1 / (p.gamma * c.b * c.Psi * c.c_p);
    if (p.gamma == 0.0) {
        c.eps[3] = 1.0;  // the eps4 terms carry a factor gamma
    } else if (std::isfinite(lo) && std::isfinite(hi)) {
        c.eps[3] = 0.5 * (lo + hi);
    } else {
        c.eps[3] = kNaN;
    }

    c.N[0] = 1.0;
    c.N[2] = c.N[0];
    c.N[3] = c.a * c.N[0];
    c.N[4] = c.b * c.N[3];
    c.N[5] = c.Psi / (alpha * tau) * c.N[4];
    c.N[1] = beta / alpha * c.N[5];

    c.n0 = kNaN;
    if (c.feasible()) {
        try {
            c.n0 = n0_from_constants(c, p);
        } catch (const std::domain_error&) {
        }
    }
    return c;
}

const ConditionRecord& ConditionReport::get(const std::string& name) const {
    for (const auto& r : records)
        if (r.name == name) return r;
    throw std::out_of_range("no condition named '" + name + "'");
}

std::vector<std::string> ConditionReport::failed() const {
    std::vector<std::string> out;
    for (const auto& r : records)
        if (!r.satisfied) out.push_back(r.name);
    return out;
}

ConditionReport check_conditions(const LyapunovConstants& c, const PhysParams& p) {
    ConditionReport rep;
    const double alpha = p.alpha, beta = p.beta, tau = p.tau;
    const double e2l = std::exp(2.0 * c.lambda);
    auto add = [&](std::string name, double lhs, double rhs, bool ok) {
        rep.records.push_back({std::move(name), lhs, rhs, ok && std::isfinite(lhs)});
    };

    const double xi_bound = beta > 0.0 ? 2.0 * tau * alpha * alpha / beta
                                       : std::numeric_limits<double>::infinity();
    add("xi-bound", c.xi, xi_bound, beta > 0.0 && c.xi > xi_bound);

    // 1 < A/k < (1-h)(1+h)^2, upper side through the exact margin
    const double ak = c.A / c.k;
    add("ak-window", ak, ak + c.window_margin,
        c.feasible() && c.A_minus_1 > 0.0 && c.window_margin > 0.0);

    const double dd_lhs = c.b * c.Psi * alpha * e2l * c.c_p +
                          0.5 * tau * c.b * c.Phi * c.eps[2] * alpha * alpha * e2l;
    add("damping-dominance", dd_lhs, beta * beta, c.feasible() && dd_lhs < beta * beta);

    const double lo = alpha * p.gamma * c.b * c.Psi * e2l / (4.0 * beta * p.kappa);
    const double hi = p.gamma > 0.0 ? 2.0 * alpha * c.A_minus_1 / (p.gamma * c.b * c.Psi * c.c_p)
                                    : std::numeric_limits<double>::infinity();
    const bool interval_ok = p.gamma == 0.0 ? p.kappa > 0.0 : (lo < hi);
    rep.records.push_back({"eps4-interval", p.gamma == 0.0 ? 0.0 : lo, hi,
                           c.feasible() && interval_ok && beta > 0.0});

    // N6/(2 eps6) < N1/2 and N5/(2 eps5) < N4, as a single ratio below 1
    const auto& N = c.N;
    const auto& eps = c.eps;
    const double split = std::max(N[5] / (eps[5] * N[0]), N[4] / (2.0 * eps[4] * N[3]));
    add("cross-term-split", split, 1.0, c.feasible() && split < 1.0);

    const double se_lhs = 0.5 * N[5] * eps[5] * c.c_p + 0.5 * N[4] * c.Phi * eps[4];
    const double se_rhs = 0.5 * N[1] * alpha;
    add("strain-equivalence", se_lhs, se_rhs, c.feasible() && se_lhs < se_rhs);

    const double re_lhs = c.b * c.Psi * c.Psi * c.c_p / (beta * tau) + c.Phi * c.b;
    const double re_rhs = beta * c.Psi / (alpha * tau);
    add("reduced-equivalence", re_lhs, re_rhs, c.feasible() && re_lhs < re_rhs);

    rep.eps4 = c.eps4();
    rep.verdict = std::all_of(rep.records.begin(), rep.records.end(),
                              [](const ConditionRecord& r) { return r.satisfied; });
    return rep;
}

ConditionReport certify(const PhysParams& p, double lambda, const LyapunovOptions& opts) {
    return check_conditions(lyapunov_constants(p, lambda, opts), p);
}

DecayRows decay_rows(const LyapunovConstants& c, const PhysParams& p) {
    const double alpha = p.alpha, beta = p.beta, tau = p.tau;
    const auto& N = c.N;
    const auto& eps = c.eps;
    DecayRows r;
    // b (eps2 + tau/eps3) = 4 lambda k, so the history row is -2 lambda (1-k) N4 / tau.
    r.history = -2.0 * c.lambda * (c.h * c.h * c.h * c.h) * N[3] / tau;
    // b (Lambda - Gamma/(2 eps2)) = A, so the strain row is N4/tau (1 - A + ...).
    r.strain = N[3] / tau *
               (-c.A_minus_1 + c.b * c.Psi * p.gamma * eps[3] * c.c_p / (2.0 * alpha));
    r.strain_rate = N[0] * (alpha / (2.0 * eps[0]) - beta) +
                    N[4] * (0.5 * eps[2] * c.Phi + c.Psi * c.c_p / (alpha * tau));
    r.heat = -N[0] * p.kappa + N[4] * c.Psi * p.gamma / (2.0 * alpha * tau * eps[3]);

    const double ref = N[0] * alpha * eps[0] / 2.0;
    r.n1_equality_residual = (-N[3] * std::exp(-2.0 * c.lambda) / tau + ref) / ref;
    return r;
}

double n0_from_constants(const LyapunovConstants& c, const PhysParams& p) {
    const DecayRows r = decay_rows(c, p);
    for (double v : {r.history, r.strain, r.strain_rate, r.heat})
        if (!(v < 0.0) || !std::isfinite(v))
            throw std::domain_error("n0: a decay row has nonpositive magnitude");
    const auto& N = c.N;
    const double cand[4] = {
        -r.history / N[3],
        2.0 * -r.strain / (p.alpha * N[1]),
        2.0 * -r.strain_rate / (c.c_p * N[0]),
        2.0 * -r.heat / (c.c_p * N[2]),
    };
    const double n0 = *std::min_element(std::begin(cand), std::end(cand));
    if (!finite_positive(n0)) throw std::domain_error("n0: nonpositive decay rate");
    return n0;
}

Beta0Result find_beta0(PhysParams p, const std::vector<double>& lambda_grid,
                       const LyapunovOptions& opts, double rel_tol) {
    if (lambda_grid.empty()) throw std::invalid_argument("find_beta0: empty lambda grid");
    Beta0Result res;
    res.beta0 = std::numeric_limits<double>::infinity();
    res.per_lambda.assign(lambda_grid.size(), kNaN);

    auto passes = [&](double beta, double lambda) {
        p.beta = beta;
        return certify(p, lambda, opts).verdict;
    };

    for (std::size_t g = 0; g < lambda_grid.size(); ++g) {
        const double lambda = lambda_grid[g];
        p.beta = 1.0;
        if (!lyapunov_constants(p, lambda, opts).feasible()) continue;

        double hi = p.alpha * p.tau * std::exp(4.0 * lambda);
        int expand = 0;
        while (!passes(hi, lambda) && expand < 64) {
            hi *= 2.0;
            ++expand;
        }
        if (!passes(hi, lambda)) continue;
        double lo = hi * 1e-12;
        if (passes(lo, lambda)) {
            res.per_lambda[g] = lo;
        } else {
            while (hi / lo - 1.0 > rel_tol) {
                const double mid = std::sqrt(lo * hi);
                if (passes(mid, lambda)) hi = mid;
                else lo = mid;
            }
            res.per_lambda[g] = hi;
        }
        if (res.per_lambda[g] < res.beta0) {
            res.beta0 = res.per_lambda[g];
            res.lambda_star = lambda;
        }
    }
    if (!std::isfinite(res.beta0)) throw std::runtime_error("no feasible lambda");
    return res;
}

std::vector<double> default_lambda_grid() {
    std::vector<double> g;
    for (int i = 2; i <= 32; ++i) g.push_back(0.25 * i);  // 0.5, 0.75, ..., 8
    return g;
}

}  // namespace thermodelay
