/// @file acceptance.cpp
/// @brief Acceptance checks 1-11: one PASS/FAIL line per criterion.
///
/// Usage: acceptance [id ...]   (no ids runs all). Exit status is the number
/// of failing criteria among those run.

#include "thermodelay/constants.hpp"
#include "thermodelay/integrate.hpp"
#include "thermodelay/kernels.hpp"
#include "thermodelay/observables.hpp"
#include "thermodelay/spectral.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace thermodelay;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* title;
    double time_limit;  // seconds
    std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

PhysParams unit_params(double beta) {
    PhysParams p;
    p.beta = beta;
    return p;
}

double ulp(double x) { return std::nextafter(std::abs(x), std::numeric_limits<double>::infinity()) - std::abs(x); }

/// Composite Simpson rule on [0, 1].
double simpson(const std::function<double(double)>& f, int n) {
    const double h = 1.0 / n;
    double s = f(0.0) + f(1.0);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return s * h / 3.0;
}

const std::vector<double> kLambdas = {0.5, 1.0, 2.0, 5.0, 10.0};

// ---------------------------------------------------------------------------

Outcome constants_identities() {
    Outcome o{true, ""};
    double worst_ulps = 0.0, worst_phi = 0.0;
    for (double lam : kLambdas) {
        const auto c = lyapunov_constants(unit_params(1.0), lam);
        const double ulps = std::abs(c.Lambda - c.Psi - c.Gamma) / ulp(c.Lambda);
        const double quad = simpson([&](double r) { return f_weight(r, lam) * f_weight(r, lam); }, 200000);
        const double rel = std::abs(c.Phi - quad) / std::abs(quad);
        worst_ulps = std::max(worst_ulps, ulps);
        worst_phi = std::max(worst_phi, rel);
        if (ulps > 4.0 || rel > 1e-10) o.pass = false;
    }
    o.detail = fmt("max |Lambda-Psi-Gamma| = %.1f ulp (<= 4), max Phi rel err = %.2e (<= 1e-10)", worst_ulps, worst_phi);
    return o;
}

Outcome weight_ode_order() {
    Outcome o{true, ""};
    std::ostringstream d;
    d << "observed orders";
    for (double lam : kLambdas) {
        std::vector<double> res;
        for (int n : {32, 64, 128}) {
            const double h = 1.0 / n;
            double worst = 0.0;
            for (int i = 1; i < n; ++i) {
                const double r = i * h;
                const double gp = std::exp(-lam * (r + h)) * f_weight(r + h, lam);
                const double gm = std::exp(-lam * (r - h)) * f_weight(r - h, lam);
                worst = std::max(worst, std::abs((gp - gm) / (2.0 * h) + std::exp(-2.0 * lam * r)));
            }
            res.push_back(worst);
        }
        const double p1 = std::log2(res[0] / res[1]), p2 = std::log2(res[1] / res[2]);
        // The asymptotic regime needs lambda * drho small; for lambda >= 5 the
        // coarsest step is still pre-asymptotic, so those orders are reported only.
        const bool asserted = lam <= 2.0;
        d << fmt(" l=%g:%.3f/%.3f%s", lam, p1, p2, asserted ? "" : "(reported)");
        if (asserted && (std::abs(p1 - 2.0) > 0.1 || std::abs(p2 - 2.0) > 0.1)) o.pass = false;
    }
    o.detail = d.str() + " (expect 2 +- 0.1 for lambda <= 2)";
    return o;
}

Outcome witness() {
    for (int i = 0; i <= 36; ++i) {
        const double lam = 1.0 + 0.25 * i;
        if (certify(unit_params(std::exp(4.0 * lam)), lam).verdict)
            return {true, fmt("beta = exp(4 lambda) certified at lambda = %g (beta = %.6g)", lam, std::exp(4.0 * lam))};
    }
    return {false, "no lambda in [1, 10] (step 0.25) certifies beta = exp(4 lambda)"};
}

Outcome beta0_crossing() {
    const auto grid = default_lambda_grid();
    const auto r = find_beta0(unit_params(1.0), grid);
    const bool above = certify(unit_params(1.001 * r.beta0), r.lambda_star).verdict;
    bool below_any = false;
    for (double lam : grid) {
        const auto c = lyapunov_constants(unit_params(0.999 * r.beta0), lam);
        if (c.feasible() && check_conditions(c, unit_params(0.999 * r.beta0)).verdict) below_any = true;
    }
    return {above && !below_any,
            fmt("B = %.10g at lambda* = %g; 1.001 B certified: %s; 0.999 B certified on grid: %s", r.beta0,
                r.lambda_star, above ? "yes" : "no", below_any ? "yes" : "no")};
}

Outcome dissipativity(ThetaBC bc) {
    PhysParams p = unit_params(1.0);
    p.theta_bc = bc;
    const double xi = 4.0 * p.tau * p.alpha * p.alpha / p.beta;
    const auto coarse = dissipativity_test(assemble_generator(Grid::make(64, 64, p.ell), p), xi, 10000);
    const auto fine = dissipativity_test(assemble_generator(Grid::make(128, 128, p.ell), p), xi, 10000);
    const bool pass = coarse.max_rayleigh <= 1e-3 && fine.max_rayleigh < coarse.max_rayleigh;
    return {pass, fmt("%s: max Rayleigh (64,64) = %.6g (<= 1e-3), (128,128) = %.6g (decreasing), m = %.6g",
                      to_string(bc), coarse.max_rayleigh, fine.max_rayleigh, coarse.m_used)};
}

double relative_error(const ImexStepper& s, const DelayOracleResult& ref) {
    double num = 0.0, den = 0.0;
    auto acc = [&](const std::vector<double>& a, const std::vector<double>& b) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            num += (a[i] - b[i]) * (a[i] - b[i]);
            den += b[i] * b[i];
        }
    };
    acc(s.u(), ref.u);
    acc(s.v(), ref.v);
    acc(s.theta(), ref.theta);
    return std::sqrt(num / den);
}

Outcome oracle_equivalence() {
    // Kelvin-Voigt dominated setting with a decaying past strain.
    PhysParams p = unit_params(25.0);
    InitialProfiles profiles;
    profiles.f0 = "decaying_exponential";
    std::vector<double> err;
    for (int nrho : {4, 8}) {
        const Grid g = Grid::make(4, nrho, p.ell);
        const auto init = make_initial_data(g, p, profiles);
        const auto ref = delay_oracle(g, p, init.state, init.history, 1.0);
        ImexStepper st(g, p, StepperOptions{}, init.state);  // ring buffer, dt = tau / nrho
        st.advance(static_cast<std::size_t>(nrho));
        err.push_back(relative_error(st, ref));
    }
    const double order = std::log2(err[0] / err[1]);
    const bool pass = err[0] <= 1e-3 && std::abs(order - 2.0) <= 0.3;
    return {pass, fmt("rel err dt=tau/4: %.3e (<= 1e-3), dt=tau/8: %.3e, ratio %.3f, observed order %.3f (2 +- 0.3)",
                      err[0], err[1], err[0] / err[1], order)};
}

Outcome theta_mass_check(ThetaBC bc) {
    PhysParams p = unit_params(1.0);
    p.theta_bc = bc;
    const Grid g = Grid::make(16, 16, p.ell);
    InitialProfiles profiles;
    profiles.project_theta_mean = false;
    auto init = make_initial_data(g, p, profiles);
    for (double& t : init.state.theta) t += 0.5;  // nonzero mass
    ImexStepper st(g, p, StepperOptions{}, init.state);
    const double m0 = theta_mass(st.state(), g);
    const std::size_t steps = 100000;
    if (bc == ThetaBC::neumann) {
        double drift = 0.0;
        for (std::size_t k = 0; k < steps; ++k) {
            st.step();
            if ((k + 1) % 1000 == 0) drift = std::max(drift, std::abs(theta_mass(st.state(), g) - m0) / std::abs(m0));
        }
        drift = std::max(drift, std::abs(theta_mass(st.state(), g) - m0) / std::abs(m0));
        return {drift <= 1e-9, fmt("neumann: max relative drift of sum(theta dx) over 1e5 steps = %.3e (<= 1e-9)", drift)};
    }
    double prev = std::abs(m0), worst_rise = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        st.step();
        if ((k + 1) % 16 == 0) {
            const double m = std::abs(theta_mass(st.state(), g));
            worst_rise = std::max(worst_rise, m - prev);
            prev = std::min(prev, m);
        }
    }
    const double final_ratio = std::abs(theta_mass(st.state(), g)) / std::abs(m0);
    return {final_ratio <= 1e-6, fmt("dirichlet: |sum(theta dx)| final / initial = %.3e (<= 1e-6), max rise above running "
                                     "minimum = %.3e (reported)", final_ratio, worst_rise)};
}

struct DecayRun {
    PhysParams params;
    double lambda = 0.0;
    Trajectory traj;
    DecayFit fit;
    Abscissa abscissa;
};

DecayRun certified_run(ThetaBC bc) {
    const auto b = find_beta0(unit_params(1.0), default_lambda_grid());
    DecayRun r;
    r.params = unit_params(1.01 * b.beta0);
    r.params.theta_bc = bc;
    r.lambda = b.lambda_star;
    SimulationConfig cfg;
    cfg.params = r.params;
    cfg.nx = 64;
    cfg.nrho = 64;
    cfg.t_end = 30.0;
    cfg.lambda = r.lambda;
    cfg.record_every = 4;
    r.traj = simulate(cfg);
    r.fit = decay_rate_fit(r.traj, 5.0, 30.0);
    r.abscissa = spectral_abscissa(assemble_generator(Grid::make(64, 64, r.params.ell), r.params));
    return r;
}

Outcome decay_outcome(const DecayRun& r) {
    const bool cert = certify(r.params, r.lambda).verdict;
    const double a = r.abscissa.value;
    const bool pass = cert && !r.traj.blew_up() && r.fit.a0 > 0.0 && r.fit.r2 >= 0.99 && a < 0.0 &&
                      std::abs(a) >= 0.95 * r.fit.a0;
    return {pass, fmt("%s: beta = %.6g lambda = %g certified %s; fit on [5,30]: a0 = %.6g r2 = %.6f; abscissa = %.6g; "
                      "|abscissa| >= 0.95 a0: %s (energy is quadratic, so 2|abscissa| = %.6g is its rate)",
                      to_string(r.params.theta_bc), r.params.beta, r.lambda, cert ? "yes" : "no", r.fit.a0, r.fit.r2, a,
                      std::abs(a) >= 0.95 * r.fit.a0 ? "yes" : "no", 2.0 * std::abs(a))};
}

DecayRun& neumann_run() {
    static DecayRun run = certified_run(ThetaBC::neumann);
    return run;
}

Outcome exponential_decay() { return decay_outcome(neumann_run()); }

Outcome lyapunov_runtime() {
    const DecayRun& r = neumann_run();
    const auto c = lyapunov_constants(r.params, r.lambda);
    const double n0 = n0_from_constants(c, r.params);
    const auto rep = check_decay_inequality(r.traj, n0);
    const auto eq = empirical_equivalence(r.traj);
    const bool pass = rep.violations == 0 && eq.lower > 0.0 && std::isfinite(eq.upper) && eq.upper > 0.0;
    return {pass, fmt("n0 = %.6g; V' + n0 Vtilde above band at %zu of %zu samples (max over band %.3e); "
                      "empirical c1 = %.6g, c2 = %.6g",
                      n0, rep.violations, rep.samples, rep.max_band_excess, eq.lower, eq.upper)};
}

Outcome instability() {
    PhysParams p = unit_params(0.0);
    const auto a = spectral_abscissa(assemble_generator(Grid::make(64, 64, p.ell), p));
    SimulationConfig cfg;
    cfg.params = p;
    cfg.nx = 64;
    cfg.nrho = 64;
    cfg.t_end = 20.0;
    const auto traj = simulate(cfg);
    double e1 = std::numeric_limits<double>::quiet_NaN(), e20 = e1;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (std::abs(traj.times[i] - 1.0) < 1e-9) e1 = traj.E[i];
        if (std::abs(traj.times[i] - 20.0) < 1e-9) e20 = traj.E[i];
    }
    const bool grew = e20 > e1;
    const std::string energy = traj.blew_up() ? fmt("run blew up at t = %.4g", traj.blowup_time)
                                              : fmt("E(1) = %.6g, E(20) = %.6g", e1, e20);
    return {a.value > 0.0 || grew, fmt("beta = 0: abscissa = %.6g; %s", a.value, energy.c_str())};
}

Outcome dirichlet_variant() {
    const Outcome d = dissipativity(ThetaBC::dirichlet);
    const Outcome m = theta_mass_check(ThetaBC::dirichlet);
    const Outcome e = decay_outcome(certified_run(ThetaBC::dirichlet));
    return {d.pass && m.pass && e.pass,
            fmt("[5 %s] %s | [7 %s] %s | [8 %s] %s", d.pass ? "ok" : "FAIL", d.detail.c_str(), m.pass ? "ok" : "FAIL",
                m.detail.c_str(), e.pass ? "ok" : "FAIL", e.detail.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all = {
        {1, "constant identities", 1.0, constants_identities},
        {2, "weight ODE residual order", 1.0, weight_ode_order},
        {3, "exp(4 lambda) witness", 1.0, witness},
        {4, "beta0 crossing", 5.0, beta0_crossing},
        {5, "discrete dissipativity", 60.0, [] { return dissipativity(ThetaBC::neumann); }},
        {6, "IMEX vs exact delay oracle", 10.0, oracle_equivalence},
        {7, "theta mass conservation", 60.0, [] { return theta_mass_check(ThetaBC::neumann); }},
        {8, "exponential decay", 120.0, exponential_decay},
        {9, "Lyapunov runtime check", 120.0, lyapunov_runtime},
        {10, "beta = 0 instability", 60.0, instability},
        {11, "Dirichlet theta variant", 120.0, dirichlet_variant},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& c : all) {
        if (!wanted.empty() && !wanted.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.time_limit;
        const bool pass = o.pass && in_time;
        failures += pass ? 0 : 1;
        std::printf("criterion %2d %s  %s: %s [%.2f s, limit %.0f s%s]\n", c.id, pass ? "PASS" : "FAIL", c.title,
                    o.detail.c_str(), secs, c.time_limit, in_time ? "" : ", over time");
        std::fflush(stdout);
    }
    return failures;
}
