/// @file commands.cpp

#include "thermodelay/commands.hpp"

#include "thermodelay/kernels.hpp"
#include "thermodelay/spectral.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <random>

namespace thermodelay {

namespace fs = std::filesystem;
using nlohmann::json;

std::string csv_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

namespace {

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json config_echo(const Config& c) {
    json j = json::object();
    for (const auto& [k, v] : c.entries()) j[k] = v;
    return j;
}

void write_text(const fs::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
    f << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string csv_header() { return "# schema_version=" + std::to_string(kSchemaVersion) + "\n"; }

std::vector<double> lambda_candidates(const Config& c) {
    if (c.is_set("lyapunov.lambda")) return {c.get_double("lyapunov.lambda")};
    auto grid = c.get_list("lyapunov.lambda_grid");
    if (grid.empty()) throw ConfigError("lyapunov.lambda_grid is empty");
    for (double l : grid)
        if (!(l > 0.0)) throw ConfigError("lyapunov.lambda_grid entries must be positive");
    return grid;
}

/// First lambda whose certificate passes; otherwise the feasible one with the fewest failures.
struct CertifyOutcome {
    double lambda = std::numeric_limits<double>::quiet_NaN();
    LyapunovConstants constants;
    ConditionReport report;
    bool any_feasible = false;
};

CertifyOutcome certify_over(const PhysParams& p, const std::vector<double>& lambdas, const LyapunovOptions& opts) {
    CertifyOutcome best;
    std::size_t fewest = std::numeric_limits<std::size_t>::max();
    for (double lam : lambdas) {
        auto c = lyapunov_constants(p, lam, opts);
        auto rep = check_conditions(c, p);
        if (c.feasible()) best.any_feasible = true;
        const std::size_t nfail = rep.failed().size();
        if (nfail < fewest) {
            fewest = nfail;
            best.lambda = lam;
            best.constants = c;
            best.report = rep;
        }
        if (rep.verdict) break;
    }
    return best;
}

json report_json(const ConditionReport& rep) {
    json recs = json::array();
    for (const auto& r : rep.records)
        recs.push_back({{"name", r.name}, {"lhs", num(r.lhs)}, {"rhs", num(r.rhs)}, {"satisfied", r.satisfied}});
    return {{"records", recs}, {"eps4", num(rep.eps4)}, {"verdict", rep.verdict}};
}

void print_report(const ConditionReport& rep, std::ostream& log) {
    log << std::left << std::setw(22) << "condition" << std::setw(26) << "lhs" << std::setw(26) << "rhs"
        << "ok\n";
    for (const auto& r : rep.records)
        log << std::setw(22) << r.name << std::setw(26) << csv_number(r.lhs) << std::setw(26) << csv_number(r.rhs)
            << (r.satisfied ? "yes" : "no") << "\n";
    log << std::right;
}

/// Everything a simulate run reports, shared by simulate and sweep.
struct RunOutcome {
    SimulationConfig sim;
    Trajectory traj;
    std::string beta_source;
    std::optional<DecayFit> fit;
    std::string fit_error;
    double t_lo = 0.0, t_hi = 0.0;
    double drift_abs = 0.0, drift_rel = 0.0;
    bool certified = false;
    double n0 = std::numeric_limits<double>::quiet_NaN();
    std::optional<DecayInequalityReport> decay_check;
    bool decaying = false;
};

RunOutcome run_simulation(const Config& cfg) {
    RunOutcome out;
    out.sim = simulation_config(cfg);
    out.beta_source = "config";
    if (!cfg.is_set("model.beta")) {
        const auto b0 = find_beta0(out.sim.params, lambda_candidates(cfg), out.sim.lyapunov);
        out.sim.params.beta = b0.beta0;
        if (out.sim.lambda == 0.0) out.sim.lambda = b0.lambda_star;
        out.beta_source = "beta0";
    }
    out.traj = simulate(out.sim);
    const Trajectory& tr = out.traj;

    const double t_end = tr.times.empty() ? 0.0 : tr.times.back();
    out.t_lo = cfg.is_set("output.fit_t_lo") ? cfg.get_double("output.fit_t_lo") : 0.3 * out.sim.t_end;
    out.t_hi = cfg.is_set("output.fit_t_hi") ? cfg.get_double("output.fit_t_hi") : t_end;
    try {
        out.fit = decay_rate_fit(tr, out.t_lo, out.t_hi);
    } catch (const std::exception& e) {
        out.fit_error = e.what();
    }

    if (!tr.theta_mass.empty()) {
        const double m0 = tr.theta_mass.front();
        double worst = 0.0;
        for (double m : tr.theta_mass) worst = std::max(worst, std::abs(m - m0));
        out.drift_abs = worst;
        double scale = 0.0;
        const Grid g = Grid::make(out.sim.nx, out.sim.nrho, out.sim.params.ell);
        const InitialData init = make_initial_data(g, out.sim.params, out.sim.initial);
        for (double t : init.state.theta) scale += std::abs(t) * g.dx();
        out.drift_rel = scale > 0.0 ? worst / scale : 0.0;
    }

    if (out.sim.params.beta > 0.0 && std::isfinite(tr.lambda)) {
        const auto c = lyapunov_constants(out.sim.params, tr.lambda, out.sim.lyapunov);
        out.certified = check_conditions(c, out.sim.params).verdict;
        out.n0 = c.n0;
        if (std::isfinite(c.n0) && tr.size() >= 5 && !tr.blew_up()) out.decay_check = check_decay_inequality(tr, c.n0);
    }
    out.decaying = out.fit && out.fit->a0 > 0.0 && !tr.blew_up() && tr.E.back() < tr.E.front();
    return out;
}

json outcome_json(const RunOutcome& r) {
    const Trajectory& tr = r.traj;
    json fit = nullptr;
    if (r.fit)
        fit = {{"a0", num(r.fit->a0)}, {"C", num(r.fit->C)}, {"r2", num(r.fit->r2)}, {"samples", r.fit->samples},
               {"t_lo", r.t_lo}, {"t_hi", r.t_hi}};
    json dc = nullptr;
    if (r.decay_check)
        dc = {{"samples", r.decay_check->samples},
              {"violations", r.decay_check->violations},
              {"max_excess", num(r.decay_check->max_excess)},
              {"max_band_excess", num(r.decay_check->max_band_excess)}};
    const auto eq = empirical_equivalence(tr);
    return {
        {"beta", r.sim.params.beta},
        {"beta_source", r.beta_source},
        {"lambda", num(tr.lambda)},
        {"xi", num(tr.xi)},
        {"fit", fit},
        {"fit_error", r.fit_error.empty() ? json(nullptr) : json(r.fit_error)},
        {"final_E", tr.E.empty() ? json(nullptr) : num(tr.E.back())},
        {"initial_E", tr.E.empty() ? json(nullptr) : num(tr.E.front())},
        {"theta_mass_drift", {{"absolute", r.drift_abs}, {"relative", r.drift_rel}}},
        {"certified", r.certified},
        {"n0", num(r.n0)},
        {"decay_inequality", dc},
        {"equivalence_empirical", {{"lower", num(eq.lower)}, {"upper", num(eq.upper)}}},
        {"energy_trend", r.decaying ? "decaying" : "non-decaying energy"},
        {"blowup_time", num(tr.blowup_time)},
        {"samples", tr.size()},
    };
}

void write_trajectory_csv(const fs::path& path, const Trajectory& tr) {
    std::string s = csv_header();
    s += "t,E,V,Vtilde,V1,V2,V3,V4,V5,V6,theta_mass\n";
    for (std::size_t k = 0; k < tr.size(); ++k) {
        s += csv_number(tr.times[k]) + "," + csv_number(tr.E[k]) + "," + csv_number(tr.V[k]) + "," +
             csv_number(tr.Vtilde[k]);
        for (int i = 0; i < 6; ++i) s += "," + csv_number(tr.V_terms[i][k]);
        s += "," + csv_number(tr.theta_mass[k]) + "\n";
    }
    write_text(path, s);
}

json base_summary(const std::string& command, const Config& cfg) {
    return {{"schema_version", kSchemaVersion}, {"command", command}, {"config", config_echo(cfg)}};
}

}  // namespace

int cmd_certify(const Config& cfg, const fs::path& out, std::ostream& log) {
    PhysParams p = physical_params(cfg);
    const auto opts = lyapunov_options(cfg);
    const auto lambdas = lambda_candidates(cfg);
    json summary = base_summary("certify", cfg);

    if (!cfg.is_set("model.beta")) {
        try {
            const auto b0 = find_beta0(p, lambdas, opts);
            p.beta = b0.beta0;
            const auto rep = certify(p, b0.lambda_star, opts);
            summary["beta0"] = b0.beta0;
            summary["lambda_star"] = b0.lambda_star;
            json per = json::array();
            for (std::size_t i = 0; i < lambdas.size(); ++i)
                per.push_back({{"lambda", lambdas[i]}, {"beta_threshold", num(b0.per_lambda[i])}});
            summary["per_lambda"] = per;
            summary["report"] = report_json(rep);
            summary["verdict"] = rep.verdict;
            log << "beta0 = " << csv_number(b0.beta0) << " at lambda = " << format_double(b0.lambda_star) << "\n";
            print_report(rep, log);
            write_json(out / "summary.json", summary);
            return kExitOk;
        } catch (const std::runtime_error& e) {
            summary["error"] = e.what();
            summary["verdict"] = false;
            write_json(out / "summary.json", summary);
            log << "certification failed: " << e.what() << "\n";
            return kExitCertification;
        }
    }

    const auto best = certify_over(p, lambdas, opts);
    summary["lambda"] = best.lambda;
    summary["report"] = report_json(best.report);
    summary["verdict"] = best.report.verdict;
    summary["n0"] = num(best.constants.n0);
    if (!best.constants.infeasible.empty()) summary["infeasible"] = best.constants.infeasible;
    log << "lambda = " << format_double(best.lambda) << "\n";
    print_report(best.report, log);
    write_json(out / "summary.json", summary);
    if (best.report.verdict) {
        log << "certified\n";
        return kExitOk;
    }
    if (!best.any_feasible) log << "certification failed: no feasible lambda on the grid\n";
    for (const auto& name : best.report.failed()) log << name << " failed\n";
    return kExitCertification;
}

int cmd_simulate(const Config& cfg, const fs::path& out, std::ostream& log) {
    const RunOutcome r = run_simulation(cfg);
    write_trajectory_csv(out / "traj.csv", r.traj);
    json summary = base_summary("simulate", cfg);
    summary.update(outcome_json(r));
    write_json(out / "summary.json", summary);
    if (r.fit) log << "a0 = " << csv_number(r.fit->a0) << ", r2 = " << csv_number(r.fit->r2) << "\n";
    log << (r.decaying ? "energy decaying" : "non-decaying energy") << "\n";
    if (r.traj.blew_up()) {
        log << "numerical blow-up at t = " << csv_number(r.traj.blowup_time) << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}

int cmd_sweep(const Config& cfg, const fs::path& out, std::ostream& log) {
    auto axis = [&](const std::string& key) {
        auto v = cfg.get_list(key);
        return v.empty() ? std::vector<double>{std::numeric_limits<double>::quiet_NaN()} : v;
    };
    const auto betas = axis("sweep.beta"), taus = axis("sweep.tau"), lambdas = axis("sweep.lambda"),
               nxs = axis("sweep.nx");
    const bool do_sim = cfg.get_bool("sweep.simulate"), do_spectrum = cfg.get_bool("sweep.spectrum");

    struct Point {
        double beta, tau, lambda, nx;
    };
    std::vector<Point> points;
    for (double b : betas)
        for (double t : taus)
            for (double l : lambdas)
                for (double n : nxs) points.push_back({b, t, l, n});

    struct Row {
        Config c;
        bool certified = false;
        double lambda_used = std::numeric_limits<double>::quiet_NaN();
        double abscissa = std::numeric_limits<double>::quiet_NaN();
        double a0 = std::numeric_limits<double>::quiet_NaN(), r2 = a0, final_E = a0;
        std::string status = "ok";
    };

    const std::function<Row(std::size_t)> work = [&](std::size_t i) {
        Row row;
        row.c = cfg;
        const Point& pt = points[i];
        try {
            if (!std::isnan(pt.beta)) row.c.set("model.beta", format_double(pt.beta));
            if (!std::isnan(pt.tau)) row.c.set("model.tau", format_double(pt.tau));
            if (!std::isnan(pt.lambda)) row.c.set("lyapunov.lambda", format_double(pt.lambda));
            if (!std::isnan(pt.nx)) row.c.set("grid.nx", format_double(pt.nx));
            PhysParams p = physical_params(row.c);
            if (!row.c.is_set("model.beta"))
                p.beta = find_beta0(p, lambda_candidates(row.c), lyapunov_options(row.c)).beta0;
            const auto cert = certify_over(p, lambda_candidates(row.c), lyapunov_options(row.c));
            row.certified = cert.report.verdict;
            row.lambda_used = cert.lambda;
            if (do_spectrum) {
                const Grid g = Grid::make(row.c.get_int("grid.nx"), row.c.get_int("grid.nrho"), p.ell);
                const auto gen = assemble_generator(g, p);
                const auto ab = p.theta_bc == ThetaBC::neumann
                                    ? spectral_abscissa(modal_spectrum(g, p, Exec::serial))
                                    : spectral_abscissa(spectrum_dense(gen));
                row.abscissa = ab.value;
            }
            if (do_sim) {
                const RunOutcome r = run_simulation(row.c);
                if (r.fit) {
                    row.a0 = r.fit->a0;
                    row.r2 = r.fit->r2;
                }
                if (!r.traj.E.empty()) row.final_E = r.traj.E.back();
                if (r.traj.blew_up()) row.status = "blowup";
            }
        } catch (const std::exception& e) {
            std::string msg = e.what();
            for (char& ch : msg)
                if (ch == ',' || ch == '\n') ch = ' ';
            row.status = "error: " + msg;
        }
        return row;
    };
    const auto rows = map_indexed<Row>(points.size(), work, Exec::parallel);

    std::string csv = csv_header();
    csv += "index,beta,tau,lambda,nx,certified,spectral_abscissa,a0,r2,final_E,status\n";
    std::size_t failures = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Row& r = rows[i];
        const double beta = r.c.is_set("model.beta") ? r.c.get_double("model.beta")
                                                      : std::numeric_limits<double>::quiet_NaN();
        csv += std::to_string(i) + "," + csv_number(beta) + "," + csv_number(r.c.get_double("model.tau")) + "," +
               csv_number(r.lambda_used) + "," + r.c.get("grid.nx") + "," + (r.certified ? "true" : "false") + "," +
               csv_number(r.abscissa) + "," + csv_number(r.a0) + "," + csv_number(r.r2) + "," +
               csv_number(r.final_E) + "," + r.status + "\n";
        if (r.status != "ok") ++failures;
    }
    write_text(out / "sweep.csv", csv);
    json summary = base_summary("sweep", cfg);
    summary["points"] = rows.size();
    summary["failed_points"] = failures;
    write_json(out / "summary.json", summary);
    log << rows.size() << " sweep points, " << failures << " with errors\n";
    return kExitOk;
}

int cmd_spectrum(const Config& cfg, const fs::path& out, std::ostream& log) {
    const SimulationConfig sim = simulation_config(cfg);
    PhysParams p = sim.params;
    if (!cfg.is_set("model.beta")) p.beta = find_beta0(p, lambda_candidates(cfg), sim.lyapunov).beta0;
    const Grid g = Grid::make(sim.nx, sim.nrho, p.ell);
    const Generator gen = assemble_generator(g, p);

    const bool modal = p.theta_bc == ThetaBC::neumann;
    const auto eigs = modal ? modal_spectrum(g, p) : spectrum_dense(gen);
    for (const auto& e : eigs)
        if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) {
            log << "eigenvalue computation produced non-finite values\n";
            return kExitNumerical;
        }
    const auto ab = spectral_abscissa(eigs);

    std::string csv = csv_header() + "re,im\n";
    for (const auto& e : eigs) csv += csv_number(e.real()) + "," + csv_number(e.imag()) + "\n";
    write_text(out / "spectrum.csv", csv);

    const auto count = static_cast<std::size_t>(std::max(0, cfg.get_int("output.refine_count")));
    std::vector<cplx> right(eigs.begin(), eigs.begin() + std::min(count, eigs.size()));
    const auto refined = refine_eigenpairs(gen, right);
    json ref = json::array();
    double worst = 0.0;
    for (const auto& r : refined) {
        ref.push_back({{"re", r.value.real()}, {"im", r.value.imag()}, {"residual", num(r.residual)},
                       {"converged", r.converged}});
        worst = std::max(worst, r.residual);
    }

    json summary = base_summary("spectrum", cfg);
    summary["method"] = modal ? "modal" : "dense";
    summary["beta"] = p.beta;
    summary["count"] = eigs.size();
    summary["abscissa"] = ab.value;
    summary["abscissa_eigenvalue"] = {{"re", ab.eigenvalue.real()}, {"im", ab.eigenvalue.imag()}};
    summary["refined"] = ref;
    summary["max_refined_residual"] = num(worst);

    if (p.beta > 0.0) {
        const double xi = energy_weight(p, sim.lyapunov);
        const auto trials = static_cast<std::size_t>(std::max(1, cfg.get_int("output.dissipativity_trials")));
        const auto seed = static_cast<std::uint64_t>(cfg.get_double("output.seed"));
        const auto d = dissipativity_test(gen, xi, trials, seed);
        summary["dissipativity"] = {{"max_rayleigh", d.max_rayleigh}, {"m_used", d.m_used}, {"trials", d.trials},
                                    {"xi", xi}};

        // Solvability of (s - A_h) x = b for a real s beyond the shift.
        const double s = d.m_used + 1.0;
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal;
        std::vector<cplx> b(gen.dim());
        for (auto& e : b) e = normal(rng);
        const auto x = solve_resolvent(gen, s, b);
        const auto ax = apply_complex(gen, x);
        double num2 = 0.0, den2 = 0.0;
        for (std::size_t i = 0; i < b.size(); ++i) {
            num2 += std::norm(s * x[i] - ax[i] - b[i]);
            den2 += std::norm(b[i]);
        }
        summary["resolvent"] = {{"shift", s}, {"relative_residual", std::sqrt(num2 / den2)}};
    }
    write_json(out / "summary.json", summary);
    log << "spectral abscissa = " << csv_number(ab.value) << " (" << (modal ? "modal" : "dense") << ", "
        << eigs.size() << " eigenvalues)\n";
    return kExitOk;
}

int run_command(const std::string& name, const Config& cfg, const fs::path& out, std::ostream& log) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) {
        log << "cannot create output directory '" << out.string() << "': " << ec.message() << "\n";
        return kExitUsage;
    }
    try {
        if (name == "certify") return cmd_certify(cfg, out, log);
        if (name == "simulate") return cmd_simulate(cfg, out, log);
        if (name == "sweep") return cmd_sweep(cfg, out, log);
        if (name == "spectrum") return cmd_spectrum(cfg, out, log);
    } catch (const ConfigError& e) {
        log << "configuration error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const NumericalFailure& e) {
        log << "numerical failure at t = " << csv_number(e.time()) << ": " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        log << "invalid input: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    log << "unknown command '" << name << "'\n";
    return kExitUsage;
}

}  // namespace thermodelay
