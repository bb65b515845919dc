/// @file integrate.cpp

#include "thermodelay/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace thermodelay {

namespace {

double step_size(const Grid& g, const PhysParams& p, const StepperOptions& o) {
    return o.dt > 0.0 ? o.dt : p.tau / g.nrho;
}

bool all_finite(const std::vector<double>& x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace

ImplicitOperator::ImplicitOperator(const Grid& g, const PhysParams& p, double dt, double weight)
    : grid_(g), params_(p), dt_(dt), weight_(weight), n_(g.n_nodes() + g.n_theta()) {
    if (!(dt > 0.0)) throw std::invalid_argument("factor_implicit: dt must be positive");
    if (weight < 0.0 || weight > 1.0) throw std::invalid_argument("factor_implicit: weight outside [0, 1]");
    p.validate();
    const std::size_t nx = g.n_nodes(), nt = g.n_theta();
    const double inv = 1.0 / g.dx(), inv2 = inv * inv;
    const double s = weight * dt;
    const double ghost = p.theta_bc == ThetaBC::neumann ? 1.0 : -1.0;

    matrix_ = BandedMatrix(n_, 2, 2);
    for (std::size_t k = 0; k < n_; ++k) matrix_.at(k, k) = 1.0;
    for (std::size_t i = 0; i < nx; ++i) {
        const std::size_t r = v_slot(i);
        matrix_.at(r, r) += s * 2.0 * p.beta * inv2;
        if (i >= 1) matrix_.at(r, v_slot(i - 1)) -= s * p.beta * inv2;
        if (i + 1 < nx) matrix_.at(r, v_slot(i + 1)) -= s * p.beta * inv2;
        matrix_.at(r, theta_slot(i + 1)) += s * p.gamma * inv;
        matrix_.at(r, theta_slot(i)) -= s * p.gamma * inv;
    }
    for (std::size_t j = 0; j < nt; ++j) {
        const std::size_t r = theta_slot(j);
        double diag = -2.0 * inv2;
        if (j == 0 || j + 1 == nt) diag += ghost * inv2;
        matrix_.at(r, r) -= s * p.kappa * diag;
        if (j >= 1) matrix_.at(r, theta_slot(j - 1)) -= s * p.kappa * inv2;
        if (j + 1 < nt) matrix_.at(r, theta_slot(j + 1)) -= s * p.kappa * inv2;
        if (j < nx) matrix_.at(r, v_slot(j)) += s * p.gamma * inv;
        if (j >= 1) matrix_.at(r, v_slot(j - 1)) -= s * p.gamma * inv;
    }
    lu_ = matrix_;
    lu_.factorize();
}

void ImplicitOperator::apply_block(std::span<const double> v, std::span<const double> theta, std::span<double> jv,
                                   std::span<double> jtheta) const {
    const std::size_t nx = grid_.n_nodes(), nt = grid_.n_theta();
    const double inv = 1.0 / grid_.dx(), inv2 = inv * inv;
    const double ghost = params_.theta_bc == ThetaBC::neumann ? 1.0 : -1.0;
    const auto& p = params_;
    for (std::size_t i = 0; i < nx; ++i) {
        const double vl = i >= 1 ? v[i - 1] : 0.0, vr = i + 1 < nx ? v[i + 1] : 0.0;
        jv[i] = p.beta * inv2 * (vl - 2.0 * v[i] + vr) - p.gamma * inv * (theta[i + 1] - theta[i]);
    }
    for (std::size_t j = 0; j < nt; ++j) {
        const double tl = j >= 1 ? theta[j - 1] : ghost * theta[j];
        const double tr = j + 1 < nt ? theta[j + 1] : ghost * theta[j];
        const double vr = j < nx ? v[j] : 0.0, vl = j >= 1 ? v[j - 1] : 0.0;
        jtheta[j] = p.kappa * inv2 * (tl - 2.0 * theta[j] + tr) - p.gamma * inv * (vr - vl);
    }
}

ImplicitOperator factor_implicit(const Grid& g, const PhysParams& p, double dt, double weight) {
    return ImplicitOperator(g, p, dt, weight);
}

DelayMode delay_mode_from_string(const std::string& s) {
    if (s == "ring") return DelayMode::ring;
    if (s == "transport") return DelayMode::transport;
    throw std::invalid_argument("unknown delay mode '" + s + "'");
}

const char* to_string(DelayMode m) { return m == DelayMode::ring ? "ring" : "transport"; }

ImexStepper::ImexStepper(const Grid& g, const PhysParams& p, StepperOptions opts, const State& initial)
    : grid_(g), params_(p), opts_(opts), dt_(step_size(g, p, opts)),
      op_(g, p, step_size(g, p, opts), opts.weight) {
    if (opts.weight < 0.5 || opts.weight > 1.0) throw std::invalid_argument("IMEX weight must lie in [1/2, 1]");
    if (!initial.matches(g)) throw std::invalid_argument("ImexStepper: initial state does not match grid");
    const double lock = p.tau / g.nrho;
    if (opts.mode == DelayMode::ring && std::abs(dt_ - lock) > 1e-12 * lock)
        throw std::invalid_argument("ring delay requires dt = tau / nrho");
    if (opts.backward_euler_start && opts.weight != 1.0) startup_op_.emplace(g, p, dt_, 1.0);

    u_ = initial.u;
    v_ = initial.v;
    theta_ = initial.theta;
    const std::size_t nc = g.n_cells(), nr = g.n_rho();
    if (opts.mode == DelayMode::ring) {
        ring_ = HistoryBuffer(nc, g.nrho, p.tau);
        std::vector<double> slice(nc);
        for (std::size_t r = nr; r-- > 0;) {
            for (std::size_t j = 0; j < nc; ++j) slice[j] = initial.z[j * nr + r];
            ring_.push(slice);
        }
    } else {
        z_ = initial.z;
        z_tail_prev_ = read_delayed(z_, g);
    }
    rhs_.assign(op_.size(), 0.0);
    jv_.assign(g.n_nodes(), 0.0);
    jth_.assign(g.n_theta(), 0.0);
}

std::vector<double> ImexStepper::grad(std::span<const double> u) const {
    const double inv = 1.0 / grid_.dx();
    std::vector<double> g(grid_.n_cells());
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double r = j < grid_.n_nodes() ? u[j] : 0.0;
        const double l = j >= 1 ? u[j - 1] : 0.0;
        g[j] = (r - l) * inv;
    }
    return g;
}

const ImplicitOperator& ImexStepper::op_for_step() const {
    return (steps_ == 0 && startup_op_) ? *startup_op_ : op_;
}

void ImexStepper::step() {
    const ImplicitOperator& op = op_for_step();
    const double w = op.weight(), dt = dt_;
    const std::size_t nx = grid_.n_nodes(), nt = grid_.n_theta(), N = static_cast<std::size_t>(grid_.nrho);
    const double inv = 1.0 / grid_.dx();

    // Delayed strain blended at the step weights.
    std::vector<double> zmix(grid_.n_cells());
    std::vector<double> z_old;
    if (opts_.mode == DelayMode::ring) {
        const auto z_new = ring_.lag(N - 1), zo = ring_.lag(N);
        for (std::size_t j = 0; j < zmix.size(); ++j) zmix[j] = w * z_new[j] + (1.0 - w) * zo[j];
    } else {
        z_old = read_delayed(z_, grid_);
        const bool first = steps_ == 0;
        for (std::size_t j = 0; j < zmix.size(); ++j) {
            const double extrap = (w == 1.0 || first) ? z_old[j] : 2.0 * z_old[j] - z_tail_prev_[j];
            zmix[j] = w * extrap + (1.0 - w) * z_old[j];
        }
    }

    if (w < 1.0) op.apply_block(v_, theta_, jv_, jth_);
    for (std::size_t i = 0; i < nx; ++i) {
        double r = v_[i] + dt * params_.alpha * inv * (zmix[i + 1] - zmix[i]);
        if (w < 1.0) r += (1.0 - w) * dt * jv_[i];
        rhs_[ImplicitOperator::v_slot(i)] = r;
    }
    for (std::size_t j = 0; j < nt; ++j) {
        double r = theta_[j];
        if (w < 1.0) r += (1.0 - w) * dt * jth_[j];
        rhs_[ImplicitOperator::theta_slot(j)] = r;
    }
    op.solve_in_place(rhs_);

    for (std::size_t i = 0; i < nx; ++i) {
        const double vn = rhs_[ImplicitOperator::v_slot(i)];
        u_[i] += dt * (w * vn + (1.0 - w) * v_[i]);
        v_[i] = vn;
    }
    for (std::size_t j = 0; j < nt; ++j) theta_[j] = rhs_[ImplicitOperator::theta_slot(j)];
    ++steps_;

    const auto gu = grad(u_);
    if (opts_.mode == DelayMode::ring) {
        ring_.push(gu);
    } else {
        z_tail_prev_ = std::move(z_old);
        advance_transport(z_, grid_, gu, dt, params_.tau, opts_.transport_weight);
    }

    if (!all_finite(u_) || !all_finite(v_) || !all_finite(theta_))
        throw NumericalFailure("non-finite state after step " + std::to_string(steps_), time());
}

State ImexStepper::state() const {
    State s;
    s.u = u_;
    s.v = v_;
    s.theta = theta_;
    s.z = opts_.mode == DelayMode::ring ? to_field(ring_, grid_) : z_;
    return s;
}

std::vector<double> expm_oracle(const Generator& gen, std::span<const double> x, double t) {
    if (gen.dim() > kDenseDimCap)
        throw std::length_error("expm_oracle: dimension " + std::to_string(gen.dim()) + " too large for dense work");
    if (x.size() != gen.dim()) throw std::invalid_argument("expm_oracle: state size mismatch");
    if (t == 0.0) return {x.begin(), x.end()};
    return expm(t * gen.matrix.to_dense()).apply(x);
}

State expm_oracle(const Generator& gen, const State& s, double t) {
    return unpack(expm_oracle(gen, pack(s), t), gen.grid);
}

DelayOracleResult delay_oracle(const Grid& g, const PhysParams& p, const State& initial,
                               const SeparableHistory& history, double t) {
    p.validate();
    if (!initial.matches(g)) throw std::invalid_argument("delay_oracle: initial state does not match grid");
    if (history.profile.size() != g.n_cells()) throw std::invalid_argument("delay_oracle: history size mismatch");
    if (t < 0.0) throw std::invalid_argument("delay_oracle: negative time");

    const std::size_t nx = g.n_nodes(), nt = g.n_theta(), nc = g.n_cells();
    const std::size_t n = 2 * nx + nt;  // (u, v, theta)
    const std::size_t ou = 0, ov = nx, ot = 2 * nx;
    const auto ops = build_operators(g, p.theta_bc);
    const DenseMatrix D = ops.div_flux.to_dense(), G = ops.grad_u.to_dense(), L = ops.lap_theta.to_dense();
    const DenseMatrix DG = D * G;

    // Undelayed part and the delayed-strain coupling as dense n x n blocks.
    DenseMatrix B(n, n), Cd(n, n);
    for (std::size_t i = 0; i < nx; ++i) B(ou + i, ov + i) = 1.0;
    for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t k = 0; k < nx; ++k) {
            B(ov + i, ov + k) = p.beta * DG(i, k);
            Cd(ov + i, ou + k) = p.alpha * DG(i, k);
        }
        for (std::size_t j = 0; j < nt; ++j) B(ov + i, ot + j) = -p.gamma * D(i, j);
    }
    for (std::size_t j = 0; j < nt; ++j) {
        for (std::size_t k = 0; k < nx; ++k) B(ot + j, ov + k) = -p.gamma * G(j, k);
        for (std::size_t k = 0; k < nt; ++k) B(ot + j, ot + k) = p.kappa * L(j, k);
    }
    std::vector<double> hist_col(n, 0.0);
    for (std::size_t i = 0; i < nx; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < nc; ++j) s += D(i, j) * history.profile[j];
        hist_col[ov + i] = p.alpha * s;
    }

    std::vector<std::vector<double>> nodes;  // X(k tau)
    {
        std::vector<double> x0(n);
        std::copy(initial.u.begin(), initial.u.end(), x0.begin() + ou);
        std::copy(initial.v.begin(), initial.v.end(), x0.begin() + ov);
        std::copy(initial.theta.begin(), initial.theta.end(), x0.begin() + ot);
        nodes.push_back(std::move(x0));
    }

    // Segment k stacks Y_j(s) = X(s + j tau), j = 0..k, plus the scalar history factor.
    auto run_segment = [&](std::size_t k, double s) {
        const std::size_t dim = (k + 1) * n + 1;
        if (dim > kDenseDimCap) throw std::length_error("delay_oracle: too many delay segments");
        const std::size_t q = dim - 1;
        DenseMatrix M(dim, dim);
        for (std::size_t blk = 0; blk <= k; ++blk) {
            const std::size_t o = blk * n;
            for (std::size_t c = 0; c < n; ++c)
                for (std::size_t r = 0; r < n; ++r) {
                    M(o + r, o + c) = B(r, c);
                    if (blk >= 1) M(o + r, o - n + c) = Cd(r, c);
                }
        }
        for (std::size_t r = 0; r < n; ++r) M(r, q) = hist_col[r];
        M(q, q) = history.rate;
        std::vector<double> y(dim, 0.0);
        for (std::size_t blk = 0; blk <= k; ++blk) std::copy(nodes[blk].begin(), nodes[blk].end(), y.begin() + blk * n);
        y[q] = history.factor(-p.tau);
        const auto out = expm(s * M).apply(y);
        return std::vector<double>(out.begin() + k * n, out.begin() + (k + 1) * n);
    };

    std::size_t k = 0;
    while (t - static_cast<double>(k) * p.tau > p.tau * (1.0 + 1e-14)) {
        nodes.push_back(run_segment(k, p.tau));
        ++k;
    }
    const double rest = t - static_cast<double>(k) * p.tau;
    const auto x = rest > 0.0 ? run_segment(k, rest) : nodes[k];

    DelayOracleResult res;
    res.u.assign(x.begin() + ou, x.begin() + ov);
    res.v.assign(x.begin() + ov, x.begin() + ot);
    res.theta.assign(x.begin() + ot, x.end());
    return res;
}

namespace {

/// Parses "name" or "name(n)"; returns the integer argument or `fallback`.
std::pair<std::string, int> parse_preset(const std::string& s, int fallback) {
    const auto open = s.find('(');
    if (open == std::string::npos) return {s, fallback};
    const auto close = s.find(')', open);
    if (close == std::string::npos || close + 1 != s.size())
        throw std::invalid_argument("malformed preset '" + s + "'");
    const std::string arg = s.substr(open + 1, close - open - 1);
    std::size_t used = 0;
    int n = 0;
    try {
        n = std::stoi(arg, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("malformed preset argument in '" + s + "'");
    }
    if (used != arg.size() || n < 1) throw std::invalid_argument("preset mode must be a positive integer in '" + s + "'");
    return {s.substr(0, open), n};
}

std::vector<double> node_profile(const Grid& g, const std::string& preset, double amp) {
    const auto [name, n] = parse_preset(preset, 1);
    std::vector<double> out(g.n_nodes(), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double s = g.node_x(i) / g.ell;
        if (name == "sine") {
            out[i] = amp * std::sin(n * std::numbers::pi * s);
        } else if (name == "bump") {
            const double b = 16.0 * s * s * (1.0 - s) * (1.0 - s);
            out[i] = amp * b * b;
        } else if (name == "zero") {
            out[i] = 0.0;
        } else {
            throw std::invalid_argument("unknown displacement preset '" + preset + "'");
        }
    }
    return out;
}

}  // namespace

InitialData make_initial_data(const Grid& g, const PhysParams& p, const InitialProfiles& profiles) {
    InitialData d;
    d.state = State::zeros(g);
    d.state.u = node_profile(g, profiles.u0, profiles.u0_amplitude);
    d.state.v = node_profile(g, profiles.u1, profiles.u1_amplitude);

    const auto [name, n] = parse_preset(profiles.theta0, 1);
    for (std::size_t j = 0; j < g.n_theta(); ++j) {
        const double s = g.cell_x(j) / g.ell;
        if (name == "cosine") d.state.theta[j] = profiles.theta0_amplitude * std::cos(n * std::numbers::pi * s);
        else if (name == "constant") d.state.theta[j] = profiles.theta0_amplitude;
        else if (name == "zero") d.state.theta[j] = 0.0;
        else throw std::invalid_argument("unknown temperature preset '" + profiles.theta0 + "'");
    }
    if (p.theta_bc == ThetaBC::neumann && profiles.project_theta_mean) project_theta_mean(d.state.theta);

    d.history = make_history(history_preset_from_string(profiles.f0), g, d.state.u);
    d.state.z = init_history(d.history, g, p.tau).z;
    return d;
}

double energy_weight(const PhysParams& p, const LyapunovOptions& opts) {
    return p.beta > 0.0 ? opts.xi_factor * 2.0 * p.tau * p.alpha * p.alpha / p.beta : 1.0;
}

Trajectory simulate(const SimulationConfig& cfg) {
    const PhysParams& p = cfg.params;
    p.validate();
    if (!(cfg.t_end >= 0.0)) throw std::invalid_argument("simulate: t_end must be nonnegative");
    if (cfg.record_every == 0) throw std::invalid_argument("simulate: record_every must be positive");
    const Grid g = Grid::make(cfg.nx, cfg.nrho, p.ell);
    const InitialData init = make_initial_data(g, p, cfg.initial);
    ImexStepper stepper(g, p, cfg.stepper, init.state);

    Trajectory traj;
    traj.xi = energy_weight(p, cfg.lyapunov);

    std::optional<LyapunovConstants> consts;
    if (p.beta > 0.0) {
        if (cfg.lambda > 0.0) {
            consts = lyapunov_constants(p, cfg.lambda, cfg.lyapunov);
        } else {
            for (double lam : default_lambda_grid()) {
                auto c = lyapunov_constants(p, lam, cfg.lyapunov);
                if (!c.feasible()) continue;
                if (check_conditions(c, p).verdict) {
                    consts = c;
                    break;
                }
                if (!consts) consts = c;
            }
        }
        if (consts && !consts->feasible()) consts.reset();
    }
    if (consts) traj.lambda = consts->lambda;

    auto record = [&]() {
        const State s = stepper.state();
        traj.times.push_back(stepper.time());
        traj.E.push_back(energy(s, g, p, traj.xi));
        traj.theta_mass.push_back(theta_mass(s, g));
        if (consts) {
            const auto lt = lyapunov_components(s, g, p, *consts);
            traj.V.push_back(lt.total);
            traj.Vtilde.push_back(lt.tilde);
            for (int i = 0; i < 6; ++i) traj.V_terms[i].push_back(lt.V[i]);
        } else {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            traj.V.push_back(nan);
            traj.Vtilde.push_back(nan);
            for (int i = 0; i < 6; ++i) traj.V_terms[i].push_back(nan);
        }
        if (cfg.keep_snapshots) traj.snapshots.push_back(s);
    };

    const auto nsteps = static_cast<std::size_t>(std::ceil(cfg.t_end / stepper.dt() - 1e-9));
    record();
    try {
        for (std::size_t k = 1; k <= nsteps; ++k) {
            stepper.step();
            if (k % cfg.record_every == 0 || k == nsteps) record();
        }
    } catch (const NumericalFailure& e) {
        traj.blowup_time = e.time();
    }
    return traj;
}

}  // namespace thermodelay
