/// @file test_observables.cpp

#include "thermodelay/observables.hpp"

#include <doctest.h>

#include <cmath>

using namespace thermodelay;

TEST_CASE("decay fit recovers an exact exponential") {
    std::vector<double> t, e;
    for (int i = 0; i <= 100; ++i) {
        t.push_back(0.1 * i);
        e.push_back(5.0 * std::exp(-0.3 * t.back()));
    }
    const auto f = decay_rate_fit(t, e, 0.0, 10.0);
    CHECK(std::abs(f.a0 - 0.3) < 1e-10);
    CHECK(std::abs(f.C - 5.0) < 1e-10);
    CHECK(std::abs(f.r2 - 1.0) < 1e-10);
    CHECK(f.samples == 101);

    const auto w = decay_rate_fit(t, e, 2.0, 4.0);
    CHECK(w.samples == 21);

    const std::vector<double> flat(t.size(), 2.0);
    CHECK(decay_rate_fit(t, flat, 0.0, 10.0).a0 == doctest::Approx(0.0));

    auto bad = e;
    bad[50] = 0.0;
    CHECK_THROWS_AS(decay_rate_fit(t, bad, 0.0, 10.0), std::domain_error);
}

TEST_CASE("energy and theta mass by hand") {
    const Grid g = Grid::make(3, 2, 1.0);
    PhysParams p;
    p.alpha = 2.0;
    State s = State::zeros(g);
    s.v = {1.0, 0.0, 0.0};
    s.theta = {1.0, 1.0, 1.0, 1.0};
    s.u = {0.0, 0.25, 0.0};
    for (std::size_t r = 0; r < g.n_rho(); ++r) s.z_at(g, 0, r) = 1.0;
    const double dx = g.dx();
    // u_x = (0, 1, -1, 0); ||u_x||^2 = 2 dx; z row 0 is one on trapezoid weights summing to 1
    const double want = 0.5 * (dx + p.alpha * 2.0 * dx + 4.0 * dx) + 0.7 * dx;
    CHECK(energy(s, g, p, 0.7) == doctest::Approx(want));
    CHECK(theta_mass(s, g) == doctest::Approx(1.0));
}

TEST_CASE("Lyapunov terms combine with the N weights") {
    PhysParams p;
    p.beta = std::exp(4.0);
    const auto c = lyapunov_constants(p, 1.0);
    const Grid g = Grid::make(5, 4, 1.0);
    State s = State::zeros(g);
    CHECK(lyapunov_components(s, g, p, c).total == 0.0);
    for (std::size_t i = 0; i < s.u.size(); ++i) {
        s.u[i] = std::sin(1.0 + i);
        s.v[i] = std::cos(2.0 * i);
    }
    for (std::size_t k = 0; k < s.z.size(); ++k) s.z[k] = std::sin(0.2 * k);
    for (std::size_t j = 0; j < s.theta.size(); ++j) s.theta[j] = 0.3 * j;
    const auto lt = lyapunov_components(s, g, p, c);
    double total = 0.0, tilde = 0.0;
    for (int i = 0; i < 6; ++i) total += c.N[i] * lt.V[i];
    for (int i = 0; i < 4; ++i) tilde += c.N[i] * lt.V[i];
    CHECK(lt.total == doctest::Approx(total));
    CHECK(lt.tilde == doctest::Approx(tilde));
    CHECK(lt.tilde > 0.0);
    const auto eb = equivalence_bounds(c, p);
    CHECK(eb.lower > 0.0);
    CHECK(eb.upper >= eb.lower);
    CHECK(lt.total >= eb.lower * lt.tilde * (1.0 - 1e-12));
    CHECK(lt.total <= eb.upper * lt.tilde * (1.0 + 1e-12));
}

TEST_CASE("decay inequality check on synthetic trajectories") {
    Trajectory tr;
    for (int i = 0; i <= 200; ++i) {
        const double t = 0.05 * i;
        tr.times.push_back(t);
        tr.V.push_back(std::exp(-t));
        tr.Vtilde.push_back(std::exp(-t));
    }
    const auto ok = check_decay_inequality(tr, 0.5);
    CHECK(ok.violations == 0);
    CHECK(ok.samples > 190);
    const auto bad = check_decay_inequality(tr, 2.0);
    CHECK(bad.violations == bad.samples);
    CHECK(bad.max_excess > 0.0);

    Trajectory tiny;
    tiny.times = {0.0, 1.0};
    tiny.V = tiny.Vtilde = {1.0, 1.0};
    CHECK_THROWS_AS(check_decay_inequality(tiny, 1.0), std::invalid_argument);
}

TEST_CASE("empirical equivalence constants") {
    Trajectory tr;
    tr.V = {2.0, 4.0, 3.0};
    tr.Vtilde = {1.0, 1.0, 2.0};
    tr.times = {0.0, 1.0, 2.0};
    const auto e = empirical_equivalence(tr);
    CHECK(e.lower == doctest::Approx(1.5));
    CHECK(e.upper == doctest::Approx(4.0));
}
