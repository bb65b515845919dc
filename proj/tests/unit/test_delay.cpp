/// @file test_delay.cpp

#include "thermodelay/delay.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace thermodelay;

TEST_CASE("ring buffer indexing") {
    HistoryBuffer b(2, 3, 1.5);
    CHECK(b.capacity() == 4);
    CHECK(b.dt_lock() == doctest::Approx(0.5));
    CHECK_THROWS_AS(read_delayed(b), std::logic_error);
    for (int k = 0; k < 6; ++k) {
        const double v[2] = {double(k), -double(k)};
        b.push(v);
    }
    CHECK(b.fill() == 4);
    CHECK(b.lag(0)[0] == 5.0);
    CHECK(b.lag(3)[0] == 2.0);
    CHECK(b.tail()[1] == -2.0);
    CHECK(read_delayed(b) == std::vector<double>{2.0, -2.0});
}

TEST_CASE("history sampling and ring/field agreement") {
    const Grid g = Grid::make(4, 5, 1.0);
    const double tau = 2.0;
    const auto f0 = [](double x, double s) { return std::sin(x) * std::exp(s); };
    const auto init = init_history(f0, g, tau);
    for (std::size_t j = 0; j < g.n_cells(); ++j)
        for (std::size_t r = 0; r < g.n_rho(); ++r)
            CHECK(init.z[j * g.n_rho() + r] == doctest::Approx(f0(g.cell_x(j), -tau * g.rho(r))));
    const auto field = to_field(init.buffer, g);
    CHECK(field == init.z);
    CHECK(read_delayed(init.buffer) == read_delayed(init.z, g));
}

TEST_CASE("history presets and compatibility mismatch") {
    const Grid g = Grid::make(5, 4, 1.0);
    std::vector<double> u0(g.n_nodes());
    for (std::size_t i = 0; i < u0.size(); ++i) u0[i] = std::sin(std::numbers::pi * g.node_x(i));
    const auto h = make_history(HistoryPreset::decaying_exponential, g, u0);
    CHECK(h.rate == 1.0);
    CHECK(h.factor(-1.0) == doctest::Approx(std::exp(-1.0)));
    const auto init = init_history(h, g, 1.0, u0);
    CHECK(init.mismatch < 1e-14);
    const auto zero = make_history(HistoryPreset::zero, g, u0);
    const auto bad = init_history(zero, g, 1.0, u0, 1e300);
    CHECK(bad.mismatch > 0.1);
    CHECK(history_preset_from_string(to_string(HistoryPreset::constant_history)) == HistoryPreset::constant_history);
    CHECK_THROWS(history_preset_from_string("ramp"));
}

TEST_CASE("unit CFL transport is an exact shift") {
    const Grid g = Grid::make(3, 6, 1.0);
    const double tau = 3.0, dt = tau * g.drho();
    std::vector<double> z(g.n_cells() * g.n_rho());
    for (std::size_t k = 0; k < z.size(); ++k) z[k] = std::cos(0.3 * k);
    const auto before = z;
    const std::vector<double> inflow = {7.0, 8.0, 9.0, 10.0};
    advance_transport(z, g, inflow, dt, tau);
    for (std::size_t j = 0; j < g.n_cells(); ++j) {
        CHECK(z[j * g.n_rho()] == inflow[j]);
        for (std::size_t r = 1; r < g.n_rho(); ++r)
            CHECK(z[j * g.n_rho() + r] == doctest::Approx(before[j * g.n_rho() + r - 1]).epsilon(1e-15));
    }
    CHECK_THROWS_AS(advance_transport(z, g, inflow, 1.5 * dt, tau), std::domain_error);
    CHECK_NOTHROW(advance_transport(z, g, inflow, 1.5 * dt, tau, 1.0));
}

TEST_CASE("transport keeps values within the inflow and initial range") {
    const Grid g = Grid::make(3, 16, 1.0);
    for (double weight : {0.0, 0.5, 1.0}) {
        std::vector<double> z(g.n_cells() * g.n_rho());
        for (std::size_t k = 0; k < z.size(); ++k) z[k] = (k % 3 == 0) ? 1.0 : -1.0;
        const std::vector<double> inflow(g.n_cells(), 0.25);
        // theta-weighted upwinding is monotone when (1 - weight) * cfl <= 1
        const double cfl = weight == 0.0 ? 0.8 : 1.0;
        for (int n = 0; n < 40; ++n) advance_transport(z, g, inflow, cfl * g.drho(), 1.0, weight);
        CHECK(*std::max_element(z.begin(), z.end()) <= 1.0 + 1e-14);
        CHECK(*std::min_element(z.begin(), z.end()) >= -1.0 - 1e-14);
    }
}

TEST_CASE("explicit upwind transport converges at first order") {
    // tau z_t + z_rho = 0 with inflow q(t) and initial z(rho) = q(-tau rho): z(rho, t) = q(t - tau rho).
    const double tau = 1.0, t_end = 0.75;
    const auto q = [](double t) { return std::sin(2.0 * t) + 0.5 * std::cos(3.0 * t); };
    std::vector<double> err;
    for (int n : {32, 64, 128}) {
        const Grid g = Grid::make(3, n, 1.0);
        const double dt = 0.5 * tau * g.drho();
        std::vector<double> z(g.n_cells() * g.n_rho());
        for (std::size_t j = 0; j < g.n_cells(); ++j)
            for (std::size_t r = 0; r < g.n_rho(); ++r) z[j * g.n_rho() + r] = q(-tau * g.rho(r));
        const auto steps = static_cast<int>(std::lround(t_end / dt));
        for (int k = 1; k <= steps; ++k) {
            const std::vector<double> inflow(g.n_cells(), q(k * dt));
            advance_transport(z, g, inflow, dt, tau);
        }
        double e = 0.0;
        for (std::size_t r = 0; r < g.n_rho(); ++r) e = std::max(e, std::abs(z[r] - q(steps * dt - tau * g.rho(r))));
        err.push_back(e);
    }
    const double p1 = std::log2(err[0] / err[1]), p2 = std::log2(err[1] / err[2]);
    CHECK(p1 == doctest::Approx(1.0).epsilon(0.15));
    CHECK(p2 == doctest::Approx(1.0).epsilon(0.1));
}
