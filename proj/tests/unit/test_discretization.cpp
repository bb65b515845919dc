/// @file test_discretization.cpp

#include "thermodelay/discretization.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace thermodelay;

namespace {

State random_state(const Grid& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d;
    State s = State::zeros(g);
    for (auto* v : {&s.u, &s.v, &s.z, &s.theta})
        for (double& x : *v) x = d(rng);
    return s;
}

}  // namespace

TEST_CASE("grid geometry") {
    const Grid g = Grid::make(7, 4, 2.0);
    CHECK(g.dx() == doctest::Approx(0.25));
    CHECK(g.n_cells() == 8);
    CHECK(g.node_x(0) == doctest::Approx(0.25));
    CHECK(g.cell_x(7) == doctest::Approx(1.875));
    double w = 0.0;
    for (std::size_t r = 0; r < g.n_rho(); ++r) w += g.rho_weight(r);
    CHECK(w == doctest::Approx(1.0));
    CHECK_THROWS(Grid::make(2, 4, 1.0));
    CHECK_THROWS(Grid::make(4, 1, 1.0));
}

TEST_CASE("pack and unpack round trip") {
    const Grid g = Grid::make(5, 3, 1.0);
    const State s = random_state(g, 1);
    const auto flat = pack(s);
    CHECK(flat.size() == Layout(g).dim);
    const State t = unpack(flat, g);
    CHECK(t.u == s.u);
    CHECK(t.v == s.v);
    CHECK(t.z == s.z);
    CHECK(t.theta == s.theta);
    CHECK(flat[Layout(g).z_index(2, 1)] == s.z_at(g, 2, 1));
}

TEST_CASE("summation by parts and the Laplacian factorisation") {
    for (ThetaBC bc : {ThetaBC::neumann, ThetaBC::dirichlet}) {
        const Grid g = Grid::make(9, 3, 1.0);
        const auto ops = build_operators(g, bc);
        const auto G = ops.grad_u.to_dense();
        const auto D = ops.div_flux.to_dense();
        for (std::size_t i = 0; i < G.rows(); ++i)
            for (std::size_t j = 0; j < G.cols(); ++j) CHECK(D(j, i) == -G(i, j));
        const auto DG = D * G;
        const auto L = ops.lap_u.to_dense();
        for (std::size_t i = 0; i < L.rows(); ++i)
            for (std::size_t j = 0; j < L.cols(); ++j) CHECK(DG(i, j) == doctest::Approx(L(i, j)).epsilon(1e-14));
    }
}

TEST_CASE("theta Laplacian: Neumann null space, conservative columns, Dirichlet ghost") {
    const Grid g = Grid::make(8, 3, 1.0);
    const auto neu = build_operators(g, ThetaBC::neumann).lap_theta;
    const std::vector<double> ones(g.n_cells(), 1.0);
    for (double x : neu.apply(ones)) CHECK(std::abs(x) < 1e-12);
    const auto nd = neu.to_dense();
    for (std::size_t k = 0; k < nd.cols(); ++k) {
        double col = 0.0;
        for (std::size_t j = 0; j < nd.rows(); ++j) col += nd(j, k) * g.dx();
        CHECK(std::abs(col) < 1e-12);
    }
    const auto dir = build_operators(g, ThetaBC::dirichlet).lap_theta;
    const double h2 = g.dx() * g.dx();
    CHECK(dir.at(0, 0) == doctest::Approx(-3.0 / h2));
    CHECK(dir.at(0, 1) == doctest::Approx(1.0 / h2));
    CHECK(dir.at(8, 8) == doctest::Approx(-3.0 / h2));
}

TEST_CASE("generator equals the hand-coded right-hand side on random states") {
    for (ThetaBC bc : {ThetaBC::neumann, ThetaBC::dirichlet}) {
        PhysParams p;
        p.alpha = 1.3;
        p.beta = 0.7;
        p.gamma = 0.9;
        p.kappa = 1.1;
        p.tau = 0.8;
        p.ell = 1.5;
        p.theta_bc = bc;
        const Grid g = Grid::make(6, 5, p.ell);
        const Generator gen = assemble_generator(g, p);
        const double dx = g.dx(), c = g.nrho / p.tau;
        const std::size_t nx = g.n_nodes(), nc = g.n_cells();
        for (unsigned trial = 0; trial < 100; ++trial) {
            const State s = random_state(g, 100 + trial);
            // strain of u and of v at the cells, with u = v = 0 at both ends
            auto cell_grad = [&](const std::vector<double>& w, std::size_t j) {
                const double right = j < nx ? w[j] : 0.0;
                const double left = j > 0 ? w[j - 1] : 0.0;
                return (right - left) / dx;
            };
            auto th = [&](long j) {
                if (j < 0) return bc == ThetaBC::neumann ? s.theta[0] : -s.theta[0];
                if (j >= static_cast<long>(nc)) return bc == ThetaBC::neumann ? s.theta[nc - 1] : -s.theta[nc - 1];
                return s.theta[static_cast<std::size_t>(j)];
            };
            State want = State::zeros(g);
            for (std::size_t i = 0; i < nx; ++i) {
                const double gv_r = cell_grad(s.v, i + 1), gv_l = cell_grad(s.v, i);
                const double delayed = (s.z_at(g, i + 1, g.nrho) - s.z_at(g, i, g.nrho)) / dx;
                const double theta_x = (s.theta[i + 1] - s.theta[i]) / dx;
                want.u[i] = s.v[i];
                want.v[i] = p.alpha * delayed + p.beta * (gv_r - gv_l) / dx - p.gamma * theta_x;
            }
            for (std::size_t j = 0; j < nc; ++j) {
                want.z_at(g, j, 0) = cell_grad(s.v, j);
                for (std::size_t r = 1; r < g.n_rho(); ++r)
                    want.z_at(g, j, r) = -c * (s.z_at(g, j, r) - s.z_at(g, j, r - 1));
                const long jj = static_cast<long>(j);
                want.theta[j] = p.kappa * (th(jj + 1) - 2.0 * th(jj) + th(jj - 1)) / (dx * dx) -
                                p.gamma * cell_grad(s.v, j);
            }
            const auto got = gen.apply(pack(s));
            const auto ref = pack(want);
            for (std::size_t k = 0; k < ref.size(); ++k)
                REQUIRE(got[k] == doctest::Approx(ref[k]).epsilon(1e-12).scale(1.0));
        }
    }
}

TEST_CASE("energy-space inner product with trapezoid weights") {
    PhysParams p;
    p.alpha = 2.0;
    const Grid g = Grid::make(4, 2, 1.0);
    const State a = random_state(g, 3), b = random_state(g, 4);
    const double xi = 0.6;
    const auto ops = build_operators(g, p.theta_bc);
    const auto ga = ops.grad_u.apply(a.u), gb = ops.grad_u.apply(b.u);
    double ref = 0.0;
    for (std::size_t j = 0; j < g.n_cells(); ++j) ref += p.alpha * ga[j] * gb[j] + a.theta[j] * b.theta[j];
    for (std::size_t i = 0; i < g.n_nodes(); ++i) ref += a.v[i] * b.v[i];
    for (std::size_t j = 0; j < g.n_cells(); ++j)
        for (std::size_t r = 0; r < g.n_rho(); ++r) ref += xi * g.rho_weight(r) * a.z_at(g, j, r) * b.z_at(g, j, r);
    ref *= g.dx();
    CHECK(inner_product_H(a, b, g, p, xi) == doctest::Approx(ref).epsilon(1e-14));
    CHECK(inner_product_H(pack(a), pack(b), g, p, xi) == doctest::Approx(ref).epsilon(1e-14));
}

TEST_CASE("constraint basis and its invariance under the generator") {
    for (ThetaBC bc : {ThetaBC::neumann, ThetaBC::dirichlet}) {
        PhysParams p;
        p.theta_bc = bc;
        const Grid g = Grid::make(5, 4, 1.0);
        const ConstraintBasis basis(g, bc);
        const Generator gen = assemble_generator(g, p);
        const auto ops = build_operators(g, bc);
        std::mt19937_64 rng(9);
        std::normal_distribution<double> d;
        std::vector<double> y(basis.reduced_dim());
        for (double& v : y) v = d(rng);
        const auto x = basis.expand(y);
        CHECK(basis.restrict_to(x) == y);
        const State s = unpack(x, g);
        const auto gu = ops.grad_u.apply(s.u);
        for (std::size_t j = 0; j < g.n_cells(); ++j) CHECK(s.z_at(g, j, 0) == doctest::Approx(gu[j]));
        const double mass = std::accumulate(s.theta.begin(), s.theta.end(), 0.0);
        if (bc == ThetaBC::neumann) CHECK(std::abs(mass) < 1e-12);

        const State ax = unpack(gen.apply(x), g);
        const auto gdu = ops.grad_u.apply(ax.u);
        for (std::size_t j = 0; j < g.n_cells(); ++j) CHECK(ax.z_at(g, j, 0) == doctest::Approx(gdu[j]));
        if (bc == ThetaBC::neumann)
            CHECK(std::abs(std::accumulate(ax.theta.begin(), ax.theta.end(), 0.0)) < 1e-10);

        const auto ar = reduced_generator(gen);
        CHECK(ar.rows() == basis.reduced_dim());
        const auto lhs = ar.apply(y);
        const auto rhs = basis.restrict_to(gen.apply(basis.expand(y)));
        for (std::size_t k = 0; k < lhs.size(); ++k) CHECK(lhs[k] == doctest::Approx(rhs[k]));
    }
}

TEST_CASE("theta mean projection") {
    std::vector<double> t = {1.0, 2.0, 6.0};
    project_theta_mean(t);
    CHECK(t[0] + t[1] + t[2] == doctest::Approx(0.0));
    CHECK(t[2] == doctest::Approx(3.0));
}
