/// @file test_constants.cpp

#include "thermodelay/constants.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

using namespace thermodelay;

namespace {

PhysParams with_beta(double beta) {
    PhysParams p;
    p.beta = beta;
    return p;
}

double simpson(const std::function<double(double)>& f, int n) {
    const double h = 1.0 / n;
    double s = f(0.0) + f(1.0);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return s * h / 3.0;
}

}  // namespace

TEST_CASE("weight f solves its ODE and matches the boundary values") {
    for (double lam : {0.5, 1.0, 3.0}) {
        const double h = 1e-5;
        for (double r : {0.1, 0.5, 0.9}) {
            const auto g = [&](double x) { return std::exp(-lam * x) * f_weight(x, lam); };
            const double d = (g(r + h) - g(r - h)) / (2.0 * h);
            CHECK(d == doctest::Approx(-std::exp(-2.0 * lam * r)).epsilon(1e-8));
        }
        const auto c = lyapunov_constants(with_beta(1.0), lam);
        CHECK(c.Psi == doctest::Approx(c.h * c.Gamma).epsilon(1e-14));
        CHECK(c.Lambda == doctest::Approx(f_weight(0.0, lam)));
    }
    CHECK_THROWS_AS(f_weight(0.5, 0.0), std::domain_error);
    CHECK_THROWS_AS(f_weight(1.5, 1.0), std::domain_error);
}

TEST_CASE("Lambda = Psi + Gamma and Phi equals the integral of f squared") {
    for (double lam : {0.5, 1.0, 2.0, 5.0, 10.0}) {
        const auto c = lyapunov_constants(with_beta(1.0), lam);
        CHECK(std::abs(c.Lambda - c.Psi - c.Gamma) <= 4.0 * std::numeric_limits<double>::epsilon() * c.Lambda);
        const double quad = simpson([&](double r) { return f_weight(r, lam) * f_weight(r, lam); }, 100000);
        CHECK(c.Phi == doctest::Approx(quad).epsilon(1e-10));
        CHECK(c.A - 1.0 == doctest::Approx(c.A_minus_1).epsilon(1e-9));
    }
}

TEST_CASE("Poincare constants") {
    CHECK(poincare_constant(2.0, PoincareChoice::half_length_sq) == doctest::Approx(2.0));
    CHECK(poincare_constant(std::numbers::pi, PoincareChoice::sharp) == doctest::Approx(1.0));
}

TEST_CASE("the exp(4 lambda) witness certifies") {
    const double lam = 6.0;
    const auto rep = certify(with_beta(std::exp(4.0 * lam)), lam);
    CHECK(rep.verdict);
    CHECK(rep.failed().empty());
    CHECK(rep.get("xi-bound").satisfied);
}

TEST_CASE("beta = 0 fails the xi bound") {
    const auto rep = certify(with_beta(0.0), 1.0);
    CHECK_FALSE(rep.verdict);
    CHECK_FALSE(rep.get("xi-bound").satisfied);
}

TEST_CASE("certificate records carry the expected names") {
    const auto rep = certify(with_beta(100.0), 1.0);
    for (const char* name : {"xi-bound", "ak-window", "damping-dominance", "eps4-interval", "cross-term-split",
                             "strain-equivalence", "reduced-equivalence"})
        CHECK_NOTHROW(rep.get(name));
    CHECK_THROWS(rep.get("no-such-condition"));
}

TEST_CASE("decay rows are negative and n0 positive for a certified pair") {
    const PhysParams p = with_beta(std::exp(4.0));
    const auto c = lyapunov_constants(p, 1.0);
    REQUIRE(check_conditions(c, p).verdict);
    const auto rows = decay_rows(c, p);
    CHECK(rows.history < 0.0);
    CHECK(rows.strain < 0.0);
    CHECK(rows.strain_rate < 0.0);
    CHECK(rows.heat < 0.0);
    CHECK(std::abs(rows.n1_equality_residual) < 1e-12);
    CHECK(n0_from_constants(c, p) > 0.0);
    CHECK(c.n0 > 0.0);

    const PhysParams weak = with_beta(0.5);
    const auto cw = lyapunov_constants(weak, 1.0);
    if (!check_conditions(cw, weak).verdict) CHECK_THROWS_AS(n0_from_constants(cw, weak), std::domain_error);
}

TEST_CASE("find_beta0 is a verified crossing bounded by the witness") {
    const auto grid = default_lambda_grid();
    const auto r = find_beta0(with_beta(1.0), grid);
    CHECK(certify(with_beta(1.001 * r.beta0), r.lambda_star).verdict);
    for (double lam : grid) {
        const auto c = lyapunov_constants(with_beta(0.999 * r.beta0), lam);
        if (c.feasible()) CHECK_FALSE(check_conditions(c, with_beta(0.999 * r.beta0)).verdict);
    }
    CHECK(r.beta0 <= std::exp(4.0 * r.lambda_star));
    CHECK(r.per_lambda.size() == grid.size());

    const auto coarse = find_beta0(with_beta(1.0), grid, {}, 1e-4);
    const auto fine = find_beta0(with_beta(1.0), grid, {}, 5e-5);
    CHECK(std::abs(coarse.beta0 - fine.beta0) <= 1e-4 * coarse.beta0);
}

TEST_CASE("a beta sweep across beta0 flips the verdict exactly once") {
    const auto r = find_beta0(with_beta(1.0), default_lambda_grid());
    int flips = 0;
    bool prev = false;
    for (int i = 0; i <= 80; ++i) {
        const double beta = r.beta0 * std::pow(10.0, -1.0 + 2.0 * i / 80.0);
        const bool now = certify(with_beta(beta), r.lambda_star).verdict;
        if (i > 0 && now != prev) ++flips;
        if (i > 0) CHECK((now || !prev));
        prev = now;
    }
    CHECK(flips == 1);
}

TEST_CASE("find_beta0 without a feasible grid point throws") {
    CHECK_THROWS(find_beta0(with_beta(1.0), {}));
    CHECK_FALSE(lyapunov_constants(with_beta(1.0), 0.01).feasible());
    CHECK_THROWS_AS(find_beta0(with_beta(1.0), {0.01, 0.02}), std::runtime_error);
}
