/// @file discretization.cpp

#include "thermodelay/discretization.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace thermodelay {

using Triplet = CsrMatrix::Triplet;

Grid Grid::make(int nx, int nrho, double ell) {
    if (nx < 3) throw std::invalid_argument("grid too small: nx must be >= 3");
    if (nrho < 2) throw std::invalid_argument("grid too small: nrho must be >= 2");
    if (!(ell > 0.0)) throw std::invalid_argument("grid: ell must be positive");
    Grid g;
    g.nx = nx;
    g.nrho = nrho;
    g.ell = ell;
    return g;
}

Layout::Layout(const Grid& g)
    : nx(g.n_nodes()), ncell(g.n_cells()), nrho_nodes(g.n_rho()) {
    u = 0;
    v = nx;
    z = 2 * nx;
    theta = z + ncell * nrho_nodes;
    dim = theta + g.n_theta();
}

State State::zeros(const Grid& g) {
    State s;
    s.u.assign(g.n_nodes(), 0.0);
    s.v.assign(g.n_nodes(), 0.0);
    s.z.assign(g.n_cells() * g.n_rho(), 0.0);
    s.theta.assign(g.n_theta(), 0.0);
    return s;
}

bool State::matches(const Grid& g) const {
    return u.size() == g.n_nodes() && v.size() == g.n_nodes() && z.size() == g.n_cells() * g.n_rho() &&
           theta.size() == g.n_theta();
}

std::vector<double> pack(const State& s) {
    std::vector<double> out;
    out.reserve(s.u.size() + s.v.size() + s.z.size() + s.theta.size());
    out.insert(out.end(), s.u.begin(), s.u.end());
    out.insert(out.end(), s.v.begin(), s.v.end());
    out.insert(out.end(), s.z.begin(), s.z.end());
    out.insert(out.end(), s.theta.begin(), s.theta.end());
    return out;
}

State unpack(std::span<const double> flat, const Grid& g) {
    const Layout L(g);
    if (flat.size() != L.dim)
        throw std::invalid_argument("unpack: length " + std::to_string(flat.size()) + " does not match grid (" +
                                    std::to_string(L.dim) + ")");
    State s;
    s.u.assign(flat.begin() + L.u, flat.begin() + L.v);
    s.v.assign(flat.begin() + L.v, flat.begin() + L.z);
    s.z.assign(flat.begin() + L.z, flat.begin() + L.theta);
    s.theta.assign(flat.begin() + L.theta, flat.end());
    return s;
}

namespace {

std::vector<Triplet> gradient_triplets(const Grid& g) {
    const std::size_t nx = g.n_nodes();
    const double inv = 1.0 / g.dx();
    std::vector<Triplet> t;
    for (std::size_t j = 0; j < g.n_cells(); ++j) {
        if (j < nx) t.push_back({j, j, inv});
        if (j >= 1) t.push_back({j, j - 1, -inv});
    }
    return t;
}

std::vector<Triplet> divergence_triplets(const Grid& g) {
    const double inv = 1.0 / g.dx();
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < g.n_nodes(); ++i) {
        t.push_back({i, i, -inv});
        t.push_back({i, i + 1, inv});
    }
    return t;
}

std::vector<Triplet> theta_laplacian_triplets(const Grid& g, ThetaBC bc) {
    const std::size_t n = g.n_theta();
    const double inv2 = 1.0 / (g.dx() * g.dx());
    // Ghost cells: even reflection for zero flux, odd for zero value at the wall.
    const double ghost = bc == ThetaBC::neumann ? 1.0 : -1.0;
    std::vector<Triplet> t;
    for (std::size_t j = 0; j < n; ++j) {
        double diag = -2.0 * inv2;
        if (j == 0 || j + 1 == n) diag += ghost * inv2;
        t.push_back({j, j, diag});
        if (j >= 1) t.push_back({j, j - 1, inv2});
        if (j + 1 < n) t.push_back({j, j + 1, inv2});
    }
    return t;
}

}  // namespace

Operators build_operators(const Grid& g, ThetaBC bc) {
    if (g.nx < 3 || g.nrho < 2) throw std::invalid_argument("build_operators: grid too small");
    Operators ops;
    const std::size_t nx = g.n_nodes(), nc = g.n_cells();
    ops.grad_u = CsrMatrix::from_triplets(nc, nx, gradient_triplets(g));
    ops.div_flux = CsrMatrix::from_triplets(nx, nc, divergence_triplets(g));
    ops.grad_theta = ops.div_flux;

    const double inv2 = 1.0 / (g.dx() * g.dx());
    std::vector<Triplet> lu;
    for (std::size_t i = 0; i < nx; ++i) {
        lu.push_back({i, i, -2.0 * inv2});
        if (i >= 1) lu.push_back({i, i - 1, inv2});
        if (i + 1 < nx) lu.push_back({i, i + 1, inv2});
    }
    ops.lap_u = CsrMatrix::from_triplets(nx, nx, std::move(lu));
    ops.lap_theta = CsrMatrix::from_triplets(g.n_theta(), g.n_theta(), theta_laplacian_triplets(g, bc));
    return ops;
}

Generator assemble_generator(const Grid& g, const PhysParams& p) {
    p.validate();
    if (g.nx < 3 || g.nrho < 2) throw std::invalid_argument("assemble_generator: grid too small");
    Generator gen{g, p, Layout(g), {}};
    const Layout& L = gen.layout;
    const std::size_t nx = L.nx, nc = L.ncell, nr = L.nrho_nodes, N = nr - 1;
    const double inv = 1.0 / g.dx();
    const double inv2 = inv * inv;
    const double c = 1.0 / (p.tau * g.drho());

    std::vector<Triplet> t;
    t.reserve(nx * 12 + nc * nr * 2 + nc * 6);

    for (std::size_t i = 0; i < nx; ++i) t.push_back({L.u + i, L.v + i, 1.0});

    // v rows: div(alpha z(., 1) + beta grad v) - gamma theta_x
    for (std::size_t i = 0; i < nx; ++i) {
        const std::size_t row = L.v + i;
        t.push_back({row, L.z_index(i + 1, N), p.alpha * inv});
        t.push_back({row, L.z_index(i, N), -p.alpha * inv});
        t.push_back({row, L.v + i, -2.0 * p.beta * inv2});
        if (i >= 1) t.push_back({row, L.v + i - 1, p.beta * inv2});
        if (i + 1 < nx) t.push_back({row, L.v + i + 1, p.beta * inv2});
        t.push_back({row, L.theta + i + 1, -p.gamma * inv});
        t.push_back({row, L.theta + i, p.gamma * inv});
    }

    // z rows: inflow row tracks grad v, interior rows upwind transport
    for (std::size_t j = 0; j < nc; ++j) {
        const std::size_t row0 = L.z_index(j, 0);
        if (j < nx) t.push_back({row0, L.v + j, inv});
        if (j >= 1) t.push_back({row0, L.v + j - 1, -inv});
        for (std::size_t r = 1; r < nr; ++r) {
            t.push_back({L.z_index(j, r), L.z_index(j, r), -c});
            t.push_back({L.z_index(j, r), L.z_index(j, r - 1), c});
        }
    }

    // theta rows: -gamma grad v + kappa Lap theta
    for (const auto& e : theta_laplacian_triplets(g, p.theta_bc))
        t.push_back({L.theta + e.row, L.theta + e.col, p.kappa * e.value});
    for (std::size_t j = 0; j < nc; ++j) {
        if (j < nx) t.push_back({L.theta + j, L.v + j, -p.gamma * inv});
        if (j >= 1) t.push_back({L.theta + j, L.v + j - 1, p.gamma * inv});
    }

    gen.matrix = CsrMatrix::from_triplets(L.dim, L.dim, std::move(t));
    return gen;
}

double inner_product_H(std::span<const double> a, std::span<const double> b, const Grid& g,
                       const PhysParams& p, double xi) {
    const Layout L(g);
    if (a.size() != L.dim || b.size() != L.dim) throw std::invalid_argument("inner_product_H: shape mismatch");
    const double dx = g.dx(), inv = 1.0 / dx;
    double strain = 0.0;
    for (std::size_t j = 0; j < L.ncell; ++j) {
        const double ua_r = j < L.nx ? a[L.u + j] : 0.0, ua_l = j >= 1 ? a[L.u + j - 1] : 0.0;
        const double ub_r = j < L.nx ? b[L.u + j] : 0.0, ub_l = j >= 1 ? b[L.u + j - 1] : 0.0;
        strain += (ua_r - ua_l) * inv * (ub_r - ub_l) * inv;
    }
    double vel = 0.0;
    for (std::size_t i = 0; i < L.nx; ++i) vel += a[L.v + i] * b[L.v + i];
    double heat = 0.0;
    for (std::size_t j = 0; j < g.n_theta(); ++j) heat += a[L.theta + j] * b[L.theta + j];
    double hist = 0.0;
    for (std::size_t j = 0; j < L.ncell; ++j)
        for (std::size_t r = 0; r < L.nrho_nodes; ++r)
            hist += g.rho_weight(r) * a[L.z_index(j, r)] * b[L.z_index(j, r)];
    return dx * (p.alpha * strain + vel + heat + xi * hist);
}

double inner_product_H(const State& a, const State& b, const Grid& g, const PhysParams& p, double xi) {
    if (!a.matches(g) || !b.matches(g)) throw std::invalid_argument("inner_product_H: shape mismatch");
    const auto pa = pack(a), pb = pack(b);
    return inner_product_H(pa, pb, g, p, xi);
}

ConstraintBasis::ConstraintBasis(const Grid& g, ThetaBC bc)
    : grid_(g), layout_(g), drop_theta_mean_(bc == ThetaBC::neumann) {
    reduced_dim_ = layout_.dim - layout_.ncell - (drop_theta_mean_ ? 1 : 0);
    grad_u_ = CsrMatrix::from_triplets(g.n_cells(), g.n_nodes(), gradient_triplets(g));
}

std::vector<double> ConstraintBasis::expand(std::span<const double> y) const {
    if (y.size() != reduced_dim_) throw std::invalid_argument("ConstraintBasis::expand: size mismatch");
    const Layout& L = layout_;
    std::vector<double> x(L.dim, 0.0);
    std::size_t k = 0;
    for (std::size_t i = 0; i < 2 * L.nx; ++i) x[i] = y[k++];
    for (std::size_t j = 0; j < L.ncell; ++j)
        for (std::size_t r = 1; r < L.nrho_nodes; ++r) x[L.z_index(j, r)] = y[k++];
    const std::size_t nth = grid_.n_theta() - (drop_theta_mean_ ? 1 : 0);
    double sum = 0.0;
    for (std::size_t j = 0; j < nth; ++j) {
        x[L.theta + j] = y[k++];
        sum += x[L.theta + j];
    }
    if (drop_theta_mean_) x[L.theta + nth] = -sum;
    const auto gu = grad_u_.apply(std::span<const double>(x.data() + L.u, L.nx));
    for (std::size_t j = 0; j < L.ncell; ++j) x[L.z_index(j, 0)] = gu[j];
    return x;
}

std::vector<double> ConstraintBasis::restrict_to(std::span<const double> x) const {
    if (x.size() != layout_.dim) throw std::invalid_argument("ConstraintBasis::restrict_to: size mismatch");
    const Layout& L = layout_;
    std::vector<double> y;
    y.reserve(reduced_dim_);
    for (std::size_t i = 0; i < 2 * L.nx; ++i) y.push_back(x[i]);
    for (std::size_t j = 0; j < L.ncell; ++j)
        for (std::size_t r = 1; r < L.nrho_nodes; ++r) y.push_back(x[L.z_index(j, r)]);
    const std::size_t nth = grid_.n_theta() - (drop_theta_mean_ ? 1 : 0);
    for (std::size_t j = 0; j < nth; ++j) y.push_back(x[L.theta + j]);
    return y;
}

DenseMatrix reduced_generator(const Generator& gen) {
    const ConstraintBasis basis(gen.grid, gen.params.theta_bc);
    const std::size_t n = basis.reduced_dim();
    DenseMatrix ar(n, n);
    std::vector<double> e(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        e[k] = 1.0;
        const auto col = basis.restrict_to(gen.apply(basis.expand(e)));
        e[k] = 0.0;
        for (std::size_t i = 0; i < n; ++i) ar(i, k) = col[i];
    }
    return ar;
}

void project_theta_mean(std::span<double> theta) {
    if (theta.empty()) return;
    const double mean = std::accumulate(theta.begin(), theta.end(), 0.0) / static_cast<double>(theta.size());
    for (double& x : theta) x -= mean;
}

}  // namespace thermodelay
