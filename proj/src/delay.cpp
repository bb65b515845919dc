/// @file delay.cpp

#include "thermodelay/delay.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>
#include <string>

namespace thermodelay {

HistoryBuffer::HistoryBuffer(std::size_t ncell, int nrho, double tau)
    : ncell_(ncell), capacity_(static_cast<std::size_t>(nrho) + 1), dt_lock_(tau / nrho),
      data_(ncell * (static_cast<std::size_t>(nrho) + 1), 0.0) {
    if (nrho < 1 || !(tau > 0.0)) throw std::invalid_argument("HistoryBuffer: need nrho >= 1 and tau > 0");
}

void HistoryBuffer::push(std::span<const double> ux) {
    if (ux.size() != ncell_) throw std::invalid_argument("HistoryBuffer::push: width mismatch");
    head_ = (head_ + 1) % capacity_;
    std::copy(ux.begin(), ux.end(), data_.begin() + static_cast<std::ptrdiff_t>(head_ * ncell_));
    fill_ = std::min(fill_ + 1, capacity_);
}

std::span<const double> HistoryBuffer::lag(std::size_t k) const {
    if (capacity_ == 0) throw std::logic_error("HistoryBuffer: uninitialized");
    if (k >= fill_) throw std::logic_error("HistoryBuffer: lag " + std::to_string(k) + " not recorded yet");
    const std::size_t slot = (head_ + capacity_ - k) % capacity_;
    return {data_.data() + slot * ncell_, ncell_};
}

double SeparableHistory::factor(double s) const { return rate == 0.0 ? 1.0 : std::exp(rate * s); }

HistoryPreset history_preset_from_string(const std::string& name) {
    if (name == "zero") return HistoryPreset::zero;
    if (name == "constant_history") return HistoryPreset::constant_history;
    if (name == "decaying_exponential") return HistoryPreset::decaying_exponential;
    throw std::invalid_argument("unknown history preset '" + name + "'");
}

const char* to_string(HistoryPreset preset) {
    switch (preset) {
        case HistoryPreset::zero: return "zero";
        case HistoryPreset::constant_history: return "constant_history";
        case HistoryPreset::decaying_exponential: return "decaying_exponential";
    }
    return "?";
}

SeparableHistory make_history(HistoryPreset preset, const Grid& g, std::span<const double> u0) {
    SeparableHistory h;
    h.profile.assign(g.n_cells(), 0.0);
    if (preset == HistoryPreset::zero) return h;
    if (u0.size() != g.n_nodes()) throw std::invalid_argument("make_history: u0 size mismatch");
    const double inv = 1.0 / g.dx();
    for (std::size_t j = 0; j < g.n_cells(); ++j) {
        const double r = j < g.n_nodes() ? u0[j] : 0.0;
        const double l = j >= 1 ? u0[j - 1] : 0.0;
        h.profile[j] = (r - l) * inv;
    }
    h.rate = preset == HistoryPreset::decaying_exponential ? 1.0 : 0.0;
    return h;
}

namespace {

HistoryInit finish_init(std::vector<double> z, const Grid& g, double tau, std::span<const double> u0,
                        double tol) {
    HistoryInit out;
    const std::size_t nc = g.n_cells(), nr = g.n_rho();
    out.buffer = HistoryBuffer(nc, g.nrho, tau);
    std::vector<double> slice(nc);
    for (std::size_t r = nr; r-- > 0;) {
        for (std::size_t j = 0; j < nc; ++j) slice[j] = z[j * nr + r];
        out.buffer.push(slice);
    }
    if (!u0.empty()) {
        if (u0.size() != g.n_nodes()) throw std::invalid_argument("init_history: u0 size mismatch");
        const double inv = 1.0 / g.dx();
        double scale = 0.0;
        for (std::size_t j = 0; j < nc; ++j) {
            const double ux = ((j < g.n_nodes() ? u0[j] : 0.0) - (j >= 1 ? u0[j - 1] : 0.0)) * inv;
            out.mismatch = std::max(out.mismatch, std::abs(z[j * nr] - ux));
            scale = std::max(scale, std::abs(ux));
        }
        if (out.mismatch > tol * std::max(1.0, scale))
            std::cerr << "warning: history at s=0 differs from the strain of u0 by " << out.mismatch << "\n";
    }
    out.z = std::move(z);
    return out;
}

}  // namespace

HistoryInit init_history(const HistoryFunction& f0, const Grid& g, double tau, std::span<const double> u0,
                         double tol) {
    if (!f0) throw std::invalid_argument("init_history: empty history function");
    const std::size_t nc = g.n_cells(), nr = g.n_rho();
    std::vector<double> z(nc * nr);
    for (std::size_t j = 0; j < nc; ++j)
        for (std::size_t r = 0; r < nr; ++r) {
            const double val = f0(g.cell_x(j), -tau * g.rho(r));
            if (!std::isfinite(val))
                throw std::invalid_argument("init_history: history is not finite at x=" +
                                            std::to_string(g.cell_x(j)) + ", s=" + std::to_string(-tau * g.rho(r)));
            z[j * nr + r] = val;
        }
    return finish_init(std::move(z), g, tau, u0, tol);
}

HistoryInit init_history(const SeparableHistory& f0, const Grid& g, double tau, std::span<const double> u0,
                         double tol) {
    const std::size_t nc = g.n_cells(), nr = g.n_rho();
    if (f0.profile.size() != nc) throw std::invalid_argument("init_history: profile size mismatch");
    std::vector<double> z(nc * nr);
    for (std::size_t j = 0; j < nc; ++j)
        for (std::size_t r = 0; r < nr; ++r) z[j * nr + r] = f0.profile[j] * f0.factor(-tau * g.rho(r));
    return finish_init(std::move(z), g, tau, u0, tol);
}

void advance_transport(std::span<double> z, const Grid& g, std::span<const double> inflow, double dt, double tau,
                       double weight) {
    const std::size_t nc = g.n_cells(), nr = g.n_rho();
    if (z.size() != nc * nr || inflow.size() != nc) throw std::invalid_argument("advance_transport: size mismatch");
    if (!(dt > 0.0) || !(tau > 0.0)) throw std::invalid_argument("advance_transport: dt and tau must be positive");
    if (weight < 0.0 || weight > 1.0) throw std::invalid_argument("advance_transport: weight outside [0, 1]");
    const double cfl = dt / (tau * g.drho());
    if (weight == 0.0 && cfl > 1.0 + 1e-12)
        throw std::domain_error("advance_transport: CFL number " + std::to_string(cfl) + " exceeds 1");
    const double expl = (1.0 - weight) * cfl, impl = weight * cfl;
    for (std::size_t j = 0; j < nc; ++j) {
        double* line = z.data() + j * nr;
        double prev_old = line[0];
        line[0] = inflow[j];
        for (std::size_t r = 1; r < nr; ++r) {
            const double old = line[r];
            line[r] = (old - expl * (old - prev_old) + impl * line[r - 1]) / (1.0 + impl);
            prev_old = old;
        }
    }
}

std::vector<double> read_delayed(std::span<const double> z, const Grid& g) {
    const std::size_t nc = g.n_cells(), nr = g.n_rho();
    if (z.size() != nc * nr) throw std::logic_error("read_delayed: history field not initialized");
    std::vector<double> out(nc);
    for (std::size_t j = 0; j < nc; ++j) out[j] = z[j * nr + nr - 1];
    return out;
}

std::vector<double> read_delayed(const HistoryBuffer& buffer) {
    if (buffer.capacity() == 0 || buffer.fill() < buffer.capacity())
        throw std::logic_error("read_delayed: history buffer not filled");
    const auto t = buffer.tail();
    return {t.begin(), t.end()};
}

std::vector<double> to_field(const HistoryBuffer& buffer, const Grid& g) {
    const std::size_t nc = g.n_cells(), nr = g.n_rho();
    if (buffer.capacity() != nr || buffer.width() != nc || buffer.fill() < nr)
        throw std::logic_error("to_field: buffer does not match grid or is not filled");
    std::vector<double> z(nc * nr);
    for (std::size_t r = 0; r < nr; ++r) {
        const auto s = buffer.lag(r);
        for (std::size_t j = 0; j < nc; ++j) z[j * nr + r] = s[j];
    }
    return z;
}

}  // namespace thermodelay
