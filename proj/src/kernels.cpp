#include "effham/kernels.hpp"

#include <limits>

#include "effham/errors.hpp"

namespace effham {

Stencil::Stencil(const PeriodicGrid& grid) : grid_(grid) {
    if (grid.size() > std::numeric_limits<std::uint32_t>::max())
        throw ConfigError({"grid too large for 32-bit neighbour tables"});
    const std::size_t d = grid.dim(), n = grid.size();
    plus_.assign(d, std::vector<std::uint32_t>(n));
    minus_.assign(d, std::vector<std::uint32_t>(n));
    for (std::size_t k = 0; k < d; ++k) {
        const std::size_t stride = grid.stride(k), count = grid.axis(k).count;
        for (std::size_t l = 0; l < n; ++l) {
            const std::size_t i = (l / stride) % count;
            const std::size_t base = l - i * stride;
            plus_[k][l] = static_cast<std::uint32_t>(base + ((i + 1) % count) * stride);
            minus_[k][l] = static_cast<std::uint32_t>(base + ((i + count - 1) % count) * stride);
        }
    }
}

void OneSided::resize(std::size_t dim, std::size_t n) {
    fwd.resize(dim);
    bwd.resize(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        fwd[k].resize(n);
        bwd[k].resize(n);
    }
}

namespace kernels {

void first_order(const Stencil& st, std::span<const double> w, OneSided& out, Exec exec) {
    const auto& g = st.grid();
    out.resize(g.dim(), g.size());
    for (std::size_t k = 0; k < g.dim(); ++k) {
        const double inv_h = 1.0 / g.step(k);
        const auto plus = st.plus(k);
        const auto minus = st.minus(k);
        double* fwd = out.fwd[k].data();
        double* bwd = out.bwd[k].data();
        for_each_node(g.size(), exec, [&](std::size_t l) {
            fwd[l] = (w[plus[l]] - w[l]) * inv_h;
            bwd[l] = (w[l] - w[minus[l]]) * inv_h;
        });
    }
}

double weno5_combine(double v1, double v2, double v3, double v4, double v5, double eps) noexcept {
    const double s1 = 13.0 / 12.0 * (v1 - 2 * v2 + v3) * (v1 - 2 * v2 + v3) +
                      0.25 * (v1 - 4 * v2 + 3 * v3) * (v1 - 4 * v2 + 3 * v3);
    const double s2 = 13.0 / 12.0 * (v2 - 2 * v3 + v4) * (v2 - 2 * v3 + v4) +
                      0.25 * (v2 - v4) * (v2 - v4);
    const double s3 = 13.0 / 12.0 * (v3 - 2 * v4 + v5) * (v3 - 2 * v4 + v5) +
                      0.25 * (3 * v3 - 4 * v4 + v5) * (3 * v3 - 4 * v4 + v5);
    const double a1 = 0.1 / ((eps + s1) * (eps + s1));
    const double a2 = 0.6 / ((eps + s2) * (eps + s2));
    const double a3 = 0.3 / ((eps + s3) * (eps + s3));
    const double sum = a1 + a2 + a3;
    const double p1 = v1 / 3.0 - 7.0 * v2 / 6.0 + 11.0 * v3 / 6.0;
    const double p2 = -v2 / 6.0 + 5.0 * v3 / 6.0 + v4 / 3.0;
    const double p3 = v3 / 3.0 + 5.0 * v4 / 6.0 - v5 / 6.0;
    return (a1 * p1 + a2 * p2 + a3 * p3) / sum;
}

void weno5(const Stencil& st, std::span<const double> w, double eps, OneSided& out, Exec exec) {
    const auto& g = st.grid();
    for (std::size_t k = 0; k < g.dim(); ++k) {
        if (g.axis(k).count < 6)
            throw GridTooCoarse("WENO5 needs at least 6 nodes along axis " + std::to_string(k));
    }
    out.resize(g.dim(), g.size());
    std::vector<double> d(g.size());
    for (std::size_t k = 0; k < g.dim(); ++k) {
        const double inv_h = 1.0 / g.step(k);
        const auto P = st.plus(k);
        const auto M = st.minus(k);
        for_each_node(g.size(), exec, [&](std::size_t l) { d[l] = (w[P[l]] - w[l]) * inv_h; });
        double* fwd = out.fwd[k].data();
        double* bwd = out.bwd[k].data();
        for_each_node(g.size(), exec, [&](std::size_t l) {
            const std::size_t m1 = M[l], m2 = M[m1], m3 = M[m2];
            const std::size_t p1 = P[l], p2 = P[p1];
            // d[j] is the forward difference at node j.
            bwd[l] = weno5_combine(d[m3], d[m2], d[m1], d[l], d[p1], eps);
            fwd[l] = weno5_combine(d[p2], d[p1], d[l], d[m1], d[m2], eps);
        });
    }
}

void euler_update(std::span<double> w, std::span<const double> s, double dt, double alpha,
                  Exec exec) {
    const double inv = 1.0 / (1.0 + alpha * dt);
    if (alpha == 0.0) {
        for_each_node(w.size(), exec, [&](std::size_t l) { w[l] -= dt * s[l]; });
    } else {
        for_each_node(w.size(), exec, [&](std::size_t l) { w[l] = (w[l] - dt * s[l]) * inv; });
    }
}

void axpy_stage(std::span<double> out, double c0, std::span<const double> a, double c1,
                std::span<const double> b, std::span<const double> s, double dt, Exec exec) {
    for_each_node(out.size(), exec,
                  [&](std::size_t l) { out[l] = c0 * a[l] + c1 * (b[l] - dt * s[l]); });
}

}  // namespace kernels
}  // namespace effham
