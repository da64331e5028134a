#include "effham/operators.hpp"

#include <algorithm>
#include <array>
#include <cfloat>
#include <cmath>
#include <string>

#include "effham/errors.hpp"

namespace effham {

namespace {

constexpr std::size_t kMaxSlots = 2 * (kMaxSpaceDim + 1);

std::vector<double> node_coordinates(const PeriodicGrid& g) {
    std::vector<double> c(g.size() * g.dim());
    for (std::size_t l = 0; l < g.size(); ++l)
        g.coordinates(l, std::span<double>(c.data() + l * g.dim(), g.dim()));
    return c;
}

// First-order one-sided differences at node l, straight from the grid API.
void reference_differences(const PeriodicGrid& g, std::span<const double> w, std::size_t l,
                           std::span<const double> shift, std::span<double> q) {
    for (std::size_t k = 0; k < g.dim(); ++k) {
        const double h = g.step(k);
        q[2 * k] = (w[g.neighbor(l, k, 1)] - w[l]) / h + shift[k];
        q[2 * k + 1] = (w[l] - w[g.neighbor(l, k, -1)]) / h + shift[k];
    }
}

}  // namespace

// ---------------------------------------------------------------------------

LevelSetOperator::LevelSetOperator(NumericalHamiltonian flux, std::vector<double> P,
                                   const PeriodicGrid& grid)
    : SpatialOperator(grid), flux_(std::move(flux)), P_(std::move(P)) {
    std::vector<std::string> bad;
    if (grid.dim() != flux_.x_dim() + 1)
        bad.push_back("level-set grid needs " + std::to_string(flux_.x_dim() + 1) + " axes, got " +
                      std::to_string(grid.dim()));
    if (P_.size() != flux_.x_dim() + 1)
        bad.push_back("P needs " + std::to_string(flux_.x_dim() + 1) + " components, got " +
                      std::to_string(P_.size()));
    if (!bad.empty()) throw ConfigError(bad);
    coords_ = node_coordinates(grid);
    if (const auto* tf = flux_.transport(); tf && !flux_.time_dependent()) {
        const std::size_t n = flux_.x_dim(), d = grid.dim();
        a_.resize(grid.size());
        b_.resize(grid.size());
        for (std::size_t l = 0; l < grid.size(); ++l) {
            const std::span<const double> x(coords_.data() + l * d, n);
            a_[l] = tf->a(0.0, x);
            b_[l] = tf->b(0.0, x, coords_[l * d + n]);
        }
    }
}

double LevelSetOperator::cfl_dt() const {
    double rate = 0.0;
    for (std::size_t k = 0; k < grid().dim(); ++k) rate += 2.0 * flux_.lip_C1t() / grid().step(k);
    return 1.0 / rate;
}

void LevelSetOperator::evaluate(double t, std::span<const double> w, const OneSided& d,
                                std::span<double> out, Exec exec) const {
    (void)w;
    const std::size_t n = flux_.x_dim(), dim = grid().dim();
    const double* P = P_.data();
    if (const auto* tf = flux_.transport()) {
        for_each_node(grid().size(), exec, [&](std::size_t l) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const double m = neg_part(d.fwd[k][l] + P[k]);
                const double p = pos_part(d.bwd[k][l] + P[k]);
                s += m * m + p * p;
            }
            double a, b;
            if (!a_.empty()) {
                a = a_[l];
                b = b_[l];
            } else {
                const std::span<const double> x(coords_.data() + l * dim, n);
                a = tf->a(t, x);
                b = tf->b(t, x, coords_[l * dim + n]);
            }
            out[l] = a * std::sqrt(s) +
                     godunov_signed_abs(b, d.fwd[n][l] + P[n], d.bwd[n][l] + P[n]);
        });
        return;
    }
    for_each_node(grid().size(), exec, [&](std::size_t l) {
        std::array<double, kMaxSlots> q{};
        for (std::size_t k = 0; k < dim; ++k) {
            q[2 * k] = d.fwd[k][l] + P[k];
            q[2 * k + 1] = d.bwd[k][l] + P[k];
        }
        out[l] = flux_(t, std::span<const double>(coords_.data() + l * dim, n),
                       coords_[l * dim + n], std::span<const double>(q.data(), 2 * dim));
    });
}

double LevelSetOperator::evaluate_node(double t, std::span<const double> w, std::size_t l) const {
    const std::size_t n = flux_.x_dim(), dim = grid().dim();
    std::array<double, kMaxSlots> q{};
    reference_differences(grid(), w, l, P_, std::span<double>(q.data(), 2 * dim));
    std::array<double, kMaxSpaceDim + 1> c{};
    grid().coordinates(l, std::span<double>(c.data(), dim));
    return flux_(t, std::span<const double>(c.data(), n), c[n],
                 std::span<const double>(q.data(), 2 * dim));
}

// ---------------------------------------------------------------------------

GraphOperator::GraphOperator(AnalyticHamiltonian H, std::vector<double> slope, double eps,
                             const PeriodicGrid& grid, FluxKind flux, std::vector<double> sigma)
    : SpatialOperator(grid),
      H_(std::move(H)),
      slope_(std::move(slope)),
      eps_(eps),
      flux_(flux),
      sigma_(std::move(sigma)) {
    std::vector<std::string> bad;
    if (grid.dim() != H_.dim)
        bad.push_back("grid has " + std::to_string(grid.dim()) + " axes but H has dimension " +
                      std::to_string(H_.dim));
    if (slope_.size() != H_.dim)
        bad.push_back("slope needs " + std::to_string(H_.dim) + " components");
    if (!(eps_ > 0.0)) bad.push_back("eps must be positive");
    if (flux_ == FluxKind::godunov && !H_.transport)
        bad.push_back("godunov flux requires a transport-form hamiltonian; '" + H_.name +
                      "' is generic (use lax-friedrichs)");
    if (flux_ == FluxKind::lax_friedrichs) {
        if (sigma_.empty()) {
            double s = 0.0;
            if (H_.transport) {
                s = H_.transport->a_max;
            } else if (H_.lip_C1) {
                s = *H_.lip_C1;
            } else {
                throw MissingLipschitzConstant("lax-friedrichs default sigma needs lip_C1 on '" +
                                               H_.name + "'");
            }
            sigma_.assign(H_.dim, s);
        }
        if (sigma_.size() != H_.dim)
            bad.push_back("sigma needs " + std::to_string(H_.dim) + " components");
    }
    if (!bad.empty()) throw ConfigError(bad);

    const std::size_t d = grid.dim();
    xs_ = node_coordinates(grid);
    px_.assign(grid.size(), 0.0);
    for (std::size_t l = 0; l < grid.size(); ++l) {
        for (std::size_t k = 0; k < d; ++k) {
            px_[l] += slope_[k] * xs_[l * d + k];
            xs_[l * d + k] /= eps_;
        }
    }
    if (H_.transport && !H_.time_dependent) {
        a_.resize(grid.size());
        for (std::size_t l = 0; l < grid.size(); ++l)
            a_[l] = H_.transport->a(0.0, std::span<const double>(xs_.data() + l * d, d));
    }
}

double GraphOperator::cfl_dt() const {
    const double C = flux_ == FluxKind::godunov
                         ? H_.transport->a_max
                         : *std::max_element(sigma_.begin(), sigma_.end());
    double rate = H_.lip_u() / eps_;
    for (std::size_t k = 0; k < grid().dim(); ++k) rate += 2.0 * C / grid().step(k);
    return 1.0 / rate;
}

double GraphOperator::node_flux(double t, std::size_t l, double u,
                                std::span<const double> q) const {
    const std::size_t d = grid().dim();
    const double ts = t / eps_;
    const std::span<const double> x(xs_.data() + l * d, d);
    if (flux_ == FluxKind::godunov) {
        const auto& tf = *H_.transport;
        const double a = a_.empty() ? tf.a(ts, x) : a_[l];
        return tf.b(ts, x, u) + a * godunov_convex_norm(q);
    }
    std::array<double, kMaxSpaceDim> p{};
    double visc = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        p[k] = 0.5 * (q[2 * k] + q[2 * k + 1]);
        visc += sigma_[k] * 0.5 * (q[2 * k] - q[2 * k + 1]);
    }
    return H_(ts, x, u, std::span<const double>(p.data(), d)) - visc;
}

void GraphOperator::evaluate(double t, std::span<const double> w, const OneSided& d,
                             std::span<double> out, Exec exec) const {
    const std::size_t dim = grid().dim();
    for_each_node(grid().size(), exec, [&](std::size_t l) {
        std::array<double, kMaxSlots> q{};
        for (std::size_t k = 0; k < dim; ++k) {
            q[2 * k] = d.fwd[k][l] + slope_[k];
            q[2 * k + 1] = d.bwd[k][l] + slope_[k];
        }
        out[l] = node_flux(t, l, (w[l] + px_[l]) / eps_, std::span<const double>(q.data(), 2 * dim));
    });
}

double GraphOperator::evaluate_node(double t, std::span<const double> w, std::size_t l) const {
    const std::size_t dim = grid().dim();
    std::array<double, kMaxSlots> q{};
    reference_differences(grid(), w, l, slope_, std::span<double>(q.data(), 2 * dim));
    return node_flux(t, l, (w[l] + px_[l]) / eps_, std::span<const double>(q.data(), 2 * dim));
}

// ---------------------------------------------------------------------------

Marcher::Marcher(const SpatialOperator& op, Scheme scheme, Exec exec, double weno_eps)
    : op_(op), scheme_(scheme), exec_(exec), weno_eps_(weno_eps) {
    if (!(weno_eps > 0.0)) throw ConfigError({"WENO epsilon must be positive"});
    const std::size_t n = op.grid().size();
    s_.resize(n);
    if (scheme == Scheme::rk3_weno5) {
        for (std::size_t k = 0; k < op.grid().dim(); ++k) {
            if (op.grid().axis(k).count < 6)
                throw GridTooCoarse("WENO5 needs at least 6 nodes along axis " + std::to_string(k));
        }
        f1_.resize(n);
        f2_.resize(n);
    }
    if (scheme == Scheme::implicit_euler) {
        f1_.resize(n);
        prev_.resize(n);
    }
}

double Marcher::max_dt() const {
    return scheme_ == Scheme::rk3_weno5 ? 0.9 * op_.cfl_dt() : op_.cfl_dt();
}

void Marcher::rhs(double t, std::span<const double> w, std::span<double> s) {
    if (scheme_ == Scheme::rk3_weno5) {
        kernels::weno5(op_.stencil(), w, weno_eps_, d_, exec_);
    } else {
        kernels::first_order(op_.stencil(), w, d_, exec_);
    }
    op_.evaluate(t, w, d_, s, exec_);
}

std::size_t Marcher::step(double t, std::span<double> w, double dt, double alpha) {
    switch (scheme_) {
        case Scheme::explicit_euler:
            rhs(t, w, s_);
            kernels::euler_update(w, s_, dt, alpha, exec_);
            return 1;
        case Scheme::rk3_weno5: {
            if (alpha != 0.0) throw ConfigError({"rk3-weno5 does not support a discount"});
            rhs(t, w, s_);
            kernels::axpy_stage(f1_, 0.0, w, 1.0, w, s_, dt, exec_);
            rhs(t + dt, f1_, s_);
            kernels::axpy_stage(f2_, 0.75, w, 0.25, f1_, s_, dt, exec_);
            rhs(t + 0.5 * dt, f2_, s_);
            kernels::axpy_stage(w, 1.0 / 3.0, w, 2.0 / 3.0, f2_, s_, dt, exec_);
            return 3;
        }
        case Scheme::implicit_euler:
            std::copy(w.begin(), w.end(), prev_.begin());
            return implicit_step(t, prev_, w, dt, alpha) + 1;
    }
    return 0;
}

std::size_t Marcher::implicit_step(double t, std::span<const double> w_prev, std::span<double> w,
                                   double dt, double alpha) {
    if (f1_.size() != w.size()) f1_.resize(w.size());
    const double omega = std::min(1.0, 0.45 * op_.cfl_dt() / dt);
    const double inv = 1.0 / (1.0 + alpha * dt);
    double scale = 0.0;
    for (double v : w_prev) scale = std::max(scale, std::abs(v));
    // The defect cannot resolve below the rounding of (w - w_prev)/dt.
    const double tol = std::max(inner_tol, 16.0 * DBL_EPSILON * (1.0 + scale) / dt);

    rhs(t, w_prev, s_);
    for_each_node(w.size(), exec_,
                  [&](std::size_t l) { w[l] = (w_prev[l] - dt * s_[l]) * inv; });
    double defect = 0.0;
    for (std::size_t it = 1; it <= max_inner; ++it) {
        rhs(t, w, s_);
        for_each_node(w.size(), exec_, [&](std::size_t l) {
            f1_[l] = std::abs((w[l] - w_prev[l]) / dt + alpha * w[l] + s_[l]);
        });
        defect = 0.0;
        for (double v : f1_) {
            if (std::isnan(v)) {
                defect = v;
                break;
            }
            defect = std::max(defect, v);
        }
        if (!std::isfinite(defect)) break;
        if (defect <= tol) {
            last_defect_ = defect;
            return it;
        }
        for_each_node(w.size(), exec_, [&](std::size_t l) {
            w[l] = (1.0 - omega) * w[l] + omega * (w_prev[l] - dt * s_[l]) * inv;
        });
    }
    last_defect_ = defect;
    throw InnerIterationDiverged("implicit step defect " + std::to_string(defect) +
                                     " above tolerance after " + std::to_string(max_inner) +
                                     " iterations",
                                 defect);
}

}  // namespace effham
