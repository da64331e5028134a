#include "effham/numflux.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <random>

#include "effham/errors.hpp"

namespace effham {

namespace {

constexpr std::size_t kMaxSlots = 2 * (kMaxSpaceDim + 1);

struct SamplePoint {
    double t = 0.0;
    std::array<double, kMaxSpaceDim> x{};
    double y = 0.0;
};

SamplePoint random_point(const AnalyticHamiltonian& H, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    SamplePoint s;
    s.t = unit(rng) * H.time_period;
    for (std::size_t k = 0; k < H.dim; ++k) s.x[k] = unit(rng) * H.x_period[k];
    s.y = unit(rng) * H.u_period;
    return s;
}

}  // namespace

std::string NumericalHamiltonian::kind_name() const {
    return kind_ == Kind::godunov_transport ? "godunov" : "lax-friedrichs";
}

double NumericalHamiltonian::operator()(double t, std::span<const double> x, double y,
                                        std::span<const double> q) const {
    const std::size_t n = x_dim();
    if (kind_ == Kind::godunov_transport) {
        const auto& tf = *target_->base().transport;
        return tf.a(t, x) * godunov_convex_norm(q.first(2 * n)) +
               godunov_signed_abs(tf.b(t, x, y), q[2 * n], q[2 * n + 1]);
    }
    std::array<double, kMaxSpaceDim> px{};
    double visc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        px[k] = 0.5 * (q[2 * k] + q[2 * k + 1]);
        visc += sigma_[k] * 0.5 * (q[2 * k] - q[2 * k + 1]);
    }
    const double py = 0.5 * (q[2 * n] + q[2 * n + 1]);
    visc += sigma_[n] * 0.5 * (q[2 * n] - q[2 * n + 1]);
    return (*target_)(t, x, y, std::span<const double>(px.data(), n), py) - visc;
}

NumericalHamiltonian godunov_transport(std::size_t x_dim, TransportForm form) {
    if (!(form.a_min > 0.0)) {
        throw NonCoercive("godunov_transport needs inf a > 0, declared a_min = " +
                          std::to_string(form.a_min));
    }
    NumericalHamiltonian g;
    g.kind_ = NumericalHamiltonian::Kind::godunov_transport;
    const double a_max = form.a_max, a_min = form.a_min, b_max = form.b_max_abs;
    g.target_ = std::make_shared<const LevelSetHamiltonian>(
        extend_levelset(make_transport(x_dim, std::move(form))));
    // Each square-root block is 1-Lipschitz in each of its arguments.
    g.lip_C1t_ = a_max + b_max;
    g.coer_C2t_ = a_min;
    g.coer_C3t_ = 0.0;
    return g;
}

NumericalHamiltonian godunov_transport(const AnalyticHamiltonian& H) {
    if (!H.transport) {
        throw ConfigError({"godunov flux requires a transport-form hamiltonian; '" + H.name +
                           "' is generic (use lax-friedrichs)"});
    }
    NumericalHamiltonian g = godunov_transport(H.dim, *H.transport);
    // Keep the caller's metadata (periods, name) on the target.
    AnalyticHamiltonian base = H;
    g.target_ = std::make_shared<const LevelSetHamiltonian>(extend_levelset(base));
    return g;
}

NumericalHamiltonian lax_friedrichs(LevelSetHamiltonian F, std::vector<double> sigma) {
    if (sigma.size() != F.x_dim() + 1) {
        throw ConfigError({"lax_friedrichs needs " + std::to_string(F.x_dim() + 1) +
                           " sigma values, got " + std::to_string(sigma.size())});
    }
    NumericalHamiltonian g;
    g.kind_ = NumericalHamiltonian::Kind::lax_friedrichs;
    const double C2 = F.coercivity_C2();
    g.target_ = std::make_shared<const LevelSetHamiltonian>(std::move(F));
    // Slot slope is (|dF/dp_k| + sigma_k)/2 <= sigma_k on the monotone range.
    g.lip_C1t_ = *std::max_element(sigma.begin(), sigma.end());
    g.coer_C2t_ = C2;
    g.coer_C3t_ = 0.0;
    g.sigma_ = std::move(sigma);
    return g;
}

std::vector<double> default_lf_sigma(const LevelSetHamiltonian& F, std::uint64_t seed) {
    const auto& H = F.base();
    const std::size_t n = F.x_dim();
    std::vector<double> lip(n + 1, 0.0);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 3.0);
    std::array<double, kMaxSpaceDim> px{}, pp{};
    const double fd = 1e-6;
    for (int s = 0; s < 2000; ++s) {
        const SamplePoint sp = random_point(H, rng);
        const std::span<const double> x(sp.x.data(), n);
        for (std::size_t k = 0; k < n; ++k) px[k] = gauss(rng);
        double py = gauss(rng);
        if (std::abs(py) < 1e-3) py = 1e-3;
        for (std::size_t k = 0; k < n; ++k) {
            pp = px;
            pp[k] += fd;
            const double fp = F(sp.t, x, sp.y, std::span<const double>(pp.data(), n), py);
            pp[k] -= 2 * fd;
            const double fm = F(sp.t, x, sp.y, std::span<const double>(pp.data(), n), py);
            lip[k] = std::max(lip[k], std::abs(fp - fm) / (2 * fd));
        }
        const std::span<const double> pxs(px.data(), n);
        const double fp = F(sp.t, x, sp.y, pxs, py + fd);
        const double fm = F(sp.t, x, sp.y, pxs, py - fd);
        lip[n] = std::max(lip[n], std::abs(fp - fm) / (2 * fd));
    }
    for (double& v : lip) v = std::max(1.1 * v, 1e-12);
    return lip;
}

NumericalHamiltonian make_flux(const AnalyticHamiltonian& H, FluxKind kind,
                               std::vector<double> sigma) {
    if (kind == FluxKind::godunov) return godunov_transport(H);
    LevelSetHamiltonian F = extend_levelset(H);
    if (sigma.empty()) sigma = default_lf_sigma(F);
    return lax_friedrichs(std::move(F), std::move(sigma));
}

std::string to_string(FluxKind kind) {
    return kind == FluxKind::godunov ? "godunov" : "lax-friedrichs";
}

FluxKind parse_flux_kind(const std::string& name) {
    if (name == "godunov") return FluxKind::godunov;
    if (name == "lax-friedrichs" || name == "lax_friedrichs" || name == "lf")
        return FluxKind::lax_friedrichs;
    throw UnknownName("unknown flux '" + name + "' (expected godunov or lax-friedrichs)");
}

MonotonicityReport check_monotone(const NumericalHamiltonian& g, std::size_t samples, double range,
                                  std::uint64_t seed) {
    MonotonicityReport rep;
    rep.samples = samples;
    const auto& H = g.target().base();
    const std::size_t n = g.x_dim(), m = g.slots();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> sym(-range, range), inc(0.0, range);
    std::array<double, kMaxSlots> q{}, qq{};
    for (std::size_t s = 0; s < samples; ++s) {
        const SamplePoint sp = random_point(H, rng);
        const std::span<const double> x(sp.x.data(), n);
        for (std::size_t k = 0; k < m; ++k) q[k] = sym(rng);
        const double g0 = g(sp.t, x, sp.y, std::span<const double>(q.data(), m));
        for (std::size_t k = 0; k < m; ++k) {
            qq = q;
            qq[k] += inc(rng);
            const double g1 = g(sp.t, x, sp.y, std::span<const double>(qq.data(), m));
            // Even slots (fwd) must not increase g; odd slots (bwd) must not decrease it.
            const double wrong = (k % 2 == 0) ? g1 - g0 : g0 - g1;
            if (wrong > 1e-12) {
                ++rep.violations;
                rep.worst_violation = std::max(rep.worst_violation, wrong);
            }
        }
    }
    return rep;
}

FluxPropertyReport check_flux_properties(const NumericalHamiltonian& g, std::size_t samples,
                                         double range, std::uint64_t seed) {
    FluxPropertyReport rep;
    rep.samples = samples;
    const auto mono = check_monotone(g, samples, range, seed);
    rep.monotonicity.worst = mono.worst_violation;
    rep.monotonicity.pass = mono.pass();

    const auto& F = g.target();
    const auto& H = F.base();
    const std::size_t n = g.x_dim(), m = g.slots();
    std::mt19937_64 rng(seed + 1);
    std::uniform_real_distribution<double> sym(-range, range), unit(0.0, 1.0);
    std::array<double, kMaxSlots> q{}, qq{};
    std::array<double, kMaxSpaceDim> px{}, xs{};
    double cons = 0.0, per = 0.0, lip_excess = -std::numeric_limits<double>::infinity();
    double coer = std::numeric_limits<double>::infinity(), yind = 0.0;
    const double fd = 1e-7;
    for (std::size_t s = 0; s < samples; ++s) {
        const SamplePoint sp = random_point(H, rng);
        const std::span<const double> x(sp.x.data(), n);
        const auto qs = std::span<const double>(q.data(), m);

        // Consistency on the diagonal q_fwd = q_bwd.
        for (std::size_t k = 0; k < n; ++k) {
            px[k] = sym(rng);
            q[2 * k] = q[2 * k + 1] = px[k];
        }
        const double py = sym(rng);
        q[2 * n] = q[2 * n + 1] = py;
        const double gd = g(sp.t, x, sp.y, qs);
        cons = std::max(cons,
                        std::abs(gd - F(sp.t, x, sp.y, std::span<const double>(px.data(), n), py)));

        // Periodicity in t, each x axis, y.
        for (std::size_t k = 0; k < m; ++k) q[k] = sym(rng);
        const double g0 = g(sp.t, x, sp.y, qs);
        per = std::max(per, std::abs(g(sp.t + H.time_period, x, sp.y, qs) - g0));
        per = std::max(per, std::abs(g(sp.t, x, sp.y + H.u_period, qs) - g0));
        for (std::size_t k = 0; k < n; ++k) {
            xs = sp.x;
            xs[k] += H.x_period[k];
            per = std::max(per, std::abs(g(sp.t, std::span<const double>(xs.data(), n), sp.y, qs) - g0));
        }

        // One-sided slot slopes against the declared C1t.
        for (std::size_t k = 0; k < m; ++k) {
            qq = q;
            qq[k] += fd;
            const double slope =
                std::abs(g(sp.t, x, sp.y, std::span<const double>(qq.data(), m)) - g0) / fd;
            lip_excess = std::max(lip_excess, slope - g.lip_C1t());
        }

        // Coercivity and y-independence with zero y slots.
        q[2 * n] = q[2 * n + 1] = 0.0;
        double blk = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double a = neg_part(q[2 * k]), b = pos_part(q[2 * k + 1]);
            blk += a * a + b * b;
        }
        const double gz = g(sp.t, x, sp.y, qs);
        coer = std::min(coer, gz - (g.coer_C2t() * std::sqrt(blk) - g.coer_C3t()));
        const double y2 = unit(rng) * H.u_period;
        yind = std::max(yind, std::abs(g(sp.t, x, y2, qs) - gz));
    }
    rep.consistency = {cons <= 1e-12, cons};
    rep.periodicity = {per <= 1e-9, per};
    rep.lipschitz = {lip_excess <= 1e-8, lip_excess};
    rep.coercivity = {coer >= -1e-12, coer};
    rep.y_independence = {yind <= 1e-14, yind};
    return rep;
}

}  // namespace effham
