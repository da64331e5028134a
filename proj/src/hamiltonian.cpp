#include "effham/hamiltonian.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "effham/errors.hpp"

namespace effham {

namespace {

constexpr double kPi = std::numbers::pi;

double norm(std::span<const double> p) {
    double s = 0.0;
    for (double v : p) s += v * v;
    return std::sqrt(s);
}

void require_dim(std::size_t dim) {
    if (dim == 0 || dim > kMaxSpaceDim) {
        throw ConfigError({"hamiltonian dimension must be in [1, " +
                           std::to_string(kMaxSpaceDim) + "], got " + std::to_string(dim)});
    }
}

}  // namespace

double AnalyticHamiltonian::lip_u() const {
    if (u_lip) return *u_lip;
    if (transport) return transport->b_lip_u;
    return lip_C1.value_or(0.0);
}

AnalyticHamiltonian make_transport(std::size_t dim, TransportForm form, std::string name) {
    require_dim(dim);
    AnalyticHamiltonian H;
    H.name = std::move(name);
    H.dim = dim;
    H.x_period.assign(dim, 1.0);
    H.transport = form;
    H.geom_C = form.b_max_abs;
    // |D_pH| <= a_max, |D_uH| <= b_lip_u; x-derivatives are not declared by
    // the form, so C1 only covers what is known.
    H.lip_C1 = std::max(form.a_max, form.b_lip_u);
    H.eval = [a = form.a, b = form.b](double t, std::span<const double> x, double u,
                                      std::span<const double> p) {
        return b(t, x, u) + a(t, x) * norm(p);
    };
    return H;
}

AnalyticHamiltonian make_state_free(std::size_t dim,
                                    std::function<double(std::span<const double>)> H0,
                                    std::optional<double> lip_C1, std::optional<double> geom_C,
                                    std::string name) {
    require_dim(dim);
    AnalyticHamiltonian H;
    H.name = std::move(name);
    H.dim = dim;
    H.x_period.assign(dim, 1.0);
    H.lip_C1 = lip_C1;
    H.geom_C = geom_C;
    H.u_lip = 0.0;
    H.eval = [H0 = std::move(H0)](double, std::span<const double>, double,
                                  std::span<const double> p) { return H0(p); };
    return H;
}

AnalyticHamiltonian builtin(std::string_view name) {
    if (name == "first_case") {
        TransportForm form;
        form.a = [](double, std::span<const double> x) {
            return 1.0 - std::cos(6.0 * kPi * x[0]) / 2.0;
        };
        form.b = [](double, std::span<const double> x, double u) {
            return 2.0 * std::cos(2.0 * kPi * x[0]) + std::sin(8.0 * kPi * u);
        };
        form.a_min = 0.5;
        form.a_max = 1.5;
        form.b_max_abs = 3.0;
        form.b_lip_u = 8.0 * kPi;
        AnalyticHamiltonian H = make_transport(1, form, "first_case");
        H.u_period = 0.25;
        H.geom_C = 3.0;
        // |D_xH| <= 4pi + 3pi|p|, |D_uH| <= 8pi, |D_pH| <= 3/2.
        H.lip_C1 = 8.0 * kPi;
        return H;
    }
    if (name == "second_case") {
        TransportForm form;
        form.a = [](double, std::span<const double> x) {
            return 1.0 - std::cos(2.0 * kPi * x[0]) / 2.0 - std::sin(2.0 * kPi * x[1]) / 4.0;
        };
        form.b = [](double, std::span<const double> x, double u) {
            return std::cos(2.0 * kPi * x[0]) + std::cos(2.0 * kPi * x[1]) +
                   std::cos(2.0 * kPi * (x[0] - x[1])) + std::sin(2.0 * kPi * u);
        };
        form.a_min = 0.25;
        form.a_max = 1.75;
        form.b_max_abs = 4.0;
        form.b_lip_u = 2.0 * kPi;
        AnalyticHamiltonian H = make_transport(2, form, "second_case");
        H.u_period = 1.0;
        H.geom_C = 4.0;
        H.lip_C1 = 6.0 * kPi;
        return H;
    }
    if (name == "state_free_abs") {
        TransportForm form;
        form.a = [](double, std::span<const double>) { return 1.0; };
        form.b = [](double, std::span<const double>, double) { return 0.0; };
        form.a_min = 1.0;
        form.a_max = 1.0;
        form.b_max_abs = 0.0;
        form.b_lip_u = 0.0;
        AnalyticHamiltonian H = make_transport(1, form, "state_free_abs");
        H.geom_C = 0.0;
        H.lip_C1 = 1.0;
        return H;
    }
    throw UnknownName("unknown builtin hamiltonian '" + std::string(name) + "'");
}

std::vector<std::string> builtin_names() { return {"first_case", "second_case", "state_free_abs"}; }

double recession(const AnalyticHamiltonian& H, double t, std::span<const double> x, double u,
                 std::span<const double> p) {
    if (H.transport) return H.transport->a(t, x) * norm(p);

    constexpr std::array<double, 3> s_values{1e-4, 1e-5, 1e-6};
    std::array<double, kMaxSpaceDim> scaled{};
    std::array<double, 3> r{};
    for (std::size_t k = 0; k < s_values.size(); ++k) {
        const double s = s_values[k];
        for (std::size_t i = 0; i < p.size(); ++i) scaled[i] = p[i] / s;
        r[k] = s * H.eval(t, x, u, std::span<const double>(scaled.data(), p.size()));
    }
    // |s H(p/s) - H_inf| <= C s, so successive values may move by at most C (s_i + s_j).
    const double C = H.geom_C.value_or(1.0);
    const double scale = 1.0 + std::abs(r[2]);
    for (std::size_t k = 0; k + 1 < r.size(); ++k) {
        const double allowed = C * (s_values[k] + s_values[k + 1]) + 1e-9 * scale;
        if (!std::isfinite(r[k]) || std::abs(r[k] - r[k + 1]) > allowed) {
            throw NumericalLimitUnstable("recession limit of '" + H.name +
                                         "' does not settle: s*H(p/s) = " + std::to_string(r[0]) +
                                         ", " + std::to_string(r[1]) + ", " + std::to_string(r[2]));
        }
    }
    // Linear-in-s Richardson extrapolation from the two smallest s.
    return (10.0 * r[2] - r[1]) / 9.0;
}

LevelSetHamiltonian::LevelSetHamiltonian(AnalyticHamiltonian base, double coercivity_C2)
    : base_(std::move(base)), coercivity_C2_(coercivity_C2) {}

double LevelSetHamiltonian::operator()(double t, std::span<const double> x, double y,
                                       std::span<const double> px, double py) const {
    if (py == 0.0) return recession(t, x, y, px);
    if (base_.transport) {
        // Exact form a|p_x| + b|p_y| keeps F(.,0,0) = 0 and 1-homogeneity to rounding.
        return base_.transport->a(t, x) * norm(px) + base_.transport->b(t, x, y) * std::abs(py);
    }
    const double m = std::abs(py);
    std::array<double, kMaxSpaceDim> q{};
    for (std::size_t i = 0; i < px.size(); ++i) q[i] = px[i] / m;
    return m * base_.eval(t, x, y, std::span<const double>(q.data(), px.size()));
}

double LevelSetHamiltonian::recession(double t, std::span<const double> x, double y,
                                      std::span<const double> px) const {
    bool zero = true;
    for (double v : px) zero = zero && v == 0.0;
    if (zero) return 0.0;
    return effham::recession(base_, t, x, y, px);
}

LevelSetHamiltonian extend_levelset(const AnalyticHamiltonian& H) {
    if (!H.lip_C1) {
        throw MissingLipschitzConstant("hamiltonian '" + H.name +
                                       "' has no declared C1; its recession limit may not exist");
    }
    double C2 = 0.0;
    if (H.transport) {
        C2 = H.transport->a_min;
    } else {
        // min over sampled states and unit directions of H_inf.
        std::mt19937_64 rng(12345);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::normal_distribution<double> gauss(0.0, 1.0);
        C2 = std::numeric_limits<double>::infinity();
        std::array<double, kMaxSpaceDim> x{}, p{};
        for (int s = 0; s < 64; ++s) {
            const double t = unit(rng) * H.time_period;
            for (std::size_t k = 0; k < H.dim; ++k) x[k] = unit(rng) * H.x_period[k];
            const double u = unit(rng) * H.u_period;
            double n = 0.0;
            for (std::size_t k = 0; k < H.dim; ++k) {
                p[k] = gauss(rng);
                n += p[k] * p[k];
            }
            n = std::sqrt(n);
            for (std::size_t k = 0; k < H.dim; ++k) p[k] /= n;
            C2 = std::min(C2, recession(H, t, std::span<const double>(x.data(), H.dim), u,
                                        std::span<const double>(p.data(), H.dim)));
        }
    }
    return LevelSetHamiltonian(H, C2);
}

AssumptionReport check_assumptions(const AnalyticHamiltonian& H, std::size_t samples,
                                   std::uint64_t seed) {
    AssumptionReport rep;
    rep.samples = samples;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const std::size_t n = H.dim;

    std::array<double, kMaxSpaceDim> x{}, xs{}, p{}, ps{};
    auto xv = [&](auto& a) { return std::span<const double>(a.data(), n); };

    double per = 0.0, c_tx = 0.0, c_u = 0.0, c_p = 0.0, geo = 0.0, geo_far = 0.0;
    double coer10 = std::numeric_limits<double>::infinity();
    double coer100 = coer10, coer1000 = coer10;
    const double fd = 1e-6;

    for (std::size_t s = 0; s < samples; ++s) {
        const double t = unit(rng) * H.time_period;
        for (std::size_t k = 0; k < n; ++k) x[k] = unit(rng) * H.x_period[k];
        const double u = unit(rng) * H.u_period;
        const double radius = 10.0 * unit(rng);
        double pn = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            p[k] = gauss(rng);
            pn += p[k] * p[k];
        }
        pn = std::sqrt(pn);
        for (std::size_t k = 0; k < n; ++k) p[k] *= radius / pn;
        const double h0 = H(t, xv(x), u, xv(p));

        // Periodicity in t, each x axis, and u.
        per = std::max(per, std::abs(H(t + H.time_period, xv(x), u, xv(p)) - h0));
        per = std::max(per, std::abs(H(t, xv(x), u + H.u_period, xv(p)) - h0));
        for (std::size_t k = 0; k < n; ++k) {
            xs = x;
            xs[k] += H.x_period[k];
            per = std::max(per, std::abs(H(t, xv(xs), u, xv(p)) - h0));
        }

        // Central-difference gradient bounds.
        double gtx = (H(t + fd, xv(x), u, xv(p)) - H(t - fd, xv(x), u, xv(p))) / (2 * fd);
        double gtx2 = gtx * gtx;
        for (std::size_t k = 0; k < n; ++k) {
            xs = x;
            xs[k] += fd;
            const double hp = H(t, xv(xs), u, xv(p));
            xs[k] -= 2 * fd;
            const double g = (hp - H(t, xv(xs), u, xv(p))) / (2 * fd);
            gtx2 += g * g;
        }
        c_tx = std::max(c_tx, std::sqrt(gtx2) / (1.0 + radius));
        c_u = std::max(c_u,
                       std::abs(H(t, xv(x), u + fd, xv(p)) - H(t, xv(x), u - fd, xv(p))) / (2 * fd));
        double gp2 = 0.0, dot = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            ps = p;
            ps[k] += fd;
            const double hp = H(t, xv(x), u, xv(ps));
            ps[k] -= 2 * fd;
            const double g = (hp - H(t, xv(x), u, xv(ps))) / (2 * fd);
            gp2 += g * g;
            dot += g * p[k];
        }
        c_p = std::max(c_p, std::sqrt(gp2));
        if (radius > 1e-3) geo = std::max(geo, std::abs(dot - h0));

        // Far shell for the geometric bound and the coercivity proxy.
        for (double R : {10.0, 100.0, 1000.0}) {
            for (std::size_t k = 0; k < n; ++k) ps[k] = p[k] * R / radius;
            const double hR = H(t, xv(x), u, xv(ps));
            if (R == 10.0) coer10 = std::min(coer10, hR);
            if (R == 100.0) coer100 = std::min(coer100, hR);
            if (R == 1000.0) {
                coer1000 = std::min(coer1000, hR);
                const double step = fd * R;
                double d = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    std::array<double, kMaxSpaceDim> pp = ps;
                    pp[k] += step;
                    const double hp = H(t, xv(x), u, xv(pp));
                    pp[k] -= 2 * step;
                    d += (hp - H(t, xv(x), u, xv(pp))) / (2 * step) * ps[k];
                }
                geo_far = std::max(geo_far, std::abs(d - hR));
            }
        }
    }

    rep.periodicity.observed = per;
    rep.periodicity.pass = per <= 1e-9;
    rep.periodicity.detail = "max |H(shifted) - H| over t, x, u periods";

    const double c1_obs = std::max({c_tx, c_u, c_p});
    rep.regularity.observed = c1_obs;
    rep.regularity.pass = std::isfinite(c1_obs) &&
                          (!H.lip_C1 || c1_obs <= *H.lip_C1 * (1.0 + 1e-4) + 1e-6);
    rep.regularity.detail = "observed max(|D_(t,x)H|/(1+|p|), |D_uH|, |D_pH|) = " +
                            std::to_string(c_tx) + ", " + std::to_string(c_u) + ", " +
                            std::to_string(c_p);

    rep.coercivity.observed = coer1000;
    rep.coercivity.pass = coer100 > coer10 && coer1000 > coer100;
    rep.coercivity.detail = "min H at |p| = 10, 100, 1000: " + std::to_string(coer10) + ", " +
                            std::to_string(coer100) + ", " + std::to_string(coer1000);

    const double geo_all = std::max(geo, geo_far);
    rep.geometric.observed = geo_all;
    if (H.geom_C) {
        rep.geometric.pass = geo_all <= *H.geom_C * (1.0 + 1e-4) + 1e-4;
    } else {
        // Without a declared C the bound must at least not grow with |p|.
        rep.geometric.pass = std::isfinite(geo_all) && geo_far <= 2.0 * geo + 1.0;
    }
    rep.geometric.detail = "sup |D_pH.p - H| near / far shell: " + std::to_string(geo) + ", " +
                           std::to_string(geo_far);
    return rep;
}

}  // namespace effham
