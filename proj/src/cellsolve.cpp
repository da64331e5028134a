#include "effham/cellsolve.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>

#include "effham/operators.hpp"

namespace effham {

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::implicit_euler: return "implicit-euler";
        case Scheme::explicit_euler: return "explicit-euler";
        case Scheme::rk3_weno5: return "rk3-weno5";
    }
    return "unknown";
}

Scheme parse_scheme(const std::string& name) {
    if (name == "implicit-euler" || name == "implicit_euler") return Scheme::implicit_euler;
    if (name == "explicit-euler" || name == "explicit_euler" || name == "euler")
        return Scheme::explicit_euler;
    if (name == "rk3-weno5" || name == "rk3_weno5") return Scheme::rk3_weno5;
    throw UnknownName("unknown scheme '" + name +
                      "' (expected implicit-euler, explicit-euler or rk3-weno5)");
}

std::string to_string(Statistic s) { return s == Statistic::median ? "median" : "mean"; }

Statistic parse_statistic(const std::string& name) {
    if (name == "median") return Statistic::median;
    if (name == "mean") return Statistic::mean;
    throw UnknownName("unknown statistic '" + name + "' (expected median or mean)");
}

// ---------------------------------------------------------------------------
// Rationals

namespace {

Rational normalized(long num, long den) {
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const long g = std::gcd(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    return {num, den};
}

bool mul_overflows(long a, long b) {
    long r;
    return __builtin_mul_overflow(a, b, &r);
}

}  // namespace

Rational parse_rational(std::string_view text) {
    const std::string s(text);
    auto fail = [&]() -> Rational { throw IrrationalSlope("not an exact rational: '" + s + "'"); };
    if (s.empty()) return fail();
    if (const auto slash = s.find('/'); slash != std::string::npos) {
        const Rational a = parse_rational(s.substr(0, slash));
        const Rational b = parse_rational(s.substr(slash + 1));
        if (b.num == 0 || mul_overflows(a.num, b.den) || mul_overflows(a.den, b.num)) return fail();
        return normalized(a.num * b.den, a.den * b.num);
    }
    std::size_t i = 0;
    bool neg = false;
    if (s[i] == '+' || s[i] == '-') neg = s[i++] == '-';
    long num = 0, den = 1;
    bool digits = false, dot = false;
    for (; i < s.size(); ++i) {
        const char c = s[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits = true;
            if (mul_overflows(num, 10)) return fail();
            num = num * 10 + (c - '0');
            if (dot) {
                if (mul_overflows(den, 10)) return fail();
                den *= 10;
            }
        } else if (c == '.' && !dot) {
            dot = true;
        } else {
            break;
        }
    }
    if (!digits) return fail();
    if (i < s.size()) {
        if (s[i] != 'e' && s[i] != 'E') return fail();
        std::size_t pos = 0;
        int e = 0;
        try {
            e = std::stoi(s.substr(i + 1), &pos);
        } catch (const std::exception&) {
            return fail();
        }
        if (pos != s.size() - i - 1 || std::abs(e) > 18) return fail();
        for (int k = 0; k < std::abs(e); ++k) {
            long& target = e > 0 ? num : den;
            if (mul_overflows(target, 10)) return fail();
            target *= 10;
        }
    }
    return normalized(neg ? -num : num, den);
}

Rational to_rational(double x, long max_den) {
    if (!std::isfinite(x)) throw IrrationalSlope("non-finite slope");
    const double tol = 1e-12 * std::max(1.0, std::abs(x));
    // Convergents h/k of the continued fraction of x.
    long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double r = x;
    for (int it = 0; it < 64; ++it) {
        const double a = std::floor(r);
        if (std::abs(a) > 1e15) break;
        const long ai = static_cast<long>(a);
        if (mul_overflows(ai, h1) || mul_overflows(ai, k1)) break;
        const long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
        if (k2 > max_den) break;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        if (std::abs(static_cast<double>(h1) / static_cast<double>(k1) - x) <= tol)
            return normalized(h1, k1);
        const double frac = r - a;
        if (frac <= 0.0) break;
        r = 1.0 / frac;
    }
    throw IrrationalSlope("no rational with denominator <= " + std::to_string(max_den) +
                          " matches " + std::to_string(x));
}

// ---------------------------------------------------------------------------
// Stencil evaluation and single implicit steps

double stencil_S(const NumericalHamiltonian& flux, std::span<const double> P, const GridFunction& W,
                 double t, std::span<const long> i) {
    const auto& g = W.grid();
    const std::size_t dim = g.dim(), n = flux.x_dim();
    if (dim != n + 1 || P.size() != dim)
        throw ConfigError({"stencil_S: grid, P and flux dimensions disagree"});
    std::array<double, 2 * (kMaxSpaceDim + 1)> q{};
    std::vector<long> j(i.begin(), i.end());
    for (std::size_t k = 0; k < dim; ++k) {
        q[2 * k] = fwd_diff(W, k, j) + P[k];
        j[k] -= 1;
        q[2 * k + 1] = fwd_diff(W, k, j) + P[k];
        j[k] += 1;
    }
    std::array<double, kMaxSpaceDim + 1> c{};
    g.coordinates(g.index(i), std::span<double>(c.data(), dim));
    return flux(t, std::span<const double>(c.data(), n), c[n],
                std::span<const double>(q.data(), 2 * dim));
}

GridFunction implicit_step(const NumericalHamiltonian& flux, std::span<const double> P,
                           double alpha, const GridFunction& W_prev, double t, double dt,
                           double inner_tol, std::size_t max_inner) {
    std::vector<std::string> bad;
    if (alpha < 0.0) bad.push_back("alpha must be >= 0");
    if (!(inner_tol > 0.0)) bad.push_back("inner_tol must be > 0");
    if (!(dt > 0.0)) bad.push_back("dt must be > 0");
    if (!bad.empty()) throw ConfigError(bad);
    LevelSetOperator op(flux, std::vector<double>(P.begin(), P.end()), W_prev.grid());
    Marcher m(op, Scheme::implicit_euler, Exec::serial);
    m.inner_tol = inner_tol;
    m.max_inner = max_inner;
    GridFunction out(W_prev.grid());
    m.implicit_step(t, W_prev.values(), out.values(), dt, alpha);
    return out;
}

double residual_ergodic(const NumericalHamiltonian& flux, std::span<const double> P, double lambda,
                        std::span<const GridFunction> W, double dt, double t0) {
    if (W.size() < 2) return 0.0;
    LevelSetOperator op(flux, std::vector<double>(P.begin(), P.end()), W[0].grid());
    Marcher m(op, Scheme::explicit_euler, Exec::serial);
    std::vector<double> s(W[0].size());
    double worst = 0.0;
    for (std::size_t n = 0; n + 1 < W.size(); ++n) {
        m.rhs(t0 + static_cast<double>(n) * dt, W[n + 1].values(), s);
        for (std::size_t l = 0; l < s.size(); ++l) {
            const double r = std::abs((W[n + 1][l] - W[n][l]) / dt + s[l] - lambda);
            worst = std::max(worst, r);
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Discounted periodic orbit

CellSolution solve_discounted(const CellProblemSpec& spec, double period_tol,
                              std::size_t max_periods, const std::optional<GridFunction>& W0) {
    std::vector<std::string> bad;
    if (!(spec.alpha > 0.0)) bad.push_back("discounted mode needs alpha > 0");
    if (!(period_tol > 0.0)) bad.push_back("period_tol must be > 0");
    if (max_periods == 0) bad.push_back("max_periods must be >= 1");
    if (!(spec.time.dt > 0.0) || spec.time.steps_per_period == 0)
        bad.push_back("time grid needs dt > 0 and at least one step per period");
    if (spec.scheme == Scheme::rk3_weno5)
        bad.push_back("the discounted solver supports implicit-euler and explicit-euler only");
    if (W0 && !(W0->grid() == spec.grid)) bad.push_back("initial guess grid differs from spec grid");
    if (!bad.empty()) throw ConfigError(bad);

    LevelSetOperator op(spec.flux, spec.P, spec.grid);
    Marcher m(op, spec.scheme, spec.exec);
    m.inner_tol = spec.inner_tol;
    m.max_inner = spec.max_inner;
    const double dt = spec.time.dt, alpha = spec.alpha;
    if (spec.scheme == Scheme::explicit_euler && dt > op.cfl_dt() * (1.0 + 1e-12)) {
        throw ConfigError({"explicit-euler needs dt <= " + std::to_string(op.cfl_dt()) +
                           " (monotone CFL), got " + std::to_string(dt)});
    }
    const std::size_t Nt = spec.time.steps_per_period, n = spec.grid.size();
    const double r = std::pow(1.0 + alpha * dt, -static_cast<double>(Nt));

    CellSolution sol;
    sol.method = "discounted";
    sol.dt = dt;
    std::vector<double> w = W0 ? std::vector<double>(W0->values().begin(), W0->values().end())
                               : std::vector<double>(n, 0.0);
    std::vector<double> start(n);
    double change = std::numeric_limits<double>::infinity();
    for (std::size_t period = 1; period <= max_periods; ++period) {
        start = w;
        for (std::size_t k = 0; k < Nt; ++k)
            sol.inner_iterations += m.step(static_cast<double>(k) * dt, w, dt, alpha);
        change = 0.0;
        double mean_change = 0.0;
        for (std::size_t l = 0; l < n; ++l) {
            const double dl = w[l] - start[l];
            if (!std::isfinite(dl)) change = std::numeric_limits<double>::infinity();
            change = std::max(change, std::abs(dl));
            mean_change += dl;
        }
        mean_change /= static_cast<double>(n);
        sol.iterations = period;
        if (change <= period_tol) {
            sol.converged = true;
            break;
        }
        if (!std::isfinite(change)) break;
        // S ignores constants, so the mean mode decays exactly by r per period;
        // jump to its limit.
        const double shift = mean_change * r / (1.0 - r);
        for (double& v : w) v += shift;
    }
    if (!sol.converged) {
        sol.W.emplace_back(spec.grid, w);
        sol.lambda = -alpha * mean(std::span<const double>(w));
        throw MaxPeriodsExceeded("no periodic orbit within " + std::to_string(max_periods) +
                                     " periods (last change " + std::to_string(change) + ")",
                                 std::move(sol), change);
    }

    sol.lambda = -alpha * mean(std::span<const double>(w));
    sol.lambda_error_bar = alpha * oscillation(std::span<const double>(w));

    // Final pass over one period: record the orbit and the ergodic residual.
    const bool keep_all = static_cast<double>(Nt + 1) * static_cast<double>(n) <= 2e7;
    sol.W.emplace_back(spec.grid, w);
    sol.oscillation.push_back(oscillation(std::span<const double>(w)));
    std::vector<double> prev(n), s(n);
    double residual = 0.0;
    for (std::size_t k = 0; k < Nt; ++k) {
        prev = w;
        const double t = static_cast<double>(k) * dt;
        sol.inner_iterations += m.step(t, w, dt, alpha);
        m.rhs(t, w, s);
        for (std::size_t l = 0; l < n; ++l)
            residual = std::max(residual, std::abs((w[l] - prev[l]) / dt + s[l] - sol.lambda));
        sol.oscillation.push_back(oscillation(std::span<const double>(w)));
        if (keep_all) sol.W.emplace_back(spec.grid, w);
    }
    sol.residual = residual;
    sol.max_oscillation = *std::max_element(sol.oscillation.begin(), sol.oscillation.end());
    return sol;
}

// ---------------------------------------------------------------------------
// Long-time marching

namespace {

double statistic(Statistic st, std::span<const double> v) {
    return st == Statistic::median ? median(v) : mean(v);
}

double trailing_variation(const std::vector<HistoryPoint>& h, double window) {
    if (h.empty()) return std::numeric_limits<double>::infinity();
    const double tau = h.back().tau;
    double lo = h.back().scaled, hi = lo;
    for (auto it = h.rbegin(); it != h.rend() && it->tau >= tau - window - 1e-12; ++it) {
        lo = std::min(lo, it->scaled);
        hi = std::max(hi, it->scaled);
    }
    return hi - lo;
}

/// Least-squares slope of stat against tau over the trailing half.
double trailing_slope(const std::vector<HistoryPoint>& h) {
    const double tau = h.back().tau;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t cnt = 0;
    for (const auto& p : h) {
        if (p.tau < 0.5 * tau) continue;
        sx += p.tau;
        sy += p.stat;
        ++cnt;
    }
    if (cnt < 2) return h.back().scaled;
    const double mx = sx / static_cast<double>(cnt), my = sy / static_cast<double>(cnt);
    for (const auto& p : h) {
        if (p.tau < 0.5 * tau) continue;
        sxx += (p.tau - mx) * (p.tau - mx);
        sxy += (p.tau - mx) * (p.stat - my);
    }
    return sxy / sxx;
}

CellSolution run_longtime(const SpatialOperator& op, std::vector<double> v, double dt_nominal,
                          Scheme scheme, const LongTimeOptions& o, std::string method,
                          double inner_tol = 1e-11, std::size_t max_inner = 2000) {
    std::vector<std::string> bad;
    if (!(o.tau_max > 0.0)) bad.push_back("tau_max must be > 0");
    if (!std::isfinite(dt_nominal)) bad.push_back("dt must be finite");
    if (!(o.window > 0.0)) bad.push_back("window must be > 0");
    if (!(o.record_every > 0.0)) bad.push_back("record interval must be > 0");
    if (!bad.empty()) throw ConfigError(bad);

    Marcher m(op, scheme, o.exec, o.weno_eps);
    if (dt_nominal <= 0.0) dt_nominal = m.max_dt();
    m.inner_tol = inner_tol;
    m.max_inner = max_inner;
    std::size_t sub = 1;
    if (scheme != Scheme::implicit_euler)
        sub = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::ceil(dt_nominal / m.max_dt() * (1.0 - 1e-12))));
    const double dt = dt_nominal / static_cast<double>(sub);
    const auto steps = std::max<long long>(1, std::llround(o.tau_max / dt_nominal));
    const auto rec = std::max<long long>(1, std::llround(o.record_every / dt_nominal));

    CellSolution sol;
    sol.method = std::move(method);
    sol.dt = dt;
    sol.substeps = sub;
    std::vector<double> prev(v.size());
    for (long long n = 1; n <= steps; ++n) {
        prev = v;
        const double t0 = static_cast<double>(n - 1) * dt_nominal;
        for (std::size_t j = 0; j < sub; ++j)
            sol.inner_iterations += m.step(t0 + static_cast<double>(j) * dt, v, dt);
        sol.iterations = static_cast<std::size_t>(n);
        if (n % rec != 0 && n != steps) continue;

        const double tau = static_cast<double>(n) * dt_nominal;
        sol.tau = tau;
        const bool finite = std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
        if (!finite) {
            sol.W.emplace_back(op.grid(), std::vector<double>(v.size(), 0.0));
            throw NotConverged("non-finite values at tau = " + std::to_string(tau), std::move(sol));
        }
        HistoryPoint hp;
        hp.tau = tau;
        hp.stat = statistic(o.stat, v);
        hp.scaled = hp.stat / tau;
        hp.node_minus_stat = v[0] - hp.stat;
        sol.history.push_back(hp);
        sol.oscillation.push_back(oscillation(std::span<const double>(v)));
        if (o.tol > 0.0 && tau >= o.window && trailing_variation(sol.history, o.window) <= o.tol) {
            sol.converged = true;
            break;
        }
    }

    const double step_done = sol.tau - static_cast<double>(sol.iterations - 1) * dt_nominal;
    sol.lambda = -trailing_slope(sol.history);
    sol.lambda_scaled = -sol.history.back().scaled;
    sol.lambda_error_bar = trailing_variation(sol.history, o.window);
    double res = 0.0;
    for (std::size_t l = 0; l < v.size(); ++l)
        res = std::max(res, std::abs((v[l] - prev[l]) / step_done + sol.lambda));
    sol.residual = res;
    sol.max_oscillation = *std::max_element(sol.oscillation.begin(), sol.oscillation.end());
    sol.W.emplace_back(op.grid(), std::move(v));
    if (o.tol <= 0.0) {
        sol.converged = true;
    } else if (!sol.converged) {
        throw NotConverged("stat/tau still varies by " + std::to_string(sol.lambda_error_bar) +
                               " over the trailing window at tau = " + std::to_string(sol.tau),
                           std::move(sol));
    }
    return sol;
}

}  // namespace

CellSolution solve_longtime(const CellProblemSpec& spec, const GridFunction& V0,
                            const LongTimeOptions& opt) {
    std::vector<std::string> bad;
    if (spec.alpha != 0.0) bad.push_back("long-time mode needs alpha = 0");
    if (!(V0.grid() == spec.grid)) bad.push_back("initial datum grid differs from spec grid");
    if (!bad.empty()) throw ConfigError(bad);
    LevelSetOperator op(spec.flux, spec.P, spec.grid);
    std::vector<double> v(V0.values().begin(), V0.values().end());
    return run_longtime(op, std::move(v), spec.time.dt, spec.scheme, opt, "longtime",
                        spec.inner_tol, spec.max_inner);
}

std::vector<long> im_period(const AnalyticHamiltonian& H, std::span<const Rational> p) {
    if (p.size() != H.dim)
        throw ConfigError({"slope needs " + std::to_string(H.dim) + " components"});
    const Rational ratio_u = to_rational(H.u_period);
    std::vector<long> q(H.dim);
    for (std::size_t k = 0; k < H.dim; ++k) {
        if (p[k].den <= 0) throw IrrationalSlope("slope denominator must be positive");
        const Rational X = to_rational(H.x_period[k]);
        // p X / U = (p.num X.num U.den) / (p.den X.den U.num)
        long num = p[k].num, den = p[k].den;
        Rational a = normalized(num, den);
        for (auto [mn, md] : {std::pair{X.num, X.den}, std::pair{ratio_u.den, ratio_u.num}}) {
            if (mul_overflows(a.num, mn) || mul_overflows(a.den, md))
                throw IrrationalSlope("slope period overflows");
            a = normalized(a.num * mn, a.den * md);
        }
        q[k] = a.den;
    }
    return q;
}

CellSolution solve_imbert_monneau(const AnalyticHamiltonian& H, std::span<const Rational> p,
                                  std::size_t nodes_per_unit, double dt, Scheme scheme,
                                  const LongTimeOptions& opt, FluxKind flux,
                                  std::vector<double> sigma) {
    const auto q = im_period(H, p);
    std::vector<Axis> axes;
    std::vector<double> slope;
    std::size_t total = 1;
    for (std::size_t k = 0; k < H.dim; ++k) {
        const double length = static_cast<double>(q[k]) * H.x_period[k];
        const double count = length * static_cast<double>(nodes_per_unit);
        if (std::abs(count - std::round(count)) > 1e-9 * count || count < 1.0)
            throw ConfigError({"nodes_per_unit does not fit the period on axis " + std::to_string(k)});
        axes.push_back({static_cast<std::size_t>(std::llround(count)), length});
        total *= axes.back().count;
        slope.push_back(p[k].value());
    }
    if (total > 50'000'000)
        throw ConfigError({"Imbert-Monneau cell of " + std::to_string(total) +
                           " nodes is too large; use the barles route"});
    PeriodicGrid grid(axes);
    GraphOperator op(H, slope, 1.0, grid, flux, std::move(sigma));
    return run_longtime(op, std::vector<double>(grid.size(), 0.0), dt, scheme, opt,
                        "imbert-monneau");
}

CellSolution solve_barles(const AnalyticHamiltonian& H, std::span<const double> p,
                          std::span<const std::size_t> nodes, double dt, Scheme scheme,
                          const LongTimeOptions& opt, FluxKind flux, bool full_y_period) {
    std::vector<std::string> bad;
    if (p.size() != H.dim) bad.push_back("slope needs " + std::to_string(H.dim) + " components");
    if (nodes.size() != H.dim + 1)
        bad.push_back("barles grid needs " + std::to_string(H.dim + 1) + " node counts");
    if (!bad.empty()) throw ConfigError(bad);
    std::vector<Axis> axes;
    for (std::size_t k = 0; k < H.dim; ++k) axes.push_back({nodes[k], H.x_period[k]});
    axes.push_back({nodes[H.dim], full_y_period ? 1.0 : H.u_period});
    PeriodicGrid grid(axes);
    std::vector<double> P(p.begin(), p.end());
    P.push_back(-1.0);
    LevelSetOperator op(make_flux(H, flux), P, grid);
    return run_longtime(op, std::vector<double>(grid.size(), 0.0), dt, scheme, opt, "barles");
}

}  // namespace effham
