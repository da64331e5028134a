#include "effham/homog.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <sstream>

#include "effham/errors.hpp"
#include "effham/operators.hpp"

namespace effham {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

bool is_integer_multiple(double value, double unit) {
    const double r = value / unit;
    return std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, std::abs(r));
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// Piecewise-linear table evaluation with a binary-search fast path for
// standard 1D tables; bit-identical to interpolate().
class TableInterpolant {
public:
    explicit TableInterpolant(EffHamTable table) : table_(std::move(table)) {
        if (table_.dim != 1 || table_.simplices.empty()) return;
        try {
            if (triangulate(table_.vertices, 1) != table_.simplices) return;
        } catch (const ConfigError&) {
            return;
        }
        for (const auto& s : table_.simplices) {
            segments_.push_back({table_.vertices[s[0]][0], table_.vertices[s[1]][0],
                                 table_.values[s[0]], table_.values[s[1]]});
        }
        std::sort(segments_.begin(), segments_.end(), [](const Segment& a, const Segment& b) {
            return std::min(a.a, a.b) < std::min(b.a, b.b);
        });
        for (const auto& s : segments_) {
            lo_.push_back(std::min(s.a, s.b));
            hi_.push_back(std::max(s.a, s.b));
        }
    }

    double operator()(std::span<const double> p) const {
        if (segments_.empty()) return interpolate(table_, p);
        const double x = p[0];
        if (x < lo_.front() || x > hi_.back()) return interpolate(table_, p);
        auto k = static_cast<std::size_t>(std::upper_bound(lo_.begin(), lo_.end(), x) - lo_.begin());
        k = k == 0 ? 0 : k - 1;
        const Segment& s = segments_[k];
        if (x == s.a) return s.va;
        if (x == s.b) return s.vb;
        const double w1 = (x - s.a) / (s.b - s.a);
        const double w0 = 1.0 - w1;
        return w0 * s.va + w1 * s.vb;
    }

    const EffHamTable& table() const noexcept { return table_; }

private:
    struct Segment {
        double a, b, va, vb;
    };
    EffHamTable table_;
    std::vector<Segment> segments_;
    std::vector<double> lo_, hi_;
};

double max_edge_slope(const EffHamTable& table) {
    return verify_table(table, std::numeric_limits<double>::infinity()).max_edge_slope;
}

void check_datum(const InitialDatum& u0, const PeriodicGrid& grid) {
    std::vector<std::string> bad;
    if (u0.dim() != grid.dim())
        bad.push_back("initial datum has dimension " + std::to_string(u0.dim()) +
                      " but the grid has " + std::to_string(grid.dim()) + " axes");
    if (u0.periodic) {
        if (u0.period.size() != grid.dim()) {
            bad.push_back("initial datum needs one period per axis");
        } else {
            for (std::size_t k = 0; k < grid.dim(); ++k) {
                if (!is_integer_multiple(grid.axis(k).period, u0.period[k]))
                    bad.push_back("domain period " + fmt(grid.axis(k).period) + " on axis " +
                                  std::to_string(k) + " is not a multiple of the datum period " +
                                  fmt(u0.period[k]));
            }
        }
    }
    if (!bad.empty()) throw IncompatiblePeriods(ConfigError(bad).what());
}

GridFunction remainder_of(const InitialDatum& u0, const PeriodicGrid& grid) {
    GridFunction w(grid, 0.0);
    if (!u0.periodic) return w;
    std::vector<double> x(grid.dim());
    for (std::size_t l = 0; l < grid.size(); ++l) {
        grid.coordinates(l, x);
        w[l] = u0.periodic(x);
    }
    return w;
}

using StepHook = std::function<void(std::span<const double>)>;

Trajectory march(const SpatialOperator& op, GridFunction w, std::vector<double> slope, double T,
                 const MarchOptions& opt, const StepHook& before_step) {
    if (!(T >= 0.0) || !std::isfinite(T)) throw ConfigError({"final time T must be >= 0"});
    Marcher m(op, Scheme::explicit_euler, opt.exec);
    const double cfl = m.max_dt();
    const double target = opt.dt > 0.0 ? std::min(opt.dt, cfl) : cfl;
    std::size_t N = 0;
    if (T > 0.0) {
        const double q = T / target;
        N = static_cast<std::size_t>(std::ceil(q * (1.0 - 1e-12)));
        N = std::max<std::size_t>(N, 1);
    }
    const double dt = N > 0 ? T / static_cast<double>(N) : 0.0;

    Trajectory tr;
    tr.grid = op.grid();
    tr.slope = std::move(slope);
    tr.dt = dt;
    tr.steps = N;
    tr.times.push_back(0.0);
    tr.frames.push_back(w);
    std::size_t every = N + 1;
    if (opt.record_every > 0.0 && dt > 0.0)
        every = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(opt.record_every / dt)));
    for (std::size_t n = 0; n < N; ++n) {
        const double t = static_cast<double>(n) * dt;
        if (before_step) before_step(w.values());
        m.step(t, w.values(), dt);
        if (!w.all_finite())
            throw NumericalLimitUnstable("solution became non-finite at t = " + fmt(t + dt));
        if ((n + 1) % every == 0 && n + 1 < N) {
            tr.times.push_back(static_cast<double>(n + 1) * dt);
            tr.frames.push_back(w);
        }
    }
    if (N > 0) {
        tr.times.push_back(T);
        tr.frames.push_back(std::move(w));
    }
    return tr;
}

}  // namespace

// ---------------------------------------------------------------------------

double InitialDatum::operator()(std::span<const double> x) const {
    double v = 0.0;
    for (std::size_t k = 0; k < slope.size(); ++k) v += slope[k] * x[k];
    if (periodic) v += periodic(x);
    return v;
}

InitialDatum affine_datum(std::vector<double> slope) {
    InitialDatum u;
    std::ostringstream name;
    name.precision(17);
    name << "affine:";
    for (std::size_t k = 0; k < slope.size(); ++k) name << (k ? "," : "") << slope[k];
    u.name = name.str();
    u.slope = std::move(slope);
    return u;
}

InitialDatum sine_datum(double amplitude) {
    InitialDatum u;
    u.name = "sin:" + fmt(amplitude);
    u.slope = {0.0};
    u.period = {1.0};
    u.periodic_lip = kTwoPi * std::abs(amplitude);
    u.periodic = [amplitude](std::span<const double> x) {
        return amplitude * std::sin(kTwoPi * x[0]);
    };
    return u;
}

InitialDatum parse_initial_datum(const std::string& text) {
    auto number = [&](const std::string& s) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos == s.size() && std::isfinite(v)) return v;
        } catch (const std::exception&) {
        }
        throw ConfigError({"initial datum '" + text + "': '" + s + "' is not a number"});
    };
    if (text.rfind("affine:", 0) == 0) {
        std::vector<double> slope;
        std::stringstream ss(text.substr(7));
        std::string item;
        while (std::getline(ss, item, ',')) slope.push_back(number(item));
        if (slope.empty() || slope.size() > 2)
            throw ConfigError({"initial datum '" + text + "' needs 1 or 2 slope components"});
        return affine_datum(std::move(slope));
    }
    if (text == "sin") return sine_datum(1.0);
    if (text.rfind("sin:", 0) == 0) return sine_datum(number(text.substr(4)));
    throw UnknownName("unknown initial datum '" + text + "' (expected affine:p or sin[:amplitude])");
}

GridFunction Trajectory::full(std::size_t k) const {
    GridFunction u = frames.at(k);
    std::vector<double> x(grid.dim());
    for (std::size_t l = 0; l < grid.size(); ++l) {
        grid.coordinates(l, x);
        for (std::size_t d = 0; d < slope.size(); ++d) u[l] += slope[d] * x[d];
    }
    return u;
}

AnalyticHamiltonian table_hamiltonian(const EffHamTable& table) {
    if (table.size() < table.dim + 1 || table.simplices.empty())
        throw ConfigError({"table has no simplices to interpolate on"});
    auto interp = std::make_shared<const TableInterpolant>(table);
    AnalyticHamiltonian H = make_state_free(
        table.dim, [interp](std::span<const double> p) { return (*interp)(p); },
        max_edge_slope(table), std::nullopt, "table");
    return H;
}

Trajectory solve_homogenized(const EffHamTable& table, const InitialDatum& u0,
                             const PeriodicGrid& grid, double T, const MarchOptions& opt) {
    check_datum(u0, grid);
    if (table.dim != grid.dim())
        throw ConfigError({"table dimension " + std::to_string(table.dim) +
                           " does not match the grid dimension " + std::to_string(grid.dim())});
    AnalyticHamiltonian H = table_hamiltonian(table);
    const double sigma = std::max(*H.lip_C1, 1e-12);
    GraphOperator op(H, u0.slope, 1.0, grid, FluxKind::lax_friedrichs,
                     std::vector<double>(grid.dim(), sigma));

    const std::size_t d = grid.dim();
    const Stencil& st = op.stencil();
    // Every combination of one-sided slopes must stay inside the hull; the
    // bounding box of the observed slopes is tested first.
    auto check = [&](std::span<const double> w) {
        std::vector<double> lo(d, std::numeric_limits<double>::infinity());
        std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
        for (std::size_t k = 0; k < d; ++k) {
            const double h = grid.step(k);
            const auto plus = st.plus(k);
            for (std::size_t l = 0; l < w.size(); ++l) {
                const double s = (w[plus[l]] - w[l]) / h + u0.slope[k];
                lo[k] = std::min(lo[k], s);
                hi[k] = std::max(hi[k], s);
            }
        }
        std::vector<double> corner(d);
        bool box_inside = true;
        for (std::size_t mask = 0; mask < (std::size_t{1} << d) && box_inside; ++mask) {
            for (std::size_t k = 0; k < d; ++k) corner[k] = (mask >> k) & 1 ? hi[k] : lo[k];
            box_inside = in_hull(table, corner);
        }
        if (box_inside) return;
        for (std::size_t l = 0; l < w.size(); ++l) {
            for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
                for (std::size_t k = 0; k < d; ++k) {
                    const auto nb = (mask >> k) & 1 ? st.plus(k)[l] : st.minus(k)[l];
                    const double h = grid.step(k);
                    corner[k] = ((mask >> k) & 1 ? w[nb] - w[l] : w[l] - w[nb]) / h + u0.slope[k];
                }
                if (!in_hull(table, corner)) {
                    std::ostringstream msg;
                    msg.precision(17);
                    msg << "one-sided slope (";
                    for (std::size_t k = 0; k < d; ++k) msg << (k ? ", " : "") << corner[k];
                    msg << ") at node " << l << " leaves the table hull";
                    throw GradientOutOfHull(msg.str(), corner);
                }
            }
        }
    };
    return march(op, remainder_of(u0, grid), u0.slope, T, opt, check);
}

Trajectory solve_oscillatory(const AnalyticHamiltonian& H, double eps, const InitialDatum& u0,
                             const PeriodicGrid& grid, double T, std::size_t nodes_per_eps,
                             FluxKind flux, const MarchOptions& opt) {
    if (!(eps > 0.0)) throw ConfigError({"eps must be positive"});
    if (nodes_per_eps == 0) throw ConfigError({"nodes per eps must be positive"});
    check_datum(u0, grid);
    std::vector<std::string> bad;
    for (std::size_t k = 0; k < grid.dim(); ++k) {
        const double L = grid.axis(k).period;
        if (!is_integer_multiple(L, eps * H.x_period[k]))
            bad.push_back("domain period " + fmt(L) + " on axis " + std::to_string(k) +
                          " is not a multiple of eps * x_period = " + fmt(eps * H.x_period[k]));
        if (!is_integer_multiple(u0.slope[k] * L / eps, H.u_period))
            bad.push_back("slope * L / eps = " + fmt(u0.slope[k] * L / eps) + " on axis " +
                          std::to_string(k) + " is not a multiple of u_period = " +
                          fmt(H.u_period));
    }
    if (!bad.empty()) throw IncompatiblePeriods(ConfigError(bad).what());
    for (std::size_t k = 0; k < grid.dim(); ++k) {
        const double hmax = eps / static_cast<double>(nodes_per_eps);
        if (grid.step(k) > hmax * (1.0 + 1e-12))
            throw GridTooCoarse("grid step " + fmt(grid.step(k)) + " on axis " + std::to_string(k) +
                                " exceeds eps / nodes_per_eps = " + fmt(hmax));
    }
    GraphOperator op(H, u0.slope, eps, grid, flux);
    return march(op, remainder_of(u0, grid), u0.slope, T, opt, {});
}

// ---------------------------------------------------------------------------

RateReport rate_experiment(const AnalyticHamiltonian& H, const EffHamTable& table,
                           const InitialDatum& u0, const std::vector<double>& eps_list,
                           const RateOptions& opt) {
    std::vector<std::string> bad;
    if (eps_list.size() < 3) bad.push_back("rate experiment needs at least 3 eps values");
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 0.0)) bad.push_back("eps values must be positive");
        if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
            bad.push_back("eps values must be strictly decreasing");
    }
    if (opt.domain.size() != H.dim)
        bad.push_back("domain needs " + std::to_string(H.dim) + " periods");
    if (!bad.empty()) throw ConfigError(bad);

    const std::size_t m = eps_list.size();
    std::vector<RateRow> rows(m);
    std::vector<std::exception_ptr> errors(m);
    auto run = [&](std::size_t i, Exec exec) {
        const double eps = eps_list[i];
        std::vector<Axis> axes;
        for (double L : opt.domain) {
            const double n = L * static_cast<double>(opt.nodes_per_eps) / eps;
            axes.push_back({static_cast<std::size_t>(std::ceil(n - 1e-9 * n)), L});
        }
        const PeriodicGrid grid(axes);
        MarchOptions mo;
        mo.dt = opt.dt;
        mo.exec = exec;
        const auto osc = solve_oscillatory(H, eps, u0, grid, opt.T, opt.nodes_per_eps, opt.flux, mo);
        const auto hom = solve_homogenized(table, u0, grid, opt.T, mo);
        double err = 0.0;
        const auto& a = osc.final_frame();
        const auto& b = hom.final_frame();
        for (std::size_t l = 0; l < a.size(); ++l) err = std::max(err, std::abs(a[l] - b[l]));
        rows[i] = {eps, grid.min_step(), osc.dt, err, std::numeric_limits<double>::quiet_NaN()};
    };
    if (opt.workers > 1) {
        const auto n = static_cast<std::ptrdiff_t>(m);
#pragma omp parallel for schedule(dynamic, 1) num_threads(static_cast<int>(opt.workers))
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            try {
                run(static_cast<std::size_t>(i), Exec::serial);
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
        for (const auto& e : errors)
            if (e) std::rethrow_exception(e);
    } else {
        for (std::size_t i = 0; i < m; ++i) run(i, Exec::parallel);
    }

    RateReport rep;
    constexpr double kFloor = 1e-12;
    for (std::size_t i = 1; i < m; ++i) {
        if (rows[i].sup_error > kFloor && rows[i - 1].sup_error > kFloor)
            rows[i].pair_slope = std::log(rows[i - 1].sup_error / rows[i].sup_error) /
                                 std::log(rows[i - 1].eps / rows[i].eps);
    }
    std::vector<double> xs, ys;
    for (const auto& r : rows) {
        if (r.sup_error > kFloor) {
            xs.push_back(std::log(r.eps));
            ys.push_back(std::log(r.sup_error));
        }
    }
    if (xs.size() < 2) {
        rep.flagged = true;
        rep.slope = std::numeric_limits<double>::quiet_NaN();
        rep.note = "errors at or below 1e-12; homogenization is exact up to rounding";
    } else {
        const double mx = mean(xs), my = mean(ys);
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxy += (xs[i] - mx) * (ys[i] - my);
            sxx += (xs[i] - mx) * (xs[i] - mx);
        }
        rep.slope = sxy / sxx;
        if (xs.size() < rows.size()) {
            rep.flagged = true;
            rep.note = "some errors at or below 1e-12 were left out of the fit";
        }
    }
    rep.rows = std::move(rows);
    return rep;
}

std::vector<double> rate_p_set(const InitialDatum& u0, double step, double margin) {
    if (u0.dim() != 1) throw ConfigError({"rate_p_set supports one-dimensional data"});
    if (!(step > 0.0)) throw ConfigError({"p-set step must be positive"});
    const double c = u0.slope[0];
    const double r = u0.periodic_lip + margin;
    const auto k0 = static_cast<long>(std::floor((c - r) / step));
    const auto k1 = static_cast<long>(std::ceil((c + r) / step));
    std::vector<double> p;
    for (long k = k0; k <= k1; ++k) p.push_back(static_cast<double>(k) * step);
    if (std::find(p.begin(), p.end(), c) == p.end()) p.push_back(c);
    std::sort(p.begin(), p.end());
    return p;
}

}  // namespace effham
