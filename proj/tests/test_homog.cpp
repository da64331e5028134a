#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "effham/effham_table.hpp"
#include "effham/errors.hpp"
#include "effham/hamiltonian.hpp"
#include "effham/homog.hpp"

using namespace effham;

namespace {

constexpr double kPi = 3.14159265358979323846;

EffHamTable table_of(double lo, double hi, std::size_t n, double (*fn)(double)) {
    EffHamTable t;
    t.dim = 1;
    for (std::size_t i = 0; i < n; ++i) {
        const double p = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        t.vertices.push_back({p});
        t.values.push_back(fn(p));
    }
    t.simplices = triangulate(t.vertices, 1);
    t.provenance.resize(n);
    return t;
}

EffHamTable abs_table(double r = 8.0) {
    return table_of(-r, r, static_cast<std::size_t>(2 * r) + 1, [](double p) { return std::abs(p); });
}

double sup_abs(const GridFunction& f) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

TEST(InitialDatum, ParseForms) {
    const auto a = parse_initial_datum("affine:1.3");
    EXPECT_EQ(a.slope, std::vector<double>{1.3});
    EXPECT_FALSE(a.periodic);
    const auto b = parse_initial_datum("affine:1,-2");
    EXPECT_EQ(b.dim(), 2u);
    const auto s = parse_initial_datum("sin:0.5");
    const std::array<double, 1> x{0.25};
    EXPECT_NEAR(s(x), 0.5, 1e-15);
    EXPECT_NEAR(s.periodic_lip, kPi, 1e-15);
    EXPECT_THROW(parse_initial_datum("cos"), UnknownName);
    EXPECT_THROW(parse_initial_datum("affine:x"), ConfigError);
}

TEST(Homogenized, AffineDatumTravels) {
    const auto t = table_of(-2.0, 3.0, 11, [](double p) { return 0.3 + p * p; });
    const PeriodicGrid g({{50, 1.0}});
    const double T = 0.7;
    const auto tr = solve_homogenized(t, affine_datum({1.3}), g, T);
    const std::array<double, 1> p{1.3};
    const double hbar = interpolate(t, p);
    for (double v : tr.final_frame().values()) EXPECT_NEAR(v, -hbar * T, 1e-12);
    const auto full = tr.full(tr.frames.size() - 1);
    EXPECT_NEAR(full[10], 1.3 * 0.2 - hbar * T, 1e-12);
}

TEST(Homogenized, ZeroDatumWithOffsetTable) {
    const auto t = table_of(-1.0, 1.0, 5, [](double p) { return 0.75 + std::abs(p); });
    const PeriodicGrid g({{20, 1.0}});
    const auto tr = solve_homogenized(t, affine_datum({0.0}), g, 0.4);
    for (double v : tr.final_frame().values()) EXPECT_NEAR(v, -0.3, 1e-13);
}

TEST(Homogenized, ContractsForAbsTable) {
    const PeriodicGrid g({{100, 1.0}});
    MarchOptions o;
    o.record_every = 0.02;
    const auto tr = solve_homogenized(abs_table(), sine_datum(0.3), g, 0.3, o);
    ASSERT_GT(tr.frames.size(), 5u);
    for (std::size_t k = 1; k < tr.frames.size(); ++k) {
        EXPECT_LE(sup_abs(tr.frames[k]), sup_abs(tr.frames[k - 1]) + 1e-12);
        EXPECT_LE(oscillation(tr.frames[k]), oscillation(tr.frames[k - 1]) + 1e-12);
    }
}

TEST(Homogenized, GradientLeavingHullThrows) {
    const PeriodicGrid g({{100, 1.0}});
    try {
        solve_homogenized(abs_table(1.0), sine_datum(1.0), g, 0.1);
        FAIL() << "expected GradientOutOfHull";
    } catch (const GradientOutOfHull& e) {
        ASSERT_EQ(e.slope().size(), 1u);
        EXPECT_GT(std::abs(e.slope()[0]), 1.0);
    }
}

TEST(Homogenized, DatumPeriodMustDivideDomain) {
    const PeriodicGrid g({{30, 1.5}});
    EXPECT_THROW(solve_homogenized(abs_table(), sine_datum(0.1), g, 0.1), IncompatiblePeriods);
}

TEST(Oscillatory, RejectsIncompatibleSetup) {
    const auto H = builtin("first_case");
    EXPECT_THROW(solve_oscillatory(H, 0.3, affine_datum({1.3}), PeriodicGrid({{1000, 1.0}}), 0.1),
                 IncompatiblePeriods);
    EXPECT_THROW(solve_oscillatory(H, 0.1, affine_datum({1.31}), PeriodicGrid({{1000, 1.0}}), 0.1),
                 IncompatiblePeriods);
    EXPECT_THROW(solve_oscillatory(H, 0.1, affine_datum({1.3}), PeriodicGrid({{100, 1.0}}), 0.1),
                 GridTooCoarse);
    EXPECT_THROW(solve_oscillatory(H, 0.0, affine_datum({1.3}), PeriodicGrid({{100, 1.0}}), 0.1),
                 ConfigError);
}

TEST(Oscillatory, StateFreeIndependentOfEps) {
    const auto H = builtin("state_free_abs");
    const PeriodicGrid g({{1000, 1.0}});
    const auto a = solve_oscillatory(H, 0.1, sine_datum(0.2), g, 0.2);
    const auto b = solve_oscillatory(H, 0.05, sine_datum(0.2), g, 0.2);
    for (std::size_t l = 0; l < g.size(); ++l) EXPECT_EQ(a.final_frame()[l], b.final_frame()[l]);
}

TEST(Oscillatory, StateFreeAgreesWithHomogenized) {
    const auto H = builtin("state_free_abs");
    const PeriodicGrid g({{1000, 1.0}});
    const auto osc = solve_oscillatory(H, 0.1, sine_datum(0.2), g, 0.2);
    const auto hom = solve_homogenized(abs_table(), sine_datum(0.2), g, 0.2);
    double worst = 0.0;
    for (std::size_t l = 0; l < g.size(); ++l)
        worst = std::max(worst, std::abs(osc.final_frame()[l] - hom.final_frame()[l]));
    EXPECT_LE(worst, 0.02);
}

TEST(Oscillatory, ShiftByUPeriodCommutes) {
    const auto H = builtin("first_case");
    const double eps = 0.1;
    const PeriodicGrid g({{500, 1.0}});
    auto shifted = sine_datum(0.2);
    const auto base_fn = shifted.periodic;
    shifted.periodic = [base_fn, U = H.u_period](std::span<const double> x) { return base_fn(x) + U; };
    const auto a = solve_oscillatory(H, eps, sine_datum(0.2), g, 0.1);
    const auto b = solve_oscillatory(H, eps, shifted, g, 0.1);
    for (std::size_t l = 0; l < g.size(); ++l)
        EXPECT_NEAR(b.final_frame()[l], a.final_frame()[l] + H.u_period, 1e-9);
}

TEST(Oscillatory, LandsExactlyOnFinalTime) {
    const auto H = builtin("first_case");
    const auto tr = solve_oscillatory(H, 0.2, affine_datum({1.3}), PeriodicGrid({{250, 1.0}}), 0.37);
    EXPECT_DOUBLE_EQ(tr.times.back(), 0.37);
    EXPECT_NEAR(tr.dt * static_cast<double>(tr.steps), 0.37, 1e-14);
}

TEST(Rate, StateFreeAffineIsFlagged) {
    const auto H = builtin("state_free_abs");
    const auto rep = rate_experiment(H, abs_table(), affine_datum({1.0}), {0.2, 0.1, 0.05});
    EXPECT_TRUE(rep.flagged);
    EXPECT_TRUE(std::isnan(rep.slope));
    ASSERT_EQ(rep.rows.size(), 3u);
    for (const auto& r : rep.rows) EXPECT_LE(r.sup_error, 1e-12);
}

TEST(Rate, RejectsShortOrUnsortedEpsList) {
    const auto H = builtin("state_free_abs");
    EXPECT_THROW(rate_experiment(H, abs_table(), affine_datum({1.0}), {0.2, 0.1}), ConfigError);
    EXPECT_THROW(rate_experiment(H, abs_table(), affine_datum({1.0}), {0.1, 0.2, 0.05}), ConfigError);
}

TEST(Rate, PSetCoversDatumSlopes) {
    const auto ps = rate_p_set(affine_datum({1.3}));
    EXPECT_NE(std::find(ps.begin(), ps.end(), 1.3), ps.end());
    EXPECT_LE(ps.front(), 0.8);
    EXPECT_GE(ps.back(), 1.8);
    const auto ss = rate_p_set(sine_datum());
    EXPECT_LE(ss.front(), -2 * kPi);
    EXPECT_GE(ss.back(), 2 * kPi);
}

TEST(TableHamiltonian, MatchesInterpolant) {
    const auto t = table_of(-2.0, 2.0, 9, [](double p) { return std::cos(p); });
    const auto H = table_hamiltonian(t);
    for (double p = -2.0; p <= 2.0; p += 0.0371) {
        const std::array<double, 1> x{0.0}, ps{p};
        EXPECT_EQ(H(0.0, x, 0.0, ps), interpolate(t, ps));
    }
    EXPECT_NEAR(*H.lip_C1, verify_table(t, 1e9).max_edge_slope, 0.0);
}
