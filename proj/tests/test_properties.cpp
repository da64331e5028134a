#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>

#include "effham/cellsolve.hpp"
#include "effham/hamiltonian.hpp"
#include "effham/homog.hpp"
#include "effham/operators.hpp"

using namespace effham;

namespace {

std::vector<double> random_field(std::size_t n, std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> U(lo, hi);
    std::vector<double> w(n);
    for (double& v : w) v = U(rng);
    return w;
}

}  // namespace

TEST(Property, LevelSetMarchPreservesOrder) {
    const auto H = builtin("first_case");
    const PeriodicGrid g({{30, 1.0}, {10, 0.25}});
    LevelSetOperator op(make_flux(H, FluxKind::godunov), {1.3, -1.0}, g);
    Marcher m(op, Scheme::explicit_euler, Exec::serial);
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> gap(0.0, 0.5);
    for (int trial = 0; trial < 20; ++trial) {
        auto u = random_field(g.size(), rng, -1, 1), v = u;
        for (double& x : v) x += gap(rng);
        for (int n = 0; n < 30; ++n) {
            const double t = n * m.max_dt();
            m.step(t, u, m.max_dt());
            m.step(t, v, m.max_dt());
        }
        for (std::size_t l = 0; l < g.size(); ++l) ASSERT_LE(u[l], v[l] + 1e-13);
    }
}

TEST(Property, GraphMarchPreservesOrder) {
    const auto H = builtin("first_case");
    const PeriodicGrid g({{200, 1.0}});
    GraphOperator op(H, {1.0}, 0.1, g, FluxKind::godunov);
    Marcher m(op, Scheme::explicit_euler, Exec::serial);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> gap(0.0, 0.05);
    for (int trial = 0; trial < 10; ++trial) {
        auto u = random_field(g.size(), rng, -0.1, 0.1), v = u;
        for (double& x : v) x += gap(rng);
        for (int n = 0; n < 50; ++n) {
            const double t = n * m.max_dt();
            m.step(t, u, m.max_dt());
            m.step(t, v, m.max_dt());
        }
        for (std::size_t l = 0; l < g.size(); ++l) ASSERT_LE(u[l], v[l] + 1e-13);
    }
}

TEST(Property, LevelSetHamiltonianIsPositivelyHomogeneous) {
    for (const auto& name : {"first_case", "second_case"}) {
        const auto H = builtin(name);
        const auto F = extend_levelset(H);
        std::mt19937_64 rng(55);
        std::uniform_real_distribution<double> U(-3, 3), S(0.01, 20);
        for (int s = 0; s < 1000; ++s) {
            const std::array<double, 2> x{U(rng), U(rng)}, p{U(rng), U(rng)};
            const double y = U(rng), py = U(rng), lam = S(rng);
            const std::array<double, 2> lp{lam * p[0], lam * p[1]};
            const auto xs = std::span<const double>(x.data(), H.dim);
            const double a = F(0.0, xs, y, std::span<const double>(lp.data(), H.dim), lam * py);
            const double b = lam * F(0.0, xs, y, std::span<const double>(p.data(), H.dim), py);
            ASSERT_NEAR(a, b, 1e-10 * (1 + std::abs(b))) << name;
        }
    }
}

TEST(Property, GodunovIsHomogeneousAndPeriodic) {
    const auto H = builtin("first_case");
    const auto g = make_flux(H, FluxKind::godunov);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> U(-4, 4), S(0.1, 10);
    std::uniform_int_distribution<int> K(-3, 3);
    for (int s = 0; s < 1000; ++s) {
        const std::array<double, 4> q{U(rng), U(rng), U(rng), U(rng)};
        const double lam = S(rng);
        const std::array<double, 4> lq{lam * q[0], lam * q[1], lam * q[2], lam * q[3]};
        const std::array<double, 1> x{U(rng)}, xs{x[0] + K(rng) * H.x_period[0]};
        const double y = U(rng), ys = y + K(rng) * H.u_period;
        const double base = g(0.0, x, y, q);
        ASSERT_NEAR(g(0.0, x, y, lq), lam * base, 1e-10 * (1 + std::abs(lam * base)));
        ASSERT_NEAR(g(0.0, xs, ys, q), base, 1e-10 * (1 + std::abs(base)));
    }
}

TEST(Property, DiscountedBoundedByConstants) {
    const auto H = builtin("first_case");
    const auto F = extend_levelset(H);
    for (double p : {-2.0, 0.4, 1.3}) {
        CellProblemSpec s{make_flux(H, FluxKind::godunov), {p, -1.0}, PeriodicGrid({{30, 1.0}, {8, 0.25}}),
                          TimeGrid{0.01, 1}};
        s.alpha = 0.1;
        const auto sol = solve_discounted(s, 1e-10, 100000);
        double fmax = 0.0;
        for (std::size_t l = 0; l < s.grid.size(); ++l) {
            std::array<double, 2> c{};
            s.grid.coordinates(l, c);
            const std::array<double, 1> px{p};
            fmax = std::max(fmax, std::abs(F(0.0, std::span(c.data(), 1), c[1], px, -1.0)));
        }
        for (const auto& W : sol.W)
            for (double w : W.values()) EXPECT_LE(std::abs(s.alpha * w), fmax + 1e-9);
    }
}

TEST(Property, DiscountedLambdaShrinksWithAlpha) {
    const auto H = builtin("first_case");
    auto lam = [&](double alpha) {
        CellProblemSpec s{make_flux(H, FluxKind::godunov), {1.3, -1.0}, PeriodicGrid({{40, 1.0}, {10, 0.25}}),
                          TimeGrid{0.01, 1}};
        s.alpha = alpha;
        return solve_discounted(s, 1e-10, 1000000);
    };
    const auto a = lam(0.1), b = lam(0.01);
    const double C = a.max_oscillation;
    EXPECT_LE(std::abs(a.lambda - b.lambda), C * 0.1);
}

TEST(Property, HomogenizedPreservesOrder) {
    EffHamTable t;
    t.dim = 1;
    for (int i = -6; i <= 6; ++i) {
        t.vertices.push_back({0.5 * i});
        t.values.push_back(1.0 + 0.25 * i * i * 0.25);
    }
    t.simplices = triangulate(t.vertices, 1);
    t.provenance.resize(t.size());
    const PeriodicGrid g({{100, 1.0}});
    auto lower = sine_datum(0.2);
    auto upper = sine_datum(0.2);
    upper.periodic = [](std::span<const double> x) {
        return 0.2 * std::sin(2 * 3.14159265358979323846 * x[0]) + 0.05 +
               0.02 * std::cos(2 * 3.14159265358979323846 * x[0]);
    };
    const auto a = solve_homogenized(t, lower, g, 0.3);
    const auto b = solve_homogenized(t, upper, g, 0.3);
    for (std::size_t l = 0; l < g.size(); ++l) EXPECT_LE(a.final_frame()[l], b.final_frame()[l] + 1e-13);
}
