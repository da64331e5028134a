#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>

#include "effham/cellsolve.hpp"
#include "effham/errors.hpp"
#include "effham/hamiltonian.hpp"

using namespace effham;

namespace {

CellProblemSpec discounted_spec(const std::string& name, std::vector<double> P, std::size_t nx,
                                std::size_t ny, double alpha, double dt = 0.01) {
    const auto H = builtin(name);
    std::vector<Axis> axes;
    for (std::size_t k = 0; k < H.dim; ++k) axes.push_back({nx, H.x_period[k]});
    axes.push_back({ny, H.u_period});
    CellProblemSpec s{make_flux(H, FluxKind::godunov), std::move(P), PeriodicGrid(axes),
                      TimeGrid{dt, 1}};
    s.alpha = alpha;
    return s;
}

}  // namespace

TEST(StencilS, ConstantFieldGivesConsistentValue) {
    const auto H = builtin("first_case");
    const auto g = make_flux(H, FluxKind::godunov);
    const auto F = extend_levelset(H);
    const PeriodicGrid grid({{8, 1.0}, {4, 0.25}});
    const GridFunction W(grid, 0.7);
    const std::array<long, 2> i{3, 1};
    const std::array<double, 2> zero{0.0, 0.0}, P{1.3, -1.0};
    EXPECT_EQ(stencil_S(g, zero, W, 0.0, i), 0.0);
    const std::array<double, 1> x{3.0 / 8}, px{1.3};
    EXPECT_NEAR(stencil_S(g, P, W, 0.0, i), F(0.0, x, 0.0625, px, -1.0), 1e-12);
}

TEST(StencilS, LinearFieldInteriorNode) {
    const auto g = make_flux(builtin("state_free_abs"), FluxKind::godunov);
    const PeriodicGrid grid({{4, 1.0}, {3, 1.0}});
    const auto W = sample([](double, std::span<const double> x) { return x[0]; }, grid, 0.0);
    const std::array<double, 2> P{0.0, 0.0};
    EXPECT_NEAR(stencil_S(g, P, W, 0.0, std::array<long, 2>{1, 0}), 1.0, 1e-14);
}

TEST(ImplicitStep, ZeroStaysZero) {
    const auto g = make_flux(builtin("first_case"), FluxKind::godunov);
    const PeriodicGrid grid({{10, 1.0}, {4, 0.25}});
    const std::array<double, 2> P{0.0, 0.0};
    const auto w = implicit_step(g, P, 0.1, GridFunction(grid, 0.0), 0.0, 0.05, 1e-12, 100);
    for (std::size_t l = 0; l < w.size(); ++l) EXPECT_EQ(w[l], 0.0);
}

TEST(ImplicitStep, StateFreeClosedForm) {
    const auto g = make_flux(builtin("state_free_abs"), FluxKind::godunov);
    const PeriodicGrid grid({{10, 1.0}, {4, 1.0}});
    const std::array<double, 2> P{-1.7, -1.0};
    const double dt = 0.3, alpha = 0.2;
    const auto w = implicit_step(g, P, alpha, GridFunction(grid, 0.0), 0.0, dt, 1e-13, 500);
    for (std::size_t l = 0; l < w.size(); ++l) EXPECT_NEAR(w[l], -dt * 1.7 / (1 + alpha * dt), 1e-12);
}

TEST(ImplicitStep, RejectsBadArguments) {
    const auto g = make_flux(builtin("first_case"), FluxKind::godunov);
    const PeriodicGrid grid({{10, 1.0}, {4, 0.25}});
    const std::array<double, 2> P{0.0, 0.0};
    EXPECT_THROW(implicit_step(g, P, -1.0, GridFunction(grid), 0.0, 0.1, 1e-9, 10), ConfigError);
    EXPECT_THROW(implicit_step(g, P, 0.1, GridFunction(grid), 0.0, 0.1, 0.0, 10), ConfigError);
}

TEST(Discounted, ZeroSlopeGivesZero) {
    const auto s = discounted_spec("first_case", {0.0, 0.0}, 20, 8, 0.1);
    const auto sol = solve_discounted(s, 1e-12, 1000);
    EXPECT_EQ(sol.lambda, 0.0);
    for (std::size_t l = 0; l < sol.W[0].size(); ++l) EXPECT_EQ(sol.W[0][l], 0.0);
}

TEST(Discounted, StateFreeGivesH) {
    const auto s = discounted_spec("state_free_abs", {2.0, -1.0}, 12, 4, 0.01);
    const auto sol = solve_discounted(s, 1e-12, 1000);
    EXPECT_NEAR(sol.lambda, 2.0, 1e-9);
    EXPECT_LE(sol.lambda_error_bar, 1e-12);
}

TEST(Discounted, ErrorBarAndDiscountBound) {
    const auto H = builtin("first_case");
    const auto s = discounted_spec("first_case", {1.3, -1.0}, 40, 10, 0.1);
    const auto sol = solve_discounted(s, 1e-10, 100000);
    ASSERT_TRUE(sol.converged);
    const auto F = extend_levelset(H);
    double fmax = 0.0;
    for (std::size_t l = 0; l < s.grid.size(); ++l) {
        std::array<double, 2> c{};
        s.grid.coordinates(l, c);
        const std::array<double, 1> px{1.3};
        fmax = std::max(fmax, std::abs(F(0.0, std::span(c.data(), 1), c[1], px, -1.0)));
    }
    for (const auto& W : sol.W) {
        const double osc = oscillation(W);
        for (std::size_t l = 0; l < W.size(); ++l) {
            EXPECT_LE(std::abs(s.alpha * W[l]), fmax + 1e-9);
            EXPECT_LE(std::abs(s.alpha * W[l] + sol.lambda), s.alpha * osc + 1e-9);
        }
    }
    EXPECT_LE(sol.residual, s.alpha * sol.max_oscillation + 1e-10 / s.time.dt + 1e-9);
}

TEST(Discounted, UniqueAcrossInitialGuesses) {
    const auto s = discounted_spec("first_case", {0.8, -1.0}, 30, 8, 0.1);
    const double tol = 1e-10;
    const auto a = solve_discounted(s, tol, 100000);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-10, 10);
    GridFunction guess(s.grid);
    for (std::size_t l = 0; l < guess.size(); ++l) guess[l] = U(rng);
    const auto b = solve_discounted(s, tol, 100000, guess);
    EXPECT_LE(std::abs(a.lambda - b.lambda), 2 * tol);
}

TEST(Discounted, JIndependentForZeroPy) {
    auto s = discounted_spec("first_case", {1.3, 0.0}, 32, 8, 0.1);
    const auto sol = solve_discounted(s, 1e-11, 100000);
    for (std::size_t i = 0; i < 32; ++i)
        for (std::size_t j = 1; j < 8; ++j)
            EXPECT_NEAR(sol.W[0][i * 8 + j], sol.W[0][i * 8], 1e-12);
}

TEST(Discounted, MonotoneInYForNegativePy) {
    const auto s = discounted_spec("first_case", {1.3, -1.0}, 40, 10, 0.1);
    const auto sol = solve_discounted(s, 1e-11, 100000);
    const double hy = s.grid.step(1);
    for (const auto& W : sol.W)
        for (std::size_t i = 0; i < 40; ++i)
            for (std::size_t j = 0; j + 1 < 10; ++j) {
                const double a = W[i * 10 + j] - hy * static_cast<double>(j);
                const double b = W[i * 10 + j + 1] - hy * static_cast<double>(j + 1);
                EXPECT_LE(b, a + 1e-9);
            }
}

TEST(Discounted, RequiresPositiveAlpha) {
    const auto s = discounted_spec("first_case", {1.3, -1.0}, 10, 4, 0.0);
    EXPECT_THROW(solve_discounted(s, 1e-9, 10), ConfigError);
}

TEST(Discounted, MaxPeriodsCarriesLastIterate) {
    const auto s = discounted_spec("first_case", {1.3, -1.0}, 20, 8, 1e-3);
    try {
        solve_discounted(s, 1e-14, 2);
        FAIL() << "expected MaxPeriodsExceeded";
    } catch (const MaxPeriodsExceeded& e) {
        EXPECT_EQ(e.last().W.size(), 1u);
        EXPECT_GT(e.defect(), 1e-14);
    }
}

TEST(LongTime, ZeroSlopeStaysZero) {
    auto s = discounted_spec("first_case", {0.0, 0.0}, 20, 8, 0.0, 0.0);
    s.scheme = Scheme::explicit_euler;
    LongTimeOptions o;
    o.tau_max = 1.0;
    o.exec = Exec::serial;
    const auto sol = solve_longtime(s, GridFunction(s.grid, 0.0), o);
    EXPECT_EQ(sol.lambda, 0.0);
    for (std::size_t l = 0; l < sol.W.back().size(); ++l) EXPECT_EQ(sol.W.back()[l], 0.0);
}

TEST(LongTime, StateFreeMarchIsExact) {
    auto s = discounted_spec("state_free_abs", {0.5, -1.0}, 16, 4, 0.0, 0.01);
    s.scheme = Scheme::explicit_euler;
    LongTimeOptions o;
    o.tau_max = 2.0;
    o.record_every = 0.1;
    const auto sol = solve_longtime(s, GridFunction(s.grid, 0.0), o);
    EXPECT_NEAR(sol.lambda, 0.5, 1e-12);
    for (const auto& h : sol.history) EXPECT_NEAR(h.scaled, -0.5, 1e-12);
    for (std::size_t l = 0; l < sol.W.back().size(); ++l) EXPECT_NEAR(sol.W.back()[l], -1.0, 1e-12);
}

TEST(LongTime, UnsettledStatisticThrowsWithHistory) {
    auto s = discounted_spec("first_case", {1.3, -1.0}, 40, 10, 0.0, 0.0);
    s.scheme = Scheme::explicit_euler;
    LongTimeOptions o;
    o.tau_max = 2.0;
    o.window = 1.0;
    o.tol = 1e-14;
    try {
        solve_longtime(s, GridFunction(s.grid, 0.0), o);
        FAIL() << "expected NotConverged";
    } catch (const NotConverged& e) {
        EXPECT_FALSE(e.solution().history.empty());
    }
}

TEST(ImPeriod, Examples) {
    const auto H1 = builtin("first_case");
    const std::array<Rational, 1> p13{Rational{13, 10}}, p0{Rational{0, 1}};
    EXPECT_EQ(im_period(H1, p13), std::vector<long>{5});
    EXPECT_EQ(im_period(H1, p0), std::vector<long>{1});
    const auto H2 = builtin("second_case");
    const std::array<Rational, 2> p32{Rational{3, 2}, Rational{0, 1}};
    EXPECT_EQ(im_period(H2, p32), (std::vector<long>{2, 1}));
}

TEST(Rationals, ParseExact) {
    const auto a = parse_rational("1.3");
    EXPECT_EQ(a.num, 13);
    EXPECT_EQ(a.den, 10);
    const auto b = parse_rational("-6/4");
    EXPECT_EQ(b.num, -3);
    EXPECT_EQ(b.den, 2);
    EXPECT_EQ(parse_rational("7").den, 1);
    EXPECT_THROW(parse_rational("pi"), IrrationalSlope);
    EXPECT_THROW(parse_rational("1/0"), IrrationalSlope);
}

TEST(Rationals, RecoverFromDouble) {
    const auto r = to_rational(0.1);
    EXPECT_EQ(r.num, 1);
    EXPECT_EQ(r.den, 10);
    EXPECT_EQ(to_rational(-2.25).den, 4);
    EXPECT_THROW(to_rational(3.14159265358979323846, 1000), IrrationalSlope);
}

TEST(ImbertMonneau, StateFreeGivesH) {
    const auto H = builtin("state_free_abs");
    const std::array<Rational, 1> p{Rational{3, 2}};
    LongTimeOptions o;
    o.tau_max = 2.0;
    const auto sol = solve_imbert_monneau(H, p, 20, 0.0, Scheme::explicit_euler, o);
    EXPECT_NEAR(sol.lambda, 1.5, 1e-12);
    EXPECT_EQ(sol.W.back().grid().axis(0).count, 40u);
}

TEST(Barles, StateFreeGivesH) {
    const auto H = builtin("state_free_abs");
    for (double p : {-1.0, 0.5, 2.0}) {
        const std::array<double, 1> ps{p};
        const std::array<std::size_t, 2> nodes{20, 5};
        LongTimeOptions o;
        o.tau_max = 1.0;
        const auto sol = solve_barles(H, ps, nodes, 0.0, Scheme::explicit_euler, o);
        EXPECT_NEAR(sol.lambda, std::abs(p), 1e-12);
    }
}

TEST(Barles, SubstepsLargeNominalStep) {
    const auto H = builtin("first_case");
    const std::array<double, 1> p{1.3};
    const std::array<std::size_t, 2> nodes{40, 10};
    LongTimeOptions o;
    o.tau_max = 0.5;
    o.record_every = 0.05;
    const auto sol = solve_barles(H, p, nodes, 0.05, Scheme::explicit_euler, o);
    EXPECT_GT(sol.substeps, 1u);
    EXPECT_NEAR(sol.dt * static_cast<double>(sol.substeps), 0.05, 1e-15);
    EXPECT_NEAR(sol.tau, 0.5, 1e-12);
}

TEST(Residual, ZeroOrbit) {
    const auto g = make_flux(builtin("first_case"), FluxKind::godunov);
    const PeriodicGrid grid({{10, 1.0}, {4, 0.25}});
    const std::vector<GridFunction> W{GridFunction(grid, 0.0), GridFunction(grid, 0.0)};
    const std::array<double, 2> P{0.0, 0.0};
    EXPECT_EQ(residual_ergodic(g, P, 0.0, W, 0.1), 0.0);
}

TEST(Residual, DetectsSingleNodePerturbation) {
    auto s = discounted_spec("first_case", {1.3, -1.0}, 16, 4, 0.1, 0.002);
    const auto sol = solve_discounted(s, 1e-11, 100000);
    const double base = residual_ergodic(s.flux, s.P, sol.lambda, sol.W, s.time.dt);
    EXPECT_LE(base, s.alpha * sol.max_oscillation + 1e-11 / s.time.dt + 1e-9);
    auto W = sol.W;
    const double delta = 1e-3;
    W[1][9] += delta;
    const double h = std::min(s.grid.step(0), s.grid.step(1));
    const double bound = delta / s.time.dt - s.flux.lip_C1t() * 4 * delta / h;
    EXPECT_GE(residual_ergodic(s.flux, s.P, sol.lambda, W, s.time.dt), bound);
}
