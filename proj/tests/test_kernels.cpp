#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

#include "effham/errors.hpp"
#include "effham/hamiltonian.hpp"
#include "effham/highorder.hpp"
#include "effham/kernels.hpp"
#include "effham/operators.hpp"

using namespace effham;

namespace {

std::vector<double> random_field(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<double> w(n);
    for (double& v : w) v = U(rng);
    return w;
}

}  // namespace

TEST(Stencil, NeighboursMatchGrid) {
    const PeriodicGrid g({{5, 1.0}, {4, 0.25}});
    const Stencil st(g);
    for (std::size_t l = 0; l < g.size(); ++l)
        for (std::size_t k = 0; k < 2; ++k) {
            EXPECT_EQ(st.plus(k)[l], g.neighbor(l, k, 1));
            EXPECT_EQ(st.minus(k)[l], g.neighbor(l, k, -1));
        }
}

TEST(Kernels, FirstOrderSerialEqualsParallel) {
    const PeriodicGrid g({{37, 1.0}, {11, 0.25}});
    const Stencil st(g);
    const auto w = random_field(g.size(), 1);
    OneSided a, b;
    kernels::first_order(st, w, a, Exec::serial);
    kernels::first_order(st, w, b, Exec::parallel);
    EXPECT_EQ(a.fwd, b.fwd);
    EXPECT_EQ(a.bwd, b.bwd);
}

TEST(Kernels, Weno5MatchesReferenceAndIsDeterministic) {
    const PeriodicGrid g({{23, 1.0}, {9, 0.5}});
    const Stencil st(g);
    const auto w = random_field(g.size(), 2);
    OneSided a, b;
    kernels::weno5(st, w, 1e-6, a, Exec::serial);
    kernels::weno5(st, w, 1e-6, b, Exec::parallel);
    EXPECT_EQ(a.fwd, b.fwd);
    EXPECT_EQ(a.bwd, b.bwd);
    const GridFunction f(g, w);
    for (long i = 0; i < 23; ++i)
        for (long j = 0; j < 9; ++j) {
            const std::array<long, 2> m{i, j};
            const std::size_t l = g.index(m);
            for (std::size_t k = 0; k < 2; ++k) {
                EXPECT_NEAR(a.bwd[k][l], weno_one_sided(f, k, Bias::minus, m), 1e-12);
                EXPECT_NEAR(a.fwd[k][l], weno_one_sided(f, k, Bias::plus, m), 1e-12);
            }
        }
}

TEST(Kernels, Weno5NeedsSixNodes) {
    const PeriodicGrid g({{5, 1.0}});
    OneSided d;
    EXPECT_THROW(kernels::weno5(Stencil(g), std::vector<double>(5, 0.0), 1e-6, d, Exec::serial),
                 GridTooCoarse);
}

TEST(Kernels, EulerUpdateWithDiscount) {
    std::vector<double> w{1.0, 2.0};
    const std::vector<double> s{0.5, -1.0};
    kernels::euler_update(w, s, 0.1, 2.0, Exec::serial);
    EXPECT_DOUBLE_EQ(w[0], (1.0 - 0.05) / 1.2);
    EXPECT_DOUBLE_EQ(w[1], (2.0 + 0.1) / 1.2);
}

TEST(Kernels, ParallelLoopRethrows) {
    EXPECT_THROW(for_each_node(100, Exec::parallel,
                               [](std::size_t l) {
                                   if (l == 42) throw std::runtime_error("boom");
                               }),
                 std::runtime_error);
}

TEST(Operators, LevelSetFastPathMatchesReference) {
    for (const auto& name : {"first_case", "second_case"}) {
        const auto H = builtin(name);
        std::vector<Axis> axes;
        for (std::size_t k = 0; k < H.dim; ++k) axes.push_back({13, H.x_period[k]});
        axes.push_back({7, H.u_period});
        const PeriodicGrid g(axes);
        std::vector<double> P(H.dim, 0.7);
        P.push_back(-1.0);
        for (auto kind : {FluxKind::godunov, FluxKind::lax_friedrichs}) {
            LevelSetOperator op(make_flux(H, kind), P, g);
            const auto w = random_field(g.size(), 5);
            OneSided d;
            kernels::first_order(op.stencil(), w, d, Exec::serial);
            std::vector<double> s(g.size()), sp(g.size());
            op.evaluate(0.3, w, d, s, Exec::serial);
            op.evaluate(0.3, w, d, sp, Exec::parallel);
            EXPECT_EQ(s, sp);
            for (std::size_t l = 0; l < g.size(); ++l)
                EXPECT_NEAR(s[l], op.evaluate_node(0.3, w, l), 1e-12) << name << " node " << l;
        }
    }
}

TEST(Operators, GraphFastPathMatchesReference) {
    const auto H = builtin("first_case");
    const PeriodicGrid g({{50, 5.0}});
    for (double eps : {1.0, 0.1}) {
        for (auto kind : {FluxKind::godunov, FluxKind::lax_friedrichs}) {
            GraphOperator op(H, {1.3}, eps, g, kind);
            const auto w = random_field(g.size(), 7);
            OneSided d;
            kernels::first_order(op.stencil(), w, d, Exec::serial);
            std::vector<double> s(g.size());
            op.evaluate(0.2, w, d, s, Exec::parallel);
            for (std::size_t l = 0; l < g.size(); ++l)
                EXPECT_NEAR(s[l], op.evaluate_node(0.2, w, l), 1e-12);
        }
    }
}

TEST(Operators, GraphCflIncludesStateCoupling) {
    const auto H = builtin("first_case");
    const PeriodicGrid g({{100, 1.0}});
    GraphOperator op(H, {0.0}, 0.5, g, FluxKind::godunov);
    EXPECT_NEAR(op.cfl_dt(), 1.0 / (2 * 1.5 * 100 + H.transport->b_lip_u / 0.5), 1e-15);
}

TEST(Marcher, SchemesAreDeterministicAcrossExec) {
    const auto H = builtin("first_case");
    const PeriodicGrid g({{24, 1.0}, {8, 0.25}});
    LevelSetOperator op(make_flux(H, FluxKind::godunov), {1.3, -1.0}, g);
    for (auto scheme : {Scheme::explicit_euler, Scheme::rk3_weno5, Scheme::implicit_euler}) {
        Marcher ms(op, scheme, Exec::serial), mp(op, scheme, Exec::parallel);
        auto a = random_field(g.size(), 3), b = a;
        const double dt = scheme == Scheme::implicit_euler ? 2 * ms.max_dt() : ms.max_dt();
        for (int n = 0; n < 5; ++n) {
            ms.step(n * dt, a, dt);
            mp.step(n * dt, b, dt);
        }
        EXPECT_EQ(a, b);
    }
}

TEST(Marcher, ImplicitStepMeetsTolerance) {
    const auto H = builtin("first_case");
    const PeriodicGrid g({{50, 1.0}, {12, 0.25}});
    LevelSetOperator op(make_flux(H, FluxKind::godunov), {1.3, -1.0}, g);
    Marcher m(op, Scheme::implicit_euler, Exec::serial);
    const auto prev = random_field(g.size(), 4);
    auto w = prev;
    const double dt = 0.01, alpha = 0.1;
    m.implicit_step(0.0, prev, w, dt, alpha);
    std::vector<double> s(g.size());
    m.rhs(0.0, w, s);
    double defect = 0.0;
    for (std::size_t l = 0; l < g.size(); ++l)
        defect = std::max(defect, std::abs((w[l] - prev[l]) / dt + alpha * w[l] + s[l]));
    EXPECT_LE(defect, std::max(m.inner_tol, 16 * 2.2204460492503131e-16 * 2.0 / dt));
}

TEST(Marcher, ImplicitDivergenceReported) {
    const auto H = builtin("first_case");
    const PeriodicGrid g({{50, 1.0}, {12, 0.25}});
    LevelSetOperator op(make_flux(H, FluxKind::godunov), {1.3, -1.0}, g);
    Marcher m(op, Scheme::implicit_euler, Exec::serial);
    m.max_inner = 2;
    auto w = random_field(g.size(), 8);
    EXPECT_THROW(m.step(0.0, w, 1.0, 0.1), InnerIterationDiverged);
}
