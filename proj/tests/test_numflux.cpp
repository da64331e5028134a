#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "effham/errors.hpp"
#include "effham/hamiltonian.hpp"
#include "effham/numflux.hpp"

using namespace effham;

namespace {

constexpr double kPi = 3.14159265358979323846;

TransportForm constant_form(double a, double b) {
    TransportForm f;
    f.a = [a](double, std::span<const double>) { return a; };
    f.b = [b](double, std::span<const double>, double) { return b; };
    f.a_min = a;
    f.a_max = a;
    f.b_max_abs = std::abs(b);
    return f;
}

double g4(const NumericalHamiltonian& g, std::array<double, 4> q, double y = 0.0) {
    const std::array<double, 1> x{0.1};
    return g(0.0, x, y, q);
}

AnalyticHamiltonian abs_h() {
    return make_state_free(1, [](std::span<const double> p) { return std::abs(p[0]); }, 1.0, 0.0);
}

}  // namespace

TEST(Godunov, HandValueSqrtFive) {
    const auto g = godunov_transport(1, constant_form(1.0, 0.0));
    EXPECT_NEAR(g4(g, {-2.0, 1.0, 0.0, 0.0}), std::sqrt(5.0), 1e-15);
}

TEST(Godunov, ConsistentWithAbs) {
    const auto g = godunov_transport(1, constant_form(1.0, 0.0));
    for (double q : {-3.0, -0.5, 0.0, 0.25, 7.0}) EXPECT_DOUBLE_EQ(g4(g, {q, q, 0.0, 0.0}), std::abs(q));
}

TEST(Godunov, NegativeBHandValue) {
    const auto g = godunov_transport(1, constant_form(1.0, -1.0));
    EXPECT_NEAR(g4(g, {0.0, 0.0, 2.0, -1.0}), -std::sqrt(5.0), 1e-15);
}

TEST(Godunov, YIndependentWithZeroYSlots) {
    const auto g = godunov_transport(builtin("first_case"));
    const double base = g4(g, {0.7, -0.2, 0.0, 0.0}, 0.0);
    for (double y : {0.01, 0.1, 0.13, 0.2}) EXPECT_EQ(g4(g, {0.7, -0.2, 0.0, 0.0}, y), base);
}

TEST(Godunov, MetadataForFirstCase) {
    const auto g = godunov_transport(builtin("first_case"));
    EXPECT_DOUBLE_EQ(g.lip_C1t(), 1.5 + 3.0);
    EXPECT_DOUBLE_EQ(g.coer_C2t(), 0.5);
    EXPECT_DOUBLE_EQ(g.coer_C3t(), 0.0);
    ASSERT_NE(g.transport(), nullptr);
}

TEST(Godunov, NonCoerciveRejected) {
    EXPECT_THROW(godunov_transport(1, constant_form(0.0, 1.0)), NonCoercive);
}

TEST(Godunov, GenericHamiltonianRejected) {
    EXPECT_THROW(godunov_transport(abs_h()), ConfigError);
}

TEST(LaxFriedrichs, Examples) {
    const auto g = lax_friedrichs(extend_levelset(abs_h()), {1.0, 0.0});
    EXPECT_NEAR(g4(g, {1.0, 1.0, 0.0, 0.0}), 1.0, 1e-12);
    EXPECT_NEAR(g4(g, {2.0, 0.0, 0.0, 0.0}), 0.0, 1e-12);
    EXPECT_EQ(g4(g, {0.0, 0.0, 0.0, 0.0}), 0.0);
}

TEST(LaxFriedrichs, WrongSigmaCount) {
    EXPECT_THROW(lax_friedrichs(extend_levelset(abs_h()), {1.0}), ConfigError);
}

TEST(Monotone, GodunovWithCosineB) {
    TransportForm f = constant_form(1.0, 0.0);
    f.b = [](double, std::span<const double> x, double) { return std::cos(2 * kPi * x[0]); };
    f.b_max_abs = 1.0;
    const auto rep = check_monotone(godunov_transport(1, f), 5000, 5.0, 17);
    EXPECT_TRUE(rep.pass()) << rep.worst_violation;
}

TEST(Monotone, UnderDissipatedLaxFriedrichsFlagged) {
    const auto g = lax_friedrichs(extend_levelset(builtin("first_case")), {0.2, 0.2});
    EXPECT_FALSE(check_monotone(g, 5000, 5.0, 3).pass());
}

TEST(Monotone, AdequateLaxFriedrichsPasses) {
    const auto H = builtin("first_case");
    const auto g = make_flux(H, FluxKind::lax_friedrichs);
    EXPECT_TRUE(check_monotone(g, 5000, 5.0, 4).pass());
}

TEST(FluxProperties, GodunovFirstCaseAllPass) {
    const auto rep = check_flux_properties(godunov_transport(builtin("first_case")), 10000, 10.0, 1);
    EXPECT_TRUE(rep.all_pass());
    EXPECT_LE(rep.consistency.worst, 1e-12);
}

TEST(FluxProperties, GodunovSecondCaseAllPass) {
    EXPECT_TRUE(check_flux_properties(godunov_transport(builtin("second_case")), 3000, 10.0, 2).all_pass());
}

TEST(FluxKindNames, ParseAndPrint) {
    EXPECT_EQ(parse_flux_kind("godunov"), FluxKind::godunov);
    EXPECT_EQ(parse_flux_kind("lax-friedrichs"), FluxKind::lax_friedrichs);
    EXPECT_EQ(to_string(FluxKind::lax_friedrichs), "lax-friedrichs");
    EXPECT_THROW(parse_flux_kind("roe"), UnknownName);
}
