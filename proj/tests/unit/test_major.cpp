#include <gtest/gtest.h>

#include <cmath>

#include "mfg/errors.hpp"
#include "mfg/major.hpp"

using namespace mfg;

namespace {

Scenario smallMajor() {
    Scenario s = defaultScenario().withGrid(16);
    s.x0grid = TorusGrid(16);
    s.T = 0.2;
    return s;
}

GridDensity skewedDensity(const TorusGrid& g) {
    std::vector<double> v(g.cells());
    for (std::size_t i = 0; i < g.cells(); ++i) v[i] = 1.0 + 0.5 * std::cos(g.node(i) - 0.3) + 0.2 * std::sin(2 * g.node(i));
    return GridDensity::normalized(g, v);
}

/// Zero-mass direction relative to m, so m ± hρ stays a density.
GridSignedMeasure direction(const GridDensity& m) {
    const auto& g = m.grid();
    std::vector<double> v(g.cells());
    for (std::size_t i = 0; i < g.cells(); ++i) v[i] = m[i] * (std::cos(g.node(i)) + 0.3 * std::sin(2 * g.node(i)));
    GridSignedMeasure r(g, v);
    const double mass = r.totalMass();
    for (std::size_t i = 0; i < g.cells(); ++i) v[i] -= mass * m[i];
    return {g, v};
}

/// Same pairing as jointDistance, for differences of pairs.
MajorValue combine(const MajorValue& a, double ca, const MajorValue& b, double cb) {
    MajorValue out = a;
    for (std::size_t j = 0; j < a.U0.size(); ++j) {
        out.U0[j] = ca * a.U0[j] + cb * b.U0[j];
        for (std::size_t i = 0; i < a.U[j].size(); ++i) out.U[j][i] = ca * a.U[j][i] + cb * b.U[j][i];
    }
    return out;
}

MajorValue zeroLike(const MajorValue& a) { return combine(a, 0.0, a, 0.0); }

double size(const MajorValue& v) { return jointDistance(v, zeroLike(v)); }

}  // namespace

TEST(MajorScheme, TerminalCheckpointIsExact) {
    const Scenario s = smallMajor();
    MajorScheme scheme(s, 2);
    const auto m = skewedDensity(s.grid);
    const auto v = scheme.eval(scheme.schedule().last(), m);
    const auto g = majorTerminal(s, m);
    EXPECT_EQ(v.U0.values, g.U0.values);
    for (std::size_t j = 0; j < g.U.size(); ++j) EXPECT_EQ(v.U[j].values, g.U[j].values);
}

TEST(MajorScheme, DecoupledScenarioIndependentOfN) {
    Scenario s = decoupledScenario().withGrid(16);
    s.x0grid = TorusGrid(16);
    s.T = 0.2;
    const auto m = skewedDensity(s.grid);
    MajorScheme s1(s, 1), s2(s, 2), s4(s, 4);
    const auto v1 = s1.eval(0, m);
    EXPECT_LE(jointDistance(v1, s2.eval(0, m)), 1e-8);
    EXPECT_LE(jointDistance(v1, s4.eval(0, m)), 1e-8);
    EXPECT_GT(size(v1), 0.1);
}

TEST(MajorScheme, RepeatedEvaluationIsDeterministic) {
    const Scenario s = smallMajor();
    const auto m = skewedDensity(s.grid);
    MajorScheme a(s, 2), b(s, 2);
    const auto va = a.eval(0, m);
    const auto vb = b.eval(0, m);
    EXPECT_EQ(jointDistance(va, vb), 0.0);
    EXPECT_EQ(jointDistance(va, a.eval(0, m)), 0.0);
}

TEST(MajorScheme, SmallNCauchyDifferenceIsModest) {
    const Scenario s = smallMajor();
    const auto m = s.defaultInitial();
    const auto t = majorAgreement(s, {1, 2}, {m});
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_GT(t.rows[0].E, 0.0);
    EXPECT_LT(t.rows[0].E, 0.05);
    EXPECT_FALSE(t.partial);
}

TEST(JointDistance, PairingNorm) {
    const TorusGrid g(8), g0(8);
    MajorValue a, b;
    a.U0 = GridFunction(g0);
    b.U0 = GridFunction(g0);
    a.U.assign(8, GridFunction(g));
    b.U.assign(8, GridFunction(g));
    b.U0[2] = 3.0;
    b.U[2][5] = -4.0;
    b.U[6][1] = 1.0;
    EXPECT_DOUBLE_EQ(jointDistance(a, b), 5.0);
}

TEST(HJSystem, ZeroDurationStepsReturnTerminal) {
    const Scenario s = majorScenario(smallMajor());
    const auto m = skewedDensity(s.grid);
    const auto term = majorTerminal(s, m);
    const auto sol = solveHJSystemX0(s, m, term, 1e-14, 1);
    EXPECT_LE(jointDistance(sol.initial(), term), 1e-10);
}

TEST(MajorDerivative, ZeroDirectionGivesZero) {
    const Scenario s = smallMajor();
    const auto m = skewedDensity(s.grid);
    const MajorDerivativeContext ctx(s, m, 0.1, 8);
    const auto v = derivMajorDm(ctx, GridSignedMeasure(s.grid));
    EXPECT_LE(size(v), 1e-14);
    const auto w = deriv2MajorDm(ctx, GridSignedMeasure(s.grid), direction(m));
    EXPECT_LE(size(w), 1e-14);
}

TEST(MajorDerivative, LinearInDirection) {
    const Scenario s = smallMajor();
    const auto m = skewedDensity(s.grid);
    const MajorDerivativeContext ctx(s, m, 0.1, 8);
    const auto r1 = direction(m);
    GridSignedMeasure r2(s.grid);
    {
        std::vector<double> v(s.grid.cells());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(3 * s.grid.node(i));
        r2 = GridSignedMeasure(s.grid, v);
    }
    const auto lhs = derivMajorDm(ctx, r1.scaled(2.0) + r2.scaled(-0.5));
    const auto rhs = combine(derivMajorDm(ctx, r1), 2.0, derivMajorDm(ctx, r2), -0.5);
    EXPECT_LE(jointDistance(lhs, rhs), 1e-11 * std::max(1.0, size(rhs)));
}

TEST(MajorDerivative, MatchesCentralDifference) {
    const Scenario s = smallMajor();
    const auto m = skewedDensity(s.grid);
    const double duration = 0.1;
    const std::size_t steps = 8;
    const auto rho = direction(m);
    const MajorDerivativeContext ctx(s, m, duration, steps);
    const auto v = derivMajorDm(ctx, rho);
    ASSERT_GT(size(v), 1e-3);

    const double h = 1e-2;
    const MajorDerivativeContext plus(s, m.perturbed(rho, h), duration, steps);
    const MajorDerivativeContext minus(s, m.perturbed(rho, -h), duration, steps);
    const auto fd = combine(plus.solution().initial(), 0.5 / h, minus.solution().initial(), -0.5 / h);
    EXPECT_LE(jointDistance(v, fd), 1e-3 * size(v));
}

TEST(MajorDerivative, SecondDerivativeMatchesDifferenceOfFirst) {
    const Scenario s = smallMajor();
    const auto m = skewedDensity(s.grid);
    const double duration = 0.1;
    const std::size_t steps = 8;
    const auto rho = direction(m);
    const MajorDerivativeContext ctx(s, m, duration, steps);
    const auto w = deriv2MajorDm(ctx, rho, rho);

    const double h = 1e-2;
    const MajorDerivativeContext plus(s, m.perturbed(rho, h), duration, steps);
    const MajorDerivativeContext minus(s, m.perturbed(rho, -h), duration, steps);
    const auto fd = combine(derivMajorDm(plus, rho), 0.5 / h, derivMajorDm(minus, rho), -0.5 / h);
    EXPECT_LE(jointDistance(w, fd), 1e-3 * std::max(size(w), 1e-2));
}
