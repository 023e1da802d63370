#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mfg/errors.hpp"
#include "mfg/measures.hpp"
#include "oracles/transport_lp.hpp"

using namespace mfg;

namespace {

GridDensity randomDensity(const TorusGrid& g, std::mt19937_64& rng, double zeroFraction = 0.2) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(g.cells());
    for (auto& x : v) x = u(rng) < zeroFraction ? 0.0 : u(rng);
    v[0] += 0.1;
    return GridDensity::normalized(g, v);
}

double lpDistance(const GridDensity& a, const GridDensity& b, int power) {
    const auto& g = a.grid();
    const std::size_t n = g.cells();
    std::vector<double> pa(n), pb(n);
    std::vector<std::vector<double>> c(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        pa[i] = a[i] * g.spacing();
        pb[i] = b[i] * g.spacing();
        for (std::size_t j = 0; j < n; ++j) {
            c[i][j] = std::pow(oracle::periodicDistance(g.node(i), g.node(j), g.length()), power);
        }
    }
    const double cost = oracle::transportCost(pa, pb, c);
    return power == 1 ? cost : std::sqrt(cost);
}

}  // namespace

TEST(Wasserstein, IdenticalDensitiesAreAtZeroDistance) {
    const TorusGrid g(32);
    const auto m = GridDensity::wrappedGaussian(g, 1.0, 0.3);
    EXPECT_EQ(wasserstein1(m, m), 0.0);
    EXPECT_EQ(wasserstein2(m, m), 0.0);
}

TEST(Wasserstein, AntipodalBumpsArePiApart) {
    const TorusGrid g(16);
    const auto a = GridDensity::dirac(g, 0);
    const auto b = GridDensity::dirac(g, 8);
    EXPECT_NEAR(wasserstein1(a, b), std::numbers::pi, 1e-12);
    EXPECT_NEAR(wasserstein2(a, b), std::numbers::pi, 1e-12);
}

TEST(Wasserstein, UniformAgainstBumpMatchesLinearProgram) {
    const TorusGrid g(16);
    const auto u = GridDensity::uniform(g);
    const auto d = GridDensity::dirac(g, 0);
    EXPECT_NEAR(wasserstein1(u, d), lpDistance(u, d, 1), 1e-12);
    // Atoms at the nodes: mean periodic distance to 0 over 16 nodes is pi/2.
    EXPECT_NEAR(wasserstein1(u, d), std::numbers::pi / 2, 1e-12);
}

TEST(Wasserstein, AgreesWithLinearProgramOnRandomPairs) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const TorusGrid g(8 + 4 * (trial % 3));
        const auto a = randomDensity(g, rng);
        const auto b = randomDensity(g, rng);
        EXPECT_NEAR(wasserstein1(a, b), lpDistance(a, b, 1), 1e-9) << "trial " << trial;
        EXPECT_NEAR(wasserstein2(a, b), lpDistance(a, b, 2), 1e-9) << "trial " << trial;
    }
}

TEST(Wasserstein, MetricAxiomsOnRandomTriples) {
    std::mt19937_64 rng(12);
    const TorusGrid g(24);
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = randomDensity(g, rng), b = randomDensity(g, rng), c = randomDensity(g, rng);
        EXPECT_NEAR(wasserstein1(a, b), wasserstein1(b, a), 1e-12);
        EXPECT_NEAR(wasserstein2(a, b), wasserstein2(b, a), 1e-10);
        EXPECT_LE(wasserstein1(a, c), wasserstein1(a, b) + wasserstein1(b, c) + 1e-10);
        EXPECT_LE(wasserstein2(a, c), wasserstein2(a, b) + wasserstein2(b, c) + 1e-10);
        EXPECT_LE(wasserstein1(a, b), wasserstein2(a, b) + 1e-12);
    }
}

TEST(Wasserstein, LipschitzTestFunctionsAreBoundedByDistance) {
    std::mt19937_64 rng(13);
    const TorusGrid g(32);
    GridFunction phi(g);
    for (std::size_t i = 0; i < g.cells(); ++i) phi[i] = std::sin(g.node(i)) * 0.9;
    for (int trial = 0; trial < 10; ++trial) {
        const auto a = randomDensity(g, rng), b = randomDensity(g, rng);
        const double lhs = std::abs(integrateAgainst(a, phi) - integrateAgainst(b, phi));
        EXPECT_LE(lhs, wasserstein1(a, b) + 2.0 * g.spacing());
    }
}

TEST(Wasserstein, RejectsMismatchedGrids) {
    const auto a = GridDensity::uniform(TorusGrid(16));
    const auto b = GridDensity::uniform(TorusGrid(32));
    EXPECT_THROW((void)wasserstein1(a, b), IncompatibleGrid);
    EXPECT_THROW((void)wasserstein2(a, b), IncompatibleGrid);
}

TEST(Pushforward, ZeroShiftIsIdentityAndOneCellIsRotation) {
    const TorusGrid g(32);
    const auto m = GridDensity::wrappedGaussian(g, 2.0, 0.4);
    EXPECT_EQ(pushforwardTranslate(m, 0.0).vector(), m.vector());
    const auto r = pushforwardTranslate(m, g.spacing());
    const auto e = rotateCells(m, 1);
    for (std::size_t i = 0; i < g.cells(); ++i) EXPECT_NEAR(r[i], e[i], 1e-14);
}

TEST(Pushforward, FractionalShiftMovesByAtMostTheShift) {
    const TorusGrid g(64);
    const auto m = GridDensity::dirac(g, 5);
    const double z = 0.3 * g.spacing();
    const auto r = pushforwardTranslate(m, z);
    double mass = 0.0;
    for (double v : r.values()) mass += v * g.spacing();
    EXPECT_NEAR(mass, 1.0, 1e-14);
    EXPECT_LE(wasserstein2(r, m), g.spacing());
    EXPECT_NEAR(wasserstein1(r, m), z, 1e-12);
}

TEST(Pushforward, ComposesUpToInterpolation) {
    const TorusGrid g(64);
    const auto m = GridDensity::wrappedGaussian(g, 1.0, 0.3);
    const auto a = pushforwardTranslate(pushforwardTranslate(m, 0.21), 0.34);
    const auto b = pushforwardTranslate(m, 0.55);
    EXPECT_LE(wasserstein1(a, b), g.spacing());
}

TEST(Integrate, ConstantsAndOrthogonality) {
    const TorusGrid g(48);
    GridFunction one(g, std::vector<double>(g.cells(), 1.0));
    GridFunction c(g);
    for (std::size_t i = 0; i < g.cells(); ++i) c[i] = std::cos(g.node(i));
    EXPECT_NEAR(integrateAgainst(GridDensity::wrappedGaussian(g, 0.5, 0.2), one), 1.0, 1e-14);
    std::vector<double> z(g.cells());
    for (std::size_t i = 0; i < g.cells(); ++i) z[i] = std::sin(3.0 * g.node(i));
    EXPECT_NEAR(integrateAgainst(GridSignedMeasure(g, z), one), 0.0, 1e-14);
    EXPECT_NEAR(integrateAgainst(GridDensity::uniform(g), c), 0.0, 1e-14);
}

TEST(Moment2, ClosedFormsOnTheCircle) {
    const TorusGrid g(512);
    // Node atoms: mean of d(x,0)^2 converges to pi^2/3 at rate spacing^2.
    EXPECT_NEAR(moment2(GridDensity::uniform(g)), std::numbers::pi / std::sqrt(3.0), 1e-4);
    EXPECT_NEAR(moment2(GridDensity::dirac(g, 0)), 0.0, 1e-14);
    EXPECT_NEAR(moment2(GridDensity::dirac(g, 256)), std::numbers::pi, 1e-12);
}

TEST(DualNorm, ZeroHomogeneityAndMonotonicity) {
    const TorusGrid g(64);
    std::vector<double> v(g.cells());
    for (std::size_t i = 0; i < g.cells(); ++i) v[i] = std::cos(g.node(i)) + 0.5 * std::sin(2.0 * g.node(i));
    const GridSignedMeasure rho(g, v);
    EXPECT_EQ(dualNormMinusK(GridSignedMeasure(g), 1, 32).value, 0.0);
    const double one = dualNormMinusK(rho, 1, 32).value;
    const double three = dualNormMinusK(rho.scaled(3.0), 1, 32).value;
    EXPECT_NEAR(three, 3.0 * one, 1e-12 * three);
    const double k2 = dualNormMinusK(rho, 2, 32).value;
    const double k3 = dualNormMinusK(rho, 3, 32).value;
    EXPECT_GE(one, k2);
    EXPECT_GE(k2, k3);
    EXPECT_THROW((void)dualNormMinusK(rho, 4, 8), InvalidArgument);
}

TEST(DualNorm, BumpMinusUniformLiesInUnitInterval) {
    const TorusGrid g(64);
    const auto rho = GridDensity::dirac(g, 10).asSigned() - GridDensity::uniform(g).asSigned();
    const double v = dualNormMinusK(rho, 1, 64).value;
    EXPECT_GT(v, 0.0);
    EXPECT_LE(v, 1.0);
}

TEST(DualNorm, FirstOrderSurrogateTracksAntiderivativeNorm) {
    std::mt19937_64 rng(14);
    std::normal_distribution<double> n01;
    const TorusGrid g(64);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> v(g.cells());
        for (int j = 1; j <= 4; ++j) {
            const double a = n01(rng) / j, b = n01(rng) / j;
            for (std::size_t i = 0; i < g.cells(); ++i) v[i] += a * std::cos(j * g.node(i)) + b * std::sin(j * g.node(i));
        }
        const GridSignedMeasure rho(g, v);
        const double exact = antiderivativeNorm(rho);
        const double est = dualNormMinusK(rho, 1, 256, NormConvention::Homogeneous).value;
        EXPECT_LE(est, exact * (1.0 + 1e-9));
        EXPECT_GE(est, 0.95 * exact);
    }
}
