#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mfg/errors.hpp"
#include "mfg/measures.hpp"
#include "mfg/parabolic.hpp"

using namespace mfg;

namespace {

GridFunction sampled(const TorusGrid& g, double (*f)(double)) {
    GridFunction out(g);
    for (std::size_t i = 0; i < g.cells(); ++i) out[i] = f(g.node(i));
    return out;
}

HamiltonianClosure zeroH() {
    return [](std::size_t, std::span<const double>, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
    };
}

FieldAt constantField(double c) {
    return [c](std::size_t, std::span<double> out) { std::fill(out.begin(), out.end(), c); };
}

double massOf(const GridDensity& m) {
    double s = 0.0;
    for (double v : m.values()) s += v;
    return s * m.grid().spacing();
}

}  // namespace

TEST(Bernoulli, ClosedFormAndDerivatives) {
    for (double w : {-3.0, -0.5, -1e-3, 0.0, 2e-3, 0.7, 4.0}) {
        const double exact = w == 0.0 ? 1.0 : w / std::expm1(w);
        EXPECT_NEAR(bernoulli(w), exact, 1e-14);
        const double e = 1e-5;
        const double fd1 = (bernoulli(w + e) - bernoulli(w - e)) / (2 * e);
        const double fd2 = (bernoulli(w + e) - 2 * bernoulli(w) + bernoulli(w - e)) / (e * e);
        EXPECT_NEAR(bernoulliPrime(w), fd1, 1e-8);
        EXPECT_NEAR(bernoulliSecond(w), fd2, 2e-5);
    }
    // Continuity across the series switch.
    EXPECT_NEAR(bernoulliSecond(0.00999999), bernoulliSecond(0.01000001), 1e-9);
    EXPECT_NEAR(bernoulliSecond(0.0), 1.0 / 6.0, 1e-15);
}

TEST(CyclicTridiagonal, MatchesDenseElimination) {
    const std::size_t n = 9;
    std::vector<double> lo(n), di(n), up(n), rhs(n), x(n);
    for (std::size_t i = 0; i < n; ++i) {
        lo[i] = -0.3 - 0.01 * i;
        up[i] = -0.4 + 0.02 * i;
        di[i] = 2.0 + 0.1 * i;
        rhs[i] = std::sin(1.0 + i);
    }
    solveCyclicTridiagonal(lo, di, up, rhs, x);
    std::vector<std::vector<double>> A(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        A[i][i] = di[i];
        A[i][(i + n - 1) % n] += lo[i];
        A[i][(i + 1) % n] += up[i];
        A[i][n] = rhs[i];
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
        }
        std::swap(A[c], A[piv]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = A[r][c] / A[c][c];
            for (std::size_t k = c; k <= n; ++k) A[r][k] -= f * A[c][k];
        }
    }
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(x[i], A[i][n] / A[i][i], 1e-13);
}

TEST(HJBackward, HeatFlowOfSineDecaysExponentially) {
    const TorusGrid g(128);
    const double a = 0.5, T = 0.2;
    const TimeMesh mesh(0.0, T, 2000);
    const auto traj = solveHJBackward(Diffusion::constant(a), zeroH(), sampled(g, [](double x) { return std::sin(x); }), mesh);
    double err = 0.0;
    for (std::size_t i = 0; i < g.cells(); ++i) {
        err = std::max(err, std::abs(traj.snapshots[0][i] - std::exp(-a * T) * std::sin(g.node(i))));
    }
    EXPECT_LT(err, 1e-4);
}

TEST(HJBackward, UpwindModeIsMonotone) {
    const TorusGrid g(64);
    const TimeMesh mesh(0.0, 0.2, 80);
    auto h = [](std::size_t, std::span<const double> p, std::span<double> out) {
        for (std::size_t i = 0; i < p.size(); ++i) out[i] = 0.5 * p[i] * p[i];
    };
    HJOptions opts;
    opts.mode = GradientMode::Upwind;
    opts.lfAlpha = 1.5;
    auto g1 = sampled(g, [](double x) { return 0.5 * std::sin(x); });
    auto g2 = g1;
    for (std::size_t i = 0; i < g.cells(); ++i) g2[i] += 0.1 * (1.0 + std::cos(3.0 * g.node(i)));
    const auto u1 = solveHJBackward(Diffusion::constant(0.3), h, g1, mesh, opts);
    const auto u2 = solveHJBackward(Diffusion::constant(0.3), h, g2, mesh, opts);
    for (std::size_t k = 0; k <= mesh.steps; ++k) {
        for (std::size_t i = 0; i < g.cells(); ++i) EXPECT_LE(u1.snapshots[k][i], u2.snapshots[k][i] + 1e-14);
    }
}

TEST(HJBackward, SpectralModeRejectsLargeDrift) {
    const TorusGrid g(64);
    const TimeMesh mesh(0.0, 0.2, 2);
    HJOptions opts;
    opts.hp = [](std::size_t, std::span<const double> p, std::span<double> out) {
        for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i];
    };
    auto h = [](std::size_t, std::span<const double> p, std::span<double> out) {
        for (std::size_t i = 0; i < p.size(); ++i) out[i] = 0.5 * p[i] * p[i];
    };
    EXPECT_THROW(solveHJBackward(Diffusion::constant(0.3), h, sampled(g, [](double x) { return 3.0 * std::sin(x); }), mesh, opts),
                 CflViolation);
}

TEST(LinearSystem, SuperpositionHolds) {
    const TorusGrid g(48);
    const TimeMesh mesh(0.0, 0.3, 40);
    const auto a = Diffusion::cosine(0.6, 0.2);
    const FieldAt drift = [&](std::size_t k, std::span<double> out) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = 0.3 * std::sin(g.node(i) + 0.01 * k);
    };
    const FieldAt f1 = [&](std::size_t, std::span<double> out) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::cos(g.node(i));
    };
    const FieldAt f2 = [&](std::size_t k, std::span<double> out) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = 0.1 * k * std::sin(2.0 * g.node(i));
    };
    const FieldAt fs = [&](std::size_t k, std::span<double> out) {
        std::vector<double> x(out.size()), y(out.size());
        f1(k, x);
        f2(k, y);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + y[i];
    };
    const auto g1 = sampled(g, [](double x) { return std::sin(x); });
    const auto g2 = sampled(g, [](double x) { return std::cos(2.0 * x); });
    GridFunction gs(g);
    for (std::size_t i = 0; i < g.cells(); ++i) gs[i] = g1[i] + g2[i];
    const auto out = solveLinearParabolicSystem(a, drift, {f1, f2, fs}, {g1, g2, gs}, mesh);
    for (std::size_t k = 0; k <= mesh.steps; ++k) {
        for (std::size_t i = 0; i < g.cells(); ++i) {
            EXPECT_NEAR(out[0].snapshots[k][i] + out[1].snapshots[k][i], out[2].snapshots[k][i], 1e-12);
        }
    }
}

TEST(FPForward, ConservesMassAndPositivity) {
    const TorusGrid g(64);
    const TimeMesh mesh(0.0, 0.5, 100);
    const FieldAt drift = [&](std::size_t, std::span<double> out) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = 1.5 * std::sin(g.node(i));
    };
    const auto traj = solveFPForward(Diffusion::cosine(0.2, 0.1), drift, GridDensity::dirac(g, 3), mesh);
    double prev = 1.0;
    for (const auto& m : traj.snapshots) {
        EXPECT_NEAR(massOf(m), prev, 1e-12);
        prev = massOf(m);
        for (double v : m.values()) EXPECT_GE(v, 0.0);
    }
}

TEST(FPForward, GaussianSpreadingIsSecondOrderInSpace) {
    const double a = 0.4, T = 0.1, var0 = 0.3, mu = 3.0;
    auto error = [&](std::size_t n) {
        const TorusGrid g(n);
        const std::size_t steps = static_cast<std::size_t>(std::ceil(T / (0.1 * g.spacing() * g.spacing())));
        const auto traj = solveFPForward(Diffusion::constant(a), constantField(0.0),
                                         GridDensity::wrappedGaussian(g, mu, var0), TimeMesh(0.0, T, steps));
        const auto exact = GridDensity::wrappedGaussian(g, mu, var0 + 2.0 * a * T);
        double e = 0.0;
        for (std::size_t i = 0; i < n; ++i) e = std::max(e, std::abs(traj.snapshots.back()[i] - exact[i]));
        return e;
    };
    const double e64 = error(64), e128 = error(128);
    EXPECT_GE(std::log2(e64 / e128), 1.8);
}

TEST(FPForward, WeakFormulationHoldsToFirstOrder) {
    const TorusGrid g(64);
    const double dt = 1e-4;
    const TimeMesh mesh(0.0, dt, 1);
    const auto a = Diffusion::cosine(0.5, 0.1);
    const FieldAt drift = [&](std::size_t, std::span<double> out) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = 0.4 * std::cos(g.node(i));
    };
    const auto m0 = GridDensity::wrappedGaussian(g, 2.0, 0.5);
    const auto traj = solveFPForward(a, drift, m0, mesh);
    const auto phi = sampled(g, [](double x) { return std::sin(2.0 * x) + 0.3 * std::cos(x); });
    const double lhs = (integrateAgainst(traj.snapshots[1], phi) - integrateAgainst(m0, phi)) / dt;
    // m_t = (a m)_xx + (b m)_x, so the generator is a φ_xx - b φ_x.
    const auto av = a.sample(g, 0.0);
    GridFunction gen(g);
    for (std::size_t i = 0; i < g.cells(); ++i) {
        const double x = g.node(i);
        const double px = 2.0 * std::cos(2.0 * x) - 0.3 * std::sin(x);
        const double pxx = -4.0 * std::sin(2.0 * x) - 0.3 * std::cos(x);
        gen[i] = av[i] * pxx - 0.4 * std::cos(x) * px;
    }
    EXPECT_NEAR(lhs, integrateAgainst(m0, gen), 5e-3);
}

TEST(Bernstein, HeatFlowContractsAndZeroDataGivesZero) {
    const TorusGrid g(64);
    const TimeMesh mesh(0.0, 0.3, 60);
    const auto gs = sampled(g, [](double x) { return std::sin(x); });
    const auto traj = solveHJBackward(Diffusion::constant(0.5), zeroH(), gs, mesh);
    const auto rep = bernsteinAudit(traj, gs, 3);
    EXPECT_LE(rep.supLip, rep.terminalLip + 1e-12);
    EXPECT_EQ(rep.sharpC, 0.0);

    const GridFunction zero(g);
    const auto z = solveHJBackward(Diffusion::constant(0.5), zeroH(), zero, mesh);
    const auto rz = bernsteinAudit(z, zero, 3);
    for (double v : rz.supNorms) EXPECT_EQ(v, 0.0);
}
