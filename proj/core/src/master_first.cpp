#include "mfg/master.hpp"

#include <algorithm>
#include <cmath>

#include "mfg/errors.hpp"
#include "mfg/spectral.hpp"

namespace mfg {

MasterPoint::MasterPoint(const Scenario& s, double t0, double x0, const GridDensity& m0)
    : MasterPoint(s, t0, x0, m0, terminalFunctional(s.G, x0)) {}

MasterPoint::MasterPoint(const Scenario& s, double t0, double x0, const GridDensity& m0,
                         MeasureFunctional G, const MFGOptions& opts)
    : s_(s), x0_(x0), m0_(m0) {
    if (!(t0 < s.T)) throw InvalidArgument("MasterPoint: t0 < T required");
    auto sol = solveMFG(s, t0, s.T, m0, x0, G, opts);
    lp_.emplace(s, sol, G);
}

double MasterPoint::U0() const { return s_.G0.value(x0_, terminalDensity()); }

LinearizedSolution MasterPoint::linearized(const GridSignedMeasure& rho0) const {
    return solveLinearized1(*lp_, rho0);
}

MeasureDerivative MasterPoint::deltaU(const GridSignedMeasure& rho0) const {
    MeasureDerivative out;
    out.value = linearized(rho0).v.snapshots.front();
    const double mass = rho0.totalMass();
    if (mass != 0.0) {
        const auto c = linearized(m0_.asSigned()).v.snapshots.front();
        for (std::size_t i = 0; i < c.size(); ++i) {
            out.value[i] -= mass * c[i];
            out.normalizationShift = std::max(out.normalizationShift, std::abs(mass * c[i]));
        }
    }
    return out;
}

double MasterPoint::deltaU0(const GridSignedMeasure& rho0) const {
    const auto sol = linearized(rho0);
    return s_.G0.flat(x0_, terminalDensity(), sol.rho.snapshots.back());
}

const LinearizedSolution& MasterPoint::x0Solution() const {
    if (!x0sol_) x0sol_ = solveLinearized1(*lp_, GridSignedMeasure(s_.grid), x0Sources(*lp_));
    return *x0sol_;
}

GridFunction MasterPoint::dX0U() const { return x0Solution().v.snapshots.front(); }

double MasterPoint::dX0U0() const {
    const auto& mT = terminalDensity();
    return s_.G0.dx0(x0_, mT) + s_.G0.flat(x0_, mT, x0Solution().rho.snapshots.back());
}

GridFunction MasterPoint::d2U(const GridSignedMeasure& rho0, const GridSignedMeasure& rho1) const {
    const auto a = linearized(rho0);
    const auto b = linearized(rho1);
    return solveLinearized2(*lp_, a, b).v.snapshots.front();
}

double MasterPoint::d2U0(const GridSignedMeasure& rho0, const GridSignedMeasure& rho1) const {
    const auto a = linearized(rho0);
    const auto b = linearized(rho1);
    const auto w = solveLinearized2(*lp_, a, b);
    const auto& mT = terminalDensity();
    return s_.G0.flat2(x0_, mT, a.rho.snapshots.back(), b.rho.snapshots.back()) +
           s_.G0.flat(x0_, mT, w.rho.snapshots.back());
}

GridFunction MasterPoint::dX0DeltaU(const GridSignedMeasure& rho0) const {
    const auto a = linearized(rho0);
    return solveLinearized2(*lp_, a, x0Solution(), mixedTildeSources(*lp_, a)).v.snapshots.front();
}

GridFunction MasterPoint::d2X0U() const {
    const auto& a = x0Solution();
    return solveLinearized2(*lp_, a, a, x0x0TildeSources(*lp_, a)).v.snapshots.front();
}

std::vector<GridFunction> MasterPoint::flatDerivativeTable() const {
    std::vector<GridFunction> table;
    table.reserve(s_.grid.cells());
    for (std::size_t j = 0; j < s_.grid.cells(); ++j) {
        table.push_back(deltaU(GridDensity::dirac(s_.grid, j).asSigned()).value);
    }
    return table;
}

GridFunction evalU(const Scenario& s, double t0, double x0, const GridDensity& m0,
                   const MeasureFunctional& G) {
    if (t0 >= s.T) return G.value(m0);
    return solveMFG(s, t0, s.T, m0, x0, G).u.snapshots.front();
}

GridFunction evalU(const Scenario& s, double t0, double x0, const GridDensity& m0) {
    return evalU(s, t0, x0, m0, terminalFunctional(s.G, x0));
}

double evalU0(const Scenario& s, double t0, double x0, const GridDensity& m0) {
    if (t0 >= s.T) return s.G0.value(x0, m0);
    const auto sol = solveMFG(s, t0, m0, x0);
    return s.G0.value(x0, sol.m.snapshots.back());
}

MeasureDerivative deltaUdeltam(const Scenario& s, double t0, double x0, const GridDensity& m0,
                               const GridSignedMeasure& rho0) {
    return MasterPoint(s, t0, x0, m0).deltaU(rho0);
}

double deltaU0deltam(const Scenario& s, double t0, double x0, const GridDensity& m0,
                     const GridSignedMeasure& rho0) {
    return MasterPoint(s, t0, x0, m0).deltaU0(rho0);
}

GridFunction dX0U(const Scenario& s, double t0, double x0, const GridDensity& m0) {
    return MasterPoint(s, t0, x0, m0).dX0U();
}

double dX0U0(const Scenario& s, double t0, double x0, const GridDensity& m0) {
    return MasterPoint(s, t0, x0, m0).dX0U0();
}

GridFunction d2Udm2(const Scenario& s, double t0, double x0, const GridDensity& m0,
                    const GridSignedMeasure& rho0, const GridSignedMeasure& rho1) {
    return MasterPoint(s, t0, x0, m0).d2U(rho0, rho1);
}

double d2U0dm2(const Scenario& s, double t0, double x0, const GridDensity& m0,
               const GridSignedMeasure& rho0, const GridSignedMeasure& rho1) {
    return MasterPoint(s, t0, x0, m0).d2U0(rho0, rho1);
}

std::vector<GridFunction> lionsDerivative(const std::vector<GridFunction>& table) {
    const std::size_t n = table.size();
    if (n == 0) return {};
    const double h = table.front().grid.spacing();
    std::vector<GridFunction> out(n, GridFunction(table.front().grid));
    for (std::size_t j = 0; j < n; ++j) {
        const auto& up = table[(j + 1) % n];
        const auto& dn = table[(j + n - 1) % n];
        for (std::size_t i = 0; i < out[j].size(); ++i) out[j][i] = (up[i] - dn[i]) / (2.0 * h);
    }
    return out;
}

ResidualReport masterResidualViaFlow(const Scenario& s, double t0, double x0, const GridDensity& m0,
                                     const ResidualOptions& opts) {
    const auto& g = s.grid;
    const std::size_t n = g.cells();
    const double h = g.spacing();
    ResidualReport rep;
    rep.cells = n;
    rep.delta = opts.delta > 0.0 ? opts.delta : 1e-3 * s.T;
    if (n > opts.maxCells) {
        rep.warnings.push_back("masterResidualViaFlow: " + std::to_string(n) +
                               " cells; the nonlocal sweep costs one linearized solve per cell");
    }
    if (!(t0 + rep.delta < s.T)) throw InvalidArgument("masterResidualViaFlow: t0 + delta < T required");

    const auto G = terminalFunctional(s.G, x0);
    MFGOptions mo;
    mo.steps = TimeMesh::anchored(t0, s.T, s.T, s.dtMax()).steps;
    rep.steps = mo.steps;
    const MasterPoint mp(s, t0, x0, m0, G, mo);
    const auto U = mp.U();

    auto quotient = [&](double d) {
        const auto Ud = solveMFG(s, t0 + d, s.T, m0, x0, G, mo).u.snapshots.front();
        std::vector<double> q(n);
        for (std::size_t i = 0; i < n; ++i) q[i] = (Ud[i] - U[i]) / d;
        return q;
    };
    auto dt = quotient(rep.delta);
    if (opts.richardson) {
        const auto half = quotient(0.5 * rep.delta);
        for (std::size_t i = 0; i < n; ++i) dt[i] = 2.0 * half[i] - dt[i];
    }

    const auto a = s.diffusion().sample(g, t0);
    const auto ux = spectral::derivative(U.values, g.length(), 1);
    const auto uxx = spectral::derivative(U.values, g.length(), 2);
    const FrozenHamiltonian Hm(s.H, x0, m0);
    std::vector<double> hp(n);
    for (std::size_t j = 0; j < n; ++j) hp[j] = Hm.Hp(j, ux[j]);

    const auto table = mp.flatDerivativeTable();
    rep.pointwise = GridFunction(g);
    std::vector<double> tTerm(n), dTerm(n), hTerm(n), ndTerm(n), ntTerm(n);
    for (std::size_t i = 0; i < n; ++i) {
        double nd = 0.0, nt = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double fp = table[(j + 1) % n][i];
            const double f0 = table[j][i];
            const double fm = table[(j + n - 1) % n][i];
            nd += a[j] * (fp - 2.0 * f0 + fm) / (h * h) * m0[j];
            nt += (fp - fm) / (2.0 * h) * hp[j] * m0[j];
        }
        tTerm[i] = -dt[i];
        dTerm[i] = -a[i] * uxx[i];
        hTerm[i] = Hm.H(i, ux[i]);
        ndTerm[i] = -h * nd;
        ntTerm[i] = h * nt;
        rep.pointwise[i] = tTerm[i] + dTerm[i] + hTerm[i] + ndTerm[i] + ntTerm[i];
    }
    auto sup = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    };
    rep.timeDerivative = sup(tTerm);
    rep.diffusion = sup(dTerm);
    rep.hamiltonian = sup(hTerm);
    rep.nonlocalDiffusion = sup(ndTerm);
    rep.nonlocalTransport = sup(ntTerm);
    rep.total = rep.pointwise.supNorm();
    return rep;
}

}  // namespace mfg
