#include "mfg/mfg_system.hpp"

#include <algorithm>
#include <string>

#include "mfg/errors.hpp"
#include "mfg/measures.hpp"
#include "mfg/spectral.hpp"

namespace mfg {

std::vector<FrozenHamiltonian> freezeAlong(const CatalogHamiltonian& H, double x0,
                                           const std::vector<GridDensity>& m) {
    std::vector<FrozenHamiltonian> out;
    out.reserve(m.size());
    for (const auto& mk : m) out.emplace_back(H, x0, mk);
    return out;
}

std::vector<std::vector<double>> gradients(const ParabolicTrajectory& u) {
    std::vector<std::vector<double>> out;
    out.reserve(u.snapshots.size());
    for (const auto& s : u.snapshots) out.push_back(spectral::derivative(s.values, s.grid.length(), 1));
    return out;
}

namespace {

ParabolicTrajectory hjSweep(const Diffusion& a, const std::vector<FrozenHamiltonian>& frozen,
                            const GridFunction& terminal, const TimeMesh& mesh) {
    HJOptions opts;
    opts.hp = [&](std::size_t k, std::span<const double> p, std::span<double> out) {
        for (std::size_t i = 0; i < p.size(); ++i) out[i] = frozen[k].Hp(i, p[i]);
    };
    auto h = [&](std::size_t k, std::span<const double> p, std::span<double> out) {
        for (std::size_t i = 0; i < p.size(); ++i) out[i] = frozen[k].H(i, p[i]);
    };
    return solveHJBackward(a, h, terminal, mesh, opts);
}

}  // namespace

MFGSolution solveMFG(const Scenario& s, double t0, double t1, const GridDensity& m0, double x0,
                     const MeasureFunctional& terminal, const MFGOptions& opts) {
    requireSameGrid(s.grid, m0.grid(), "solveMFG");
    const FixedPointConfig& fp = opts.fixedPoint ? *opts.fixedPoint : s.fp;
    const double horizon = opts.horizon > 0.0 ? opts.horizon : s.T;
    const TimeMesh mesh = opts.steps > 0 ? TimeMesh(t0, t1, opts.steps)
                                         : TimeMesh::anchored(t0, t1, horizon, s.dtMax());
    const Diffusion a = s.diffusion();
    const std::size_t K = mesh.steps;

    std::vector<GridDensity> iter;
    if (opts.warmStart && opts.warmStart->snapshots.size() == K + 1 &&
        opts.warmStart->snapshots.front().grid() == s.grid) {
        iter = opts.warmStart->snapshots;
        iter.front() = m0;
    } else {
        iter.assign(K + 1, m0);
    }

    MFGSolution sol;
    sol.x0 = x0;
    for (int it = 1; it <= fp.maxIter; ++it) {
        const auto frozen = freezeAlong(s.H, x0, iter);
        const auto u = hjSweep(a, frozen, terminal.value(iter[K]), mesh);
        const auto du = gradients(u);
        auto drift = [&](std::size_t k, std::span<double> b) {
            for (std::size_t i = 0; i < b.size(); ++i) b[i] = frozen[k].Hp(i, du[k][i]);
        };
        const auto next = solveFPForward(a, drift, m0, mesh);
        double gap = 0.0;
        for (std::size_t k = 1; k <= K; ++k) {
            gap = std::max(gap, fp.theta * wasserstein1(next.snapshots[k], iter[k]));
            iter[k] = fp.theta == 1.0 ? next.snapshots[k] : iter[k].mix(next.snapshots[k], fp.theta);
        }
        sol.gapHistory.push_back(gap);
        sol.iterations = it;
        sol.finalGap = gap;
        if (gap < fp.tol) break;
    }
    if (sol.finalGap >= fp.tol) {
        throw NonConvergence("solveMFG: Picard iteration did not reach tol " + std::to_string(fp.tol) +
                                 " in " + std::to_string(fp.maxIter) + " iterations (last gap " +
                                 std::to_string(sol.finalGap) +
                                 "); shorten the horizon or increase damping",
                             "solveMFG");
    }
    const auto frozen = freezeAlong(s.H, x0, iter);
    sol.u = hjSweep(a, frozen, terminal.value(iter[K]), mesh);
    sol.m = DensityTrajectory{mesh, std::move(iter)};
    return sol;
}

MFGSolution solveMFG(const Scenario& s, double t0, const GridDensity& m0, double x0) {
    return solveMFG(s, t0, s.T, m0, x0, terminalFunctional(s.G, x0));
}

}  // namespace mfg
