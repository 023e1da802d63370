#include "mfg/linearized.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfg/errors.hpp"
#include "mfg/measures.hpp"
#include "mfg/spectral.hpp"

namespace mfg {

LinearizationPoint::LinearizationPoint(const Scenario& s, const MFGSolution& sol,
                                       const MeasureFunctional& terminal)
    : s_(s), sol_(sol), terminal_(terminal), a_(s.diffusion()) {
    const std::size_t K = sol_.m.mesh.steps;
    frozen_ = freezeAlong(s_.H, sol_.x0, sol_.m.snapshots);
    du_ = gradients(sol_.u);
    b_.resize(K + 1);
    for (std::size_t k = 0; k <= K; ++k) {
        b_[k].resize(du_[k].size());
        for (std::size_t i = 0; i < du_[k].size(); ++i) b_[k][i] = frozen_[k].Hp(i, du_[k][i]);
    }
    cc_.reserve(K);
    for (std::size_t k = 0; k < K; ++k) {
        const auto aVals = a_.sample(s_.grid, sol_.m.mesh.time(k + 1));
        cc_.emplace_back(aVals, b_[k], s_.grid.spacing());
    }
}

namespace {

using Field = std::vector<double>;

/// Known data of a linear solve, already in discrete form.
struct Extra {
    std::vector<Field> node;   ///< added to the HJ source, per node
    std::vector<Field> drift;  ///< drift perturbation carried by m, per node
    std::vector<Field> faces;  ///< face fluxes, per step
    GridFunction terminal;
};

double totalVariation(const GridSignedMeasure& r) {
    double s = 0.0;
    for (double v : r.values()) s += std::abs(v);
    return s * r.grid().spacing();
}

struct VSweep {
    ParabolicTrajectory v;
    std::vector<Field> beta;
};

VSweep sweepV(const LinearizationPoint& p, const std::vector<GridSignedMeasure>& rho, const Extra& ex) {
    const std::size_t K = p.steps();
    const auto& H = p.scenario().H;
    std::vector<MeasureFields> dirs;
    dirs.reserve(K + 1);
    for (std::size_t k = 0; k <= K; ++k) dirs.push_back(H.directionFields(rho[k], p.m(k)));

    GridFunction vT = p.terminal().requireFlat("linearized solve")(p.m(K), rho[K]);
    if (ex.terminal.size() == vT.size()) {
        for (std::size_t i = 0; i < vT.size(); ++i) vT[i] += ex.terminal[i];
    }
    FieldAt drift = [&](std::size_t k, std::span<double> out) {
        std::copy(p.drift(k).begin(), p.drift(k).end(), out.begin());
    };
    FieldAt src = [&](std::size_t k, std::span<double> out) {
        const auto& du = p.du(k);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = p.H(k).dH(i, du[i], dirs[k]);
        if (!ex.node.empty()) {
            for (std::size_t i = 0; i < out.size(); ++i) out[i] += ex.node[k][i];
        }
    };
    VSweep r;
    r.v = solveLinearParabolicSystem(p.diffusion(), drift, {src}, {vT}, p.mesh())[0];
    const auto dv = gradients(r.v);
    r.beta.resize(K + 1);
    for (std::size_t k = 0; k <= K; ++k) {
        const auto& du = p.du(k);
        auto& b = r.beta[k];
        b.resize(du.size());
        for (std::size_t i = 0; i < du.size(); ++i) {
            b[i] = p.H(k).Hpp(i, du[i]) * dv[k][i] + p.H(k).dHp(i, du[i], dirs[k]);
        }
        if (!ex.drift.empty()) {
            for (std::size_t i = 0; i < b.size(); ++i) b[i] += ex.drift[k][i];
        }
    }
    return r;
}

LinearizedSolution solveCore(const LinearizationPoint& p, const GridSignedMeasure& rho0, const Extra& ex,
                             const char* where) {
    requireSameGrid(p.scenario().grid, rho0.grid(), where);
    const std::size_t K = p.steps();
    const auto& fp = p.scenario().fp;
    std::vector<GridSignedMeasure> rho(K + 1, rho0);
    double scale = std::max(1.0, totalVariation(rho0));

    FieldAt drift = [&](std::size_t k, std::span<double> out) {
        std::copy(p.drift(k).begin(), p.drift(k).end(), out.begin());
    };

    LinearizedSolution sol;
    for (int it = 1; it <= fp.maxIter; ++it) {
        const auto sw = sweepV(p, rho, ex);
        FaceSource faces = [&](std::size_t k, std::span<double> f) {
            p.faces(k).addDriftVariation(p.m(k + 1).values(), sw.beta[k], f);
            if (!ex.faces.empty()) {
                for (std::size_t i = 0; i < f.size(); ++i) f[i] += ex.faces[k][i];
            }
        };
        const auto next = solveFPSignedForward(p.diffusion(), drift, rho0, faces, p.mesh());
        double gap = 0.0;
        for (std::size_t k = 1; k <= K; ++k) {
            const auto diff = next.snapshots[k] - rho[k];
            gap = std::max(gap, fp.theta * antiderivativeNorm(diff));
            rho[k] = rho[k] + diff.scaled(fp.theta);
            scale = std::max(scale, totalVariation(rho[k]));
        }
        sol.iterations = it;
        sol.finalGap = gap;
        if (gap < fp.tol * scale) break;
    }
    if (sol.finalGap >= fp.tol * scale) {
        throw NonConvergence(std::string(where) + ": Picard iteration did not converge (last gap " +
                                 std::to_string(sol.finalGap) + ")",
                             where);
    }
    auto sw = sweepV(p, rho, ex);
    sol.v = std::move(sw.v);
    sol.deltaDrift = std::move(sw.beta);
    sol.rho = SignedTrajectory{p.mesh(), std::move(rho)};
    return sol;
}

std::vector<MeasureFields> directionsOf(const LinearizationPoint& p, const SignedTrajectory& rho) {
    std::vector<MeasureFields> d;
    d.reserve(rho.snapshots.size());
    for (std::size_t k = 0; k < rho.snapshots.size(); ++k) {
        d.push_back(p.scenario().H.directionFields(rho.snapshots[k], p.m(k)));
    }
    return d;
}

void addSourceFaces(const LinearizationPoint& p, const LinearSources& src, Extra& ex) {
    const std::size_t K = p.steps();
    const std::size_t n = p.scenario().grid.cells();
    if (src.R2terms.empty() && src.R2plain.empty()) return;
    if (ex.faces.empty()) ex.faces.assign(K, Field(n, 0.0));
    for (std::size_t k = 0; k < K; ++k) {
        for (const auto& t : src.R2terms) {
            p.faces(k).addDriftVariation(t.q[k + 1].values(), t.beta[k].values, ex.faces[k]);
        }
        if (k < src.R2plain.size()) {
            const auto& R = src.R2plain[k];
            for (std::size_t i = 0; i < n; ++i) ex.faces[k][i] += 0.5 * (R[i] + R[(i + 1) % n]);
        }
    }
}

void addSourceNodes(const LinearSources& src, std::size_t K, std::size_t n, Extra& ex) {
    if (!src.R1.empty()) {
        if (ex.node.empty()) ex.node.assign(K + 1, Field(n, 0.0));
        for (std::size_t k = 0; k <= K && k < src.R1.size(); ++k) {
            for (std::size_t i = 0; i < n; ++i) ex.node[k][i] -= src.R1[k][i];
        }
    }
    if (!src.R2drift.empty()) {
        if (ex.drift.empty()) ex.drift.assign(K + 1, Field(n, 0.0));
        for (std::size_t k = 0; k <= K && k < src.R2drift.size(); ++k) {
            for (std::size_t i = 0; i < n; ++i) ex.drift[k][i] += src.R2drift[k][i];
        }
    }
}

void addTerminal(const GridFunction& g, GridFunction& into) {
    if (g.size() == 0) return;
    if (into.size() == 0) {
        into = g;
        return;
    }
    for (std::size_t i = 0; i < g.size(); ++i) into[i] += g[i];
}

}  // namespace

LinearizedSolution solveLinearized1(const LinearizationPoint& p, const GridSignedMeasure& rho0,
                                    const LinearSources& src) {
    Extra ex;
    addSourceNodes(src, p.steps(), p.scenario().grid.cells(), ex);
    addSourceFaces(p, src, ex);
    addTerminal(src.R3, ex.terminal);
    return solveCore(p, rho0, ex, "solveLinearized1");
}

LinearizedSolution solveLinearized2(const LinearizationPoint& p, const LinearizedSolution& first,
                                    const LinearizedSolution& second, const LinearSources& tilde) {
    const std::size_t K = p.steps();
    const auto& grid = p.scenario().grid;
    const std::size_t n = grid.cells();
    const auto d1 = directionsOf(p, first.rho);
    const auto d2 = directionsOf(p, second.rho);
    const auto dv1 = gradients(first.v);
    const auto dv2 = gradients(second.v);

    Extra ex;
    ex.node.assign(K + 1, Field(n, 0.0));
    ex.drift.assign(K + 1, Field(n, 0.0));
    for (std::size_t k = 0; k <= K; ++k) {
        const auto& H = p.H(k);
        const auto& du = p.du(k);
        for (std::size_t i = 0; i < n; ++i) {
            const double pi = du[i];
            ex.node[k][i] = H.d2H(i, pi, d1[k], d2[k]) + H.Hpp(i, pi) * dv1[k][i] * dv2[k][i] +
                            H.dHp(i, pi, d1[k]) * dv2[k][i] + H.dHp(i, pi, d2[k]) * dv1[k][i];
            ex.drift[k][i] = H.Hppp(i, pi) * dv1[k][i] * dv2[k][i] + H.dHpp(i, pi, d2[k]) * dv1[k][i] +
                             H.dHpp(i, pi, d1[k]) * dv2[k][i] + H.d2Hp(i, pi, d1[k], d2[k]);
        }
    }
    ex.faces.assign(K, Field(n, 0.0));
    for (std::size_t k = 0; k < K; ++k) {
        const auto& cc = p.faces(k);
        cc.addDriftVariation(first.rho.snapshots[k + 1].values(), second.deltaDrift[k], ex.faces[k]);
        cc.addDriftVariation(second.rho.snapshots[k + 1].values(), first.deltaDrift[k], ex.faces[k]);
        cc.addDriftSecondVariation(p.m(k + 1).values(), first.deltaDrift[k], second.deltaDrift[k],
                                   ex.faces[k]);
    }
    addSourceNodes(tilde, K, n, ex);
    addSourceFaces(p, tilde, ex);
    ex.terminal = p.terminal().requireFlat2("solveLinearized2")(p.m(K), first.rho.snapshots[K],
                                                                 second.rho.snapshots[K]);
    addTerminal(tilde.R3, ex.terminal);
    return solveCore(p, GridSignedMeasure(grid), ex, "solveLinearized2");
}

namespace {

std::vector<GridFunction> perNode(const LinearizationPoint& p,
                                  const std::function<double(std::size_t, std::size_t)>& f) {
    const auto& grid = p.scenario().grid;
    std::vector<GridFunction> out(p.steps() + 1, GridFunction(grid));
    for (std::size_t k = 0; k <= p.steps(); ++k) {
        for (std::size_t i = 0; i < grid.cells(); ++i) out[k][i] = f(k, i);
    }
    return out;
}

const MeasureFunctional::Value& requireValue(const MeasureFunctional::Value& v, const char* what) {
    if (!v) throw MissingDerivative(std::string("terminal has no ") + what);
    return v;
}

}  // namespace

LinearSources x0Sources(const LinearizationPoint& p) {
    LinearSources s;
    s.R1 = perNode(p, [&](std::size_t k, std::size_t i) { return -p.H(k).Hx0(i, p.du(k)[i]); });
    s.R2drift = perNode(p, [&](std::size_t k, std::size_t i) { return p.H(k).Hx0p(i, p.du(k)[i]); });
    s.R3 = requireValue(p.terminal().dx0, "x0-derivative")(p.m(p.steps()));
    return s;
}

LinearSources mixedTildeSources(const LinearizationPoint& p, const LinearizedSolution& first) {
    const auto d = directionsOf(p, first.rho);
    const auto dv = gradients(first.v);
    LinearSources s;
    s.R1 = perNode(p, [&](std::size_t k, std::size_t i) {
        const double pi = p.du(k)[i];
        return -(p.H(k).Hx0p(i, pi) * dv[k][i] + p.H(k).dHx0(i, pi, d[k]));
    });
    s.R2drift = perNode(p, [&](std::size_t k, std::size_t i) {
        const double pi = p.du(k)[i];
        return p.H(k).Hx0pp(i, pi) * dv[k][i] + p.H(k).dHx0p(i, pi, d[k]);
    });
    if (!p.terminal().dx0Flat) throw MissingDerivative("terminal has no mixed x0/flat derivative");
    s.R3 = p.terminal().dx0Flat(p.m(p.steps()), first.rho.snapshots.back());
    return s;
}

LinearSources x0x0TildeSources(const LinearizationPoint& p, const LinearizedSolution& first) {
    const auto d = directionsOf(p, first.rho);
    const auto dv = gradients(first.v);
    LinearSources s;
    s.R1 = perNode(p, [&](std::size_t k, std::size_t i) {
        const double pi = p.du(k)[i];
        return -(p.H(k).Hx0x0(i, pi) + 2.0 * p.H(k).Hx0p(i, pi) * dv[k][i] +
                 2.0 * p.H(k).dHx0(i, pi, d[k]));
    });
    s.R2drift = perNode(p, [&](std::size_t k, std::size_t i) {
        const double pi = p.du(k)[i];
        return p.H(k).Hx0x0p(i, pi) + 2.0 * p.H(k).Hx0pp(i, pi) * dv[k][i] +
               2.0 * p.H(k).dHx0p(i, pi, d[k]);
    });
    auto g = requireValue(p.terminal().dx0x0, "second x0-derivative")(p.m(p.steps()));
    if (!p.terminal().dx0Flat) throw MissingDerivative("terminal has no mixed x0/flat derivative");
    const auto mixed = p.terminal().dx0Flat(p.m(p.steps()), first.rho.snapshots.back());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += 2.0 * mixed[i];
    s.R3 = g;
    return s;
}

}  // namespace mfg
