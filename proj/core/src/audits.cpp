#include "mfg/audits.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "mfg/errors.hpp"
#include "mfg/linearized.hpp"
#include "mfg/measures.hpp"
#include "mfg/spectral.hpp"

namespace mfg {

namespace {

constexpr double kHorizonFractions[] = {0.5, 1.0};

/// `profile` returns (t_k, d(t_k)) for k = 0..K on the horizon of the scenario.
using Profile = std::function<std::vector<std::pair<double, double>>(const Scenario&)>;

HorizonFit fit(const Scenario& s, const Profile& profile) {
    HorizonFit out;
    double num = 0.0, den = 0.0;
    for (double f : kHorizonFractions) {
        Scenario sh = s;
        sh.T = f * s.T;
        const auto pts = profile(sh);
        const double d0 = pts.front().second;
        double sup = 0.0;
        for (std::size_t k = 1; k < pts.size(); ++k) {
            const auto [t, d] = pts[k];
            const double r = d / d0;
            sup = std::max(sup, r);
            num += t * (r - 1.0);
            den += t * t;
            out.sharpC = std::max(out.sharpC, (r - 1.0) / t);
        }
        out.horizons.push_back(sh.T);
        out.ratios.push_back(std::max(sup, 1.0));
    }
    out.C = num / den;
    return out;
}

}  // namespace

HorizonFit stabilityAudit(const Scenario& s, const GridDensity& m1, const GridDensity& m2) {
    if (!(wasserstein1(m1, m2) > 0.0)) throw InvalidArgument("stabilityAudit: initial densities coincide");
    return fit(s, [&](const Scenario& sh) {
        const auto a = solveMFG(sh, 0.0, m1, sh.x0);
        const auto b = solveMFG(sh, 0.0, m2, sh.x0);
        std::vector<std::pair<double, double>> pts;
        for (std::size_t k = 0; k < a.m.snapshots.size(); ++k) {
            pts.emplace_back(a.mesh().time(k), wasserstein1(a.m.snapshots[k], b.m.snapshots[k]));
        }
        return pts;
    });
}

HorizonFit dualityAudit(const Scenario& s, const GridDensity& m0, const GridSignedMeasure& rho0) {
    if (std::abs(rho0.totalMass()) > 1e-12) throw InvalidArgument("dualityAudit: initial direction must have zero mass");
    if (!(antiderivativeNorm(rho0) > 0.0)) throw InvalidArgument("dualityAudit: initial direction has zero norm");
    return fit(s, [&](const Scenario& sh) {
        const auto sol = solveMFG(sh, 0.0, m0, sh.x0);
        const LinearizationPoint p(sh, sol, terminalFunctional(sh.G, sh.x0));
        const auto lin = solveLinearized1(p, rho0);
        std::vector<std::pair<double, double>> pts;
        for (std::size_t k = 0; k < lin.rho.snapshots.size(); ++k) {
            pts.emplace_back(lin.rho.mesh.time(k), antiderivativeNorm(lin.rho.snapshots[k]));
        }
        return pts;
    });
}

BernsteinAuditReport mfgBernsteinAudit(const Scenario& s, const GridDensity& m0, int maxOrder) {
    const auto sol = solveMFG(s, 0.0, m0, s.x0);
    return bernsteinAudit(sol.u, sol.u.snapshots.back(), maxOrder);
}

double gradientLipschitz(const GridFunction& f) { return spectral::derivative(f, 2).supNorm(); }

}  // namespace mfg
