#include "mfg/scenario.hpp"

#include <cmath>

#include "mfg/errors.hpp"
#include "mfg/functional.hpp"

namespace mfg {

const MeasureFunctional::Flat& MeasureFunctional::requireFlat(const char* where) const {
    if (!flat) throw MissingDerivative(std::string(where) + ": terminal has no flat derivative");
    return flat;
}

const MeasureFunctional::Flat2& MeasureFunctional::requireFlat2(const char* where) const {
    if (!flat2) throw MissingDerivative(std::string(where) + ": terminal has no second flat derivative");
    return flat2;
}

MeasureFunctional terminalFunctional(const CatalogTerminal& G, double x0) {
    MeasureFunctional f;
    f.value = [G, x0](const GridDensity& m) { return G.value(x0, m); };
    f.flat = [G, x0](const GridDensity& m, const GridSignedMeasure& r) { return G.flat(x0, m, r); };
    f.flat2 = [G, x0](const GridDensity& m, const GridSignedMeasure& r, const GridSignedMeasure& r2) {
        return G.flat2(x0, m, r, r2);
    };
    f.dx0 = [G, x0](const GridDensity& m) { return G.dx0(x0, m); };
    f.dx0x0 = [G, x0](const GridDensity& m) { return G.dx0x0(x0, m); };
    f.dx0Flat = [G, x0](const GridDensity& m, const GridSignedMeasure& r) { return G.dx0Flat(x0, m, r); };
    return f;
}

Diffusion Scenario::diffusion() const {
    const double w = 2.0 * std::numbers::pi / grid.length();
    const double base = aBase, amp = aAmp;
    if (amp == 0.0) return Diffusion::constant(base);
    return {[base, amp, w](double, double x) { return base + amp * std::cos(w * x); }, true};
}

double Scenario::dtMax() const noexcept {
    const double h = grid.spacing();
    return std::min(dtFactor * h, 0.5 * h / driftBound);
}

Scenario Scenario::scaledDynamics(double factor) const {
    Scenario s = *this;
    s.aBase *= factor;
    s.aAmp *= factor;
    s.a0 *= factor;
    s.H = H.scaled(factor);
    s.H0 = H0.scaled(factor);
    s.driftBound *= factor;
    return s;
}

Scenario Scenario::withGrid(std::size_t cells) const {
    Scenario s = *this;
    s.grid = TorusGrid(grid.length(), cells);
    return s;
}

GridDensity Scenario::defaultInitial() const { return GridDensity::wrappedGaussian(grid, m0Center, m0Var); }

namespace {

double kernelBound(const TrigKernel& k) {
    double s = 0.0;
    for (double c : k.cosCoef) s += std::abs(c);
    for (double c : k.sinCoef) s += std::abs(c);
    return s;
}

}  // namespace

void Scenario::validate() const {
    if (grid.cells() < 8) throw ScenarioError("scenario: grid needs at least 8 cells");
    if (x0grid.cells() < 8) throw ScenarioError("scenario: x0 grid needs at least 8 cells");
    if (!(T > 0.0)) throw ScenarioError("scenario: T must be positive");
    if (!(aBase - std::abs(aAmp) > 0.0)) throw ScenarioError("scenario: diffusion a must stay positive");
    if (a0 < 0.0) throw ScenarioError("scenario: a0 must be nonnegative");
    if (!(fp.theta > 0.0 && fp.theta <= 1.0)) throw ScenarioError("scenario: theta must lie in (0, 1]");
    if (!(fp.tol > 0.0) || fp.maxIter < 1) throw ScenarioError("scenario: invalid fixed-point settings");
    if (H.tag != "quadratic-nonlocal") throw ScenarioError("scenario: unknown Hamiltonian tag '" + H.tag + "'");
    if (!(H.q0 - std::abs(H.q1) * kernelBound(H.chi) > 0.0)) {
        throw ScenarioError("scenario: H is not uniformly convex in p (need q0 > |q1| sup|chi|)");
    }
    if (!(dtFactor > 0.0 && driftBound > 0.0)) throw ScenarioError("scenario: invalid time-step rule");
    if (!(m0Var > 0.0)) throw ScenarioError("scenario: m0 variance must be positive");
}

Scenario defaultScenario() {
    Scenario s;
    s.name = "smooth-coupled";
    s.aBase = 0.6;
    s.aAmp = 0.1;
    s.a0 = 0.2;
    s.H.q1 = 0.2;
    s.H.beta = 0.3;
    s.H.B = 0.2;
    s.H.c0 = 0.5;
    s.H.e = 0.3;
    s.H.c2 = 0.2;
    s.H.A = 0.3;
    s.H.V = 0.4;
    s.H.C0 = 2.0;
    s.H.gamma = 2.0;
    s.G.Ag = 0.3;
    s.G.Bg = 0.4;
    s.G.cg = 0.3;
    s.G.eg = 0.2;
    s.G.qg = 0.2;
    s.H0.beta0 = 0.2;
    s.H0.c00 = 0.3;
    s.H0.V0 = 0.2;
    s.G0.A0 = 0.5;
    s.G0.c0g = 0.3;
    s.G0.q0g = 0.1;
    s.x0 = 0.7;
    s.m0Center = 2.0;
    return s;
}

Scenario decoupledScenario() {
    Scenario s = defaultScenario();
    s.name = "decoupled";
    s.H.q1 = s.H.beta = s.H.c0 = s.H.c2 = 0.0;
    s.H.B = s.H.A = s.H.e = 0.0;
    s.G.Bg = s.G.cg = s.G.qg = s.G.eg = 0.0;
    s.H0.beta0 = s.H0.c00 = 0.0;
    s.G0.c0g = s.G0.q0g = 0.0;
    s.H.gamma = 1.0;
    s.H.V = 0.0;
    s.aAmp = 0.0;
    s.a0 = 0.0;
    return s;
}

}  // namespace mfg
