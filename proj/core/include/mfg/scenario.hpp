#pragma once

#include <string>

#include "mfg/catalog.hpp"
#include "mfg/grid.hpp"
#include "mfg/parabolic.hpp"

namespace mfg {

struct FixedPointConfig {
    double theta = 0.5;
    double tol = 1e-9;
    int maxIter = 200;
};

/// Data of the problem: diffusions, horizon, Hamiltonians and terminal costs.
struct Scenario {
    std::string name = "default";
    TorusGrid grid{64};
    double T = 0.25;
    double aBase = 1.0;  ///< a(t, x) = aBase + aAmp cos(ωx)
    double aAmp = 0.0;
    double a0 = 0.0;     ///< common-noise coefficient (constant)
    TorusGrid x0grid{32};
    double x0 = 0.0;
    CatalogHamiltonian H;
    CatalogMajorHamiltonian H0;
    CatalogTerminal G;
    CatalogMajorTerminal G0;
    FixedPointConfig fp;
    double dtFactor = 0.25;   ///< dt <= dtFactor * spacing
    double driftBound = 2.0;  ///< assumed bound on |H_p| for the CFL rule
    double m0Center = 0.0;    ///< default initial density: wrapped Gaussian
    double m0Var = 0.5;

    [[nodiscard]] Diffusion diffusion() const;
    [[nodiscard]] double dtMax() const noexcept;
    /// Same data with a and H multiplied by `factor` (scheme sub-dynamics).
    [[nodiscard]] Scenario scaledDynamics(double factor) const;
    [[nodiscard]] Scenario withGrid(std::size_t cells) const;
    [[nodiscard]] GridDensity defaultInitial() const;
    /// Throws ScenarioError when an assumption on the data is violated.
    void validate() const;
};

/// Smooth coupled catalog scenario.
Scenario defaultScenario();
/// All measure couplings, x0-couplings and the common noise switched off.
Scenario decoupledScenario();

}  // namespace mfg
