#pragma once

#include <vector>

#include "mfg/functional.hpp"
#include "mfg/parabolic.hpp"
#include "mfg/scenario.hpp"

namespace mfg {

/// Discrete solution (u, m) of the MFG system on a mesh of [t0, t1].
struct MFGSolution {
    DensityTrajectory m;
    ParabolicTrajectory u;
    double x0 = 0.0;
    int iterations = 0;
    double finalGap = 0.0;
    std::vector<double> gapHistory;

    [[nodiscard]] const TimeMesh& mesh() const noexcept { return m.mesh; }
};

struct MFGOptions {
    /// Anchor horizon for the time mesh; <= 0 uses the scenario horizon T.
    double horizon = 0.0;
    /// Overrides the scenario's damped Picard settings when set.
    const FixedPointConfig* fixedPoint = nullptr;
    /// Initial iterate (must live on the same mesh); constant m0 otherwise.
    const DensityTrajectory* warmStart = nullptr;
    /// Fixed number of time steps on [t0, t1]; 0 uses the anchored mesh.
    std::size_t steps = 0;
};

/// Damped Picard iteration: HJ backward from the current density, FP forward with the
/// resulting drift, relaxation by theta; stops once sup_t d1 between iterates < tol.
/// Throws NonConvergence when maxIter is exhausted.
MFGSolution solveMFG(const Scenario& s, double t0, double t1, const GridDensity& m0, double x0,
                     const MeasureFunctional& terminal, const MFGOptions& opts = {});

/// Problem on [t0, T] with the scenario's own terminal cost.
MFGSolution solveMFG(const Scenario& s, double t0, const GridDensity& m0, double x0);

/// H frozen at (x0, m^k) along the density trajectory.
std::vector<FrozenHamiltonian> freezeAlong(const CatalogHamiltonian& H, double x0,
                                           const std::vector<GridDensity>& m);

/// Spectral gradients of every snapshot.
std::vector<std::vector<double>> gradients(const ParabolicTrajectory& u);

}  // namespace mfg
