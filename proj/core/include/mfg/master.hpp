#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mfg/linearized.hpp"

namespace mfg {

/// Flat derivative value with the normalization applied to it.
struct MeasureDerivative {
    GridFunction value;
    /// sup-norm of mass(ρ0)·δU/δm(m0)(m0), subtracted to enforce ∫ δU/δm dm = 0.
    double normalizationShift = 0.0;
};

/// U and U⁰ at (t0, x0, m0) with every derivative available through the linearized systems.
class MasterPoint {
public:
    MasterPoint(const Scenario& s, double t0, double x0, const GridDensity& m0);
    MasterPoint(const Scenario& s, double t0, double x0, const GridDensity& m0, MeasureFunctional G,
                const MFGOptions& opts = {});

    [[nodiscard]] const MFGSolution& solution() const noexcept { return lp_->solution(); }
    [[nodiscard]] const LinearizationPoint& linearization() const noexcept { return *lp_; }
    [[nodiscard]] const GridDensity& terminalDensity() const { return solution().m.snapshots.back(); }

    [[nodiscard]] GridFunction U() const { return solution().u.snapshots.front(); }
    [[nodiscard]] double U0() const;

    [[nodiscard]] LinearizedSolution linearized(const GridSignedMeasure& rho0) const;
    [[nodiscard]] MeasureDerivative deltaU(const GridSignedMeasure& rho0) const;
    [[nodiscard]] double deltaU0(const GridSignedMeasure& rho0) const;
    [[nodiscard]] GridFunction dX0U() const;
    [[nodiscard]] double dX0U0() const;
    [[nodiscard]] GridFunction d2U(const GridSignedMeasure& rho0, const GridSignedMeasure& rho1) const;
    [[nodiscard]] double d2U0(const GridSignedMeasure& rho0, const GridSignedMeasure& rho1) const;
    /// ∂x0 δU/δm(ρ0).
    [[nodiscard]] GridFunction dX0DeltaU(const GridSignedMeasure& rho0) const;
    [[nodiscard]] GridFunction d2X0U() const;

    /// δU/δm(x, m0, y_j) for every cell y_j, from single-cell directions.
    [[nodiscard]] std::vector<GridFunction> flatDerivativeTable() const;

private:
    Scenario s_;
    double x0_;
    GridDensity m0_;
    std::optional<LinearizationPoint> lp_;
    const LinearizedSolution& x0Solution() const;
    mutable std::optional<LinearizedSolution> x0sol_;
};

GridFunction evalU(const Scenario& s, double t0, double x0, const GridDensity& m0,
                   const MeasureFunctional& G);
GridFunction evalU(const Scenario& s, double t0, double x0, const GridDensity& m0);
double evalU0(const Scenario& s, double t0, double x0, const GridDensity& m0);
MeasureDerivative deltaUdeltam(const Scenario& s, double t0, double x0, const GridDensity& m0,
                               const GridSignedMeasure& rho0);
double deltaU0deltam(const Scenario& s, double t0, double x0, const GridDensity& m0,
                     const GridSignedMeasure& rho0);
GridFunction dX0U(const Scenario& s, double t0, double x0, const GridDensity& m0);
double dX0U0(const Scenario& s, double t0, double x0, const GridDensity& m0);
GridFunction d2Udm2(const Scenario& s, double t0, double x0, const GridDensity& m0,
                    const GridSignedMeasure& rho0, const GridSignedMeasure& rho1);
double d2U0dm2(const Scenario& s, double t0, double x0, const GridDensity& m0,
               const GridSignedMeasure& rho0, const GridSignedMeasure& rho1);

/// Lions derivative D_mU(x, m0, y_j) = ∂_y δU/δm by central differences over the table.
std::vector<GridFunction> lionsDerivative(const std::vector<GridFunction>& flatTable);

/// Per-term magnitudes (sup over x) of the first-order master equation at (t0, x0, m0).
struct ResidualReport {
    double timeDerivative = 0.0;
    double diffusion = 0.0;
    double hamiltonian = 0.0;
    double nonlocalDiffusion = 0.0;
    double nonlocalTransport = 0.0;
    double total = 0.0;
    GridFunction pointwise;  ///< residual at every node
    std::size_t cells = 0;
    std::size_t steps = 0;
    double delta = 0.0;
    std::vector<std::string> warnings;
};

struct ResidualOptions {
    double delta = 0.0;        ///< 0 means 1e-3·T
    bool richardson = true;
    std::size_t maxCells = 32; ///< larger grids only produce a cost warning
};

ResidualReport masterResidualViaFlow(const Scenario& s, double t0, double x0, const GridDensity& m0,
                                     const ResidualOptions& opts = {});

}  // namespace mfg
