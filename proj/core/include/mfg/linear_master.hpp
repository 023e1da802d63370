#pragma once

#include <vector>

#include "mfg/functional.hpp"

namespace mfg {

/// Wrapped Gaussian Γ(t, z) = Σ_{|j|<=8} exp(-(z + jL)²/(4 a0 t)) / sqrt(4π a0 t) on grid nodes,
/// renormalized so that spacing·Σ weights = 1.
struct WrappedHeatKernel {
    TorusGrid grid;
    double t = 0.0;
    double a0 = 0.0;
    std::vector<double> weights;

    [[nodiscard]] bool isIdentity() const noexcept;
};

/// t·a0 small enough to underflow the neighbouring cells gives the single-cell identity kernel.
WrappedHeatKernel heatKernel(const TorusGrid& g, double t, double a0);

/// U(t, x, m) = spacing·Σ_z G(x - z, (id - z)♯m) Γ(t, z), shifts over grid nodes.
GridFunction evalLinearMaster(const MeasureFunctional& G, double t, const GridDensity& m, double a0);
GridFunction evalLinearMaster(const MeasureFunctional& G, const WrappedHeatKernel& k, const GridDensity& m);

/// δU/δm(t, x, m)(ρ): the flat derivative of G convolved with jointly translated (x, m, ρ).
GridFunction dmLinearMaster(const MeasureFunctional& G, double t, const GridDensity& m,
                            const GridSignedMeasure& rho, double a0);

/// The functional m ↦ evalLinearMaster(G, t, m, a0) (with its flat derivative when G has one).
MeasureFunctional linearMasterFunctional(MeasureFunctional G, double t, double a0);

/// max over samples of sup_x |compose(s)∘compose(t) - compose(s + t)|.
double semigroupCheck(const MeasureFunctional& G, double s, double t, const std::vector<GridDensity>& samples,
                      double a0);

}  // namespace mfg
