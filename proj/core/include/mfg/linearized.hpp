#pragma once

#include <vector>

#include "mfg/mfg_system.hpp"

namespace mfg {

/// Divergence source (q β)_x: β^k is applied through the flux drift variation at q^{k+1}.
struct DivergenceTerm {
    std::vector<GridSignedMeasure> q;  ///< per mesh node
    std::vector<GridFunction> beta;    ///< per mesh node
};

/// Sources of the linearized system
///   -v_t - a v_xx + H_p v_x + δH(ρ) = R1,   v(T) = δG(ρ(T)) + R3,
///   ρ_t - (aρ)_xx - (ρ H_p + m H_pp v_x + m δH_p(ρ))_x = (R2)_x.
/// R2 = m·R2drift + Σ q·β + R2plain.
struct LinearSources {
    std::vector<GridFunction> R1;        ///< per node, empty means zero
    std::vector<GridFunction> R2drift;   ///< drift perturbation carried by m, per node
    std::vector<DivergenceTerm> R2terms;
    std::vector<GridFunction> R2plain;   ///< node values, face-averaged
    GridFunction R3;                     ///< zero-size means zero
};

struct LinearizedSolution {
    ParabolicTrajectory v;
    SignedTrajectory rho;
    /// Full drift perturbation δb^k = H_pp v_x + δH_p(ρ̂) + R2drift at every node.
    std::vector<std::vector<double>> deltaDrift;
    int iterations = 0;
    double finalGap = 0.0;
};

/// Quantities of an MFG solution reused by every linearized solve around it.
class LinearizationPoint {
public:
    LinearizationPoint(const Scenario& s, const MFGSolution& sol, const MeasureFunctional& terminal);

    [[nodiscard]] const Scenario& scenario() const noexcept { return s_; }
    [[nodiscard]] const MFGSolution& solution() const noexcept { return sol_; }
    [[nodiscard]] const MeasureFunctional& terminal() const noexcept { return terminal_; }
    [[nodiscard]] const TimeMesh& mesh() const noexcept { return sol_.m.mesh; }
    [[nodiscard]] std::size_t steps() const noexcept { return sol_.m.mesh.steps; }
    [[nodiscard]] const GridDensity& m(std::size_t k) const { return sol_.m.snapshots[k]; }
    [[nodiscard]] const FrozenHamiltonian& H(std::size_t k) const { return frozen_[k]; }
    [[nodiscard]] const std::vector<double>& du(std::size_t k) const { return du_[k]; }
    [[nodiscard]] const std::vector<double>& drift(std::size_t k) const { return b_[k]; }
    /// Chang-Cooper faces of step k -> k+1.
    [[nodiscard]] const ChangCooperFaces& faces(std::size_t k) const { return cc_[k]; }
    [[nodiscard]] const Diffusion& diffusion() const noexcept { return a_; }

private:
    Scenario s_;
    MFGSolution sol_;
    MeasureFunctional terminal_;
    Diffusion a_;
    std::vector<FrozenHamiltonian> frozen_;
    std::vector<std::vector<double>> du_, b_;
    std::vector<ChangCooperFaces> cc_;
};

/// Linearized system with initial datum rho0 (damped Picard in ρ).
LinearizedSolution solveLinearized1(const LinearizationPoint& p, const GridSignedMeasure& rho0,
                                    const LinearSources& src = {});

/// Second-order system for (w, μ), μ(t0) = 0, around two first-order solutions.
LinearizedSolution solveLinearized2(const LinearizationPoint& p, const LinearizedSolution& first,
                                    const LinearizedSolution& second, const LinearSources& tilde = {});

/// Sources of the x0-derivative of (u, m).
LinearSources x0Sources(const LinearizationPoint& p);
/// Extra sources for the mixed x0/measure derivative; `first` is the measure-direction solution.
LinearSources mixedTildeSources(const LinearizationPoint& p, const LinearizedSolution& first);
/// Extra sources for the second x0-derivative; `first` is the x0-direction solution.
LinearSources x0x0TildeSources(const LinearizationPoint& p, const LinearizedSolution& first);

}  // namespace mfg
