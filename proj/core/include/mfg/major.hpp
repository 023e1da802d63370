#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "mfg/splitting.hpp"

namespace mfg {

/// (U⁰(x0_j, m), U(x0_j, x_i, m)) on the x0-grid: U0 over x0 nodes, U[j] over the x-grid.
struct MajorValue {
    GridFunction U0;
    std::vector<GridFunction> U;
};

/// m ↦ (U⁰, U) at a fixed time.
using MajorFunctional = std::function<MajorValue(const GridDensity&)>;

/// Joint pairing norm sup_j (|ΔU⁰_j|² + sup_x |ΔU_j|²)^{1/2}.
double jointDistance(const MajorValue& a, const MajorValue& b);

/// The scenario with unit minor diffusion used by every major-player computation.
Scenario majorScenario(const Scenario& s);

/// (G⁰, G) of the scenario at m on the x0-grid.
MajorValue majorTerminal(const Scenario& s, const GridDensity& m);

/// Trajectories of the x0-HJ system with (x, m) fixed.
struct HJSystemSolution {
    ParabolicTrajectory U0;               ///< over the x0-grid
    std::vector<ParabolicTrajectory> U;   ///< one per x-node, over the x0-grid
    [[nodiscard]] MajorValue initial() const;
};

/// -U⁰_t - f ΔU⁰ + f H⁰(x0, DU⁰, m) = 0 and -U_t - f ΔU + f H⁰_p(x0, DU⁰, m) DU = 0 on the x0-torus,
/// terminal (U⁰₊, U₊), duration split in `steps` steps; f is the coefficient factor.
HJSystemSolution solveHJSystemX0(const Scenario& s, const GridDensity& m, const MajorValue& terminal,
                                 double duration, std::size_t steps, double factor = 1.0);

/// First-order system on (t0, t1) with x0 = x0-node j frozen: the MFG solve in x (coefficients
/// multiplied by `factor`) transports U⁰₊ along the same measure flow.
std::pair<double, GridFunction> firstOrderSystemStep(const Scenario& s, std::size_t j, const GridDensity& m0,
                                                     const MajorFunctional& terminal, double t0, double t1,
                                                     std::size_t steps, double factor = 1.0,
                                                     const FixedPointConfig* fp = nullptr);

/// Major-player splitting scheme: HJ-system intervals (t_{2k}, t_{2k+1}), first-order intervals
/// (t_{2k+1}, t_{2k+2}), memoized over (checkpoint, measure).
class MajorScheme {
public:
    MajorScheme(const Scenario& s, int N, SchemeConfig cfg = {}, SolveBudget* budget = nullptr);

    [[nodiscard]] const SplitSchedule& schedule() const noexcept { return sched_; }
    MajorValue eval(std::size_t checkpoint, const GridDensity& m);
    [[nodiscard]] const SchemeCounters& counters() const noexcept { return counters_; }
    [[nodiscard]] std::uint64_t cacheHits() const noexcept { return cache_.hits(); }
    [[nodiscard]] std::uint64_t cacheMisses() const noexcept { return cache_.misses(); }
    [[nodiscard]] std::size_t xSteps() const noexcept { return xSteps_; }
    [[nodiscard]] std::size_t x0Steps() const noexcept { return x0Steps_; }

private:
    Scenario s_;
    SplitSchedule sched_;
    SchemeConfig cfg_;
    SolveBudget* budget_;
    SolveBudget ownBudget_;
    std::size_t xSteps_ = 1, x0Steps_ = 1;
    FunctionalCache<MajorValue> cache_;
    SchemeCounters counters_;

    MajorValue compute(std::size_t k, const GridDensity& m);
};

struct MajorAgreementTable {
    std::vector<ConvergenceRow> rows;
    bool partial = false;
    std::string note;
    std::vector<SchemeCounters> counters;  ///< one per N
    std::vector<double> seconds;           ///< summed wall time per N (not part of artifacts)
    std::vector<std::vector<MajorValue>> values;
};

/// Joint Cauchy table over consecutive Ns; one scheme and budget per (N, sample).
MajorAgreementTable majorAgreement(const Scenario& s, const std::vector<int>& Ns,
                                   const std::vector<GridDensity>& samples, SchemeConfig cfg = {},
                                   std::size_t threads = 1);

/// Linearization data of the x0-HJ system around a solution, with the terminal pair's flat
/// derivatives taken from the scenario's (G⁰, G).
class MajorDerivativeContext {
public:
    MajorDerivativeContext(const Scenario& s, const GridDensity& m, double duration, std::size_t steps);

    [[nodiscard]] const HJSystemSolution& solution() const noexcept { return sol_; }
    /// (v⁰, v) at the initial time for the direction ρ.
    [[nodiscard]] MajorValue derivative(const GridSignedMeasure& rho) const;
    /// (w⁰, w) at the initial time for the directions (ρ, ρ').
    [[nodiscard]] MajorValue secondDerivative(const GridSignedMeasure& rho, const GridSignedMeasure& rho2) const;

    struct Linear {
        ParabolicTrajectory v0;
        std::vector<ParabolicTrajectory> v;
    };
    [[nodiscard]] Linear solveFirst(const GridSignedMeasure& rho) const;

private:
    Scenario s_;
    GridDensity m_;
    double duration_;
    std::size_t steps_;
    HJSystemSolution sol_;
};

MajorValue derivMajorDm(const MajorDerivativeContext& ctx, const GridSignedMeasure& rho);
MajorValue deriv2MajorDm(const MajorDerivativeContext& ctx, const GridSignedMeasure& rho,
                         const GridSignedMeasure& rho2);

}  // namespace mfg
