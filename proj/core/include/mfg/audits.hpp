#pragma once

#include <vector>

#include "mfg/mfg_system.hpp"

namespace mfg {

/// Growth profile r(t) = d(t) / d(0) measured on the horizons T/2 and T.
struct HorizonFit {
    std::vector<double> horizons;
    std::vector<double> ratios;  ///< sup_t r(t) per horizon
    double C = 0.0;              ///< signed least-squares rate of r(t) - 1 against t, both horizons
    double sharpC = 0.0;         ///< smallest C >= 0 with r(t) <= 1 + C t on every mesh node
};

/// Initial-condition stability of the MFG flow: d(t) = d1(m¹(t), m²(t)).
HorizonFit stabilityAudit(const Scenario& s, const GridDensity& m1, const GridDensity& m2);

/// Duality bound of the linearized flow with zero sources: d(t) = ‖ρ(t)‖₋₁ with the exact
/// antiderivative norm (ρ0 of zero mass).
HorizonFit dualityAudit(const Scenario& s, const GridDensity& m0, const GridSignedMeasure& rho0);

/// Bernstein audit of u along the MFG solution from m0 (terminal G(m(T))).
BernsteinAuditReport mfgBernsteinAudit(const Scenario& s, const GridDensity& m0, int maxOrder = 3);

/// sup |f''| of a periodic grid function: the Lipschitz constant of its gradient.
double gradientLipschitz(const GridFunction& f);

}  // namespace mfg
