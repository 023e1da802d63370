#pragma once

#include <cstdint>

#include "mfg/grid.hpp"

namespace mfg {

/// Periodic W1 distance between two grid densities (atoms at the nodes).
double wasserstein1(const GridDensity& m1, const GridDensity& m2);

/// Periodic W2 distance via quantile functions with circular offset.
double wasserstein2(const GridDensity& m1, const GridDensity& m2);

/// Image of m under x -> x + z, with linear interpolation between cells.
GridDensity pushforwardTranslate(const GridDensity& m, double z);
GridSignedMeasure pushforwardTranslate(const GridSignedMeasure& m, double z);

/// Image of m under x -> x + k*spacing (exact cyclic rotation).
GridDensity rotateCells(const GridDensity& m, std::ptrdiff_t k);
GridFunction rotateCells(const GridFunction& f, std::ptrdiff_t k);
GridSignedMeasure rotateCells(const GridSignedMeasure& m, std::ptrdiff_t k);

double integrateAgainst(const GridDensity& m, const GridFunction& f);
double integrateAgainst(const GridSignedMeasure& m, const GridFunction& f);

/// sqrt(∫ d_per(x,0)^2 m(dx)); diagnostic only.
double moment2(const GridDensity& m);

enum class NormConvention {
    Full,         ///< Σ_{r=0..k} sup|D^r φ|
    Homogeneous,  ///< Σ_{r=1..k} sup|D^r φ|; zero-mass measures only
};

struct DualNormEstimate {
    double value = 0.0;
    int k = 1;
    int candidateCount = 0;
};

/// Lower-bound estimate of ‖ρ‖_{-k} over a deterministic candidate family (Fourier modes, smoothed
/// antiderivative signs, random smooth fields). Sup norms of D^r φ for r >= 2 are spectral; the
/// Lipschitz seminorm is that of the piecewise-linear interpolant.
DualNormEstimate dualNormMinusK(const GridSignedMeasure& rho, int k, int candidateCount,
                                NormConvention convention = NormConvention::Full,
                                std::uint64_t seed = 0x5eed);

/// Exact min_c ‖R - c‖_{L1} for zero-mass ρ with antiderivative R.
double antiderivativeNorm(const GridSignedMeasure& rho);

}  // namespace mfg
