#pragma once

#include <complex>
#include <span>
#include <vector>

#include "mfg/grid.hpp"

namespace mfg::spectral {

/// r-th derivative of a periodic grid function by FFT (Nyquist mode dropped for odd r).
void derivative(std::span<const double> f, double length, int order, std::span<double> out);
std::vector<double> derivative(std::span<const double> f, double length, int order);
GridFunction derivative(const GridFunction& f, int order = 1);

/// Trigonometric interpolant of f sampled on a grid refined by `factor`.
std::vector<double> refine(std::span<const double> f, int factor);

/// Forward real DFT (unnormalized), n/2+1 coefficients.
std::vector<std::complex<double>> forward(std::span<const double> f);
/// Inverse of forward (includes the 1/n factor).
std::vector<double> inverse(std::span<const std::complex<double>> c, std::size_t n);

}  // namespace mfg::spectral
