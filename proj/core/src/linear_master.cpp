#include "mfg/linear_master.hpp"

#include <cmath>
#include <numbers>

#include "mfg/errors.hpp"
#include "mfg/measures.hpp"

namespace mfg {

bool WrappedHeatKernel::isIdentity() const noexcept {
    for (std::size_t i = 1; i < weights.size(); ++i) {
        if (weights[i] != 0.0) return false;
    }
    return true;
}

WrappedHeatKernel heatKernel(const TorusGrid& g, double t, double a0) {
    if (t < 0.0 || a0 < 0.0) throw InvalidArgument("heatKernel: t >= 0 and a0 >= 0 required");
    WrappedHeatKernel k{g, t, a0, std::vector<double>(g.cells(), 0.0)};
    const double h = g.spacing();
    const double fourAt = 4.0 * a0 * t;
    double sum = 0.0;
    if (fourAt > 0.0) {
        const double norm = 1.0 / std::sqrt(std::numbers::pi * fourAt);
        const double L = g.length();
        for (std::size_t i = 0; i < g.cells(); ++i) {
            const double z = g.wrapSigned(g.node(i));
            double w = 0.0;
            for (int j = -8; j <= 8; ++j) {
                const double y = z + j * L;
                w += std::exp(-y * y / fourAt);
            }
            k.weights[i] = norm * w;
            sum += k.weights[i];
        }
    }
    if (!(sum > 0.0) || !std::isfinite(sum) || k.weights[0] * h > 1.0 - 1e-16) {
        std::fill(k.weights.begin(), k.weights.end(), 0.0);
        k.weights[0] = 1.0 / h;
        return k;
    }
    const double scale = 1.0 / (h * sum);
    for (double& w : k.weights) w *= scale;
    return k;
}

GridFunction evalLinearMaster(const MeasureFunctional& G, const WrappedHeatKernel& k, const GridDensity& m) {
    requireSameGrid(k.grid, m.grid(), "evalLinearMaster");
    const auto& g = m.grid();
    const std::size_t n = g.cells();
    const double h = g.spacing();
    if (k.isIdentity()) return G.value(m);
    GridFunction out(g);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = k.weights[i];
        if (w * h < 1e-17) continue;
        const auto gi = G.value(rotateCells(m, -static_cast<std::ptrdiff_t>(i)));
        for (std::size_t x = 0; x < n; ++x) out[x] += h * w * gi[x >= i ? x - i : x + n - i];
    }
    return out;
}

GridFunction evalLinearMaster(const MeasureFunctional& G, double t, const GridDensity& m, double a0) {
    return evalLinearMaster(G, heatKernel(m.grid(), t, a0), m);
}

GridFunction dmLinearMaster(const MeasureFunctional& G, double t, const GridDensity& m,
                            const GridSignedMeasure& rho, double a0) {
    const auto& flat = G.requireFlat("dmLinearMaster");
    const auto k = heatKernel(m.grid(), t, a0);
    const auto& g = m.grid();
    const std::size_t n = g.cells();
    const double h = g.spacing();
    if (k.isIdentity()) return flat(m, rho);
    GridFunction out(g);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = k.weights[i];
        if (w * h < 1e-17) continue;
        const auto shift = -static_cast<std::ptrdiff_t>(i);
        const auto gi = flat(rotateCells(m, shift), rotateCells(rho, shift));
        for (std::size_t x = 0; x < n; ++x) out[x] += h * w * gi[x >= i ? x - i : x + n - i];
    }
    return out;
}

MeasureFunctional linearMasterFunctional(MeasureFunctional G, double t, double a0) {
    MeasureFunctional f;
    f.value = [G, t, a0](const GridDensity& m) { return evalLinearMaster(G, t, m, a0); };
    if (G.flat) {
        f.flat = [G, t, a0](const GridDensity& m, const GridSignedMeasure& r) {
            return dmLinearMaster(G, t, m, r, a0);
        };
    }
    return f;
}

double semigroupCheck(const MeasureFunctional& G, double s, double t, const std::vector<GridDensity>& samples,
                      double a0) {
    const auto inner = linearMasterFunctional(G, t, a0);
    double dev = 0.0;
    for (const auto& m : samples) {
        const auto composed = evalLinearMaster(inner, s, m, a0);
        const auto direct = evalLinearMaster(G, s + t, m, a0);
        for (std::size_t i = 0; i < composed.size(); ++i) dev = std::max(dev, std::abs(composed[i] - direct[i]));
    }
    return dev;
}

}  // namespace mfg
