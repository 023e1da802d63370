#include "mfg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mfg/errors.hpp"

namespace mfg {

namespace {

double massOf(const std::vector<double>& v, double h) {
    return h * std::accumulate(v.begin(), v.end(), 0.0);
}

}  // namespace

TorusGrid::TorusGrid(double length, std::size_t cells)
    : length_(length), cells_(cells), spacing_(length / static_cast<double>(cells)) {
    if (!(length > 0.0)) throw InvalidArgument("TorusGrid: length must be positive");
    if (cells < 8) throw InvalidArgument("TorusGrid: at least 8 cells required");
}

double TorusGrid::wrap(double x) const noexcept {
    double r = std::fmod(x, length_);
    if (r < 0.0) r += length_;
    if (r >= length_) r -= length_;
    return r;
}

double TorusGrid::wrapSigned(double x) const noexcept {
    double r = wrap(x);
    if (r >= 0.5 * length_) r -= length_;
    return r;
}

std::size_t TorusGrid::index(std::ptrdiff_t i) const noexcept {
    const auto n = static_cast<std::ptrdiff_t>(cells_);
    std::ptrdiff_t r = i % n;
    if (r < 0) r += n;
    return static_cast<std::size_t>(r);
}

std::vector<double> TorusGrid::nodes() const {
    std::vector<double> x(cells_);
    for (std::size_t i = 0; i < cells_; ++i) x[i] = node(i);
    return x;
}

void requireSameGrid(const TorusGrid& a, const TorusGrid& b, const char* where) {
    if (!(a == b)) {
        throw IncompatibleGrid(std::string(where) + ": operands live on different grids (" +
                               std::to_string(a.cells()) + " vs " + std::to_string(b.cells()) +
                               " cells)");
    }
}

GridFunction::GridFunction(const TorusGrid& g, std::vector<double> v)
    : grid(g), values(std::move(v)) {
    if (values.size() != g.cells()) throw IncompatibleGrid("GridFunction: size mismatch");
}

double GridFunction::supNorm() const noexcept {
    double s = 0.0;
    for (double x : values) s = std::max(s, std::abs(x));
    return s;
}

GridSignedMeasure::GridSignedMeasure(const TorusGrid& g, std::vector<double> v)
    : grid_(g), values_(std::move(v)) {
    if (values_.size() != g.cells()) throw IncompatibleGrid("GridSignedMeasure: size mismatch");
    totalMass_ = massOf(values_, g.spacing());
}

GridSignedMeasure GridSignedMeasure::scaled(double c) const {
    std::vector<double> v(values_);
    for (double& x : v) x *= c;
    return {grid_, std::move(v)};
}

GridSignedMeasure operator+(const GridSignedMeasure& a, const GridSignedMeasure& b) {
    requireSameGrid(a.grid_, b.grid_, "GridSignedMeasure::operator+");
    std::vector<double> v(a.values_);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += b.values_[i];
    return {a.grid_, std::move(v)};
}

GridSignedMeasure operator-(const GridSignedMeasure& a, const GridSignedMeasure& b) {
    requireSameGrid(a.grid_, b.grid_, "GridSignedMeasure::operator-");
    std::vector<double> v(a.values_);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= b.values_[i];
    return {a.grid_, std::move(v)};
}

GridDensity::GridDensity(const TorusGrid& g, std::vector<double> v)
    : grid_(g), values_(std::move(v)) {
    if (values_.size() != g.cells()) throw IncompatibleGrid("GridDensity: size mismatch");
    for (double x : values_) {
        if (!(x >= 0.0) || !std::isfinite(x)) {
            throw InvalidArgument("GridDensity: negative or non-finite cell value");
        }
    }
    const double mass = massOf(values_, g.spacing());
    if (std::abs(mass - 1.0) > 1e-12) {
        throw InvalidArgument("GridDensity: total mass " + std::to_string(mass) + " is not 1");
    }
}

GridDensity GridDensity::normalized(const TorusGrid& g, std::vector<double> v) {
    const double mass = massOf(v, g.spacing());
    if (!(mass > 0.0)) throw InvalidArgument("GridDensity::normalized: zero mass");
    for (double& x : v) x /= mass;
    return {g, std::move(v)};
}

GridDensity GridDensity::uniform(const TorusGrid& g) {
    return {g, std::vector<double>(g.cells(), 1.0 / g.length())};
}

GridDensity GridDensity::dirac(const TorusGrid& g, std::size_t i) {
    std::vector<double> v(g.cells(), 0.0);
    v[i % g.cells()] = 1.0 / g.spacing();
    return {g, std::move(v)};
}

GridDensity GridDensity::wrappedGaussian(const TorusGrid& g, double mu, double var) {
    std::vector<double> v(g.cells(), 0.0);
    const double L = g.length();
    for (std::size_t i = 0; i < g.cells(); ++i) {
        const double d = g.wrapSigned(g.node(i) - mu);
        double s = 0.0;
        for (int j = -8; j <= 8; ++j) {
            const double z = d + j * L;
            s += std::exp(-z * z / (2.0 * var));
        }
        v[i] = s;
    }
    return normalized(g, std::move(v));
}

GridDensity GridDensity::mix(const GridDensity& other, double h) const {
    requireSameGrid(grid_, other.grid_, "GridDensity::mix");
    std::vector<double> v(values_.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = std::max(0.0, (1.0 - h) * values_[i] + h * other.values_[i]);
    }
    return normalized(grid_, std::move(v));
}

GridDensity GridDensity::perturbed(const GridSignedMeasure& rho, double h) const {
    requireSameGrid(grid_, rho.grid(), "GridDensity::perturbed");
    std::vector<double> v(values_);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += h * rho[i];
    return {grid_, std::move(v)};
}

}  // namespace mfg
