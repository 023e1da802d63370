#pragma once

#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace mfg {

/// Uniform periodic mesh of [0, length). Node i sits at x_i = i * spacing.
class TorusGrid {
public:
    TorusGrid() = default;
    TorusGrid(double length, std::size_t cells);
    explicit TorusGrid(std::size_t cells) : TorusGrid(2.0 * std::numbers::pi, cells) {}

    [[nodiscard]] double length() const noexcept { return length_; }
    [[nodiscard]] std::size_t cells() const noexcept { return cells_; }
    [[nodiscard]] double spacing() const noexcept { return spacing_; }
    [[nodiscard]] double node(std::size_t i) const noexcept {
        return static_cast<double>(i) * spacing_;
    }
    /// Signed representative of x in [-length/2, length/2).
    [[nodiscard]] double wrapSigned(double x) const noexcept;
    /// Representative of x in [0, length).
    [[nodiscard]] double wrap(double x) const noexcept;
    [[nodiscard]] std::size_t index(std::ptrdiff_t i) const noexcept;
    [[nodiscard]] std::vector<double> nodes() const;

    friend bool operator==(const TorusGrid& a, const TorusGrid& b) noexcept {
        return a.cells_ == b.cells_ && a.length_ == b.length_;
    }

private:
    double length_ = 2.0 * std::numbers::pi;
    std::size_t cells_ = 0;
    double spacing_ = 0.0;
};

/// Throws IncompatibleGrid if the grids differ.
void requireSameGrid(const TorusGrid& a, const TorusGrid& b, const char* where);

/// Grid function u(x_i).
struct GridFunction {
    TorusGrid grid;
    std::vector<double> values;

    GridFunction() = default;
    explicit GridFunction(const TorusGrid& g) : grid(g), values(g.cells(), 0.0) {}
    GridFunction(const TorusGrid& g, std::vector<double> v);

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    double& operator[](std::size_t i) noexcept { return values[i]; }
    double operator[](std::size_t i) const noexcept { return values[i]; }
    [[nodiscard]] double supNorm() const noexcept;
};

/// Signed measure with cell densities; totalMass = spacing * sum(values).
class GridSignedMeasure {
public:
    GridSignedMeasure() = default;
    explicit GridSignedMeasure(const TorusGrid& g) : grid_(g), values_(g.cells(), 0.0) {}
    GridSignedMeasure(const TorusGrid& g, std::vector<double> v);

    [[nodiscard]] const TorusGrid& grid() const noexcept { return grid_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] const std::vector<double>& vector() const noexcept { return values_; }
    [[nodiscard]] double totalMass() const noexcept { return totalMass_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    [[nodiscard]] GridSignedMeasure scaled(double c) const;
    friend GridSignedMeasure operator+(const GridSignedMeasure& a, const GridSignedMeasure& b);
    friend GridSignedMeasure operator-(const GridSignedMeasure& a, const GridSignedMeasure& b);

private:
    TorusGrid grid_;
    std::vector<double> values_;
    double totalMass_ = 0.0;
};

/// Probability density with nonnegative cell values and unit mass.
class GridDensity {
public:
    GridDensity() = default;
    /// Validates nonnegativity and |mass - 1| <= 1e-12.
    GridDensity(const TorusGrid& g, std::vector<double> v);
    /// Rescales nonnegative values to unit mass before validation.
    static GridDensity normalized(const TorusGrid& g, std::vector<double> v);
    static GridDensity uniform(const TorusGrid& g);
    /// Single-cell indicator of mass one at node i.
    static GridDensity dirac(const TorusGrid& g, std::size_t i);
    /// Wrapped Gaussian centred at mu with variance var (cell-sampled, renormalized).
    static GridDensity wrappedGaussian(const TorusGrid& g, double mu, double var);

    [[nodiscard]] const TorusGrid& grid() const noexcept { return grid_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] const std::vector<double>& vector() const noexcept { return values_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    [[nodiscard]] GridSignedMeasure asSigned() const { return {grid_, values_}; }
    /// (1 - h) * this + h * other.
    [[nodiscard]] GridDensity mix(const GridDensity& other, double h) const;
    /// this + h * rho; throws if the result is not a density.
    [[nodiscard]] GridDensity perturbed(const GridSignedMeasure& rho, double h) const;

private:
    TorusGrid grid_;
    std::vector<double> values_;
};

}  // namespace mfg
