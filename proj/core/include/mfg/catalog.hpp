#pragma once

#include <string>
#include <vector>

#include "mfg/grid.hpp"

namespace mfg {

/// k(z) = Σ_j cosCoef[j] cos(jωz) + sinCoef[j] sin(jωz), ω = 2π/length.
struct TrigKernel {
    std::vector<double> cosCoef;
    std::vector<double> sinCoef;

    [[nodiscard]] std::size_t degree() const noexcept;
    [[nodiscard]] double operator()(double z, double length) const;
    [[nodiscard]] TrigKernel derivative(double length) const;
    [[nodiscard]] bool isZero() const noexcept;
};

/// Fourier moments C_j = ∫cos(jωy)μ(dy), S_j = ∫sin(jωy)μ(dy) of a grid measure.
struct FourierMoments {
    std::vector<double> C, S;
    double length = 0.0;
};

FourierMoments fourierMoments(std::span<const double> values, const TorusGrid& g,
                              std::size_t degree);

/// (k * μ)(x) from the moments of μ.
double convolveAt(const TrigKernel& k, const FourierMoments& mom, double x);
/// (k * μ) sampled on the nodes of `target`.
GridFunction convolveOn(const TrigKernel& k, const FourierMoments& mom, const TorusGrid& target);
/// (k * μ) on the grid of μ.
GridFunction convolve(const TrigKernel& k, std::span<const double> values, const TorusGrid& g);

/// ρ̂ = ρ - mass(ρ) m: the projection that enforces ∫ δU/δm dm = 0.
GridSignedMeasure projectDirection(const GridSignedMeasure& rho, const GridDensity& m);

/// Convolutions of one measure against the three Hamiltonian kernels.
struct MeasureFields {
    GridFunction chi, phi, psi;
};

/// Catalog Hamiltonian (all terms scaled by `scale`):
///   H = ½(q0 + q1 χ*m) p² + (β φ*m + B sin ω(x - x0)) p
///       + c0 (1 + e cos ωx0) ψ*m + ½ c2 (ψ*m)² + A cos ω(x - x0) + V cos ωx,
/// with ω = 2π/length.
struct CatalogHamiltonian {
    std::string tag = "quadratic-nonlocal";
    double scale = 1.0;
    double q0 = 1.0, q1 = 0.0, beta = 0.0, B = 0.0;
    double c0 = 0.0, e = 0.0, c2 = 0.0, A = 0.0, V = 0.0;
    TrigKernel chi{{0.0, 1.0}, {}};
    TrigKernel phi{{0.0, 0.0}, {0.0, 1.0}};
    TrigKernel psi{{0.0, 1.0}, {}};
    double C0 = 1.0;     ///< declared growth constant (reports only)
    double gamma = 1.0;  ///< declared growth exponent (reports only)

    [[nodiscard]] CatalogHamiltonian scaled(double factor) const;
    [[nodiscard]] bool couplesMeasure() const noexcept { return q1 != 0.0 || beta != 0.0 || c0 != 0.0 || c2 != 0.0; }
    [[nodiscard]] MeasureFields fields(std::span<const double> values, const TorusGrid& g) const;
    [[nodiscard]] MeasureFields fields(const GridDensity& m) const { return fields(m.values(), m.grid()); }
    /// Fields of the projected direction ρ̂.
    [[nodiscard]] MeasureFields directionFields(const GridSignedMeasure& rho, const GridDensity& m) const;
};

/// H and its derivatives frozen at (x0, m); node index i, momentum p.
class FrozenHamiltonian {
public:
    FrozenHamiltonian(const CatalogHamiltonian& h, double x0, const GridDensity& m);
    FrozenHamiltonian(const CatalogHamiltonian& h, double x0, const TorusGrid& g, MeasureFields f);

    [[nodiscard]] const MeasureFields& fields() const noexcept { return f_; }

    [[nodiscard]] double H(std::size_t i, double p) const;
    [[nodiscard]] double Hp(std::size_t i, double p) const;
    [[nodiscard]] double Hpp(std::size_t i, double p) const;
    [[nodiscard]] double Hppp(std::size_t i, double p) const;
    [[nodiscard]] double dH(std::size_t i, double p, const MeasureFields& d) const;
    [[nodiscard]] double dHp(std::size_t i, double p, const MeasureFields& d) const;
    [[nodiscard]] double dHpp(std::size_t i, double p, const MeasureFields& d) const;
    [[nodiscard]] double d2H(std::size_t i, double p, const MeasureFields& d, const MeasureFields& d2) const;
    [[nodiscard]] double d2Hp(std::size_t i, double p, const MeasureFields& d, const MeasureFields& d2) const;
    [[nodiscard]] double Hx0(std::size_t i, double p) const;
    [[nodiscard]] double Hx0p(std::size_t i, double p) const;
    [[nodiscard]] double Hx0pp(std::size_t i, double p) const;
    [[nodiscard]] double Hx0x0(std::size_t i, double p) const;
    [[nodiscard]] double Hx0x0p(std::size_t i, double p) const;
    [[nodiscard]] double dHx0(std::size_t i, double p, const MeasureFields& d) const;
    [[nodiscard]] double dHx0p(std::size_t i, double p, const MeasureFields& d) const;

private:
    CatalogHamiltonian h_;
    double x0_;
    double w_;
    MeasureFields f_;
    std::vector<double> sinShift_, cosShift_, cosX_;
    double cosX0_ = 1.0, sinX0_ = 0.0;
};

/// Catalog terminal cost
///   G = Ag sin x + Bg cos(x - x0) + cg (1 + eg cos x0) κ*m + ½ qg (λ*m)².
struct CatalogTerminal {
    double Ag = 0.0, Bg = 0.0, cg = 0.0, eg = 0.0, qg = 0.0;
    TrigKernel kappa{{0.0, 1.0}, {}};
    TrigKernel lambda{{0.0, 1.0}, {}};

    [[nodiscard]] GridFunction value(double x0, const GridDensity& m) const;
    [[nodiscard]] GridFunction flat(double x0, const GridDensity& m, const GridSignedMeasure& rho) const;
    [[nodiscard]] GridFunction flat2(double x0, const GridDensity& m, const GridSignedMeasure& rho,
                                     const GridSignedMeasure& rho2) const;
    [[nodiscard]] GridFunction dx0(double x0, const GridDensity& m) const;
    [[nodiscard]] GridFunction dx0x0(double x0, const GridDensity& m) const;
    [[nodiscard]] GridFunction dx0Flat(double x0, const GridDensity& m, const GridSignedMeasure& rho) const;
    [[nodiscard]] bool dependsOnMeasure() const noexcept { return cg != 0.0 || qg != 0.0; }
};

/// Major-player Hamiltonian on the x0-torus (scaled by `scale`):
///   H⁰ = ½ p² + β0 p (η*m)(x0) + c00 (ζ*m)(x0) + V0 cos x0.
struct CatalogMajorHamiltonian {
    double scale = 1.0;
    double beta0 = 0.0, c00 = 0.0, V0 = 0.0;
    TrigKernel eta{{0.0, 1.0}, {}};
    TrigKernel zeta{{0.0, 1.0}, {}};

    [[nodiscard]] CatalogMajorHamiltonian scaled(double f) const;
};

/// H⁰ frozen at m and evaluated on x0-grid nodes j.
class FrozenMajorHamiltonian {
public:
    FrozenMajorHamiltonian(const CatalogMajorHamiltonian& h, const TorusGrid& x0grid, const GridDensity& m);
    [[nodiscard]] double H(std::size_t j, double p) const;
    [[nodiscard]] double Hp(std::size_t j, double p) const;
    [[nodiscard]] double Hpp(std::size_t j, double p) const;
    [[nodiscard]] double Hppp(std::size_t j, double p) const;
    /// Fields (η*ρ̂, ζ*ρ̂) on x0 nodes of a direction.
    struct Direction {
        GridFunction eta, zeta;
    };
    [[nodiscard]] Direction direction(const GridSignedMeasure& rho, const GridDensity& m) const;
    [[nodiscard]] double dH(std::size_t j, double p, const Direction& d) const;
    [[nodiscard]] double dHp(std::size_t j, double p, const Direction& d) const;
    [[nodiscard]] double dHpp(std::size_t j, double p, const Direction& d) const;
    [[nodiscard]] double d2H(std::size_t j, double p, const Direction& d, const Direction& d2) const;
    [[nodiscard]] double d2Hp(std::size_t j, double p, const Direction& d, const Direction& d2) const;

private:
    CatalogMajorHamiltonian h_;
    TorusGrid g0_;
    GridFunction eta_, zeta_;
    std::vector<double> cosX0_;
};

/// Major-player terminal G⁰ = A0 cos x0 + c0g (θ*m)(x0) + ½ q0g (θ*m)(x0)².
struct CatalogMajorTerminal {
    double A0 = 0.0, c0g = 0.0, q0g = 0.0;
    TrigKernel theta{{0.0, 1.0}, {}};

    [[nodiscard]] double value(double x0, const GridDensity& m) const;
    [[nodiscard]] double flat(double x0, const GridDensity& m, const GridSignedMeasure& rho) const;
    [[nodiscard]] double flat2(double x0, const GridDensity& m, const GridSignedMeasure& rho,
                               const GridSignedMeasure& rho2) const;
    [[nodiscard]] double dx0(double x0, const GridDensity& m) const;
    [[nodiscard]] double dx0Flat(double x0, const GridDensity& m, const GridSignedMeasure& rho) const;
    [[nodiscard]] GridFunction valueOn(const TorusGrid& x0grid, const GridDensity& m) const;
};

}  // namespace mfg
