#pragma once

#include <functional>
#include <span>
#include <vector>

#include "mfg/grid.hpp"

namespace mfg {

/// Uniform mesh t0 < t1 with `steps` steps; node k sits at t0 + k*dt.
struct TimeMesh {
    double t0 = 0.0, t1 = 1.0;
    std::size_t steps = 1;

    TimeMesh() = default;
    TimeMesh(double t0, double t1, std::size_t steps);
    [[nodiscard]] double dt() const noexcept { return (t1 - t0) / static_cast<double>(steps); }
    [[nodiscard]] double time(std::size_t k) const noexcept { return t0 + static_cast<double>(k) * dt(); }

    /// Mesh on [t0, t1] whose nodes coincide with the uniform mesh of [0, horizon]
    /// with an even number of steps of size at most dtMax, whenever t0 is such a node.
    static TimeMesh anchored(double t0, double t1, double horizon, double dtMax);
    /// Smallest uniform mesh on [t0, t1] with dt <= dtMax.
    static TimeMesh covering(double t0, double t1, double dtMax);
};

/// Diffusion coefficient a(t, x); time-independent in the catalog.
struct Diffusion {
    std::function<double(double t, double x)> fn;
    bool autonomous = true;

    static Diffusion constant(double a);
    static Diffusion cosine(double base, double amp);
    [[nodiscard]] std::vector<double> sample(const TorusGrid& g, double t) const;
    [[nodiscard]] Diffusion scaled(double factor) const;
};

/// Snapshots of a scalar field at every mesh node.
struct ParabolicTrajectory {
    TimeMesh mesh;
    std::vector<GridFunction> snapshots;
};

/// Snapshots of a density at every mesh node.
struct DensityTrajectory {
    TimeMesh mesh;
    std::vector<GridDensity> snapshots;
};

/// Snapshots of a signed measure at every mesh node.
struct SignedTrajectory {
    TimeMesh mesh;
    std::vector<GridSignedMeasure> snapshots;
};

/// Fills `out` with values of a field at mesh node k.
using FieldAt = std::function<void(std::size_t k, std::span<double> out)>;
/// Fills `out` with h(t_k, x_i, p_i) for gradient samples p at mesh node k.
using HamiltonianClosure = std::function<void(std::size_t k, std::span<const double> p, std::span<double> out)>;

enum class GradientMode { Spectral, Upwind };

struct HJOptions {
    GradientMode mode = GradientMode::Spectral;
    /// Bound on |h_p| used by the Lax-Friedrichs flux in upwind mode.
    double lfAlpha = 1.0;
    /// Optional h_p closure for the drift-CFL check (spectral mode).
    HamiltonianClosure hp;
    double cfl = 0.5;
};

/// Backward IMEX Euler for -u_t - a u_xx + h(t, x, u_x) = 0, u(t1) = g.
ParabolicTrajectory solveHJBackward(const Diffusion& a, const HamiltonianClosure& h,
                                    const GridFunction& g, const TimeMesh& mesh,
                                    const HJOptions& opts = {});

/// Backward solves of -u_l,t - a u_l,xx + V u_l,x + f_l + c_l D u_0 = 0 sharing a and V.
/// `leaderCoupling[l]` (optional, l >= 1) is the coefficient c_l of the leader gradient.
std::vector<ParabolicTrajectory> solveLinearParabolicSystem(
    const Diffusion& a, const FieldAt& drift, const std::vector<FieldAt>& sources,
    const std::vector<GridFunction>& terminals, const TimeMesh& mesh,
    const std::vector<FieldAt>& leaderCoupling = {});

/// Forward Chang-Cooper solve of m_t - (a m)_xx - (b m)_x = 0; b(k) drives step k -> k+1.
DensityTrajectory solveFPForward(const Diffusion& a, const FieldAt& drift, const GridDensity& m0,
                                 const TimeMesh& mesh, double cfl = 0.5);

/// Face fluxes S_{i+1/2} at step k; the source enters as +(S)_x.
using FaceSource = std::function<void(std::size_t k, std::span<double> faces)>;

/// Same operator on signed data with divergence sources: rho_t - L rho = (S)_x.
SignedTrajectory solveFPSignedForward(const Diffusion& a, const FieldAt& drift,
                                      const GridSignedMeasure& rho0, const FaceSource& source,
                                      const TimeMesh& mesh, double cfl = 0.5);
/// Node-valued divergence sources R(t_k, x_i), averaged to faces.
SignedTrajectory solveFPSignedForward(const Diffusion& a, const FieldAt& drift,
                                      const GridSignedMeasure& rho0,
                                      const std::vector<GridFunction>& sources,
                                      const TimeMesh& mesh, double cfl = 0.5);

/// Chang-Cooper face quantities for given diffusion and drift samples.
class ChangCooperFaces {
public:
    ChangCooperFaces(std::span<const double> a, std::span<const double> b, double h);
    /// Face flux J_{i+1/2} = a m_x + (a_x + b) m of a density-like q.
    [[nodiscard]] std::vector<double> flux(std::span<const double> q) const;
    /// Derivative of the face flux with respect to the drift, applied to q and a drift
    /// perturbation beta (node values, face-averaged).
    void addDriftVariation(std::span<const double> q, std::span<const double> beta,
                           std::span<double> faces) const;
    /// Second drift derivative of the face flux applied to q and two drift perturbations.
    void addDriftSecondVariation(std::span<const double> q, std::span<const double> beta1,
                                 std::span<const double> beta2, std::span<double> faces) const;
    [[nodiscard]] std::size_t size() const noexcept { return D_.size(); }
    [[nodiscard]] double maxPeclet() const noexcept;

    [[nodiscard]] const std::vector<double>& D() const noexcept { return D_; }
    [[nodiscard]] const std::vector<double>& w() const noexcept { return w_; }
    [[nodiscard]] double h() const noexcept { return h_; }

private:
    std::vector<double> D_, w_;
    double h_;
};

/// Bernoulli function B(w) = w / (e^w - 1) and its derivative.
double bernoulli(double w);
double bernoulliPrime(double w);
double bernoulliSecond(double w);

struct BernsteinAuditReport {
    double supLip = 0.0;     ///< sup_t ‖u_x(t)‖∞
    double terminalLip = 0.0;
    double fittedC = 0.0;    ///< signed least-squares rate of Lip(u(t)) - Lip(g) against T - t
    double sharpC = 0.0;     ///< smallest C >= 0 with Lip(u(t)) <= Lip(g) + C (T - t) on the mesh
    std::vector<double> supNorms;       ///< sup_t ‖D^r u(t)‖∞, r = 0..n
    std::vector<double> terminalNorms;  ///< ‖D^r g‖∞
    std::vector<double> fittedOrderC;   ///< per-order analogues of fittedC
    std::vector<double> sharpOrderC;    ///< per-order analogues of sharpC
    double KM = 0.0;         ///< observed uniform gradient cap
};

BernsteinAuditReport bernsteinAudit(const ParabolicTrajectory& traj, const GridFunction& g,
                                    int maxOrder);

/// Solves a periodic tridiagonal system with corner entries (lower[0] couples to x[n-1],
/// upper[n-1] to x[0]).
void solveCyclicTridiagonal(std::span<const double> lower, std::span<const double> diag,
                            std::span<const double> upper, std::span<const double> rhs,
                            std::span<double> x);

}  // namespace mfg
