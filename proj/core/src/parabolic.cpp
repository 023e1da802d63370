#include "mfg/parabolic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfg/errors.hpp"
#include "mfg/spectral.hpp"

namespace mfg {

TimeMesh::TimeMesh(double t0_, double t1_, std::size_t steps_) : t0(t0_), t1(t1_), steps(steps_) {
    if (!(t1 > t0)) throw InvalidArgument("TimeMesh: t0 < t1 required");
    if (steps == 0) throw InvalidArgument("TimeMesh: at least one step required");
}

TimeMesh TimeMesh::covering(double t0, double t1, double dtMax) {
    const auto steps = static_cast<std::size_t>(std::ceil((t1 - t0) / dtMax - 1e-9));
    return {t0, t1, std::max<std::size_t>(1, steps)};
}

TimeMesh TimeMesh::anchored(double t0, double t1, double horizon, double dtMax) {
    auto K = static_cast<std::size_t>(std::ceil(horizon / dtMax - 1e-9));
    K = std::max<std::size_t>(2, K + (K % 2));
    const double dt = horizon / static_cast<double>(K);
    const double r = (t1 - t0) / dt;
    const double rr = std::round(r);
    if (rr >= 1.0 && std::abs(r - rr) < 1e-9 * std::max(1.0, r)) {
        return {t0, t1, static_cast<std::size_t>(rr)};
    }
    return covering(t0, t1, dt);
}

Diffusion Diffusion::constant(double a) {
    return {[a](double, double) { return a; }, true};
}

Diffusion Diffusion::cosine(double base, double amp) {
    return {[base, amp](double, double x) { return base + amp * std::cos(x); }, true};
}

std::vector<double> Diffusion::sample(const TorusGrid& g, double t) const {
    std::vector<double> v(g.cells());
    for (std::size_t i = 0; i < g.cells(); ++i) v[i] = fn(t, g.node(i));
    return v;
}

Diffusion Diffusion::scaled(double factor) const {
    auto f = fn;
    return {[f, factor](double t, double x) { return factor * f(t, x); }, autonomous};
}

void solveCyclicTridiagonal(std::span<const double> lower, std::span<const double> diag,
                            std::span<const double> upper, std::span<const double> rhs,
                            std::span<double> x) {
    // Gaussian elimination without pivoting on the bordered structure; for M-matrices every
    // update adds terms of one sign, so nonnegative data give nonnegative solutions.
    const std::size_t n = diag.size();
    std::vector<double> d(n), s(n), e(n), r(rhs.begin(), rhs.end());
    d[0] = diag[0];
    s[0] = upper[0];
    e[0] = lower[0];
    double f = upper[n - 1];  // last row, current column
    double dLast = diag[n - 1];
    for (std::size_t i = 0; i + 2 < n; ++i) {
        const double mult = lower[i + 1] / d[i];
        d[i + 1] = diag[i + 1] - mult * s[i];
        s[i + 1] = upper[i + 1];
        e[i + 1] = -mult * e[i];
        r[i + 1] -= mult * r[i];

        const double mult2 = f / d[i];
        const double base = (i + 1 == n - 2) ? lower[n - 1] : 0.0;
        dLast -= mult2 * e[i];
        r[n - 1] -= mult2 * r[i];
        f = base - mult2 * s[i];
    }
    const double coupling = s[n - 2] + e[n - 2];
    const double mult2 = f / d[n - 2];
    dLast -= mult2 * coupling;
    r[n - 1] -= mult2 * r[n - 2];
    x[n - 1] = r[n - 1] / dLast;
    x[n - 2] = (r[n - 2] - coupling * x[n - 1]) / d[n - 2];
    for (std::size_t ii = n - 2; ii-- > 0;) {
        x[ii] = (r[ii] - s[ii] * x[ii + 1] - e[ii] * x[n - 1]) / d[ii];
    }
}

namespace {

void requireElliptic(std::span<const double> a) {
    const double amin = *std::min_element(a.begin(), a.end());
    if (!(amin > 0.0)) {
        throw NonElliptic("diffusion coefficient must be bounded below by a positive constant (min " +
                          std::to_string(amin) + ")");
    }
}

/// (I - dt a D2) with central differences.
struct ImplicitDiffusion {
    std::vector<double> lower, diag, upper;

    ImplicitDiffusion(std::span<const double> a, double dt, double h)
        : lower(a.size()), diag(a.size()), upper(a.size()) {
        const double r = dt / (h * h);
        for (std::size_t i = 0; i < a.size(); ++i) {
            lower[i] = -r * a[i];
            upper[i] = -r * a[i];
            diag[i] = 1.0 + 2.0 * r * a[i];
        }
    }
    void solve(std::span<const double> rhs, std::span<double> x) const {
        solveCyclicTridiagonal(lower, diag, upper, rhs, x);
    }
};

}  // namespace

ParabolicTrajectory solveHJBackward(const Diffusion& a, const HamiltonianClosure& h,
                                    const GridFunction& g, const TimeMesh& mesh,
                                    const HJOptions& opts) {
    const auto& grid = g.grid;
    const std::size_t n = grid.cells();
    const double dt = mesh.dt();
    const double dx = grid.spacing();
    ParabolicTrajectory traj{mesh, std::vector<GridFunction>(mesh.steps + 1, GridFunction(grid))};
    traj.snapshots[mesh.steps] = g;

    auto aVals = a.sample(grid, mesh.time(mesh.steps));
    requireElliptic(aVals);
    ImplicitDiffusion op(aVals, dt, dx);

    if (opts.mode == GradientMode::Upwind && dt * opts.lfAlpha > dx) {
        throw CflViolation("solveHJBackward: upwind mode needs dt <= spacing/alpha", dx / opts.lfAlpha);
    }

    std::vector<double> p(n), hv(n), hp(n), rhs(n), pm(n), pp(n);
    for (std::size_t k = mesh.steps; k-- > 0;) {
        if (!a.autonomous) {
            aVals = a.sample(grid, mesh.time(k));
            requireElliptic(aVals);
            op = ImplicitDiffusion(aVals, dt, dx);
        }
        const auto& u = traj.snapshots[k + 1].values;
        if (opts.mode == GradientMode::Spectral) {
            spectral::derivative(u, grid.length(), 1, p);
            h(k + 1, p, hv);
            if (opts.hp) {
                opts.hp(k + 1, p, hp);
                double bmax = 0.0;
                for (double b : hp) bmax = std::max(bmax, std::abs(b));
                if (bmax > 0.0 && dt * bmax > opts.cfl * dx) {
                    throw CflViolation("solveHJBackward: drift too large for dt (max |h_p| = " +
                                           std::to_string(bmax) + ")",
                                       opts.cfl * dx / bmax);
                }
            }
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                pm[i] = (u[i] - u[grid.index(static_cast<std::ptrdiff_t>(i) - 1)]) / dx;
                pp[i] = (u[(i + 1) % n] - u[i]) / dx;
                p[i] = 0.5 * (pm[i] + pp[i]);
            }
            h(k + 1, p, hv);
            for (std::size_t i = 0; i < n; ++i) hv[i] -= 0.5 * opts.lfAlpha * (pp[i] - pm[i]);
        }
        for (std::size_t i = 0; i < n; ++i) rhs[i] = u[i] - dt * hv[i];
        op.solve(rhs, traj.snapshots[k].values);
    }
    return traj;
}

std::vector<ParabolicTrajectory> solveLinearParabolicSystem(
    const Diffusion& a, const FieldAt& drift, const std::vector<FieldAt>& sources,
    const std::vector<GridFunction>& terminals, const TimeMesh& mesh,
    const std::vector<FieldAt>& leaderCoupling) {
    if (terminals.empty()) return {};
    if (sources.size() != terminals.size()) {
        throw InvalidArgument("solveLinearParabolicSystem: one source per component required");
    }
    const auto& grid = terminals.front().grid;
    for (const auto& t : terminals) requireSameGrid(grid, t.grid, "solveLinearParabolicSystem");
    const std::size_t n = grid.cells();
    const std::size_t L = terminals.size();
    const double dt = mesh.dt();
    std::vector<ParabolicTrajectory> out(
        L, ParabolicTrajectory{mesh, std::vector<GridFunction>(mesh.steps + 1, GridFunction(grid))});
    for (std::size_t l = 0; l < L; ++l) out[l].snapshots[mesh.steps] = terminals[l];

    auto aVals = a.sample(grid, mesh.time(mesh.steps));
    requireElliptic(aVals);
    ImplicitDiffusion op(aVals, dt, grid.spacing());
    std::vector<double> V(n), f(n), c(n), du(n), du0(n), rhs(n);
    for (std::size_t k = mesh.steps; k-- > 0;) {
        if (!a.autonomous) {
            aVals = a.sample(grid, mesh.time(k));
            requireElliptic(aVals);
            op = ImplicitDiffusion(aVals, dt, grid.spacing());
        }
        if (drift) {
            drift(k + 1, V);
        } else {
            std::fill(V.begin(), V.end(), 0.0);
        }
        spectral::derivative(out[0].snapshots[k + 1].values, grid.length(), 1, du0);
        for (std::size_t l = 0; l < L; ++l) {
            const auto& u = out[l].snapshots[k + 1].values;
            if (l == 0) {
                std::copy(du0.begin(), du0.end(), du.begin());
            } else {
                spectral::derivative(u, grid.length(), 1, du);
            }
            if (sources[l]) {
                sources[l](k + 1, f);
            } else {
                std::fill(f.begin(), f.end(), 0.0);
            }
            const bool coupled = l > 0 && l < leaderCoupling.size() && leaderCoupling[l];
            if (coupled) leaderCoupling[l](k + 1, c);
            for (std::size_t i = 0; i < n; ++i) {
                double tot = V[i] * du[i] + f[i];
                if (coupled) tot += c[i] * du0[i];
                rhs[i] = u[i] - dt * tot;
            }
            op.solve(rhs, out[l].snapshots[k].values);
        }
    }
    return out;
}

double bernoulli(double w) {
    if (std::abs(w) < 1e-4) return 1.0 - 0.5 * w + w * w / 12.0;
    return w / std::expm1(w);
}

double bernoulliPrime(double w) {
    if (std::abs(w) < 1e-4) return -0.5 + w / 6.0 - w * w * w / 180.0;
    const double em = std::expm1(w);
    return (em - w * (em + 1.0)) / (em * em);
}

double bernoulliSecond(double w) {
    if (std::abs(w) < 1e-2) {
        const double w2 = w * w;
        return 1.0 / 6.0 - w2 / 60.0 + w2 * w2 / 1008.0;
    }
    const double d = std::expm1(w);
    const double e = d + 1.0;
    return e * (2.0 * w * e - (w + 2.0) * d) / (d * d * d);
}

ChangCooperFaces::ChangCooperFaces(std::span<const double> a, std::span<const double> b, double h)
    : D_(a.size()), w_(a.size()), h_(h) {
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        D_[i] = 0.5 * (a[i] + a[j]);
        const double v = 0.5 * (b[i] + b[j]) + (a[j] - a[i]) / h;
        w_[i] = v * h / D_[i];
    }
}

std::vector<double> ChangCooperFaces::flux(std::span<const double> q) const {
    const std::size_t n = q.size();
    std::vector<double> J(n);
    for (std::size_t i = 0; i < n; ++i) {
        J[i] = D_[i] / h_ * (bernoulli(-w_[i]) * q[(i + 1) % n] - bernoulli(w_[i]) * q[i]);
    }
    return J;
}

void ChangCooperFaces::addDriftVariation(std::span<const double> q, std::span<const double> beta,
                                         std::span<double> faces) const {
    const std::size_t n = q.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        const double bf = 0.5 * (beta[i] + beta[j]);
        faces[i] += bf * (-bernoulliPrime(-w_[i]) * q[j] - bernoulliPrime(w_[i]) * q[i]);
    }
}

void ChangCooperFaces::addDriftSecondVariation(std::span<const double> q,
                                               std::span<const double> beta1,
                                               std::span<const double> beta2,
                                               std::span<double> faces) const {
    const std::size_t n = q.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        const double b1 = 0.5 * (beta1[i] + beta1[j]);
        const double b2 = 0.5 * (beta2[i] + beta2[j]);
        const double c = h_ / D_[i];
        faces[i] += b1 * b2 * c * (bernoulliSecond(-w_[i]) * q[j] - bernoulliSecond(w_[i]) * q[i]);
    }
}

double ChangCooperFaces::maxPeclet() const noexcept {
    double m = 0.0;
    for (double w : w_) m = std::max(m, std::abs(w));
    return m;
}

namespace {

/// One implicit step (I - dt L) q^{k+1} = q^k + dt (S)_x.
void ccStep(const ChangCooperFaces& cc, double dt, std::span<const double> q,
            std::span<const double> faceSource, std::span<double> out) {
    const std::size_t n = q.size();
    const double h = cc.h();
    const double r = dt / (h * h);
    const auto& D = cc.D();
    const auto& w = cc.w();
    std::vector<double> lower(n), diag(n), upper(n), rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t im = (i + n - 1) % n;
        upper[i] = -r * D[i] * bernoulli(-w[i]);
        lower[i] = -r * D[im] * bernoulli(w[im]);
        diag[i] = 1.0 + r * (D[i] * bernoulli(w[i]) + D[im] * bernoulli(-w[im]));
        rhs[i] = q[i];
        if (!faceSource.empty()) rhs[i] += dt * (faceSource[i] - faceSource[im]) / h;
    }
    solveCyclicTridiagonal(lower, diag, upper, rhs, out);
}

void checkDriftCfl(std::span<const double> b, double dt, double h, double cfl, const char* where) {
    double bmax = 0.0;
    for (double v : b) bmax = std::max(bmax, std::abs(v));
    if (bmax > 0.0 && dt * bmax > cfl * h) {
        throw CflViolation(std::string(where) + ": drift too large for dt (max |b| = " +
                               std::to_string(bmax) + ")",
                           cfl * h / bmax);
    }
}

}  // namespace

DensityTrajectory solveFPForward(const Diffusion& a, const FieldAt& drift, const GridDensity& m0,
                                 const TimeMesh& mesh, double cfl) {
    const auto& grid = m0.grid();
    const std::size_t n = grid.cells();
    DensityTrajectory traj{mesh, {}};
    traj.snapshots.reserve(mesh.steps + 1);
    traj.snapshots.push_back(m0);
    std::vector<double> b(n, 0.0), next(n);
    auto aVals = a.sample(grid, mesh.t0);
    requireElliptic(aVals);
    for (std::size_t k = 0; k < mesh.steps; ++k) {
        if (!a.autonomous) aVals = a.sample(grid, mesh.time(k + 1));
        if (drift) drift(k, b);
        checkDriftCfl(b, mesh.dt(), grid.spacing(), cfl, "solveFPForward");
        ChangCooperFaces cc(aVals, b, grid.spacing());
        ccStep(cc, mesh.dt(), traj.snapshots.back().values(), {}, next);
        traj.snapshots.emplace_back(grid, next);
    }
    return traj;
}

SignedTrajectory solveFPSignedForward(const Diffusion& a, const FieldAt& drift,
                                      const GridSignedMeasure& rho0, const FaceSource& source,
                                      const TimeMesh& mesh, double cfl) {
    const auto& grid = rho0.grid();
    const std::size_t n = grid.cells();
    SignedTrajectory traj{mesh, {}};
    traj.snapshots.reserve(mesh.steps + 1);
    traj.snapshots.push_back(rho0);
    std::vector<double> b(n, 0.0), faces(n), next(n);
    auto aVals = a.sample(grid, mesh.t0);
    requireElliptic(aVals);
    for (std::size_t k = 0; k < mesh.steps; ++k) {
        if (!a.autonomous) aVals = a.sample(grid, mesh.time(k + 1));
        if (drift) drift(k, b);
        checkDriftCfl(b, mesh.dt(), grid.spacing(), cfl, "solveFPSignedForward");
        ChangCooperFaces cc(aVals, b, grid.spacing());
        std::fill(faces.begin(), faces.end(), 0.0);
        if (source) source(k, faces);
        ccStep(cc, mesh.dt(), traj.snapshots.back().values(), faces, next);
        traj.snapshots.emplace_back(grid, next);
    }
    return traj;
}

SignedTrajectory solveFPSignedForward(const Diffusion& a, const FieldAt& drift,
                                      const GridSignedMeasure& rho0,
                                      const std::vector<GridFunction>& sources,
                                      const TimeMesh& mesh, double cfl) {
    const std::size_t n = rho0.size();
    FaceSource src = [&](std::size_t k, std::span<double> faces) {
        if (k >= sources.size()) return;
        const auto& R = sources[k];
        for (std::size_t i = 0; i < n; ++i) faces[i] += 0.5 * (R[i] + R[(i + 1) % n]);
    };
    return solveFPSignedForward(a, drift, rho0, src, mesh, cfl);
}

BernsteinAuditReport bernsteinAudit(const ParabolicTrajectory& traj, const GridFunction& g,
                                    int maxOrder) {
    BernsteinAuditReport rep;
    const double L = g.grid.length();
    const std::size_t K = traj.mesh.steps;
    rep.supNorms.assign(static_cast<std::size_t>(maxOrder) + 1, 0.0);
    rep.terminalNorms.assign(static_cast<std::size_t>(maxOrder) + 1, 0.0);
    rep.fittedOrderC.assign(static_cast<std::size_t>(maxOrder) + 1, 0.0);
    rep.sharpOrderC.assign(static_cast<std::size_t>(maxOrder) + 1, 0.0);
    // norms[r][k] = ‖D^r u(t_k)‖∞
    std::vector<std::vector<double>> norms(rep.supNorms.size(), std::vector<double>(K + 1));
    for (std::size_t k = 0; k <= K; ++k) {
        const auto& u = traj.snapshots[k].values;
        for (int r = 0; r <= maxOrder; ++r) {
            const auto d = spectral::derivative(u, L, r);
            double s = 0.0;
            for (double v : d) s = std::max(s, std::abs(v));
            norms[static_cast<std::size_t>(r)][k] = s;
        }
    }
    for (int r = 0; r <= maxOrder; ++r) {
        const auto ru = static_cast<std::size_t>(r);
        const auto d = spectral::derivative(g.values, L, r);
        double s = 0.0;
        for (double v : d) s = std::max(s, std::abs(v));
        rep.terminalNorms[ru] = s;
        double running = norms[ru][K];
        double num = 0.0, den = 0.0, sharp = 0.0;
        for (std::size_t k = K; k-- > 0;) {
            running = std::max(running, norms[ru][k]);
            const double dur = traj.mesh.t1 - traj.mesh.time(k);
            num += dur * (norms[ru][k] - s);
            den += dur * dur;
            sharp = std::max(sharp, (norms[ru][k] - s) / dur);
        }
        rep.supNorms[ru] = running;
        rep.fittedOrderC[ru] = den > 0.0 ? num / den : 0.0;
        rep.sharpOrderC[ru] = sharp;
    }
    if (maxOrder >= 1) {
        rep.supLip = rep.supNorms[1];
        rep.terminalLip = rep.terminalNorms[1];
        rep.fittedC = rep.fittedOrderC[1];
        rep.sharpC = rep.sharpOrderC[1];
        rep.KM = rep.supLip;
    }
    return rep;
}

}  // namespace mfg
