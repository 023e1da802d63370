// Acceptance run: one PASS/FAIL line per criterion. Tolerances are pinned below. Lines marked
// "expected" cannot be evaluated as stated and do not count towards the exit code.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mfg/audits.hpp"
#include "mfg/errors.hpp"
#include "mfg/linear_master.hpp"
#include "mfg/major.hpp"
#include "mfg/master.hpp"
#include "mfg/measures.hpp"
#include "mfg/splitting.hpp"
#include "oracles/transport_lp.hpp"
#include "oracles/wrapped_sum.hpp"

using namespace mfg;

namespace {

int unexpectedFailures = 0;
int expectedFailures = 0;

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string sci(double v) { return fmt("%.3e", v); }

void line(const std::string& id, const std::string& what, bool pass, const std::string& detail,
          bool expectedFail = false) {
    const char* tag = pass ? "PASS" : (expectedFail ? "FAIL (expected)" : "FAIL");
    std::printf("%-16s %-4s %s: %s\n", tag, id.c_str(), what.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++(expectedFail ? expectedFailures : unexpectedFailures);
}

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    [[nodiscard]] double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void runtime(const std::string& id, double seconds, double limit) {
    line(id, "runtime", seconds < limit, fmt("%.1f s", seconds) + " (limit " + fmt("%.0f s", limit) + ")");
}

double supDiff(const GridFunction& a, const GridFunction& b) {
    double e = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
    return e;
}

GridSignedMeasure direction(const GridDensity& m, double phase, double freq = 1.0) {
    const auto& g = m.grid();
    std::vector<double> v(g.cells());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = m[i] * std::sin(freq * g.node(i) - phase);
    GridSignedMeasure r(g, v);
    return r - m.asSigned().scaled(r.totalMass());
}

/// Smooth positive densities: the scenario's initial density, then random two-mode perturbations.
std::vector<GridDensity> smoothSamples(const Scenario& s, std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> amp(0.0, 0.6), phase(0.0, 2.0 * std::numbers::pi);
    std::vector<GridDensity> out{s.defaultInitial()};
    while (out.size() < count) {
        const double a1 = amp(rng), p1 = phase(rng), a2 = amp(rng) / 2.0, p2 = phase(rng);
        std::vector<double> v(s.grid.cells());
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double x = s.grid.node(i);
            v[i] = 1.0 + a1 * std::cos(x - p1) + a2 * std::cos(2.0 * x - p2);
        }
        out.push_back(GridDensity::normalized(s.grid, v));
    }
    return out;
}

// 1. U(t1, ·, m(t1)) from a fresh solve against u(t1, ·) of the solve from t = 0.
void flowConsistency() {
    Stopwatch sw;
    Scenario s = defaultScenario();
    s.a0 = 0.0;
    const auto sol = solveMFG(s, 0.0, s.defaultInitial(), s.x0);
    const std::size_t mid = sol.mesh().steps / 2;
    const double t1 = sol.mesh().time(mid);
    const auto fresh = solveMFG(s, t1, sol.m.snapshots[mid], s.x0);
    const double e = supDiff(fresh.u.snapshots.front(), sol.u.snapshots[mid]);
    line("1", "flow consistency at t = T/2 (n = 64, T = 0.25)", e <= 1e-5 && std::abs(t1 - s.T / 2) < 1e-14,
         "sup|U - u| = " + sci(e) + " (tol 1e-5), t1 = " + fmt("%.6f", t1));
    runtime("1", sw.seconds(), 30.0);
}

// 2. Derivatives against central differences of U.
void derivativeOracles() {
    Stopwatch sw;
    const Scenario s = defaultScenario();
    const auto m0 = s.defaultInitial();
    const MasterPoint P(s, 0.0, s.x0, m0);
    const auto r = direction(m0, 0.4);
    const auto d = P.deltaU(r).value;
    auto centralM = [&](double h) {
        const auto up = evalU(s, 0.0, s.x0, m0.perturbed(r, h));
        const auto dn = evalU(s, 0.0, s.x0, m0.perturbed(r, -h));
        GridFunction fd(s.grid);
        for (std::size_t i = 0; i < fd.size(); ++i) fd[i] = (up[i] - dn[i]) / (2.0 * h);
        return fd;
    };
    const double e2 = supDiff(centralM(2e-2), d), e1 = supDiff(centralM(1e-2), d);
    line("2a", "deltaUdeltam vs central difference", e1 <= 1e-3 && e2 / e1 >= 3.0,
         "err(2e-2) = " + sci(e2) + ", err(1e-2) = " + sci(e1) + " (tol 1e-3), ratio " + fmt("%.2f", e2 / e1) +
             " (>= 3)");

    const double hx = 1e-3;
    const auto up = evalU(s, 0.0, s.x0 + hx, m0), dn = evalU(s, 0.0, s.x0 - hx, m0);
    GridFunction fd(s.grid);
    for (std::size_t i = 0; i < fd.size(); ++i) fd[i] = (up[i] - dn[i]) / (2.0 * hx);
    const double ex = supDiff(fd, P.dX0U());
    line("2b", "dX0U vs central difference (h = 1e-3)", ex <= 1e-4, "err = " + sci(ex) + " (tol 1e-4)");

    const double h = 5e-2;
    const auto b = direction(m0, 1.3, 2.0);
    const auto pp = evalU(s, 0.0, s.x0, m0.perturbed(r.scaled(h) + b.scaled(h), 1.0));
    const auto pm = evalU(s, 0.0, s.x0, m0.perturbed(r.scaled(h) - b.scaled(h), 1.0));
    const auto mp = evalU(s, 0.0, s.x0, m0.perturbed(b.scaled(h) - r.scaled(h), 1.0));
    const auto mm = evalU(s, 0.0, s.x0, m0.perturbed(r.scaled(-h) - b.scaled(h), 1.0));
    for (std::size_t i = 0; i < fd.size(); ++i) fd[i] = (pp[i] - pm[i] - mp[i] + mm[i]) / (4.0 * h * h);
    const double e2nd = supDiff(fd, P.d2U(r, b));
    line("2c", "d2Udm2 vs mixed central difference (h = 5e-2)", e2nd <= 5e-3, "err = " + sci(e2nd) + " (tol 5e-3)");
    runtime("2", sw.seconds(), 120.0);
}

/// G(x, m) = sin x + ∫cos dm.
MeasureFunctional sineG() {
    MeasureFunctional G;
    G.value = [](const GridDensity& m) {
        const auto& g = m.grid();
        double ic = 0.0;
        for (std::size_t i = 0; i < g.cells(); ++i) ic += g.spacing() * std::cos(g.node(i)) * m[i];
        GridFunction out(g);
        for (std::size_t i = 0; i < g.cells(); ++i) out[i] = std::sin(g.node(i)) + ic;
        return out;
    };
    return G;
}

/// G(x, m) = cos(x) (∫sin dm)² + ∫cos(x - y) m(dy).
MeasureFunctional nonlinearG() {
    MeasureFunctional G;
    G.value = [](const GridDensity& m) {
        const auto& g = m.grid();
        double is = 0.0, ic = 0.0;
        for (std::size_t j = 0; j < g.cells(); ++j) {
            is += g.spacing() * std::sin(g.node(j)) * m[j];
            ic += g.spacing() * std::cos(g.node(j)) * m[j];
        }
        GridFunction out(g);
        for (std::size_t i = 0; i < g.cells(); ++i) {
            const double c = std::cos(g.node(i)), sn = std::sin(g.node(i));
            out[i] = c * is * is + c * ic + sn * is;  // ∫cos(x - y) m(dy) expanded
        }
        return out;
    };
    return G;
}

std::vector<GridDensity> roughSamples(const TorusGrid& g, std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::vector<GridDensity> out;
    for (std::size_t k = 0; k < count; ++k) {
        std::vector<double> v(g.cells());
        for (auto& x : v) x = u(rng);
        out.push_back(GridDensity::normalized(g, v));
    }
    return out;
}

// 3. e^{-a0 t} damping of both Fourier modes.
void linearMasterAnalytic() {
    Stopwatch sw;
    const TorusGrid g(256);
    const auto G = sineG();
    double worst = 0.0;
    for (const auto& m : roughSamples(g, 10, 3)) {
        const auto u = evalLinearMaster(G, 0.3, m, 1.0);
        double ic = 0.0;
        for (std::size_t i = 0; i < g.cells(); ++i) ic += g.spacing() * std::cos(g.node(i)) * m[i];
        for (std::size_t i = 0; i < g.cells(); ++i) {
            worst = std::max(worst, std::abs(u[i] - std::exp(-0.3) * (std::sin(g.node(i)) + ic)));
        }
    }
    line("3", "linear master analytic case (n = 256, 10 measures)", worst <= 1e-6,
         "sup err = " + sci(worst) + " (tol 1e-6)");
    runtime("3", sw.seconds(), 10.0);
}

// 4. compose(s)∘compose(t) against compose(s + t).
void semigroup() {
    Stopwatch sw;
    auto deviation = [](std::size_t n, double s, double t) {
        const TorusGrid g(n);
        return semigroupCheck(nonlinearG(), s, t, roughSamples(g, 3, 4), 1.0);
    };
    const double d256 = deviation(256, 0.1, 0.2), d128 = deviation(128, 0.1, 0.2);
    line("4a", "semigroup deviation (0.1, 0.2) at n = 256", d256 <= 1e-8, "dev = " + sci(d256) + " (tol 1e-8)");
    const double floor = 1e-13;
    const bool resolvable = d128 > floor && d256 > floor;
    const double order = std::log2(d128 / d256);
    line("4b", "deviation order n = 128 -> 256 at (0.1, 0.2)", resolvable && order >= 2.0,
         "dev(128) = " + sci(d128) + ", dev(256) = " + sci(d256) +
             (resolvable ? ", order " + fmt("%.2f", order) : ", both at round-off: order not resolvable"),
         !resolvable);
    const double s128 = deviation(128, 1e-4, 2e-4), s256 = deviation(256, 1e-4, 2e-4);
    const double sOrder = std::log2(s128 / s256);
    line("4c", "deviation order n = 128 -> 256 at (1e-4, 2e-4)", s256 > floor && sOrder >= 2.0,
         "dev(128) = " + sci(s128) + ", dev(256) = " + sci(s256) + ", order " + fmt("%.2f", sOrder) + " (>= 2)");
    runtime("4", sw.seconds(), 30.0);
}

// 5. Cauchy table of the splitting scheme.
void splittingCauchy() {
    {
        Stopwatch sw;
        Scenario s = decoupledScenario().withGrid(48);
        s.T = 0.2;
        const auto t = convergenceStudy(s, {1, 2, 4}, smoothSamples(s, 5, 21));
        double worst = 0.0;
        for (const auto& r : t.rows) worst = std::max(worst, r.E);
        line("5a", "decoupled scenario E_N (n = 48, N = 1, 2, 4)", !t.partial && t.rows.size() == 2 && worst <= 1e-8,
             "max E_N = " + sci(worst) + " (tol 1e-8)");
        runtime("5a", sw.seconds(), 60.0);
    }
    Stopwatch sw;
    Scenario s = defaultScenario().withGrid(48);
    s.T = 0.2;
    const auto t = convergenceStudy(s, {1, 2, 4}, smoothSamples(s, 5, 21));
    if (t.partial || t.rows.size() != 2) {
        line("5b", "coupled Cauchy table", false, "incomplete: " + t.note);
        return;
    }
    const double E1 = t.rows[0].E, E2 = t.rows[1].E;
    line("5b", "E_2 <= 0.7 E_1 (n = 48, T = 0.2, 5 measures)", E2 <= 0.7 * E1,
         "E_1 = " + sci(E1) + ", E_2 = " + sci(E2) + ", ratio " + fmt("%.3f", E2 / E1));
    line("5c", "E_4 <= 0.7 E_2", false, "E_4 = sup|U^4 - U^8| needs N = 8, outside Ns = {1, 2, 4}: not evaluated",
         true);
    runtime("5b", sw.seconds(), 600.0);
}

/// Wrapped Gaussian density from the brute-force image sum.
double exactGaussian(double x, double mu, double var) { return oracle::wrappedGaussian(x - mu, var, 2.0 * std::numbers::pi, 50); }

// 6. Chang–Cooper FP: conservation, positivity, spatial order.
void fpStructure() {
    const TorusGrid g(64);
    const FieldAt drift = [&](std::size_t, std::span<double> out) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = 1.5 * std::sin(g.node(i)) + 0.5;
    };
    const auto traj = solveFPForward(Diffusion::cosine(0.2, 0.1), drift, GridDensity::dirac(g, 3), TimeMesh(0.0, 0.5, 100));
    double worstStep = 0.0, minValue = INFINITY, prev = 1.0;
    for (const auto& m : traj.snapshots) {
        double mass = 0.0;
        for (double v : m.values()) {
            mass += v * g.spacing();
            minValue = std::min(minValue, v);
        }
        worstStep = std::max(worstStep, std::abs(mass - prev));
        prev = mass;
    }
    line("6a", "mass deviation per step", worstStep <= 1e-12, "max = " + sci(worstStep) + " (tol 1e-12)");
    line("6b", "positivity", minValue >= 0.0, "min density = " + sci(minValue));

    const double a = 0.4, T = 0.1, var0 = 0.3, mu = 3.0;
    auto error = [&](std::size_t n) {
        const TorusGrid gn(n);
        const auto steps = static_cast<std::size_t>(std::ceil(T / (0.1 * gn.spacing() * gn.spacing())));
        const FieldAt zero = [](std::size_t, std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); };
        const auto tr = solveFPForward(Diffusion::constant(a), zero, GridDensity::wrappedGaussian(gn, mu, var0),
                                       TimeMesh(0.0, T, steps));
        double e = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            e = std::max(e, std::abs(tr.snapshots.back()[i] - exactGaussian(gn.node(i), mu, var0 + 2.0 * a * T)));
        }
        return e;
    };
    const double e64 = error(64), e128 = error(128);
    const double order = std::log2(e64 / e128);
    line("6c", "Gaussian spreading order n = 64 -> 128", order >= 1.8,
         "err(64) = " + sci(e64) + ", err(128) = " + sci(e128) + ", order " + fmt("%.2f", order) + " (>= 1.8)");
}

/// max|C| / min|C| over grids, infinite when the signs disagree.
double variation(const std::vector<double>& C) {
    const double lo = *std::min_element(C.begin(), C.end()), hi = *std::max_element(C.begin(), C.end());
    if (lo * hi <= 0.0) return INFINITY;
    return std::max(std::abs(lo), std::abs(hi)) / std::min(std::abs(lo), std::abs(hi));
}

std::string list(const std::vector<double>& v) {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : ", ") + fmt("%.4f", x);
    return "[" + s + "]";
}

// 7. Fitted constants of the a-priori estimates under grid refinement.
void estimateAudits() {
    Stopwatch sw;
    std::vector<double> bern, stab, dual;
    for (std::size_t n : {32, 64, 128}) {
        const Scenario s = defaultScenario().withGrid(n);
        const auto m0 = s.defaultInitial();
        bern.push_back(mfgBernsteinAudit(s, m0, 3).fittedC);
        stab.push_back(stabilityAudit(s, GridDensity::wrappedGaussian(s.grid, s.m0Center - 0.2, s.m0Var),
                                      GridDensity::wrappedGaussian(s.grid, s.m0Center + 0.2, s.m0Var))
                           .C);
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = std::sin(s.grid.node(i)) + 0.4 * std::cos(2.0 * s.grid.node(i));
        dual.push_back(dualityAudit(s, m0, GridSignedMeasure(s.grid, v)).C);
    }
    for (auto [id, name, C] : {std::tuple{"7a", "Bernstein", &bern}, std::tuple{"7b", "stability", &stab},
                               std::tuple{"7c", "duality (k = 1)", &dual}}) {
        const double var = variation(*C);
        line(id, std::string(name) + " fitted C across n = 32, 64, 128", var <= 2.0,
             "C = " + list(*C) + ", variation " + fmt("%.3f", var) + " (<= 2)");
    }
    runtime("7", sw.seconds(), 180.0);
}

// 8. Major-player scheme.
void majorPlayer() {
    Stopwatch sw;
    Scenario s = defaultScenario().withGrid(32);
    s.x0grid = TorusGrid(16);
    s.T = 0.2;
    SchemeConfig cfg;
    cfg.inner.tol = 1e-6;
    const auto m0 = s.defaultInitial();
    {
        MajorScheme scheme(s, 2, cfg);
        const double d = jointDistance(scheme.eval(scheme.schedule().last(), m0), majorTerminal(s, m0));
        line("8a", "major terminal exactness", d == 0.0, "distance = " + sci(d));
    }
    const auto t = majorAgreement(s, {1, 2, 4}, {m0}, cfg);
    if (t.partial || t.rows.size() != 2) {
        line("8b", "major Cauchy table", false, "incomplete: " + t.note);
    } else {
        const double ratio = t.rows[1].E / t.rows[0].E;
        line("8b", "major E_2 <= 0.7 E_1 (n = 32, n0 = 16, T = 0.2)", ratio <= 0.7,
             "E_1 = " + sci(t.rows[0].E) + ", E_2 = " + sci(t.rows[1].E) + ", ratio " + fmt("%.3f", ratio));
    }
    runtime("8b", sw.seconds(), 600.0);

    std::vector<double> lip;
    for (std::size_t n0 : {16, 32}) {
        Scenario r = s;
        r.x0grid = TorusGrid(n0);
        MajorScheme scheme(r, 2, cfg);
        lip.push_back(gradientLipschitz(scheme.eval(0, m0).U0));
    }
    const double ratio = lip[1] / lip[0];
    line("8c", "Lip(D_x0 U0) at N = 2, n0 = 16 -> 32", std::isfinite(ratio) && ratio >= 0.5 && ratio <= 2.0,
         "Lip = " + list(lip) + ", ratio " + fmt("%.3f", ratio) + " (within [0.5, 2])");
}

/// Exact k = 1 dual norm: inf over c of spacing · Σ|R_i - c| with R the cumulative mass, at the median.
double antiderivativeOracle(const GridSignedMeasure& rho) {
    const double h = rho.grid().spacing();
    std::vector<double> R;
    double acc = 0.0;
    for (double v : rho.values()) R.push_back(acc += h * v);
    std::vector<double> sorted = R;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double c = sorted[sorted.size() / 2];
    double s = 0.0;
    for (double r : R) s += h * std::abs(r - c);
    return s;
}

// 9. Transport distances against the LP oracle; dual-norm surrogate against the exact formula.
void transportKernel() {
    Stopwatch sw;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst1 = 0.0, worst2 = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const TorusGrid g(8 + 4 * (trial % 3));
        auto draw = [&] {
            std::vector<double> v(g.cells());
            for (auto& x : v) x = u(rng) < 0.2 ? 0.0 : u(rng);
            v[0] += 0.1;
            return GridDensity::normalized(g, v);
        };
        const auto a = draw(), b = draw();
        const std::size_t n = g.cells();
        std::vector<double> pa(n), pb(n);
        std::vector<std::vector<double>> c1(n, std::vector<double>(n)), c2 = c1;
        for (std::size_t i = 0; i < n; ++i) {
            pa[i] = a[i] * g.spacing();
            pb[i] = b[i] * g.spacing();
            for (std::size_t j = 0; j < n; ++j) {
                c1[i][j] = oracle::periodicDistance(g.node(i), g.node(j), g.length());
                c2[i][j] = c1[i][j] * c1[i][j];
            }
        }
        worst1 = std::max(worst1, std::abs(wasserstein1(a, b) - oracle::transportCost(pa, pb, c1)));
        worst2 = std::max(worst2, std::abs(wasserstein2(a, b) - std::sqrt(oracle::transportCost(pa, pb, c2))));
    }
    line("9a", "W1 vs LP oracle (50 pairs, n <= 16)", worst1 <= 1e-9, "max err = " + sci(worst1) + " (tol 1e-9)");
    line("9b", "W2 vs LP oracle (50 pairs, n <= 16)", worst2 <= 1e-9, "max err = " + sci(worst2) + " (tol 1e-9)");

    std::normal_distribution<double> n01;
    const TorusGrid g(64);
    double worstRel = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> v(g.cells());
        for (int j = 1; j <= 4; ++j) {
            const double a = n01(rng) / j, b = n01(rng) / j;
            for (std::size_t i = 0; i < g.cells(); ++i) v[i] += a * std::cos(j * g.node(i)) + b * std::sin(j * g.node(i));
        }
        const GridSignedMeasure rho(g, v);
        const double exact = antiderivativeOracle(rho);
        const double est = dualNormMinusK(rho, 1, 256, NormConvention::Homogeneous).value;
        worstRel = std::max(worstRel, std::abs(est - exact) / exact);
    }
    line("9c", "dual norm k = 1 vs exact formula (50 measures)", worstRel <= 0.05,
         "max rel err = " + fmt("%.4f", worstRel) + " (tol 0.05)");
    runtime("9", sw.seconds(), 60.0);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// 10. Every CLI command twice (1 and 2 threads) with the same seed.
void cliDeterminism(const std::filesystem::path& work) {
#ifdef MFGSPLIT_CLI_PATH
    namespace fs = std::filesystem;
    const std::string cli = MFGSPLIT_CLI_PATH;
    const std::string scen = MFGSPLIT_SCENARIO_DIR;
    const std::vector<std::string> runs{
        "solve-mfg",
        "master-first",
        "master-linear --samples 3",
        "split --scenario " + scen + "/splitting-study.cfg --N 1 2 --samples 2",
        "convergence --grid 16 32 --N 1 2 --samples 2",
        "major --grid 16 16 --N 1 2 --samples 2",
        "audit --grid 16 32",
        "stochastic --scenario " + scen + "/splitting-study.cfg --N 1 --paths 16",
    };
    int identical = 0;
    std::string bad;
    for (const auto& args : runs) {
        const std::string cmd = args.substr(0, args.find(' '));
        const fs::path a = work / "cli-a" / cmd, b = work / "cli-b" / cmd;
        fs::remove_all(a);
        fs::remove_all(b);
        const int ra = std::system(("MFG_SPLIT_THREADS=1 '" + cli + "' " + args + " --seed 17 --out '" + a.string() + "'").c_str());
        const int rb = std::system(("MFG_SPLIT_THREADS=2 '" + cli + "' " + args + " --seed 17 --out '" + b.string() + "'").c_str());
        bool same = ra == 0 && rb == 0 && fs::exists(a);
        std::set<std::string> names;
        if (same) {
            for (const auto& e : fs::directory_iterator(a)) names.insert(e.path().filename().string());
            for (const auto& e : fs::directory_iterator(b)) names.insert(e.path().filename().string());
            for (const auto& nme : names) same = same && fs::exists(a / nme) && fs::exists(b / nme) && slurp(a / nme) == slurp(b / nme);
        }
        if (same) ++identical;
        else bad += (bad.empty() ? "" : ", ") + cmd;
    }
    line("10", "CLI byte-identical reruns (8 commands, 1 vs 2 threads)", bad.empty(),
         std::to_string(identical) + "/" + std::to_string(runs.size()) + " identical" + (bad.empty() ? "" : "; differing: " + bad));
#else
    (void)work;
    line("10", "CLI determinism", false, "built without the CLI");
#endif
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mfgsplit acceptance run"};
    std::string workdir = "acceptance_work";
    std::vector<int> only;
    app.add_option("--workdir", workdir, "scratch directory for CLI artifacts");
    app.add_option("--only", only, "criteria to run (all by default)");
    CLI11_PARSE(app, argc, argv);
    std::filesystem::create_directories(workdir);

    const std::vector<std::function<void()>> criteria{
        flowConsistency, derivativeOracles, linearMasterAnalytic, semigroup, splittingCauchy,
        fpStructure,     estimateAudits,    majorPlayer,          transportKernel,
        [&] { cliDeterminism(workdir); }};
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        try {
            criteria[i]();
        } catch (const std::exception& e) {
            line(std::to_string(id), "criterion aborted", false, e.what());
        }
    }
    std::printf("summary: %d unexpected failure(s), %d expected failure(s)\n", unexpectedFailures, expectedFailures);
    return unexpectedFailures == 0 ? 0 : 1;
}
