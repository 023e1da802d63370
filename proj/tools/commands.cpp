#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "mfg/audits.hpp"
#include "mfg/errors.hpp"
#include "mfg/linear_master.hpp"
#include "mfg/major.hpp"
#include "mfg/master.hpp"
#include "mfg/rng.hpp"
#include "mfg/splitting.hpp"
#include "report.hpp"

namespace mfgsplit {

using json = nlohmann::ordered_json;
using namespace mfg;

namespace {

struct Report {
    std::string dir;
    std::string command;
    json doc;
    json assertions = json::array();
    std::vector<std::pair<std::string, CsvTable>> tables;  // file stem, table

    CsvTable& table(const std::string& stem) {
        tables.emplace_back(stem, CsvTable{});
        return tables.back().second;
    }

    bool check(const std::string& name, bool passed, double value, double bound) {
        assertions.push_back({{"name", name}, {"passed", passed}, {"value", number(value)}, {"bound", number(bound)}});
        return passed;
    }

    void write(const std::string& status, const std::string& note) {
        std::filesystem::create_directories(dir);
        for (const auto& [stem, t] : tables) t.write(dir + "/" + stem + ".csv");
        doc["assertions"] = assertions;
        doc["status"] = status;
        if (!note.empty()) doc["note"] = note;
        writeJson(doc, dir + "/" + command + ".json");
    }

    [[nodiscard]] std::string firstFailure() const {
        for (const auto& a : assertions) {
            if (!a["passed"].get<bool>()) return a["name"].get<std::string>();
        }
        return {};
    }
};

json counterJson(const SchemeCounters& c) {
    return {{"evaluations", c.evaluations},
            {"mfgSolves", c.mfgSolves},
            {"picardSweeps", c.picardSweeps},
            {"linearSteps", c.linearSteps},
            {"terminalEvaluations", c.terminalEvaluations},
            {"fallbacks", c.fallbacks},
            {"perCheckpoint", c.perCheckpoint}};
}

json numbers(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(number(x));
    return a;
}

json fitJson(const HorizonFit& f) {
    return {{"horizons", numbers(f.horizons)}, {"ratios", numbers(f.ratios)}, {"C", number(f.C)},
            {"sharpC", number(f.sharpC)}};
}

SchemeConfig schemeConfig(const RunConfig& c) {
    SchemeConfig sc;
    if (c.tol) sc.inner.tol = *c.tol;
    sc.budget = c.budget;
    return sc;
}

std::vector<int> nsOr(const RunConfig& c, std::vector<int> fallback) {
    return c.Ns.empty() ? fallback : c.Ns;
}

/// Zero-mass direction m·φ − mass(m·φ)·m with a random trigonometric φ of degree 3.
GridSignedMeasure randomDirection(const GridDensity& m, std::uint64_t seed) {
    auto rng = taskStream(seed, "direction");
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double a[3], b[3];
    for (int k = 0; k < 3; ++k) {
        a[k] = U(rng);
        b[k] = U(rng);
    }
    const auto& g = m.grid();
    const double w = 2.0 * std::numbers::pi / g.length();
    std::vector<double> v(g.cells());
    for (std::size_t i = 0; i < g.cells(); ++i) {
        double phi = 0.0;
        for (int k = 0; k < 3; ++k) phi += (a[k] * std::cos((k + 1) * w * g.node(i)) + b[k] * std::sin((k + 1) * w * g.node(i))) / (k + 1);
        v[i] = m[i] * phi;
    }
    const double mass = GridSignedMeasure(g, v).totalMass();
    for (std::size_t i = 0; i < g.cells(); ++i) v[i] -= mass * m[i];
    return {g, v};
}

bool allFinite(const GridFunction& f) {
    return std::all_of(f.values.begin(), f.values.end(), [](double v) { return std::isfinite(v); });
}

void solveMfgCommand(const RunConfig& c, Scenario s, Report& r) {
    if (c.tol) s.fp.tol = *c.tol;
    const auto m0 = s.defaultInitial();
    const auto sol = solveMFG(s, 0.0, m0, s.x0);

    auto& t = r.table("solve-mfg");
    t.comment("MFG system on [0, T], initial density = wrapped Gaussian of the scenario");
    t.column("t", "time");
    t.column("x", "space node on the torus");
    t.column("m", "density (mass per unit length)");
    t.column("u", "value function");
    double massDev = 0.0, minDensity = INFINITY;
    for (std::size_t k = 0; k < sol.m.snapshots.size(); ++k) {
        const auto& m = sol.m.snapshots[k];
        massDev = std::max(massDev, std::abs(m.asSigned().totalMass() - 1.0));
        for (std::size_t i = 0; i < m.size(); ++i) {
            minDensity = std::min(minDensity, m[i]);
            t.row({sol.mesh().time(k), s.grid.node(i), m[i], sol.u.snapshots[k][i]});
        }
    }
    r.doc["result"] = {{"steps", sol.mesh().steps},
                       {"dt", sol.mesh().dt()},
                       {"iterations", sol.iterations},
                       {"finalGap", number(sol.finalGap)},
                       {"gapHistory", numbers(sol.gapHistory)},
                       {"massDeviation", massDev},
                       {"minDensity", minDensity}};
    r.check("mass conservation", massDev <= 1e-12, massDev, 1e-12);
    r.check("positivity", minDensity >= 0.0, minDensity, 0.0);
}

void masterFirstCommand(const RunConfig& c, Scenario s, Report& r) {
    if (c.tol) s.fp.tol = *c.tol;
    const auto m0 = s.defaultInitial();
    const MasterPoint p(s, 0.0, s.x0, m0);
    const auto rho = randomDirection(m0, c.seed);
    const auto U = p.U();
    const auto dU = p.deltaU(rho);
    const auto dx0 = p.dX0U();

    auto& t = r.table("master-first");
    t.comment("first-order master field at t = 0, m = initial density, x0 = scenario x0");
    t.comment("direction rho: zero-mass random trigonometric perturbation from stream 'direction'");
    t.column("x", "space node on the torus");
    t.column("U", "U(0, x, m)");
    t.column("deltaU", "flat derivative dU/dm(0, x, m)(rho)");
    t.column("dX0U", "derivative of U in x0");
    for (std::size_t i = 0; i < s.grid.cells(); ++i) t.row({s.grid.node(i), U[i], dU.value[i], dx0[i]});

    const auto res = masterResidualViaFlow(s, 0.0, s.x0, m0);
    r.doc["result"] = {{"U0", number(p.U0())},
                       {"deltaU0", number(p.deltaU0(rho))},
                       {"dX0U0", number(p.dX0U0())},
                       {"normalizationShift", number(dU.normalizationShift)},
                       {"residual",
                        {{"timeDerivative", number(res.timeDerivative)},
                         {"diffusion", number(res.diffusion)},
                         {"hamiltonian", number(res.hamiltonian)},
                         {"nonlocalDiffusion", number(res.nonlocalDiffusion)},
                         {"nonlocalTransport", number(res.nonlocalTransport)},
                         {"total", number(res.total)},
                         {"steps", res.steps},
                         {"delta", number(res.delta)},
                         {"warnings", res.warnings}}}};
    const bool finite = allFinite(U) && allFinite(dU.value) && allFinite(dx0) && std::isfinite(res.total);
    r.check("finite values", finite, finite ? 0.0 : 1.0, 0.0);
}

void masterLinearCommand(const RunConfig& c, const Scenario& s, Report& r) {
    const auto G = terminalFunctional(s.G, s.x0);
    const auto samples = sampleDensities(s, c.samples, c.seed);
    auto& t = r.table("master-linear");
    t.comment("linear master field U(T, x, m) = heat-kernel average of the terminal cost, a0 from the scenario");
    t.column("sample", "sample index (0 = initial density)");
    t.column("x", "space node on the torus");
    t.column("U", "U(T, x, m_sample)");
    bool finite = true;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const auto U = evalLinearMaster(G, s.T, samples[k], s.a0);
        finite = finite && allFinite(U);
        for (std::size_t i = 0; i < s.grid.cells(); ++i) t.row({static_cast<double>(k), s.grid.node(i), U[i]});
    }
    const double semigroup = semigroupCheck(G, s.T / 3.0, 2.0 * s.T / 3.0, samples, s.a0);
    r.doc["result"] = {{"t", s.T}, {"a0", s.a0}, {"semigroupDeviation", number(semigroup)}};
    r.check("finite values", finite && std::isfinite(semigroup), finite ? 0.0 : 1.0, 0.0);
}

void cauchyColumns(CsvTable& t, const std::string& distance = "max over samples and x of |U^N(0) - U^N2(0)|") {
    t.column("N", "split count of the coarser scheme");
    t.column("N2", "split count of the finer scheme");
    t.column("E_N", distance);
    t.column("order", "log2(E_N / E_N2); nan on the last row");
}

void splitCommand(const RunConfig& c, const Scenario& s, Report& r) {
    const auto Ns = nsOr(c, {1, 2});
    const auto sc = schemeConfig(c);
    const auto samples = sampleDensities(s, c.samples, c.seed);

    {
        SplittingScheme scheme(s, Ns.front(), sc);
        const auto v = scheme.eval(scheme.schedule().last(), samples.front());
        const auto g = terminalFunctional(s.G, s.x0).value(samples.front());
        double d = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) d = std::max(d, std::abs(v[i] - g[i]));
        r.check("terminal exactness", d == 0.0, d, 0.0);
    }

    const auto table = convergenceStudy(s, Ns, samples, sc, c.threads);
    auto& t = r.table("split");
    t.comment("Cauchy table of the splitting scheme at t = 0");
    cauchyColumns(t);
    for (const auto& row : table.rows) t.row({double(row.N), double(row.N2), row.E, row.order});

    auto& v = r.table("split_values");
    v.comment("U^N(0, x, m_sample) of the splitting scheme");
    v.column("N", "split count");
    v.column("sample", "sample index (0 = initial density)");
    v.column("x", "space node on the torus");
    v.column("U", "U^N(0, x, m_sample)");
    json perN = json::array();
    for (std::size_t i = 0; i < table.values.size(); ++i) {
        for (std::size_t k = 0; k < table.values[i].size(); ++k) {
            const auto& f = table.values[i][k];
            for (std::size_t x = 0; x < f.size(); ++x) v.row({double(Ns[i]), double(k), s.grid.node(x), f[x]});
        }
        perN.push_back({{"N", Ns[i]},
                        {"counters", counterJson(table.counters[i])},
                        {"cacheHits", table.cacheHits[i]},
                        {"cacheMisses", table.cacheMisses[i]}});
    }
    r.doc["result"] = {{"samples", samples.size()}, {"schemes", perN}};
    if (table.partial) throw PartialResult{table.note};
}

void convergenceCommand(const RunConfig& c, const Scenario& s, Report& r) {
    const auto Ns = nsOr(c, {1, 2});
    const auto sc = schemeConfig(c);
    const auto grids = c.grid.empty() ? std::vector<std::size_t>{s.grid.cells()} : c.grid;
    auto& t = r.table("convergence");
    t.comment("Cauchy tables of the splitting scheme at t = 0, one block per grid");
    t.column("cells", "space cells");
    cauchyColumns(t);
    json blocks = json::array();
    for (std::size_t n : grids) {
        const auto sg = s.withGrid(n);
        const auto table = convergenceStudy(sg, Ns, sampleDensities(sg, c.samples, c.seed), sc, c.threads);
        json rows = json::array();
        for (const auto& row : table.rows) {
            t.row({double(n), double(row.N), double(row.N2), row.E, row.order});
            rows.push_back({{"N", row.N}, {"N2", row.N2}, {"E", number(row.E)}, {"order", number(row.order)}});
        }
        json counters = json::array();
        for (const auto& k : table.counters) counters.push_back(counterJson(k));
        blocks.push_back({{"cells", n}, {"rows", rows}, {"counters", counters}});
        r.doc["result"] = {{"grids", blocks}};
        if (table.partial) throw PartialResult{table.note};
    }
}

void majorCommand(const RunConfig& c, Scenario s, Report& r) {
    if (!c.grid.empty()) s = s.withGrid(c.grid[0]);
    if (c.grid.size() > 1) s.x0grid = TorusGrid(s.x0grid.length(), c.grid[1]);
    const auto Ns = nsOr(c, {1, 2});
    const auto sc = schemeConfig(c);
    const auto samples = sampleDensities(s, c.samples, c.seed);

    {
        MajorScheme scheme(s, Ns.front(), sc);
        const auto v = scheme.eval(scheme.schedule().last(), samples.front());
        const double d = jointDistance(v, majorTerminal(s, samples.front()));
        r.check("terminal exactness", d == 0.0, d, 0.0);
    }

    const auto table = majorAgreement(s, Ns, samples, sc, c.threads);
    auto& t = r.table("major");
    t.comment("joint Cauchy table of the major-player scheme at t = 0");
    cauchyColumns(t, "max over samples of the pairing distance sup_x0 (|dU0|^2 + sup_x |dU|^2)^(1/2)");
    for (const auto& row : table.rows) t.row({double(row.N), double(row.N2), row.E, row.order});

    auto& v = r.table("major_values");
    v.comment("major-player value U0^N(0, x0, m_sample) and the Lipschitz constant of its x0-gradient");
    v.column("N", "split count");
    v.column("sample", "sample index (0 = initial density)");
    v.column("x0", "major-player node");
    v.column("U0", "U0^N(0, x0, m_sample)");
    json perN = json::array();
    bool finite = true;
    for (std::size_t i = 0; i < table.values.size(); ++i) {
        json lips = json::array();
        for (std::size_t k = 0; k < table.values[i].size(); ++k) {
            const auto& U0 = table.values[i][k].U0;
            for (std::size_t j = 0; j < U0.size(); ++j) v.row({double(Ns[i]), double(k), s.x0grid.node(j), U0[j]});
            const double lip = gradientLipschitz(U0);
            finite = finite && std::isfinite(lip);
            lips.push_back(number(lip));
        }
        perN.push_back({{"N", Ns[i]}, {"counters", counterJson(table.counters[i])}, {"dX0U0Lipschitz", lips}});
    }
    r.doc["result"] = {{"cells", s.grid.cells()}, {"x0Cells", s.x0grid.cells()}, {"schemes", perN}};
    r.check("finite Lipschitz constants", finite, finite ? 0.0 : 1.0, 0.0);
    if (table.partial) throw PartialResult{table.note};
}

void auditCommand(const RunConfig& c, Scenario s, Report& r) {
    if (c.tol) s.fp.tol = *c.tol;
    const auto grids = c.grid.empty() ? std::vector<std::size_t>{32, 64, 128} : c.grid;
    auto& t = r.table("audit");
    t.comment("a-priori estimate audits per grid; C is the signed least-squares rate, sharpC the smallest admissible one");
    t.column("cells", "space cells");
    t.column("bernstein_C", "rate of sup_x |u_x(t)| - Lip(g) against T - t");
    t.column("bernstein_sharpC", "smallest C >= 0 bounding the same");
    t.column("supLip", "sup_t |u_x(t)|");
    t.column("terminalLip", "Lip(g)");
    t.column("stability_C", "rate of d1(m1(t), m2(t)) / d1(m1(0), m2(0)) - 1 against t");
    t.column("stability_sharpC", "smallest C >= 0 bounding the same");
    t.column("duality_C", "rate of |rho(t)|_-1 / |rho(0)|_-1 - 1 against t");
    t.column("duality_sharpC", "smallest C >= 0 bounding the same");
    json bern = json::array(), stab = json::array(), dual = json::array();
    bool finite = true;
    for (std::size_t n : grids) {
        const auto sg = s.withGrid(n);
        const auto m0 = sg.defaultInitial();
        const auto b = mfgBernsteinAudit(sg, m0, 3);
        const auto st = stabilityAudit(sg, GridDensity::wrappedGaussian(sg.grid, sg.m0Center - 0.2, sg.m0Var),
                                       GridDensity::wrappedGaussian(sg.grid, sg.m0Center + 0.2, sg.m0Var));
        std::vector<double> rv(n);
        const double w = 2.0 * std::numbers::pi / sg.grid.length();
        for (std::size_t i = 0; i < n; ++i) rv[i] = std::sin(w * sg.grid.node(i)) + 0.4 * std::cos(2 * w * sg.grid.node(i));
        const auto du = dualityAudit(sg, m0, GridSignedMeasure(sg.grid, rv));
        t.row({double(n), b.fittedC, b.sharpC, b.supLip, b.terminalLip, st.C, st.sharpC, du.C, du.sharpC});
        for (double v : {b.fittedC, b.sharpC, st.C, st.sharpC, du.C, du.sharpC}) finite = finite && std::isfinite(v);
        bern.push_back({{"cells", n},
                        {"C", number(b.fittedC)},
                        {"sharpC", number(b.sharpC)},
                        {"supLip", number(b.supLip)},
                        {"terminalLip", number(b.terminalLip)},
                        {"KM", number(b.KM)},
                        {"supNorms", numbers(b.supNorms)},
                        {"terminalNorms", numbers(b.terminalNorms)},
                        {"orderC", numbers(b.fittedOrderC)},
                        {"sharpOrderC", numbers(b.sharpOrderC)}});
        json sj = fitJson(st), dj = fitJson(du);
        sj["cells"] = n;
        dj["cells"] = n;
        stab.push_back(sj);
        dual.push_back(dj);
    }
    r.doc["bernstein"] = bern;
    r.doc["duality"] = dual;
    r.doc["stability"] = stab;
    r.check("finite audit constants", finite, finite ? 0.0 : 1.0, 0.0);
}

void stochasticCommand(const RunConfig& c, const Scenario& s, Report& r) {
    const auto Ns = nsOr(c, {1});
    const auto sc = schemeConfig(c);
    auto& t = r.table("stochastic");
    t.comment("backward stochastic HJ identity along simulated common-noise flows, evaluator = splitting scheme");
    t.column("N", "split count (the flow uses the 2N checkpoints as time steps)");
    t.column("paths", "Monte-Carlo paths");
    t.column("dt", "time step");
    t.column("meanResidual", "sup_x |sample mean of the accumulated residual|");
    t.column("standardError", "sup_x Monte-Carlo standard error");
    t.column("maxPathResidual", "largest single-path residual");
    json runs = json::array();
    const auto m0 = s.defaultInitial();
    for (int N : Ns) {
        SplittingScheme scheme(s, N, sc);
        const MasterEvaluator U = [&](std::size_t k, const GridDensity& m) { return scheme.eval(k, m); };
        const auto rep = stochasticConsistency(s, U, scheme.schedule().last(), m0, c.paths, c.seed);
        t.row({double(N), double(rep.paths), rep.dt, rep.meanResidual, rep.standardError, rep.maxPathResidual});
        runs.push_back({{"N", N},
                        {"steps", rep.steps},
                        {"meanResidual", number(rep.meanResidual)},
                        {"standardError", number(rep.standardError)},
                        {"maxPathResidual", number(rep.maxPathResidual)},
                        {"counters", counterJson(scheme.counters())}});
        r.doc["result"] = {{"runs", runs}};
        const bool finite = std::isfinite(rep.meanResidual) && std::isfinite(rep.standardError);
        r.check("finite residual (N = " + std::to_string(N) + ")", finite, rep.meanResidual, INFINITY);
    }
}

}  // namespace

std::vector<GridDensity> sampleDensities(const Scenario& s, std::size_t count, std::uint64_t seed) {
    std::vector<GridDensity> out;
    if (count == 0) return out;
    out.push_back(s.defaultInitial());
    const auto& g = s.grid;
    const double w = 2.0 * std::numbers::pi / g.length();
    for (std::size_t k = 1; k < count; ++k) {
        auto rng = taskStream(seed, "sample-" + std::to_string(k));
        std::uniform_real_distribution<double> amp(0.0, 0.6), phase(0.0, 2.0 * std::numbers::pi);
        const double a1 = amp(rng), p1 = phase(rng), a2 = amp(rng) / 2.0, p2 = phase(rng);
        std::vector<double> v(g.cells());
        for (std::size_t i = 0; i < g.cells(); ++i) {
            const double x = w * g.node(i);
            v[i] = 1.0 + a1 * std::cos(x - p1) + a2 * std::cos(2.0 * x - p2);
        }
        out.push_back(GridDensity::normalized(g, std::move(v)));
    }
    return out;
}

void runCommand(const RunConfig& cfg, const Scenario& s) {
    Report r;
    r.dir = cfg.out;
    r.command = cfg.command;
    r.doc["schema"] = kReportSchema;
    r.doc["version"] = kVersion;
    r.doc["command"] = cfg.command;
    r.doc["scenario"] = s.name;
    r.doc["seed"] = cfg.seed;
    r.doc["config"] = {{"N", cfg.Ns},
                       {"grid", cfg.grid},
                       {"tol", cfg.tol ? json(*cfg.tol) : json(nullptr)},
                       {"budget", cfg.budget},
                       {"samples", cfg.samples},
                       {"paths", cfg.paths}};

    try {
        if (cfg.command == "solve-mfg") solveMfgCommand(cfg, s, r);
        else if (cfg.command == "master-first") masterFirstCommand(cfg, s, r);
        else if (cfg.command == "master-linear") masterLinearCommand(cfg, s, r);
        else if (cfg.command == "split") splitCommand(cfg, s, r);
        else if (cfg.command == "convergence") convergenceCommand(cfg, s, r);
        else if (cfg.command == "major") majorCommand(cfg, s, r);
        else if (cfg.command == "audit") auditCommand(cfg, s, r);
        else if (cfg.command == "stochastic") stochasticCommand(cfg, s, r);
        else throw InvalidArgument("unknown command '" + cfg.command + "'");
    } catch (const PartialResult& p) {
        r.write("partial", p.what);
        throw;
    } catch (const BudgetExceeded& e) {
        r.write("partial", e.what());
        throw PartialResult{e.what()};
    } catch (const NonConvergence& e) {
        r.write("failed", std::string(e.what()) + " [" + e.solve() + "]");
        throw;
    }
    const auto failed = r.firstFailure();
    r.write(failed.empty() ? "ok" : "assertion-failed", failed);
    if (!failed.empty()) throw AssertionFailure{failed};
}

}  // namespace mfgsplit
