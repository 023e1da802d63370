#include "mfg/splitting.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "mfg/errors.hpp"
#include "mfg/parallel.hpp"
#include "mfg/measures.hpp"
#include "mfg/rng.hpp"
#include "mfg/spectral.hpp"

namespace mfg {

SplitSchedule::SplitSchedule(int n, double horizon) : N(n), T(horizon) {
    if (n < 1) throw InvalidArgument("SplitSchedule: N >= 1 required");
    if (!(horizon > 0.0)) throw InvalidArgument("SplitSchedule: T > 0 required");
}

std::size_t DensityKeyHash::operator()(const DensityKey& k) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ (k.checkpoint * 0x9e3779b97f4a7c15ULL) ^ (k.index << 32);
    for (std::int64_t v : k.q) {
        h ^= static_cast<std::uint64_t>(v);
        h *= 0x100000001b3ULL;
        h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
}

DensityKey quantize(const GridDensity& m, std::size_t checkpoint, std::size_t index, double quantum) {
    DensityKey key{checkpoint, index, std::vector<std::int64_t>(m.size())};
    for (std::size_t i = 0; i < m.size(); ++i) key.q[i] = std::llround(m[i] / quantum);
    return key;
}

GridDensity canonicalDensity(const DensityKey& key, const TorusGrid& g, double quantum) {
    std::vector<double> v(key.q.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::max(0.0, static_cast<double>(key.q[i]) * quantum);
    return GridDensity::normalized(g, std::move(v));
}

void SolveBudget::charge(const char* where) {
    ++used;
    if (limit > 0 && used > limit) {
        throw BudgetExceeded(std::string(where) + ": evaluation budget of " + std::to_string(limit) +
                             " MFG solves exhausted");
    }
}

std::size_t SplittingScheme::globalSteps(const Scenario& s, std::size_t meshMultiple) {
    const double dtMax = s.scaledDynamics(2.0).dtMax();
    auto K = static_cast<std::size_t>(std::ceil(s.T / dtMax - 1e-9));
    const std::size_t mult = std::max<std::size_t>(2, meshMultiple);
    K = std::max(mult, ((K + mult - 1) / mult) * mult);
    return K;
}

SplittingScheme::SplittingScheme(const Scenario& s, int N, SchemeConfig cfg, SolveBudget* budget)
    : s_(s),
      doubled_(s.scaledDynamics(2.0)),
      sched_(N, s.T),
      cfg_(cfg),
      budget_(budget ? budget : &ownBudget_),
      terminal_(terminalFunctional(s.G, s.x0)),
      cache_(cfg.cacheCapacity) {
    ownBudget_.limit = cfg.budget;
    const std::size_t K = globalSteps(s, cfg.meshMultiple);
    if (K % (2 * static_cast<std::size_t>(N)) != 0) {
        throw InvalidArgument("SplittingScheme: N = " + std::to_string(N) +
                              " does not divide the common mesh; use N dividing meshMultiple/2");
    }
    // Each sub-interval has length T/(2N) and uses the doubled coefficients, so its steps
    // are the global steps.
    steps_ = K / (2 * static_cast<std::size_t>(N));
    kernel_ = heatKernel(s.grid, sched_.length(), 2.0 * s.a0);
    const double h = s.grid.spacing();
    for (double& w : kernel_.weights) {
        if (w * h < cfg_.kernelCutoff) w = 0.0;
    }
    if (kernel_.weights[0] == 0.0) kernel_ = heatKernel(s.grid, 0.0, 0.0);
    counters_.perCheckpoint.assign(sched_.checkpoints(), 0);
}

MeasureFunctional SplittingScheme::functional(std::size_t checkpoint) {
    MeasureFunctional f;
    f.value = [this, checkpoint](const GridDensity& m) { return eval(checkpoint, m); };
    return f;
}

GridFunction SplittingScheme::eval(std::size_t k, const GridDensity& m) {
    requireSameGrid(s_.grid, m.grid(), "SplittingScheme::eval");
    if (k > sched_.last()) throw InvalidArgument("SplittingScheme::eval: checkpoint out of range");
    ++counters_.evaluations;
    ++counters_.perCheckpoint[k];
    if (k == sched_.last()) {
        ++counters_.terminalEvaluations;
        return terminal_.value(m);
    }
    const auto key = quantize(m, k, 0, cfg_.quantum);
    if (auto hit = cache_.find(key)) return *hit;
    auto out = compute(k, canonicalDensity(key, s_.grid, cfg_.quantum));
    cache_.insert(key, out);
    return out;
}

GridFunction SplittingScheme::compute(std::size_t k, const GridDensity& m) {
    if (sched_.kind(k) == SplitSchedule::Kind::Linear) {
        ++counters_.linearSteps;
        return evalLinearMaster(functional(k + 1), kernel_, m);
    }
    budget_->charge("SplittingScheme");
    ++counters_.mfgSolves;
    const auto next = functional(k + 1);
    MFGOptions opts;
    opts.steps = steps_;
    opts.fixedPoint = &cfg_.inner;
    try {
        auto sol = solveMFG(doubled_, sched_.time(k), sched_.time(k + 1), m, s_.x0, next, opts);
        counters_.picardSweeps += static_cast<std::uint64_t>(sol.iterations);
        return sol.u.snapshots.front();
    } catch (const NonConvergence&) {
        ++counters_.fallbacks;
        opts.fixedPoint = &cfg_.fallback;
        auto sol = solveMFG(doubled_, sched_.time(k), sched_.time(k + 1), m, s_.x0, next, opts);
        counters_.picardSweeps += static_cast<std::uint64_t>(sol.iterations);
        return sol.u.snapshots.front();
    }
}

SchemeCounters& SchemeCounters::operator+=(const SchemeCounters& o) {
    evaluations += o.evaluations;
    mfgSolves += o.mfgSolves;
    picardSweeps += o.picardSweeps;
    linearSteps += o.linearSteps;
    terminalEvaluations += o.terminalEvaluations;
    fallbacks += o.fallbacks;
    if (perCheckpoint.size() < o.perCheckpoint.size()) perCheckpoint.resize(o.perCheckpoint.size(), 0);
    for (std::size_t k = 0; k < o.perCheckpoint.size(); ++k) perCheckpoint[k] += o.perCheckpoint[k];
    return *this;
}

ConvergenceTable convergenceStudy(const Scenario& s, const std::vector<int>& Ns,
                                  const std::vector<GridDensity>& samples, SchemeConfig cfg,
                                  std::size_t threads) {
    for (std::size_t i = 1; i < Ns.size(); ++i) {
        if (Ns[i] <= Ns[i - 1]) throw InvalidArgument("convergenceStudy: Ns must be ascending");
    }
    struct Task {
        GridFunction value;
        SchemeCounters counters;
        std::uint64_t hits = 0, misses = 0;
        double seconds = 0.0;
        std::string budgetNote;
    };
    const std::size_t S = samples.size();
    std::vector<Task> tasks(Ns.size() * S);
    parallelFor(tasks.size(), threads, [&](std::size_t t) {
        const auto start = std::chrono::steady_clock::now();
        SolveBudget budget{cfg.budget, 0};
        SplittingScheme scheme(s, Ns[t / S], cfg, &budget);
        try {
            tasks[t].value = scheme.eval(0, samples[t % S]);
        } catch (const BudgetExceeded& e) {
            tasks[t].budgetNote = e.what();
        }
        tasks[t].counters = scheme.counters();
        tasks[t].hits = scheme.cacheHits();
        tasks[t].misses = scheme.cacheMisses();
        tasks[t].seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    });

    ConvergenceTable table;
    for (std::size_t i = 0; i < Ns.size(); ++i) {
        SchemeCounters sum;
        sum.perCheckpoint.assign(2 * static_cast<std::size_t>(Ns[i]) + 1, 0);
        std::uint64_t hits = 0, misses = 0;
        double secs = 0.0;
        std::vector<GridFunction> vals;
        for (std::size_t j = 0; j < S; ++j) {
            const auto& tk = tasks[i * S + j];
            sum += tk.counters;
            hits += tk.hits;
            misses += tk.misses;
            secs += tk.seconds;
            if (!tk.budgetNote.empty() && !table.partial) {
                table.partial = true;
                table.note = tk.budgetNote + " while evaluating N = " + std::to_string(Ns[i]) + ", sample " +
                             std::to_string(j);
            }
            vals.push_back(tk.value);
        }
        table.counters.push_back(std::move(sum));
        table.cacheHits.push_back(hits);
        table.cacheMisses.push_back(misses);
        table.seconds.push_back(secs);
        if (table.partial) break;
        table.values.push_back(std::move(vals));
    }
    for (std::size_t i = 0; i + 1 < table.values.size(); ++i) {
        ConvergenceRow row{Ns[i], Ns[i + 1], 0.0, std::numeric_limits<double>::quiet_NaN()};
        for (std::size_t j = 0; j < S; ++j) {
            const auto& a = table.values[i][j];
            const auto& b = table.values[i + 1][j];
            for (std::size_t x = 0; x < a.size(); ++x) row.E = std::max(row.E, std::abs(a[x] - b[x]));
        }
        table.rows.push_back(row);
    }
    for (std::size_t i = 0; i + 1 < table.rows.size(); ++i) {
        table.rows[i].order = std::log2(table.rows[i].E / table.rows[i + 1].E);
    }
    return table;
}

StochasticReport stochasticConsistency(const Scenario& s, const MasterEvaluator& U, std::size_t steps,
                                       const GridDensity& m0, std::size_t pathCount, std::uint64_t seed) {
    if (steps == 0 || pathCount == 0) throw InvalidArgument("stochasticConsistency: steps and paths must be positive");
    const auto& g = s.grid;
    const std::size_t n = g.cells();
    const double h = g.spacing();
    const double dt = s.T / static_cast<double>(steps);
    const double sigma0 = std::sqrt(s.a0);
    const auto a = s.diffusion();
    const auto aVals = a.sample(g, 0.0);

    StochasticReport rep;
    rep.paths = pathCount;
    rep.seed = seed;
    rep.steps = steps;
    rep.dt = dt;

    std::vector<double> sum(n, 0.0), sumSq(n, 0.0);
    for (std::size_t p = 0; p < pathCount; ++p) {
        auto rng = taskStream(seed, "stochastic-path-" + std::to_string(p));
        std::normal_distribution<double> normal(0.0, 1.0);
        GridDensity m = m0;
        std::vector<double> acc(n, 0.0);
        GridFunction u = U(0, m);
        for (std::size_t k = 0; k < steps; ++k) {
            const auto ux = spectral::derivative(u.values, g.length(), 1);
            const auto uxx = spectral::derivative(u.values, g.length(), 2);
            std::vector<double> v(n, 0.0), vx(n, 0.0);
            if (s.a0 > 0.0) {
                const auto up = U(k, rotateCells(m, 1));
                const auto dn = U(k, rotateCells(m, -1));
                for (std::size_t i = 0; i < n; ++i) v[i] = std::sqrt(2.0) * sigma0 * (up[i] - dn[i]) / (2.0 * h);
                vx = spectral::derivative(v, g.length(), 1);
            }
            const FrozenHamiltonian H(s.H, s.x0, m);
            auto drift = [&](std::size_t, std::span<double> b) {
                for (std::size_t i = 0; i < n; ++i) b[i] = H.Hp(i, ux[i]);
            };
            const auto mesh = TimeMesh::covering(0.0, dt, s.dtMax());
            auto flowed = solveFPForward(a, drift, m, mesh).snapshots.back();
            const double dW = std::sqrt(dt) * normal(rng);
            m = s.a0 > 0.0 ? pushforwardTranslate(flowed, std::sqrt(2.0 * s.a0) * dW) : flowed;
            const GridFunction next = U(k + 1, m);
            for (std::size_t i = 0; i < n; ++i) {
                const double driftTerm = -(aVals[i] + s.a0) * uxx[i] + H.H(i, ux[i]) -
                                         std::sqrt(2.0) * sigma0 * vx[i];
                acc[i] += next[i] - u[i] - driftTerm * dt - v[i] * dW;
            }
            u = next;
        }
        for (std::size_t i = 0; i < n; ++i) {
            sum[i] += acc[i];
            sumSq[i] += acc[i] * acc[i];
            rep.maxPathResidual = std::max(rep.maxPathResidual, std::abs(acc[i]));
        }
    }
    const double P = static_cast<double>(pathCount);
    for (std::size_t i = 0; i < n; ++i) {
        const double mean = sum[i] / P;
        rep.meanResidual = std::max(rep.meanResidual, std::abs(mean));
        if (pathCount > 1) {
            const double var = std::max(0.0, (sumSq[i] - P * mean * mean) / (P - 1.0));
            rep.standardError = std::max(rep.standardError, std::sqrt(var / P));
        }
    }
    return rep;
}

}  // namespace mfg
