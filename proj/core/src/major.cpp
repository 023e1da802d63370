#include "mfg/major.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "mfg/errors.hpp"
#include "mfg/parallel.hpp"
#include "mfg/spectral.hpp"

namespace mfg {

double jointDistance(const MajorValue& a, const MajorValue& b) {
    double d = 0.0;
    for (std::size_t j = 0; j < a.U0.size(); ++j) {
        double sx = 0.0;
        for (std::size_t i = 0; i < a.U[j].size(); ++i) sx = std::max(sx, std::abs(a.U[j][i] - b.U[j][i]));
        const double d0 = a.U0[j] - b.U0[j];
        d = std::max(d, std::sqrt(d0 * d0 + sx * sx));
    }
    return d;
}

Scenario majorScenario(const Scenario& s) {
    Scenario out = s;
    out.aBase = 1.0;
    out.aAmp = 0.0;
    return out;
}

MajorValue majorTerminal(const Scenario& s, const GridDensity& m) {
    MajorValue v;
    v.U0 = s.G0.valueOn(s.x0grid, m);
    v.U.reserve(s.x0grid.cells());
    for (std::size_t j = 0; j < s.x0grid.cells(); ++j) v.U.push_back(s.G.value(s.x0grid.node(j), m));
    return v;
}

MajorValue HJSystemSolution::initial() const {
    MajorValue v;
    v.U0 = U0.snapshots.front();
    const std::size_t n0 = v.U0.size();
    v.U.assign(n0, GridFunction());
    if (U.empty()) return v;
    const TorusGrid xg(2.0 * std::numbers::pi, U.size());
    for (std::size_t j = 0; j < n0; ++j) {
        v.U[j] = GridFunction(xg);
        for (std::size_t i = 0; i < U.size(); ++i) v.U[j][i] = U[i].snapshots.front()[j];
    }
    return v;
}

namespace {

std::vector<GridFunction> columns(const MajorValue& t, const TorusGrid& x0grid) {
    const std::size_t n = t.U.front().size();
    std::vector<GridFunction> cols(n, GridFunction(x0grid));
    for (std::size_t j = 0; j < t.U.size(); ++j) {
        for (std::size_t i = 0; i < n; ++i) cols[i][j] = t.U[j][i];
    }
    return cols;
}

}  // namespace

HJSystemSolution solveHJSystemX0(const Scenario& s, const GridDensity& m, const MajorValue& terminal,
                                 double duration, std::size_t steps, double factor) {
    requireSameGrid(s.x0grid, terminal.U0.grid, "solveHJSystemX0");
    const TimeMesh mesh(0.0, duration, steps);
    const FrozenMajorHamiltonian H0(s.H0.scaled(factor), s.x0grid, m);
    const auto a = Diffusion::constant(factor);
    HJOptions opts;
    opts.hp = [&](std::size_t, std::span<const double> p, std::span<double> out) {
        for (std::size_t j = 0; j < p.size(); ++j) out[j] = H0.Hp(j, p[j]);
    };
    auto h = [&](std::size_t, std::span<const double> p, std::span<double> out) {
        for (std::size_t j = 0; j < p.size(); ++j) out[j] = H0.H(j, p[j]);
    };
    HJSystemSolution sol;
    sol.U0 = solveHJBackward(a, h, terminal.U0, mesh, opts);
    const auto du0 = gradients(sol.U0);
    FieldAt drift = [&](std::size_t k, std::span<double> out) {
        for (std::size_t j = 0; j < out.size(); ++j) out[j] = H0.Hp(j, du0[k][j]);
    };
    const auto cols = columns(terminal, s.x0grid);
    std::vector<FieldAt> sources(cols.size());
    sol.U = solveLinearParabolicSystem(a, drift, sources, cols, mesh);
    return sol;
}

std::pair<double, GridFunction> firstOrderSystemStep(const Scenario& s, std::size_t j, const GridDensity& m0,
                                                     const MajorFunctional& terminal, double t0, double t1,
                                                     std::size_t steps, double factor,
                                                     const FixedPointConfig* fp) {
    const Scenario sf = majorScenario(s).scaledDynamics(factor);
    const double x0 = s.x0grid.node(j);
    MeasureFunctional F;
    F.value = [&](const GridDensity& m) { return terminal(m).U[j]; };
    MFGOptions opts;
    opts.steps = steps;
    opts.fixedPoint = fp;
    const auto sol = solveMFG(sf, t0, t1, m0, x0, F, opts);
    return {terminal(sol.m.snapshots.back()).U0[j], sol.u.snapshots.front()};
}

MajorScheme::MajorScheme(const Scenario& s, int N, SchemeConfig cfg, SolveBudget* budget)
    : s_(majorScenario(s)),
      sched_(N, s.T),
      cfg_(cfg),
      budget_(budget ? budget : &ownBudget_),
      cache_(cfg.cacheCapacity) {
    ownBudget_.limit = cfg.budget;
    const std::size_t twoN = 2 * static_cast<std::size_t>(N);
    const std::size_t Kx = SplittingScheme::globalSteps(s_, cfg.meshMultiple);
    const double h0 = s_.x0grid.spacing();
    const double dt0 = std::min(s_.dtFactor * h0, 0.5 * h0 / (2.0 * s_.driftBound));
    const std::size_t mult = std::max<std::size_t>(2, cfg.meshMultiple);
    auto K0 = static_cast<std::size_t>(std::ceil(s_.T / dt0 - 1e-9));
    K0 = std::max(mult, ((K0 + mult - 1) / mult) * mult);
    if (Kx % twoN != 0 || K0 % twoN != 0) {
        throw InvalidArgument("MajorScheme: N = " + std::to_string(N) + " does not divide the common mesh");
    }
    xSteps_ = Kx / twoN;
    x0Steps_ = K0 / twoN;
    counters_.perCheckpoint.assign(sched_.checkpoints(), 0);
}

MajorValue MajorScheme::eval(std::size_t k, const GridDensity& m) {
    requireSameGrid(s_.grid, m.grid(), "MajorScheme::eval");
    if (k > sched_.last()) throw InvalidArgument("MajorScheme::eval: checkpoint out of range");
    ++counters_.evaluations;
    ++counters_.perCheckpoint[k];
    if (k == sched_.last()) {
        ++counters_.terminalEvaluations;
        return majorTerminal(s_, m);
    }
    const auto key = quantize(m, k, 0, cfg_.quantum);
    if (auto hit = cache_.find(key)) return *hit;
    auto out = compute(k, canonicalDensity(key, s_.grid, cfg_.quantum));
    cache_.insert(key, out);
    return out;
}

MajorValue MajorScheme::compute(std::size_t k, const GridDensity& m) {
    // The major schedule starts with the x0-HJ system on even intervals.
    if (k % 2 == 0) {
        ++counters_.linearSteps;
        const auto next = eval(k + 1, m);
        return solveHJSystemX0(s_, m, next, sched_.length(), x0Steps_, 2.0).initial();
    }
    MajorValue out;
    out.U0 = GridFunction(s_.x0grid);
    out.U.resize(s_.x0grid.cells());
    MajorFunctional next = [this, k](const GridDensity& mm) { return eval(k + 1, mm); };
    for (std::size_t j = 0; j < s_.x0grid.cells(); ++j) {
        budget_->charge("MajorScheme");
        ++counters_.mfgSolves;
        std::pair<double, GridFunction> r;
        try {
            r = firstOrderSystemStep(s_, j, m, next, sched_.time(k), sched_.time(k + 1), xSteps_, 2.0, &cfg_.inner);
        } catch (const NonConvergence&) {
            ++counters_.fallbacks;
            r = firstOrderSystemStep(s_, j, m, next, sched_.time(k), sched_.time(k + 1), xSteps_, 2.0,
                                     &cfg_.fallback);
        }
        out.U0[j] = r.first;
        out.U[j] = std::move(r.second);
    }
    return out;
}

MajorAgreementTable majorAgreement(const Scenario& s, const std::vector<int>& Ns,
                                   const std::vector<GridDensity>& samples, SchemeConfig cfg,
                                   std::size_t threads) {
    for (std::size_t i = 1; i < Ns.size(); ++i) {
        if (Ns[i] <= Ns[i - 1]) throw InvalidArgument("majorAgreement: Ns must be ascending");
    }
    struct Task {
        MajorValue value;
        SchemeCounters counters;
        double seconds = 0.0;
        std::string budgetNote;
    };
    const std::size_t S = samples.size();
    std::vector<Task> tasks(Ns.size() * S);
    parallelFor(tasks.size(), threads, [&](std::size_t t) {
        const auto start = std::chrono::steady_clock::now();
        SolveBudget budget{cfg.budget, 0};
        MajorScheme scheme(s, Ns[t / S], cfg, &budget);
        try {
            tasks[t].value = scheme.eval(0, samples[t % S]);
        } catch (const BudgetExceeded& e) {
            tasks[t].budgetNote = e.what();
        }
        tasks[t].counters = scheme.counters();
        tasks[t].seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    });

    MajorAgreementTable table;
    for (std::size_t i = 0; i < Ns.size(); ++i) {
        SchemeCounters sum;
        double secs = 0.0;
        std::vector<MajorValue> vals;
        for (std::size_t j = 0; j < S; ++j) {
            const auto& tk = tasks[i * S + j];
            sum += tk.counters;
            secs += tk.seconds;
            if (!tk.budgetNote.empty() && !table.partial) {
                table.partial = true;
                table.note = tk.budgetNote + " while evaluating N = " + std::to_string(Ns[i]) + ", sample " +
                             std::to_string(j);
            }
            vals.push_back(tk.value);
        }
        table.counters.push_back(std::move(sum));
        table.seconds.push_back(secs);
        if (table.partial) break;
        table.values.push_back(std::move(vals));
    }
    for (std::size_t i = 0; i + 1 < table.values.size(); ++i) {
        ConvergenceRow row{Ns[i], Ns[i + 1], 0.0, std::numeric_limits<double>::quiet_NaN()};
        for (std::size_t j = 0; j < samples.size(); ++j) {
            row.E = std::max(row.E, jointDistance(table.values[i][j], table.values[i + 1][j]));
        }
        table.rows.push_back(row);
    }
    for (std::size_t i = 0; i + 1 < table.rows.size(); ++i) {
        table.rows[i].order = std::log2(table.rows[i].E / table.rows[i + 1].E);
    }
    return table;
}

MajorDerivativeContext::MajorDerivativeContext(const Scenario& s, const GridDensity& m, double duration,
                                               std::size_t steps)
    : s_(majorScenario(s)), m_(m), duration_(duration), steps_(steps) {
    sol_ = solveHJSystemX0(s_, m_, majorTerminal(s_, m_), duration_, steps_);
}

namespace {

struct MajorLinearTerms {
    std::vector<std::vector<double>> f0;              ///< per node k, over x0
    std::vector<std::vector<std::vector<double>>> f;  ///< per x-node i, per node k, over x0
    std::vector<std::vector<double>> coupling;        ///< per x-node i flattened over (k, j)
};

}  // namespace

MajorDerivativeContext::Linear MajorDerivativeContext::solveFirst(const GridSignedMeasure& rho) const {
    const FrozenMajorHamiltonian H0(s_.H0, s_.x0grid, m_);
    const auto dir = H0.direction(rho, m_);
    const auto du0 = gradients(sol_.U0);
    const std::size_t n = sol_.U.size();
    std::vector<std::vector<std::vector<double>>> dU(n);
    for (std::size_t i = 0; i < n; ++i) dU[i] = gradients(sol_.U[i]);

    const TimeMesh mesh(0.0, duration_, steps_);
    const auto a = Diffusion::constant(1.0);
    FieldAt drift = [&](std::size_t k, std::span<double> out) {
        for (std::size_t j = 0; j < out.size(); ++j) out[j] = H0.Hp(j, du0[k][j]);
    };
    std::vector<FieldAt> sources(n + 1), coupling(n + 1);
    sources[0] = [&](std::size_t k, std::span<double> out) {
        for (std::size_t j = 0; j < out.size(); ++j) out[j] = H0.dH(j, du0[k][j], dir);
    };
    for (std::size_t i = 0; i < n; ++i) {
        sources[i + 1] = [&, i](std::size_t k, std::span<double> out) {
            for (std::size_t j = 0; j < out.size(); ++j) out[j] = dU[i][k][j] * H0.dHp(j, du0[k][j], dir);
        };
        coupling[i + 1] = [&, i](std::size_t k, std::span<double> out) {
            for (std::size_t j = 0; j < out.size(); ++j) out[j] = dU[i][k][j] * H0.Hpp(j, du0[k][j]);
        };
    }
    std::vector<GridFunction> terminals;
    terminals.reserve(n + 1);
    GridFunction t0(s_.x0grid);
    for (std::size_t j = 0; j < s_.x0grid.cells(); ++j) t0[j] = s_.G0.flat(s_.x0grid.node(j), m_, rho);
    terminals.push_back(t0);
    std::vector<GridFunction> gflat;
    for (std::size_t j = 0; j < s_.x0grid.cells(); ++j) gflat.push_back(s_.G.flat(s_.x0grid.node(j), m_, rho));
    for (std::size_t i = 0; i < n; ++i) {
        GridFunction c(s_.x0grid);
        for (std::size_t j = 0; j < s_.x0grid.cells(); ++j) c[j] = gflat[j][i];
        terminals.push_back(c);
    }
    auto out = solveLinearParabolicSystem(a, drift, sources, terminals, mesh, coupling);
    Linear lin;
    lin.v0 = std::move(out.front());
    lin.v.assign(std::make_move_iterator(out.begin() + 1), std::make_move_iterator(out.end()));
    return lin;
}

MajorValue MajorDerivativeContext::derivative(const GridSignedMeasure& rho) const {
    auto lin = solveFirst(rho);
    HJSystemSolution tmp{std::move(lin.v0), std::move(lin.v)};
    return tmp.initial();
}

MajorValue MajorDerivativeContext::secondDerivative(const GridSignedMeasure& rho,
                                                    const GridSignedMeasure& rho2) const {
    const auto A = solveFirst(rho);
    const auto B = solveFirst(rho2);
    const FrozenMajorHamiltonian H0(s_.H0, s_.x0grid, m_);
    const auto d1 = H0.direction(rho, m_);
    const auto d2 = H0.direction(rho2, m_);
    const auto du0 = gradients(sol_.U0);
    const auto dv0 = gradients(A.v0);
    const auto dw0 = gradients(B.v0);
    const std::size_t n = sol_.U.size();
    std::vector<std::vector<std::vector<double>>> dU(n), dV(n), dW(n);
    for (std::size_t i = 0; i < n; ++i) {
        dU[i] = gradients(sol_.U[i]);
        dV[i] = gradients(A.v[i]);
        dW[i] = gradients(B.v[i]);
    }
    const TimeMesh mesh(0.0, duration_, steps_);
    const auto a = Diffusion::constant(1.0);
    FieldAt drift = [&](std::size_t k, std::span<double> out) {
        for (std::size_t j = 0; j < out.size(); ++j) out[j] = H0.Hp(j, du0[k][j]);
    };
    std::vector<FieldAt> sources(n + 1), coupling(n + 1);
    sources[0] = [&](std::size_t k, std::span<double> out) {
        for (std::size_t j = 0; j < out.size(); ++j) {
            const double p = du0[k][j];
            out[j] = H0.d2H(j, p, d1, d2) + H0.Hpp(j, p) * dv0[k][j] * dw0[k][j] +
                     H0.dHp(j, p, d1) * dw0[k][j] + H0.dHp(j, p, d2) * dv0[k][j];
        }
    };
    for (std::size_t i = 0; i < n; ++i) {
        sources[i + 1] = [&, i](std::size_t k, std::span<double> out) {
            for (std::size_t j = 0; j < out.size(); ++j) {
                const double p = du0[k][j];
                out[j] = dV[i][k][j] * (H0.dHp(j, p, d2) + H0.Hpp(j, p) * dw0[k][j]) +
                         dW[i][k][j] * (H0.dHp(j, p, d1) + H0.Hpp(j, p) * dv0[k][j]) +
                         dU[i][k][j] * (H0.dHpp(j, p, d1) * dw0[k][j] + H0.d2Hp(j, p, d1, d2) +
                                        H0.Hppp(j, p) * dv0[k][j] * dw0[k][j] + H0.dHpp(j, p, d2) * dv0[k][j]);
            }
        };
        coupling[i + 1] = [&, i](std::size_t k, std::span<double> out) {
            for (std::size_t j = 0; j < out.size(); ++j) out[j] = dU[i][k][j] * H0.Hpp(j, du0[k][j]);
        };
    }
    std::vector<GridFunction> terminals;
    GridFunction t0(s_.x0grid);
    for (std::size_t j = 0; j < s_.x0grid.cells(); ++j) t0[j] = s_.G0.flat2(s_.x0grid.node(j), m_, rho, rho2);
    terminals.push_back(t0);
    std::vector<GridFunction> g2;
    for (std::size_t j = 0; j < s_.x0grid.cells(); ++j) g2.push_back(s_.G.flat2(s_.x0grid.node(j), m_, rho, rho2));
    for (std::size_t i = 0; i < n; ++i) {
        GridFunction c(s_.x0grid);
        for (std::size_t j = 0; j < s_.x0grid.cells(); ++j) c[j] = g2[j][i];
        terminals.push_back(c);
    }
    auto out = solveLinearParabolicSystem(a, drift, sources, terminals, mesh, coupling);
    HJSystemSolution tmp;
    tmp.U0 = std::move(out.front());
    tmp.U.assign(std::make_move_iterator(out.begin() + 1), std::make_move_iterator(out.end()));
    return tmp.initial();
}

MajorValue derivMajorDm(const MajorDerivativeContext& ctx, const GridSignedMeasure& rho) {
    return ctx.derivative(rho);
}

MajorValue deriv2MajorDm(const MajorDerivativeContext& ctx, const GridSignedMeasure& rho,
                         const GridSignedMeasure& rho2) {
    return ctx.secondDerivative(rho, rho2);
}

}  // namespace mfg
