#pragma once

#include <cstdint>
#include <functional>
#include <list>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mfg/functional.hpp"
#include "mfg/linear_master.hpp"
#include "mfg/mfg_system.hpp"
#include "mfg/scenario.hpp"

namespace mfg {

/// Checkpoints t_k = kT/(2N); interval (t_k, t_{k+1}) is first-order for even k, linear for odd k.
struct SplitSchedule {
    int N = 1;
    double T = 1.0;

    enum class Kind { FirstOrder, Linear };

    SplitSchedule(int n, double horizon);
    [[nodiscard]] std::size_t checkpoints() const noexcept { return 2 * static_cast<std::size_t>(N) + 1; }
    [[nodiscard]] std::size_t last() const noexcept { return 2 * static_cast<std::size_t>(N); }
    [[nodiscard]] double time(std::size_t k) const noexcept {
        return static_cast<double>(k) * T / (2.0 * N);
    }
    [[nodiscard]] double length() const noexcept { return T / (2.0 * N); }
    [[nodiscard]] Kind kind(std::size_t interval) const noexcept {
        return interval % 2 == 0 ? Kind::FirstOrder : Kind::Linear;
    }
};

/// Densities quantized at `quantum`; two densities share a key iff their quantized values agree.
struct DensityKey {
    std::size_t checkpoint = 0;
    std::size_t index = 0;  ///< extra axis (x0 node in the major scheme)
    std::vector<std::int64_t> q;

    friend bool operator==(const DensityKey&, const DensityKey&) = default;
};

struct DensityKeyHash {
    std::size_t operator()(const DensityKey& k) const noexcept;
};

DensityKey quantize(const GridDensity& m, std::size_t checkpoint, std::size_t index = 0,
                    double quantum = 1e-12);
/// The density every evaluation under `key` is computed from.
GridDensity canonicalDensity(const DensityKey& key, const TorusGrid& g, double quantum = 1e-12);

/// LRU memo of grid functions keyed by quantized densities.
template <class Value>
class FunctionalCache {
public:
    explicit FunctionalCache(std::size_t capacity) : capacity_(capacity) {}

    std::optional<Value> find(const DensityKey& key) {
        std::lock_guard lock(mu_);
        auto it = map_.find(key);
        if (it == map_.end()) {
            ++misses_;
            return std::nullopt;
        }
        ++hits_;
        order_.splice(order_.begin(), order_, it->second.second);
        return it->second.first;
    }

    void insert(const DensityKey& key, Value v) {
        std::lock_guard lock(mu_);
        if (capacity_ == 0 || map_.count(key)) return;
        order_.push_front(key);
        map_.emplace(key, std::make_pair(std::move(v), order_.begin()));
        while (map_.size() > capacity_) {
            map_.erase(order_.back());
            order_.pop_back();
            ++evictions_;
        }
    }

    [[nodiscard]] std::size_t size() const { return map_.size(); }
    [[nodiscard]] std::size_t capacity() const noexcept { return capacity_; }
    [[nodiscard]] std::uint64_t hits() const noexcept { return hits_; }
    [[nodiscard]] std::uint64_t misses() const noexcept { return misses_; }
    [[nodiscard]] std::uint64_t evictions() const noexcept { return evictions_; }

private:
    using Order = std::list<DensityKey>;
    std::size_t capacity_;
    Order order_;
    std::unordered_map<DensityKey, std::pair<Value, Order::iterator>, DensityKeyHash> map_;
    std::uint64_t hits_ = 0, misses_ = 0, evictions_ = 0;
    std::mutex mu_;
};

struct SchemeConfig {
    /// Picard settings inside the short first-order sub-intervals, and the damped retry.
    FixedPointConfig inner{1.0, 1e-9, 60};
    FixedPointConfig fallback{0.5, 1e-10, 400};
    /// The global step count is rounded up to a multiple of this, so every N dividing
    /// meshMultiple/2 shares one time step.
    std::size_t meshMultiple = 16;
    /// Heat-kernel weights with spacing·w below this are skipped in the fan-out.
    double kernelCutoff = 1e-10;
    std::size_t cacheCapacity = 400000;
    /// Maximum number of MFG sub-solves per top-level evaluation (0 = unlimited); exceeding it
    /// throws BudgetExceeded.
    std::uint64_t budget = 0;
    double quantum = 1e-12;
};

struct SchemeCounters {
    std::uint64_t evaluations = 0;
    std::uint64_t mfgSolves = 0;
    std::uint64_t picardSweeps = 0;
    std::uint64_t linearSteps = 0;
    std::uint64_t terminalEvaluations = 0;
    std::uint64_t fallbacks = 0;
    std::vector<std::uint64_t> perCheckpoint;

    SchemeCounters& operator+=(const SchemeCounters& o);
};

/// Shared MFG-solve counter for budgets spanning several schemes.
struct SolveBudget {
    std::uint64_t limit = 0;
    std::uint64_t used = 0;
    void charge(const char* where);
};

/// U^N of the splitting scheme, evaluated lazily and memoized per (checkpoint, density).
class SplittingScheme {
public:
    SplittingScheme(const Scenario& s, int N, SchemeConfig cfg = {}, SolveBudget* budget = nullptr);

    [[nodiscard]] const SplitSchedule& schedule() const noexcept { return sched_; }
    [[nodiscard]] const Scenario& scenario() const noexcept { return s_; }
    /// Steps of the common time mesh in one sub-interval.
    [[nodiscard]] std::size_t stepsPerInterval() const noexcept { return steps_; }
    [[nodiscard]] double dt() const noexcept { return sched_.length() / static_cast<double>(steps_); }

    /// U^N(t_k, ·, m).
    GridFunction eval(std::size_t checkpoint, const GridDensity& m);
    /// m ↦ U^N(t_k, ·, m).
    MeasureFunctional functional(std::size_t checkpoint);

    [[nodiscard]] const SchemeCounters& counters() const noexcept { return counters_; }
    [[nodiscard]] std::uint64_t cacheHits() const noexcept { return cache_.hits(); }
    [[nodiscard]] std::uint64_t cacheMisses() const noexcept { return cache_.misses(); }
    [[nodiscard]] std::uint64_t cacheEvictions() const noexcept { return cache_.evictions(); }
    [[nodiscard]] std::size_t cacheSize() const { return cache_.size(); }

    /// Global step count of the scheme mesh on [0, T] for a scenario.
    static std::size_t globalSteps(const Scenario& s, std::size_t meshMultiple);

private:
    Scenario s_;
    Scenario doubled_;
    SplitSchedule sched_;
    SchemeConfig cfg_;
    SolveBudget* budget_;
    SolveBudget ownBudget_;
    std::size_t steps_ = 1;
    WrappedHeatKernel kernel_;
    MeasureFunctional terminal_;
    FunctionalCache<GridFunction> cache_;
    SchemeCounters counters_;

    GridFunction compute(std::size_t k, const GridDensity& m);
};

struct ConvergenceRow {
    int N = 0;
    int N2 = 0;
    double E = 0.0;      ///< max over samples of sup_x |U^N - U^{2N}|
    double order = 0.0;  ///< log2(E_N / E_{2N}); NaN on the last row
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    bool partial = false;
    std::string note;
    std::vector<SchemeCounters> counters;  ///< one per N
    std::vector<std::uint64_t> cacheHits, cacheMisses;
    std::vector<double> seconds;           ///< summed wall time per N (not part of artifacts)
    std::vector<std::vector<GridFunction>> values;  ///< U^N(0, ·, sample) per N
};

/// E_N = sup over samples and x of |U^N(0) - U^{N'}(0)| for consecutive entries N, N' of Ns.
/// Every (N, sample) pair runs on its own scheme and budget, so results and counters do not
/// depend on `threads`.
ConvergenceTable convergenceStudy(const Scenario& s, const std::vector<int>& Ns,
                                  const std::vector<GridDensity>& samples, SchemeConfig cfg = {},
                                  std::size_t threads = 1);

/// Evaluator (t, m) ↦ U(t, ·, m) used by the stochastic consistency check.
using MasterEvaluator = std::function<GridFunction(std::size_t step, const GridDensity& m)>;

struct StochasticReport {
    std::size_t paths = 0;
    std::uint64_t seed = 0;
    std::size_t steps = 0;
    double dt = 0.0;
    double meanResidual = 0.0;   ///< sup_x |sample mean of the accumulated residual|
    double standardError = 0.0;  ///< sup_x of the Monte-Carlo standard error
    double maxPathResidual = 0.0;
};

/// Simulates the common-noise flow (FP step with drift from U, then a common translation of
/// variance 2·a0·dt) and checks the backward stochastic HJ identity in sample mean.
/// `U(k, m)` must return U(t_k, ·, m) on the uniform mesh of [0, T] with `steps` steps.
StochasticReport stochasticConsistency(const Scenario& s, const MasterEvaluator& U, std::size_t steps,
                                       const GridDensity& m0, std::size_t pathCount, std::uint64_t seed);

}  // namespace mfg
