#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mfg/scenario.hpp"

namespace mfgsplit {

struct RunConfig {
    std::string command;
    std::string scenarioPath;
    std::vector<int> Ns;
    std::vector<std::size_t> grid;
    std::optional<double> tol;
    std::uint64_t budget = 0;
    std::uint64_t seed = 1;
    std::string out = ".";
    std::size_t samples = 5;
    std::size_t paths = 64;
    std::size_t threads = 1;
};

/// Thrown when an enabled output assertion fails; artifacts are already written.
struct AssertionFailure {
    std::string what;
};

/// Thrown when a budget ran out; partial artifacts are already written.
struct PartialResult {
    std::string what;
};

/// Runs one command and writes <out>/<command>.csv and <out>/<command>.json.
void runCommand(const RunConfig& cfg, const mfg::Scenario& s);

/// Sample 0 is the scenario's initial density; the rest come from the stream "sample-k".
std::vector<mfg::GridDensity> sampleDensities(const mfg::Scenario& s, std::size_t count, std::uint64_t seed);

}  // namespace mfgsplit
