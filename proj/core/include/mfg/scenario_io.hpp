#pragma once

#include <string>

#include "mfg/scenario.hpp"

namespace mfg {

/// Parses the dotted-key scenario format. Unspecified keys keep the values of the `base`
/// scenario (default or decoupled). `origin` prefixes error messages.
Scenario parseScenario(const std::string& text, const std::string& origin = "<string>");
Scenario loadScenario(const std::string& path);

/// Writes every key with round-trip precision.
std::string formatScenario(const Scenario& s);
void saveScenario(const Scenario& s, const std::string& path);

/// Field-wise equality, used by round-trip checks.
bool sameScenario(const Scenario& a, const Scenario& b);

}  // namespace mfg
