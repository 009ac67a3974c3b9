// Copyright 2026 The MBLAP Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Reading and writing scenario documents (JSON, see docs/scenario-format.md).

#ifndef MBLAP_SCENARIO_IO_H_
#define MBLAP_SCENARIO_IO_H_

#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mblap/scenario.h"

namespace mblap {

// Malformed document: bad JSON, wrong value type, missing or unknown key.
class ScenarioParseError : public std::runtime_error {
 public:
  explicit ScenarioParseError(const std::string& what)
      : std::runtime_error(what) {}
};

// Well-formed document that breaks one or more scenario invariants.
class ScenarioValidationError : public std::runtime_error {
 public:
  explicit ScenarioValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

// Parses without validating. Defaults are applied.
Scenario ParseScenario(const std::string& text);

// Parse and validate. Throws ScenarioParseError or ScenarioValidationError.
Scenario LoadScenarioFromString(const std::string& text);
Scenario LoadScenarioFromStream(std::istream& in);
// A missing or unreadable file is reported as ScenarioParseError.
Scenario LoadScenario(const std::string& path);

// Canonical document text (cycles always written in full).
std::string SerializeScenario(const Scenario& scenario);

}  // namespace mblap

#endif  // MBLAP_SCENARIO_IO_H_
