// Copyright 2026 The tndpq Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TNDPQ_SCRIPT_H_
#define TNDPQ_SCRIPT_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tndpq/calculus.h"

namespace tndpq {

// One line of a proof script:
//   id = AtQuery "<sigma |> t : value>" [@ p]
//   id = RULE id1 id2 ... [@ p] [| dir=fwd|bwd var=X indep=assert tol=T]
struct PlanStep {
  std::string id;
  RuleId rule = RuleId::kAtQuery;
  Direction direction = Direction::kForward;
  std::vector<std::string> operands;
  std::string variable;
  bool assert_independence = false;
  double independence_tolerance = 1e-9;
  std::optional<double> claimed;
  Judgment query;  // AtQuery only
  int line = 0;
};

// `fact "<judgment @ p>"` lines feed a FactSource consulted before the
// external source.
struct Script {
  std::vector<Judgment> facts;
  std::vector<PlanStep> steps;
};

Script parse_script(std::string_view text, const Schema& schema);
Script load_script(const std::string& path, const Schema& schema);
std::string print_script(const Script& script);

struct ScriptRun {
  std::vector<std::string> order;
  std::map<std::string, Derivation> steps;
  // Steps not used as an operand by any later step; the last one is the
  // result.
  std::vector<std::string> roots;

  const Derivation& result() const { return steps.at(roots.back()); }
};

struct RunOptions {
  // Replace computed probabilities with the claimed ones, so that a
  // subsequent check_derivation reports the claim.
  bool adopt_claims = false;
  // Non-AtQuery steps failing this predicate raise RuleNotAllowed.
  bool (*permit)(RuleId, Direction) = nullptr;
  const char* restriction = nullptr;  // label for the error message
};

// The derivation as a script, premises first. Leaves become AtQuery steps
// and asserted independence facts become `indep=assert`.
Script script_from_derivation(const Derivation& d);

// Named derivations are available as operands under their names.
ScriptRun run_script(const Script& script, const Schema& schema,
                     const ProbabilitySource* source,
                     const std::map<std::string, Derivation>& inputs = {},
                     const RunOptions& options = {});

}  // namespace tndpq

#endif  // TNDPQ_SCRIPT_H_
