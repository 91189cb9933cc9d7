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

#ifndef TNDPQ_CONSTRUCTION_H_
#define TNDPQ_CONSTRUCTION_H_

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "tndpq/calculus.h"
#include "tndpq/script.h"
#include "tndpq/trust.h"

namespace tndpq {

enum class PlanMode { kConstruct, kDeconstruct };

// Right I-rules with ImpIE and NegIER forward; right E-rules with ImpIE and
// NegIER backward.
bool construction_rule(RuleId rule, Direction dir);
bool deconstruction_rule(RuleId rule, Direction dir);

// Runs the plan with the mode's rule restriction; throws RuleNotAllowed.
// Inputs are available to the plan under their map keys.
ScriptRun run_plan(const Script& plan, PlanMode mode, const Schema& schema,
                   const ProbabilitySource* source,
                   const std::map<std::string, Derivation>& inputs = {});
Derivation construct(const std::map<std::string, Derivation>& inputs,
                     const Script& plan, const Schema& schema,
                     const ProbabilitySource* source = nullptr);
Derivation deconstruct(const std::map<std::string, Derivation>& inputs,
                       const Script& plan, const Schema& schema,
                       const ProbabilitySource* source = nullptr);

enum class Connective { kArrow, kExclusiveOr, kProd, kNeg };

struct ClosureSpec {
  std::vector<Value> base;
  std::vector<Connective> connectives;
  std::size_t depth = 4;
  // For pair terms: the closure of left x right products of these specs
  // under this spec's connectives.
  std::shared_ptr<const ClosureSpec> left;
  std::shared_ptr<const ClosureSpec> right;

  bool allows(Connective c) const;
};

// Membership within the depth bound. Disjunctions must be certified
// exclusive over the term the value ranges over.
bool closure_member(const Value& value, const ClosureSpec& spec,
                    const Schema& schema);

// Reflexive sub-values in first-visit order, without duplicates.
std::vector<Value> subvalues(const Value& value);

// v' for compound targets built by pairing. Atoms close v(a) under +^bot
// (and bot for ET). Throws UnsupportedTarget for conditional terms.
std::vector<std::pair<Term, ClosureSpec>> derive_relevance(
    const std::map<std::string, std::vector<Value>>& v,
    const std::vector<Term>& targets, Relation kind, std::size_t depth = 4);

struct PreservationOptions {
  // Compute and mark empirical instead of raising TheoremDoesNotApply.
  bool allow_empirical = false;
  double tol = 0.0;
};

// Runs the plan against both sources and checks the concluded pair. The
// AtQuery leaves and named inputs are the premises whose pairwise trust
// is the hypothesis.
TrustReport verify_preservation(
    const ProbabilitySource& original, const ProbabilitySource& copy,
    const std::map<std::string, Derivation>& original_inputs,
    const std::map<std::string, Derivation>& copy_inputs, const Script& plan,
    Relation kind, PlanMode mode, const Schema& schema,
    const PreservationOptions& options = {});

}  // namespace tndpq

#endif  // TNDPQ_CONSTRUCTION_H_
