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

#ifndef TNDPQ_EXCLUSIVITY_H_
#define TNDPQ_EXCLUSIVITY_H_

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tndpq/syntax.h"

namespace tndpq {

// A generalized disjunction of the atoms of one variable, by position.
struct IndexSet {
  std::string variable;
  std::set<std::size_t> indices;

  friend bool operator==(const IndexSet& a, const IndexSet& b) {
    return a.variable == b.variable && a.indices == b.indices;
  }
};

// A value during *-transformation: class-O connectives over atoms plus
// already normalized generalized disjunctions.
class StarTerm {
 public:
  enum class Kind { kAtom, kNeg, kOr, kGen };

  static StarTerm from_value(const Value& v);
  static StarTerm gen(std::set<std::size_t> indices);
  static StarTerm neg(StarTerm inner);
  static StarTerm disj(StarTerm left, StarTerm right);

  Kind kind() const { return kind_; }
  const std::string& atom() const { return atom_; }
  const std::set<std::size_t>& indices() const { return indices_; }
  const std::vector<StarTerm>& children() const { return children_; }

  std::string to_string(const Variable& var) const;

 private:
  Kind kind_ = Kind::kGen;
  std::string atom_;
  std::set<std::size_t> indices_;
  std::vector<StarTerm> children_;
};

// One *-step, leftmost innermost. Returns nullopt when no rule applies.
std::optional<StarTerm> star_step(const StarTerm& t, const Variable& var);

// beta^infinity as an index set. Throws MixedVariables or
// NonDeterministicValue.
IndexSet star_normalize(const Value& value, const Schema& schema);

bool atomic_exclusive(const std::string& variable, const Value& beta,
                      const Value& delta, const Schema& schema);

struct ExclusivityDecision {
  bool exclusive = false;
  std::vector<std::string> trace;
};

ExclusivityDecision decide_exclusive(const Term& term, const Value& beta,
                                     const Value& delta, const Schema& schema);
bool exclusive(const Term& term, const Value& beta, const Value& delta,
               const Schema& schema);

// Brute-force model enumeration over the variables of `term`.
inline constexpr std::size_t kOracleAtomBudget = 20;
bool oracle_exclusive(const Term& term, const Value& beta, const Value& delta,
                      const Schema& schema,
                      std::size_t atom_budget = kOracleAtomBudget);

// The variable term a value naturally ranges over, from atom ownership.
// Products give pairs and conditionals give [t]u; nullopt when the value
// mixes variables inside a class-O part or disagrees across disjuncts.
std::optional<Term> infer_term(const Value& value, const Schema& schema);

}  // namespace tndpq

#endif  // TNDPQ_EXCLUSIVITY_H_
