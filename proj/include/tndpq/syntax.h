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

#ifndef TNDPQ_SYNTAX_H_
#define TNDPQ_SYNTAX_H_

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tndpq/error.h"

namespace tndpq {

// An atomic variable together with its ordered atomic values.
struct Variable {
  std::string name;
  std::vector<std::string> atoms;
};

class Schema {
 public:
  Schema() = default;

  // Validates uniqueness, disjointness and the two-atom minimum.
  void add_variable(std::string name, std::vector<std::string> atoms);

  // Lines of the form `name = v1 | v2 | ...`; `#` starts a comment.
  static Schema parse(std::string_view text);
  static Schema load(const std::string& path);

  const std::vector<Variable>& variables() const { return variables_; }
  const Variable* find_variable(std::string_view name) const;
  // Index of the variable in declaration order.
  std::optional<std::size_t> variable_index(std::string_view name) const;

  struct AtomRef {
    std::size_t variable;
    std::size_t atom;
  };
  std::optional<AtomRef> find_atom(std::string_view atom) const;
  const Variable& variable_of_atom(std::string_view atom) const;

  std::string to_text() const;

 private:
  std::vector<Variable> variables_;
};

class Value {
 public:
  enum class Kind { kAtom, kNeg, kOr, kProd, kArrow };

  // An atom with an empty name; placeholder for default-constructed aggregates.
  Value() : node_(std::make_shared<const Node>(Node{Kind::kAtom, {}, {}})) {}

  static Value atom(std::string name);
  static Value neg(Value inner);
  static Value disj(Value left, Value right);
  static Value prod(Value left, Value right);
  static Value arrow(Value left, Value right);

  Kind kind() const { return node_->kind; }
  const std::string& name() const { return node_->name; }
  const Value& inner() const { return node_->children[0]; }
  const Value& left() const { return node_->children[0]; }
  const Value& right() const { return node_->children[1]; }

  // Class O: no products and no conditionals.
  bool deterministic() const;
  // No negation anywhere.
  bool negation_free() const;
  std::size_t depth() const;
  // Atom names in left-to-right order, with repetitions.
  void collect_atoms(std::vector<std::string>& out) const;

  friend bool operator==(const Value& a, const Value& b);
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }
  friend bool operator<(const Value& a, const Value& b);

 private:
  struct Node {
    Kind kind;
    std::string name;
    std::vector<Value> children;
  };
  explicit Value(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static int compare(const Value& a, const Value& b);

  std::shared_ptr<const Node> node_;
};

class Term {
 public:
  enum class Kind { kAtom, kPair, kFst, kSnd, kCond };

  Term() : node_(std::make_shared<const Node>(Node{Kind::kAtom, {}, {}})) {}

  static Term atom(std::string name);
  static Term pair(Term left, Term right);
  static Term fst(Term inner);
  static Term snd(Term inner);
  static Term cond(Term antecedent, Term consequent);

  Kind kind() const { return node_->kind; }
  bool is_atom() const { return node_->kind == Kind::kAtom; }
  const std::string& name() const { return node_->name; }
  const Term& inner() const { return node_->children[0]; }
  const Term& left() const { return node_->children[0]; }
  const Term& right() const { return node_->children[1]; }

  // Atomic variable names in left-to-right order, with repetitions.
  void collect_variables(std::vector<std::string>& out) const;

  friend bool operator==(const Term& a, const Term& b);
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }
  friend bool operator<(const Term& a, const Term& b);

 private:
  struct Node {
    Kind kind;
    std::string name;
    std::vector<Term> children;
  };
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static int compare(const Term& a, const Term& b);

  std::shared_ptr<const Node> node_;
};

struct Attribution {
  std::string variable;
  Value value;

  friend bool operator==(const Attribution& a, const Attribution& b) {
    return a.variable == b.variable && a.value == b.value;
  }
};

using Sigma = std::vector<Attribution>;

// Order-insensitive comparison keyed by variable.
bool same_sigma(const Sigma& a, const Sigma& b);
const Attribution* find_attribution(const Sigma& sigma, std::string_view var);
// Sigma sorted by the schema's variable order.
Sigma canonical_sigma(const Sigma& sigma, const Schema& schema);

struct Judgment {
  Sigma sigma;
  Term subject;
  Value value;
  double probability = 0.0;
};

// Structural equality with sigma compared as a set; exact probability.
bool same_judgment(const Judgment& a, const Judgment& b);
// As above, ignoring probability.
bool same_shape(const Judgment& a, const Judgment& b);

Term reduce_projections(const Term& term);

Value parse_value(std::string_view text, const Schema& schema);
Term parse_term(std::string_view text, const Schema& schema);
Sigma parse_sigma(std::string_view text, const Schema& schema);
Judgment parse_judgment(std::string_view text, const Schema& schema);
// A judgment with the `@ p` suffix optional; probability is NaN when absent.
Judgment parse_query(std::string_view text, const Schema& schema);

// Checks the invariants the parser enforces; throws IllFormed.
void validate_judgment(const Judgment& j, const Schema& schema);
void validate_attribution(const Attribution& a, const Schema& schema);

std::string print_value(const Value& value);
std::string print_term(const Term& term);
std::string print_sigma(const Sigma& sigma);
std::string print_probability(double p);
std::string print_judgment(const Judgment& j);
// The judgment without its probability suffix.
std::string print_query(const Judgment& j);

}  // namespace tndpq

#endif  // TNDPQ_SYNTAX_H_
