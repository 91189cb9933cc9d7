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

#ifndef TNDPQ_CALCULUS_H_
#define TNDPQ_CALCULUS_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tndpq/exclusivity.h"
#include "tndpq/syntax.h"

namespace tndpq {

enum class RuleId {
  kAtQuery,
  kImpIE,
  kProdI1,
  kProdI2,
  kProdE1a,
  kProdE1b,
  kProdE2a,
  kProdE2b,
  kOrIR,
  kOrERa,
  kOrERb,
  kOrIL,
  kOrELa,
  kOrELb,
  kOrELc,
  kOrELd,
  kNegIER,
  kNegIL,
  kNegELa,
  kNegELb,
  kNegELc,
  kProdIIndep,
};

// ImpIE and NegIER are double-line rules; the direction picks the reading.
enum class Direction { kForward, kBackward };

std::string_view rule_name(RuleId rule);
std::optional<RuleId> rule_from_name(std::string_view name);
std::size_t rule_arity(RuleId rule);
// Right I-rules and right E-rules, direction aware.
bool is_right_introduction(RuleId rule, Direction dir);
bool is_right_elimination(RuleId rule, Direction dir);

inline constexpr double kZeroTolerance = 1e-12;
inline constexpr double kRangeTolerance = 1e-9;
inline constexpr double kCheckTolerance = 1e-9;

// The probability formula of a rule, premises in rule order. Throws
// ZeroDenominator. No range check.
double rule_formula(RuleId rule, Direction dir, std::span<const double> p);

struct Provenance {
  std::string training;
  std::string algorithm;

  friend bool operator==(const Provenance& a, const Provenance& b) {
    return a.training == b.training && a.algorithm == b.algorithm;
  }
};

struct ExclusivityFact {
  Term term;
  Value left;
  Value right;
  std::vector<std::string> trace;
};

struct IndependenceFact {
  Term left;
  Term right;
  bool asserted = false;
  double max_deviation = 0.0;
  double tolerance = 0.0;
};

struct DenominatorFact {
  std::string premise;
  double value = 0.0;
};

using SideCondition =
    std::variant<ExclusivityFact, IndependenceFact, DenominatorFact>;

struct Derivation {
  Judgment conclusion;
  RuleId rule = RuleId::kAtQuery;
  Direction direction = Direction::kForward;
  std::vector<Derivation> premises;
  std::vector<SideCondition> side_conditions;
  std::optional<Provenance> provenance;
};

// Where AtQuery leaves get their numbers.
class ProbabilitySource {
 public:
  virtual ~ProbabilitySource() = default;
  // P(subject = value | sigma). Throws UnknownCondition when the source
  // cannot evaluate the query.
  virtual double query(const Sigma& sigma, const Term& subject,
                       const Value& value) const = 0;
  virtual std::optional<Provenance> provenance() const { return std::nullopt; }
  // Numeric independence test for I-x-indep; nullopt when unsupported.
  virtual std::optional<IndependenceFact> test_independence(
      const Sigma& sigma, const Term& t, const Term& u, double tol) const {
    (void)sigma, (void)t, (void)u, (void)tol;
    return std::nullopt;
  }
};

// Serves an explicit list of judgments.
class FactSource : public ProbabilitySource {
 public:
  FactSource() = default;
  explicit FactSource(std::vector<Judgment> facts) : facts_(std::move(facts)) {}
  void add(Judgment j) { facts_.push_back(std::move(j)); }
  double query(const Sigma& sigma, const Term& subject,
               const Value& value) const override;

 private:
  std::vector<Judgment> facts_;
};

// Tries each source in order.
class ChainSource : public ProbabilitySource {
 public:
  explicit ChainSource(std::vector<const ProbabilitySource*> sources)
      : sources_(std::move(sources)) {}
  double query(const Sigma& sigma, const Term& subject,
               const Value& value) const override;
  std::optional<Provenance> provenance() const override;
  std::optional<IndependenceFact> test_independence(
      const Sigma& sigma, const Term& t, const Term& u,
      double tol) const override;

 private:
  std::vector<const ProbabilitySource*> sources_;
};

Derivation at_query(const ProbabilitySource& source, const Sigma& sigma,
                    const Term& subject, const Value& value);

struct RuleOptions {
  Direction direction = Direction::kForward;
  // ImpIE forward: the antecedent variable to discharge. May be left empty
  // when the premise has a single attribution.
  std::string variable;
  // I-x-indep: use this fact instead of testing.
  std::optional<IndependenceFact> independence;
  double independence_tolerance = 1e-9;
  const ProbabilitySource* source = nullptr;
};

Derivation apply_rule(RuleId rule, std::vector<Derivation> premises,
                      const Schema& schema, const RuleOptions& options = {});

struct Violation {
  enum class Kind {
    kLeafMismatch,
    kFormulaViolation,
    kSideCondition,
    kProvenanceMismatch,
    kShape,
  };
  Kind kind;
  std::string path;  // dot separated premise indices from the root
  std::string message;
};

std::string_view violation_kind_name(Violation::Kind kind);

struct CheckReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

CheckReport check_derivation(const Derivation& d, const Schema& schema,
                             const ProbabilitySource* source);

// Builds `subject : value` under sigma with right introduction rules only,
// grounding atoms in AtQuery. Throws DerivationFailed.
struct DeriveOptions {
  bool assert_independence = false;
  double independence_tolerance = 1e-9;
};
Derivation derive_value(const ProbabilitySource& source, const Sigma& sigma,
                        const Term& subject, const Value& value,
                        const Schema& schema, const DeriveOptions& opts = {});

// Answers compound queries by derive_value over a base source.
class DerivingSource : public ProbabilitySource {
 public:
  DerivingSource(const ProbabilitySource& base, const Schema& schema,
                 DeriveOptions opts = {})
      : base_(base), schema_(schema), opts_(opts) {}

  double query(const Sigma& sigma, const Term& subject,
               const Value& value) const override;
  std::optional<Provenance> provenance() const override {
    return base_.provenance();
  }
  std::optional<IndependenceFact> test_independence(
      const Sigma& sigma, const Term& t, const Term& u,
      double tol) const override {
    return base_.test_independence(sigma, t, u, tol);
  }

 private:
  const ProbabilitySource& base_;
  const Schema& schema_;
  DeriveOptions opts_;
};

std::string format_derivation(const Derivation& d);

}  // namespace tndpq

#endif  // TNDPQ_CALCULUS_H_
