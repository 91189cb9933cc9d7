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

#ifndef TNDPQ_TRUST_H_
#define TNDPQ_TRUST_H_

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tndpq/calculus.h"
#include "tndpq/systems.h"

namespace tndpq {

enum class Relation { kJT, kET, kWT, kAT };

std::string_view relation_name(Relation r);

// Prefix kinds use `m`; set kinds use `values`.
struct TrustKind {
  Relation relation = Relation::kJT;
  std::size_t m = 0;
  bool set_based = false;
  std::vector<Value> values;

  static TrustKind prefix(Relation r, std::size_t m = 0);
  static TrustKind set(Relation r, std::vector<Value> values);
  // `jt`, `et:<m>`, `wt:<m>` or `at:<m>`.
  static TrustKind parse(std::string_view text);
  std::string name() const;
};

// The relations on bare probability vectors. `copy REL original`, prefix
// 1..m, 1-based m. Equality is |f-g| <= tol, >= is g >= f - tol, zero is
// |p| <= tol.
bool jt_holds(const std::vector<double>& copy,
              const std::vector<double>& original, double tol);
bool et_holds(const std::vector<double>& copy,
              const std::vector<double>& original, std::size_t m, double tol);
bool wt_holds(const std::vector<double>& copy,
              const std::vector<double>& original, std::size_t m, double tol);
bool at_holds(const std::vector<double>& copy,
              const std::vector<double>& original, std::size_t m, double tol);
bool relation_holds(Relation r, const std::vector<double>& copy,
                    const std::vector<double>& original, std::size_t m,
                    double tol);

struct Evidence {
  std::string where;  // sigma / variable context, empty for local checks
  std::string value;
  double p_original = 0.0;
  double p_copy = 0.0;
  std::string condition;
  bool satisfied = false;
};

struct TrustReport {
  bool verdict = true;
  std::string kind;
  std::vector<Evidence> evidence;
  std::optional<std::string> failed_condition;
  std::vector<std::string> notes;
  // True when no theorem guarantees the verdict.
  bool empirical = false;

  void add(Evidence e);
  void merge(const TrustReport& other);
};

TrustReport check_local(const AppliedSystem& original,
                        const AppliedSystem& copy, const TrustKind& kind,
                        double tol);

// Atoms by name per target variable.
using RelevanceMap = std::map<std::string, std::vector<std::string>>;

// Local check with the relevant atoms given by name instead of a prefix.
TrustReport check_relevant(const AppliedSystem& original,
                           const AppliedSystem& copy, Relation relation,
                           const std::vector<std::string>& relevant,
                           double tol);

struct SystemSpec {
  const TrainingSet* training;
  Estimator estimator;
};

TrustReport check_general(const SystemSpec& original, const SystemSpec& copy,
                          const std::vector<Sigma>& sigmas,
                          const std::vector<std::string>& targets,
                          const RelevanceMap& v, Relation relation,
                          double tol);

// The value-set kinds over a compound term. Probabilities come from
// derive_value on each side.
TrustReport check_nonatomic(const ProbabilitySource& original,
                            const ProbabilitySource& copy, const Term& term,
                            const Sigma& sigma, const TrustKind& kind,
                            const Schema& schema, double tol,
                            const DeriveOptions& opts = {});

// The finite zero-probe set used for WTset: base atoms and the exclusive
// single-connective combinations the term admits, all negation free.
std::vector<Value> zero_probes(const Term& term, const Schema& schema);

// ---------------------------------------------------------------- Algebra

struct PropertyRow {
  std::string table;
  std::string name;
  std::size_t checked = 0;    // instances where the antecedent held
  std::size_t failures = 0;
  std::string counterexample;
};

struct PropertyReport {
  std::vector<PropertyRow> rows;
  // Witnesses for the observation that ET and WT are independent.
  std::optional<std::string> et_not_wt;
  std::optional<std::string> wt_not_et;

  bool ok() const;
};

// Every triple is (a, b, c) over the same n atoms. Pairs use (a, b).
using SystemTriple = std::array<std::vector<double>, 3>;
PropertyReport verify_algebra(const std::vector<SystemTriple>& samples,
                              double tol);

// From a0 JT b0, a1 ET(m) a0 and b1 AT(m) b0, conclude b1 AT(m) a1.
TrustReport compose_square(const std::vector<double>& a0,
                           const std::vector<double>& b0,
                           const std::vector<double>& a1,
                           const std::vector<double>& b1, std::size_t m,
                           double tol);

// ---------------------------------------------------------------- Chains

enum class ChainVariant { kAT, kNonEtAT, kWT, kNonEtWT, kET };

std::string_view chain_variant_name(ChainVariant v);
std::optional<ChainVariant> chain_variant_from_name(std::string_view name);

struct ChainStep {
  std::vector<double> f;  // chain a
  std::vector<double> g;  // chain b
  bool a_to_parent = true;
  bool b_to_parent = true;
  bool cross_jt = false;
  bool cross_et = false;
};

struct ChainReport {
  ChainVariant variant;
  std::size_t m, k, l;
  std::vector<ChainStep> steps;  // steps[0] holds a0, b0
  // Per-step relation to predecessor holds and the chains diverge at
  // every i >= 1.
  bool certified = false;
  std::vector<std::string> failures;
};

// m, k, l are 1-based. `l` is the receiving index for the WT and ET
// variants; AT variants move mass to atom 1.
ChainReport build_chain(const std::vector<double>& a0,
                        const std::vector<double>& b0, std::size_t m,
                        std::size_t k, ChainVariant variant, std::size_t steps,
                        std::size_t l = 1, double tol = 0.0);

}  // namespace tndpq

#endif  // TNDPQ_TRUST_H_
