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

#ifndef TNDPQ_SYSTEMS_H_
#define TNDPQ_SYSTEMS_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tndpq/calculus.h"
#include "tndpq/syntax.h"

namespace tndpq {

struct TrainingSet {
  std::string id;
  Schema schema;
  // rows[r][v] is the atom index of variable v in row r.
  std::vector<std::vector<std::size_t>> rows;
};

// RFC-4180 CSV; the header names every schema variable exactly once, in
// any order.
TrainingSet parse_training_set(std::string_view csv, const Schema& schema,
                               std::string id);
// The id defaults to the file stem.
TrainingSet load_training_set(const std::string& path, const Schema& schema,
                              std::string id = {});

struct Estimator {
  enum class Kind { kFrequency, kLaplace };

  std::string id;
  Kind kind = Kind::kFrequency;
  double alpha = 0.0;

  // `freq` or `laplace:<alpha>`; the id defaults to the spec text.
  static Estimator parse(std::string_view spec, std::string id = {});
  std::string spec() const;
};

struct AppliedSystem {
  std::string training;
  std::string estimator;
  Sigma sigma;
  std::string variable;
  // Every atom of the variable in schema order.
  std::vector<std::pair<std::string, double>> distribution;

  std::vector<double> probabilities() const;
  double probability_of(std::string_view atom) const;
};

bool same_system(const AppliedSystem& a, const AppliedSystem& b);

inline constexpr double kSumTolerance = 1e-9;

// Classical satisfaction of every attribution by the row.
bool row_satisfies(const std::vector<std::size_t>& row, const Sigma& sigma,
                   const Schema& schema);

// Throws EmptySupport for a frequency estimator with no matching rows.
AppliedSystem conditional_distribution(const TrainingSet& ts,
                                       const Estimator& est,
                                       const Sigma& sigma,
                                       const std::string& variable);

struct IndependenceWitness {
  bool independent = false;
  double max_deviation = 0.0;
};

// max over atoms of |P(u | sigma, t) - P(u | sigma)|. Conditionings on t
// atoms with empty support are skipped for the frequency estimator.
IndependenceWitness independent(const TrainingSet& ts, const Estimator& est,
                                const Sigma& sigma, const std::string& t,
                                const std::string& u, double tol);

std::string applied_system_to_text(const AppliedSystem& as,
                                   const Schema& schema);
AppliedSystem parse_applied_system(std::string_view text, const Schema& schema);
void save_applied_system(const AppliedSystem& as, const std::string& path,
                         const Schema& schema);
AppliedSystem load_applied_system(const std::string& path,
                                  const Schema& schema);

// P(value | sigma) for an atomic subject and a deterministic value over it.
double value_probability(const AppliedSystem& as, const Value& value,
                         const Schema& schema);

// AtQuery grounded in a training table and an estimator.
class TableSource : public ProbabilitySource {
 public:
  TableSource(const TrainingSet& ts, Estimator est)
      : ts_(ts), est_(std::move(est)) {}

  double query(const Sigma& sigma, const Term& subject,
               const Value& value) const override;
  std::optional<Provenance> provenance() const override;
  std::optional<IndependenceFact> test_independence(
      const Sigma& sigma, const Term& t, const Term& u,
      double tol) const override;

 private:
  const TrainingSet& ts_;
  Estimator est_;
};

// AtQuery grounded in stored applied systems. With `independent_variables`
// the modelled variables are taken as mutually independent: attributions
// to other modelled variables are ignored when no exact match exists, and
// I-x-indep is discharged as an assertion.
class SystemSource : public ProbabilitySource {
 public:
  SystemSource(std::vector<AppliedSystem> systems, const Schema& schema,
               bool independent_variables = false)
      : systems_(std::move(systems)),
        schema_(schema),
        independent_(independent_variables) {}

  double query(const Sigma& sigma, const Term& subject,
               const Value& value) const override;
  std::optional<Provenance> provenance() const override;
  std::optional<IndependenceFact> test_independence(
      const Sigma& sigma, const Term& t, const Term& u,
      double tol) const override;

  const std::vector<AppliedSystem>& systems() const { return systems_; }

 private:
  const AppliedSystem* find(const Sigma& sigma,
                            const std::string& variable) const;

  std::vector<AppliedSystem> systems_;
  const Schema& schema_;
  bool independent_;
};

}  // namespace tndpq

#endif  // TNDPQ_SYSTEMS_H_
