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

#ifndef TNDPQ_SELFTEST_H_
#define TNDPQ_SELFTEST_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tndpq/calculus.h"
#include "tndpq/systems.h"
#include "tndpq/trust.h"

namespace tndpq {

// Random fixtures shared by the self-test and the test suites.
class Fixtures {
 public:
  explicit Fixtures(std::uint64_t seed) : rng_(seed) {}

  std::mt19937_64& rng() { return rng_; }
  std::size_t uniform(std::size_t lo, std::size_t hi);  // inclusive
  bool coin(double p = 0.5);

  // Variables V0.. with atoms v0a, v0b, ...
  Schema schema(std::size_t variables, std::size_t min_atoms,
                std::size_t max_atoms);

  // A class-O value over one variable, depth counted in connectives.
  Value class_o(const Variable& var, std::size_t depth,
                bool allow_negation = true);
  // A disjunction of the atoms at `indices`.
  Value disjunction_of(const Variable& var,
                       const std::vector<std::size_t>& indices);
  // Two disjoint nonempty index sets.
  std::pair<std::vector<std::size_t>, std::vector<std::size_t>> disjoint_sets(
      std::size_t atoms);

  // A value for a pair or conditional term with at most `complexity`
  // product or arrow nodes.
  Value compound(const Term& term, const Schema& schema,
                 std::size_t complexity, bool negation_free_antecedents);

  TrainingSet table(const Schema& schema, std::size_t rows, std::string id);

  // A probability vector of k/denominator entries summing to one.
  std::vector<double> dyadic(std::size_t n, int denominator = 64,
                             double zero_chance = 0.2);

 private:
  std::mt19937_64 rng_;
};

struct SuiteResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string first_failure;
  double seconds = 0.0;
};

struct SelftestOptions {
  std::uint64_t seed = 1;
  std::size_t cases = 200;
};

std::vector<SuiteResult> run_selftest(const SelftestOptions& options);

}  // namespace tndpq

#endif  // TNDPQ_SELFTEST_H_
