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

#include <cmath>

#include "doctest.h"
#include "helpers.h"
#include "tndpq/calculus.h"
#include "tndpq/script.h"

using namespace tndpq;
using tndpq::testing::code_of;

namespace {

const Schema& schema() {
  static const Schema s = Schema::parse(
      "T = t1 | t2 | t3\n"
      "U = u1 | u2\n"
      "S = s1 | s2\n");
  return s;
}

Derivation leaf(const char* text) {
  return Derivation{parse_judgment(text, schema()), RuleId::kAtQuery,
                    Direction::kForward, {}, {}, std::nullopt};
}

}  // namespace

TEST_CASE("rule names round-trip") {
  for (int i = 0; i <= static_cast<int>(RuleId::kProdIIndep); ++i) {
    auto r = static_cast<RuleId>(i);
    CHECK(rule_from_name(rule_name(r)) == r);
  }
  CHECK_FALSE(rule_from_name("NoSuchRule").has_value());
}

TEST_CASE("product introduction multiplies") {
  Derivation ud_tb = leaf("S: s1, T: t1 |> U : u1 @ 0.5");
  Derivation tb = leaf("S: s1 |> T : t1 @ 0.4");
  Derivation c = apply_rule(RuleId::kProdI1, {ud_tb, tb}, schema());
  CHECK(c.conclusion.probability == doctest::Approx(0.2));
  CHECK(print_term(c.conclusion.subject) == "<T, U>");
  CHECK(print_value(c.conclusion.value) == "t1*u1");
  Derivation back = apply_rule(RuleId::kProdE1a, {c, ud_tb}, schema());
  CHECK(back.conclusion.probability == doctest::Approx(0.4));
}

TEST_CASE("negation on the right complements") {
  Derivation d = leaf("|> U : u1 @ 0.3");
  Derivation n = apply_rule(RuleId::kNegIER, {d}, schema());
  CHECK(print_value(n.conclusion.value) == "~u1");
  CHECK(n.conclusion.probability == doctest::Approx(0.7));
}

TEST_CASE("disjunction on the right needs exclusive values") {
  Derivation a = leaf("|> T : t1 @ 0.3");
  Derivation b = leaf("|> T : t2 @ 0.2");
  Derivation c = apply_rule(RuleId::kOrIR, {a, b}, schema());
  CHECK(c.conclusion.probability == doctest::Approx(0.5));
  Derivation overlap = leaf("|> T : t1 + t2 @ 0.5");
  CHECK(code_of([&] { apply_rule(RuleId::kOrIR, {a, overlap}, schema()); }) ==
        ErrorCode::kSideConditionUnproved);
}

TEST_CASE("zero denominators are reported") {
  Derivation c = leaf("|> <T, U> : t1 * u1 @ 0");
  Derivation m = leaf("T: t1 |> U : u1 @ 0");
  CHECK(code_of([&] { apply_rule(RuleId::kProdE1a, {c, m}, schema()); }) ==
        ErrorCode::kZeroDenominator);
}

TEST_CASE("premises must agree on context") {
  Derivation a = leaf("S: s1 |> T : t1 @ 0.3");
  Derivation b = leaf("S: s2 |> T : t2 @ 0.2");
  CHECK(code_of([&] { apply_rule(RuleId::kOrIR, {a, b}, schema()); })
            .has_value());
}

TEST_CASE("implication moves a context attribution into the subject") {
  Derivation d = leaf("S: s1, T: t1 + t2 |> U : u2 @ 0.6");
  RuleOptions o;
  o.variable = "T";
  Derivation c = apply_rule(RuleId::kImpIE, {d}, schema(), o);
  CHECK(print_judgment(c.conclusion) == "S:s1 |> [T]U : t1+t2->u2 @ 0.6");
  RuleOptions b;
  b.direction = Direction::kBackward;
  Derivation back = apply_rule(RuleId::kImpIE, {c}, schema(), b);
  CHECK(same_judgment(back.conclusion, d.conclusion));
}

TEST_CASE("checking finds a corrupted leaf") {
  FactSource facts({parse_judgment("|> T : t1 @ 0.3", schema()),
                    parse_judgment("|> T : t2 @ 0.2", schema())});
  Script s = parse_script(
      "s1 = AtQuery \"|> T : t1\" @ 0.35\n"
      "s2 = AtQuery \"|> T : t2\"\n"
      "s3 = OrIR s1 s2\n",
      schema());
  RunOptions adopt;
  adopt.adopt_claims = true;
  ScriptRun run = run_script(s, schema(), &facts, {}, adopt);
  CheckReport r = check_derivation(run.result(), schema(), &facts);
  REQUIRE_FALSE(r.ok());
  CHECK(r.violations.front().kind == Violation::Kind::kLeafMismatch);
  CHECK(r.violations.front().path == "0");

  ScriptRun clean = run_script(s, schema(), &facts);
  CHECK(check_derivation(clean.result(), schema(), &facts).ok());
}

TEST_CASE("derive_value builds a checkable derivation") {
  FactSource facts({parse_judgment("|> T : t1 @ 0.3", schema()),
                    parse_judgment("|> T : t2 @ 0.2", schema()),
                    parse_judgment("|> T : t3 @ 0.5", schema())});
  Derivation d = derive_value(facts, {}, Term::atom("T"),
                              parse_value("t1 + t2", schema()), schema());
  CHECK(d.conclusion.probability == doctest::Approx(0.5));
  CHECK(check_derivation(d, schema(), &facts).ok());
}
