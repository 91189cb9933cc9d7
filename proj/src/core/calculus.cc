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

#include "tndpq/calculus.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace tndpq {

namespace {

struct RuleInfo {
  RuleId id;
  std::string_view name;
  std::size_t arity;
};

constexpr std::array<RuleInfo, 22> kRules = {{
    {RuleId::kAtQuery, "AtQuery", 0},
    {RuleId::kImpIE, "ImpIE", 1},
    {RuleId::kProdI1, "ProdI1", 2},
    {RuleId::kProdI2, "ProdI2", 2},
    {RuleId::kProdE1a, "ProdE1a", 2},
    {RuleId::kProdE1b, "ProdE1b", 2},
    {RuleId::kProdE2a, "ProdE2a", 2},
    {RuleId::kProdE2b, "ProdE2b", 2},
    {RuleId::kOrIR, "OrIR", 2},
    {RuleId::kOrERa, "OrERa", 2},
    {RuleId::kOrERb, "OrERb", 2},
    {RuleId::kOrIL, "OrIL", 4},
    {RuleId::kOrELa, "OrELa", 4},
    {RuleId::kOrELb, "OrELb", 4},
    {RuleId::kOrELc, "OrELc", 4},
    {RuleId::kOrELd, "OrELd", 4},
    {RuleId::kNegIER, "NegIER", 1},
    {RuleId::kNegIL, "NegIL", 3},
    {RuleId::kNegELa, "NegELa", 3},
    {RuleId::kNegELb, "NegELb", 3},
    {RuleId::kNegELc, "NegELc", 3},
    {RuleId::kProdIIndep, "ProdIIndep", 2},
}};

const RuleInfo& info(RuleId rule) {
  return kRules[static_cast<std::size_t>(rule)];
}

}  // namespace

std::string_view rule_name(RuleId rule) { return info(rule).name; }

std::optional<RuleId> rule_from_name(std::string_view name) {
  for (const auto& r : kRules) {
    if (r.name == name) return r.id;
  }
  return std::nullopt;
}

std::size_t rule_arity(RuleId rule) { return info(rule).arity; }

bool is_right_introduction(RuleId rule, Direction dir) {
  switch (rule) {
    case RuleId::kProdI1:
    case RuleId::kProdI2:
    case RuleId::kProdIIndep:
    case RuleId::kOrIR:
      return true;
    case RuleId::kNegIER:
    case RuleId::kImpIE:
      return dir == Direction::kForward;
    default:
      return false;
  }
}

bool is_right_elimination(RuleId rule, Direction dir) {
  switch (rule) {
    case RuleId::kProdE1a:
    case RuleId::kProdE1b:
    case RuleId::kProdE2a:
    case RuleId::kProdE2b:
    case RuleId::kOrERa:
    case RuleId::kOrERb:
      return true;
    case RuleId::kNegIER:
    case RuleId::kImpIE:
      return dir == Direction::kBackward;
    default:
      return false;
  }
}

std::string_view violation_kind_name(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::kLeafMismatch: return "LeafMismatch";
    case Violation::Kind::kFormulaViolation: return "FormulaViolation";
    case Violation::Kind::kSideCondition: return "SideCondition";
    case Violation::Kind::kProvenanceMismatch: return "ProvenanceMismatch";
    case Violation::Kind::kShape: return "Shape";
  }
  return "Unknown";
}

// ---------------------------------------------------------------- Formulas

namespace {

double divide(double num, double den, RuleId rule, const char* which) {
  if (std::fabs(den) <= kZeroTolerance) {
    fail(ErrorCode::kZeroDenominator,
         std::string(rule_name(rule)) + ": denominator " + which +
             " is zero (" + print_probability(den) + ")");
  }
  return num / den;
}

}  // namespace

double rule_formula(RuleId rule, Direction dir, std::span<const double> p) {
  (void)dir;
  if (p.size() != rule_arity(rule)) {
    fail(ErrorCode::kShapeMismatch,
         std::string(rule_name(rule)) + " takes " +
             std::to_string(rule_arity(rule)) + " premises, got " +
             std::to_string(p.size()));
  }
  switch (rule) {
    case RuleId::kAtQuery:
      fail(ErrorCode::kShapeMismatch, "AtQuery has no formula");
    case RuleId::kImpIE:
      return p[0];
    case RuleId::kProdI1:
    case RuleId::kProdI2:
    case RuleId::kProdIIndep:
      return p[0] * p[1];
    case RuleId::kProdE1a:
    case RuleId::kProdE1b:
    case RuleId::kProdE2a:
    case RuleId::kProdE2b:
      return divide(p[0], p[1], rule, "g of the minor premise");
    case RuleId::kOrIR:
      return p[0] + p[1];
    case RuleId::kOrERa:
    case RuleId::kOrERb:
      return p[0] - p[1];
    case RuleId::kOrIL: {
      double f = p[0], g = p[1], h = p[2], i = p[3];
      return divide(f * h + g * i, h + i, rule,
                    "h+i of the third and fourth premises");
    }
    case RuleId::kOrELa: {
      double f = p[0], g = p[1], h = p[2], i = p[3];
      return divide(f * (h + i) - g * i, h, rule, "h of the third premise");
    }
    case RuleId::kOrELb: {
      double f = p[0], g = p[1], h = p[2], i = p[3];
      return divide(f * (h + i) - g * h, i, rule, "i of the fourth premise");
    }
    case RuleId::kOrELc: {
      double f = p[0], g = p[1], h = p[2], i = p[3];
      return divide(i * (g - h), h - f, rule,
                    "h-f of the third and first premises");
    }
    case RuleId::kOrELd: {
      double f = p[0], g = p[1], h = p[2], i = p[3];
      return divide(i * (f - h), h - g, rule,
                    "h-g of the third and second premises");
    }
    case RuleId::kNegIER:
      return 1.0 - p[0];
    case RuleId::kNegIL: {
      double f = p[0], g = p[1], h = p[2];
      return divide(g - f * h, 1.0 - f, rule, "1-f of the first premise");
    }
    case RuleId::kNegELa: {
      double f = p[0], g = p[1], h = p[2];
      return divide(g + h * (f - 1.0), f, rule, "f of the first premise");
    }
    case RuleId::kNegELb: {
      double f = p[0], g = p[1], h = p[2];
      return h - h * f + g * f;
    }
    case RuleId::kNegELc: {
      double f = p[0], g = p[1], h = p[2];
      return divide(f - h, g - h, rule,
                    "g-h of the second and third premises");
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------- Sources

double FactSource::query(const Sigma& sigma, const Term& subject,
                         const Value& value) const {
  Term s = reduce_projections(subject);
  for (const auto& f : facts_) {
    if (same_sigma(f.sigma, sigma) && reduce_projections(f.subject) == s &&
        f.value == value) {
      return f.probability;
    }
  }
  fail(ErrorCode::kUnknownCondition,
       "no fact for '" + print_query(Judgment{sigma, subject, value, 0}) + "'");
}

double ChainSource::query(const Sigma& sigma, const Term& subject,
                          const Value& value) const {
  std::string reasons;
  for (const auto* s : sources_) {
    try {
      return s->query(sigma, subject, value);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kUnknownCondition) throw;
      reasons += reasons.empty() ? "" : "; ";
      reasons += e.what();
    }
  }
  fail(ErrorCode::kUnknownCondition,
       reasons.empty() ? "no probability source" : reasons);
}

std::optional<Provenance> ChainSource::provenance() const {
  std::optional<Provenance> out;
  for (const auto* s : sources_) {
    auto p = s->provenance();
    if (!p) continue;
    if (out && !(*out == *p)) return std::nullopt;
    out = p;
  }
  return out;
}

std::optional<IndependenceFact> ChainSource::test_independence(
    const Sigma& sigma, const Term& t, const Term& u, double tol) const {
  for (const auto* s : sources_) {
    if (auto f = s->test_independence(sigma, t, u, tol)) return f;
  }
  return std::nullopt;
}

Derivation at_query(const ProbabilitySource& source, const Sigma& sigma,
                    const Term& subject, const Value& value) {
  for (const auto& a : sigma) {
    if (!a.value.deterministic()) {
      fail(ErrorCode::kIllFormed,
           "AtQuery antecedent '" + a.variable + "' is not deterministic");
    }
  }
  std::vector<std::string> vars;
  subject.collect_variables(vars);
  for (const auto& v : vars) {
    if (find_attribution(sigma, v) != nullptr) {
      fail(ErrorCode::kIllFormed,
           "AtQuery subject '" + v + "' is attributed in the antecedent");
    }
  }
  Derivation d;
  d.conclusion = Judgment{sigma, subject, value,
                          source.query(sigma, subject, value)};
  d.rule = RuleId::kAtQuery;
  d.provenance = source.provenance();
  return d;
}

// ---------------------------------------------------------------- Rules

namespace {

[[noreturn]] void shape(RuleId rule, const std::string& what) {
  fail(ErrorCode::kShapeMismatch, std::string(rule_name(rule)) + ": " + what);
}

Sigma without(const Sigma& sigma, std::string_view var) {
  Sigma out;
  for (const auto& a : sigma) {
    if (a.variable != var) out.push_back(a);
  }
  return out;
}

Sigma with(Sigma sigma, Attribution a) {
  sigma.push_back(std::move(a));
  return sigma;
}

// The atomic variable a term denotes after reduction, for use in sigma.
std::string antecedent_variable(RuleId rule, const Term& t) {
  Term r = reduce_projections(t);
  if (!r.is_atom()) {
    shape(rule, "'" + print_term(t) + "' is not an atomic variable and "
                "cannot be attributed in an antecedent");
  }
  return r.name();
}

// Splits `sigma, var:beta` and checks beta is as expected when given.
Sigma split(RuleId rule, const Judgment& j, const std::string& var,
            const Value* expected, const char* which) {
  const Attribution* a = find_attribution(j.sigma, var);
  if (a == nullptr) {
    shape(rule, std::string(which) + " premise lacks an attribution to '" +
                    var + "'");
  }
  if (expected != nullptr && a->value != *expected) {
    shape(rule, std::string(which) + " premise attributes " + var + ":" +
                    print_value(a->value) + ", expected " + var + ":" +
                    print_value(*expected));
  }
  return without(j.sigma, var);
}

void same_sigma_or_fail(RuleId rule, const Sigma& a, const Sigma& b,
                        const char* what) {
  if (!same_sigma(a, b)) {
    shape(rule, std::string("antecedents differ (") + what + "): '" +
                    print_sigma(a) + "' vs '" + print_sigma(b) + "'");
  }
}

void same_subject_or_fail(RuleId rule, const Term& a, const Term& b) {
  if (reduce_projections(a) != reduce_projections(b)) {
    shape(rule, "subjects differ: '" + print_term(a) + "' vs '" +
                    print_term(b) + "'");
  }
}

void same_value_or_fail(RuleId rule, const Value& a, const Value& b) {
  if (a != b) {
    shape(rule, "values differ: '" + print_value(a) + "' vs '" +
                    print_value(b) + "'");
  }
}

Term atomic_subject(RuleId rule, const Judgment& j, const char* which) {
  Term t = reduce_projections(j.subject);
  if (!t.is_atom()) {
    shape(rule, std::string(which) + " premise subject '" +
                    print_term(j.subject) + "' must be an atomic variable");
  }
  return t;
}

struct Inference {
  Judgment conclusion;
  std::vector<SideCondition> side;
};

ExclusivityFact require_exclusive(RuleId rule, const Term& term,
                                  const Value& a, const Value& b,
                                  const Schema& schema) {
  ExclusivityDecision d;
  try {
    d = decide_exclusive(term, a, b, schema);
  } catch (const Error& e) {
    fail(ErrorCode::kSideConditionUnproved,
         std::string(rule_name(rule)) + ": exclusivity of " + print_value(a) +
             " and " + print_value(b) + " undecidable here: " + e.what());
  }
  if (!d.exclusive) {
    fail(ErrorCode::kSideConditionUnproved,
         std::string(rule_name(rule)) + ": " + print_term(term) + ":" +
             print_value(a) + " and " + print_term(term) + ":" +
             print_value(b) + " are not mutually exclusive");
  }
  return ExclusivityFact{term, a, b, std::move(d.trace)};
}

IndependenceFact require_independent(const Sigma& sigma, const Term& t,
                                     const Term& u,
                                     const RuleOptions& options) {
  if (options.independence) {
    const IndependenceFact& f = *options.independence;
    if (!f.asserted && f.max_deviation > f.tolerance) {
      fail(ErrorCode::kSideConditionUnproved,
           "ProdIIndep: recorded deviation " +
               print_probability(f.max_deviation) + " exceeds tolerance " +
               print_probability(f.tolerance));
    }
    return IndependenceFact{t, u, f.asserted, f.max_deviation, f.tolerance};
  }
  if (options.source != nullptr) {
    if (auto f = options.source->test_independence(
            sigma, t, u, options.independence_tolerance)) {
      if (f->max_deviation > f->tolerance) {
        fail(ErrorCode::kSideConditionUnproved,
             "ProdIIndep: " + print_term(t) + " and " + print_term(u) +
                 " are not independent (deviation " +
                 print_probability(f->max_deviation) + ")");
      }
      return *f;
    }
  }
  fail(ErrorCode::kSideConditionUnproved,
       "ProdIIndep: independence of " + print_term(t) + " and " +
           print_term(u) + " is neither tested nor asserted");
}

Inference infer(RuleId rule, const std::vector<const Judgment*>& p,
                const Schema& schema, const RuleOptions& options) {
  if (p.size() != rule_arity(rule)) {
    shape(rule, "takes " + std::to_string(rule_arity(rule)) +
                    " premises, got " + std::to_string(p.size()));
  }
  const Direction dir = options.direction;
  Inference out;
  Judgment& c = out.conclusion;
  std::vector<double> probs;
  for (const auto* j : p) probs.push_back(j->probability);

  switch (rule) {
    case RuleId::kAtQuery:
      shape(rule, "AtQuery is an axiom; use at_query");

    case RuleId::kImpIE: {
      const Judgment& a = *p[0];
      if (dir == Direction::kForward) {
        std::string var = options.variable;
        if (var.empty()) {
          if (a.sigma.size() != 1) {
            shape(rule, "premise has " + std::to_string(a.sigma.size()) +
                            " attributions; name the one to discharge");
          }
          var = a.sigma.front().variable;
        }
        const Attribution* at = find_attribution(a.sigma, var);
        if (at == nullptr) shape(rule, "no attribution to '" + var + "'");
        c = Judgment{without(a.sigma, var),
                     Term::cond(Term::atom(var), a.subject),
                     Value::arrow(at->value, a.value), 0};
      } else {
        Term s = reduce_projections(a.subject);
        if (s.kind() != Term::Kind::kCond ||
            a.value.kind() != Value::Kind::kArrow) {
          shape(rule, "premise is not a conditional judgment");
        }
        std::string var = antecedent_variable(rule, s.left());
        Attribution at{var, a.value.left()};
        validate_attribution(at, schema);
        if (find_attribution(a.sigma, var) != nullptr) {
          shape(rule, "'" + var + "' is already attributed");
        }
        c = Judgment{with(a.sigma, at), s.right(), a.value.right(), 0};
      }
      break;
    }

    case RuleId::kProdI1:
    case RuleId::kProdI2: {
      // [sigma, x:X |> y:Y], [sigma |> x:X]
      const Judgment& cond = *p[0];
      const Judgment& minor = *p[1];
      Term x = atomic_subject(rule, minor, "second");
      Sigma rest = split(rule, cond, x.name(), &minor.value, "first");
      same_sigma_or_fail(rule, rest, minor.sigma, "first vs second premise");
      Term y = cond.subject;
      c.sigma = minor.sigma;
      if (rule == RuleId::kProdI1) {
        c.subject = Term::pair(x, y);
        c.value = Value::prod(minor.value, cond.value);
      } else {
        c.subject = Term::pair(y, x);
        c.value = Value::prod(cond.value, minor.value);
      }
      if (reduce_projections(c.subject).left() ==
          reduce_projections(c.subject).right()) {
        shape(rule, "pair components coincide");
      }
      break;
    }

    case RuleId::kProdE1a:
    case RuleId::kProdE1b:
    case RuleId::kProdE2a:
    case RuleId::kProdE2b: {
      const Judgment& major = *p[0];
      const Judgment& minor = *p[1];
      if (major.value.kind() != Value::Kind::kProd) {
        shape(rule, "first premise value is not a product");
      }
      const Term& s = major.subject;
      Term fst = reduce_projections(Term::fst(s));
      Term snd = reduce_projections(Term::snd(s));
      const Value& beta = major.value.left();
      const Value& delta = major.value.right();
      // E1 keeps fst in the antecedent, E2 keeps snd.
      bool first = rule == RuleId::kProdE1a || rule == RuleId::kProdE1b;
      const Term& held = first ? fst : snd;
      const Term& other = first ? snd : fst;
      const Value& held_v = first ? beta : delta;
      const Value& other_v = first ? delta : beta;
      std::string var = antecedent_variable(rule, held);
      bool conditional_minor =
          rule == RuleId::kProdE1a || rule == RuleId::kProdE2a;
      if (conditional_minor) {
        Sigma rest = split(rule, minor, var, &held_v, "second");
        same_sigma_or_fail(rule, rest, major.sigma, "second vs first premise");
        same_subject_or_fail(rule, minor.subject, other);
        same_value_or_fail(rule, minor.value, other_v);
        c = Judgment{major.sigma, held, held_v, 0};
      } else {
        same_sigma_or_fail(rule, minor.sigma, major.sigma,
                           "second vs first premise");
        same_subject_or_fail(rule, minor.subject, held);
        same_value_or_fail(rule, minor.value, held_v);
        if (find_attribution(major.sigma, var) != nullptr) {
          shape(rule, "'" + var + "' is already attributed");
        }
        c = Judgment{with(major.sigma, Attribution{var, held_v}), other,
                     other_v, 0};
      }
      out.side.push_back(DenominatorFact{"second", minor.probability});
      break;
    }

    case RuleId::kOrIR: {
      const Judgment& a = *p[0];
      const Judgment& b = *p[1];
      same_sigma_or_fail(rule, a.sigma, b.sigma, "first vs second premise");
      same_subject_or_fail(rule, a.subject, b.subject);
      out.side.push_back(require_exclusive(
          rule, reduce_projections(a.subject), a.value, b.value, schema));
      c = Judgment{a.sigma, a.subject, Value::disj(a.value, b.value), 0};
      break;
    }

    case RuleId::kOrERa:
    case RuleId::kOrERb: {
      const Judgment& sum = *p[0];
      const Judgment& part = *p[1];
      if (sum.value.kind() != Value::Kind::kOr) {
        shape(rule, "first premise value is not a disjunction");
      }
      same_sigma_or_fail(rule, sum.sigma, part.sigma,
                         "first vs second premise");
      same_subject_or_fail(rule, sum.subject, part.subject);
      bool a = rule == RuleId::kOrERa;
      same_value_or_fail(rule, part.value,
                         a ? sum.value.left() : sum.value.right());
      c = Judgment{sum.sigma, sum.subject,
                   a ? sum.value.right() : sum.value.left(), 0};
      break;
    }

    case RuleId::kOrIL:
    case RuleId::kOrELa:
    case RuleId::kOrELb: {
      // Premises 3 and 4 are sigma |> t:gamma and sigma |> t:beta.
      const Judgment& pg = *p[2];
      const Judgment& pb = *p[3];
      Term t = atomic_subject(rule, pg, "third");
      same_subject_or_fail(rule, pb.subject, t);
      same_sigma_or_fail(rule, pg.sigma, pb.sigma, "third vs fourth premise");
      const Value& gamma = pg.value;
      const Value& beta = pb.value;
      Value both = Value::disj(gamma, beta);
      const Value* first_v = rule == RuleId::kOrIL ? &gamma : &both;
      const Value* second_v = rule == RuleId::kOrELb ? &gamma : &beta;
      Sigma r1 = split(rule, *p[0], t.name(), first_v, "first");
      Sigma r2 = split(rule, *p[1], t.name(), second_v, "second");
      same_sigma_or_fail(rule, r1, pg.sigma, "first vs third premise");
      same_sigma_or_fail(rule, r2, pg.sigma, "second vs third premise");
      same_subject_or_fail(rule, p[0]->subject, p[1]->subject);
      same_value_or_fail(rule, p[0]->value, p[1]->value);
      out.side.push_back(require_exclusive(rule, t, gamma, beta, schema));
      const Value& kept = rule == RuleId::kOrIL    ? both
                          : rule == RuleId::kOrELa ? gamma
                                                   : beta;
      c = Judgment{with(pg.sigma, Attribution{t.name(), kept}),
                   p[0]->subject, p[0]->value, 0};
      break;
    }

    case RuleId::kOrELc:
    case RuleId::kOrELd: {
      // [sigma,t:gamma |> d], [sigma,t:beta |> d], [sigma,t:gamma+beta |> d],
      // and sigma |> t:beta (c) or sigma |> t:gamma (d).
      const Judgment& last = *p[3];
      Term t = atomic_subject(rule, last, "fourth");
      const Attribution* ag = find_attribution(p[0]->sigma, t.name());
      const Attribution* ab = find_attribution(p[1]->sigma, t.name());
      if (ag == nullptr || ab == nullptr) {
        shape(rule, "first and second premises must attribute '" + t.name() +
                        "'");
      }
      const Value gamma = ag->value;
      const Value beta = ab->value;
      Value both = Value::disj(gamma, beta);
      Sigma r1 = without(p[0]->sigma, t.name());
      Sigma r2 = without(p[1]->sigma, t.name());
      Sigma r3 = split(rule, *p[2], t.name(), &both, "third");
      same_sigma_or_fail(rule, r1, last.sigma, "first vs fourth premise");
      same_sigma_or_fail(rule, r2, last.sigma, "second vs fourth premise");
      same_sigma_or_fail(rule, r3, last.sigma, "third vs fourth premise");
      for (int k : {1, 2}) {
        same_subject_or_fail(rule, p[0]->subject, p[k]->subject);
        same_value_or_fail(rule, p[0]->value, p[k]->value);
      }
      bool c_variant = rule == RuleId::kOrELc;
      same_value_or_fail(rule, last.value, c_variant ? beta : gamma);
      out.side.push_back(require_exclusive(rule, t, gamma, beta, schema));
      c = Judgment{last.sigma, t, c_variant ? gamma : beta, 0};
      break;
    }

    case RuleId::kNegIER: {
      const Judgment& a = *p[0];
      if (dir == Direction::kForward) {
        c = Judgment{a.sigma, a.subject, Value::neg(a.value), 0};
      } else {
        if (a.value.kind() != Value::Kind::kNeg) {
          shape(rule, "premise value is not a negation");
        }
        c = Judgment{a.sigma, a.subject, a.value.inner(), 0};
      }
      break;
    }

    case RuleId::kNegIL:
    case RuleId::kNegELa:
    case RuleId::kNegELb:
    case RuleId::kNegELc: {
      // Unconditioned premises name t:beta and u:delta; conditioned ones
      // carry t:beta or t:beta^bot in the antecedent.
      const Judgment* tb = nullptr;  // sigma |> t:beta
      const Judgment* ud = nullptr;  // sigma |> u:delta
      const Judgment* pos = nullptr;  // sigma, t:beta |> u:delta
      const Judgment* neg = nullptr;  // sigma, t:beta^bot |> u:delta
      switch (rule) {
        case RuleId::kNegIL: tb = p[0], ud = p[1], pos = p[2]; break;
        case RuleId::kNegELa: tb = p[0], ud = p[1], neg = p[2]; break;
        case RuleId::kNegELb: tb = p[0], pos = p[1], neg = p[2]; break;
        default: ud = p[0], pos = p[1], neg = p[2]; break;
      }
      const Judgment& cond = pos != nullptr ? *pos : *neg;
      std::string t;
      Value beta;
      Sigma sigma;
      if (tb != nullptr) {
        t = atomic_subject(rule, *tb, "first").name();
        beta = tb->value;
        sigma = tb->sigma;
      } else {
        // Recover t:beta from the positive conditional premise.
        Sigma rest_neg = neg->sigma;
        for (const auto& a : pos->sigma) {
          const Attribution* b = find_attribution(neg->sigma, a.variable);
          if (b != nullptr && b->value == Value::neg(a.value)) {
            t = a.variable;
            beta = a.value;
          }
        }
        if (t.empty()) {
          shape(rule, "second and third premises do not attribute some t:b "
                      "and t:~b");
        }
        sigma = without(pos->sigma, t);
      }
      Value nbeta = Value::neg(beta);
      Term u = cond.subject;
      Value delta = cond.value;
      if (pos != nullptr) {
        Sigma r = split(rule, *pos, t, &beta, "positive conditional");
        same_sigma_or_fail(rule, r, sigma, "positive conditional premise");
        same_subject_or_fail(rule, pos->subject, u);
        same_value_or_fail(rule, pos->value, delta);
      }
      if (neg != nullptr) {
        Sigma r = split(rule, *neg, t, &nbeta, "negative conditional");
        same_sigma_or_fail(rule, r, sigma, "negative conditional premise");
        same_subject_or_fail(rule, neg->subject, u);
        same_value_or_fail(rule, neg->value, delta);
      }
      if (ud != nullptr) {
        same_sigma_or_fail(rule, ud->sigma, sigma, "unconditioned premise");
        same_subject_or_fail(rule, ud->subject, u);
        same_value_or_fail(rule, ud->value, delta);
      }
      switch (rule) {
        case RuleId::kNegIL:
          c = Judgment{with(sigma, Attribution{t, nbeta}), u, delta, 0};
          break;
        case RuleId::kNegELa:
          c = Judgment{with(sigma, Attribution{t, beta}), u, delta, 0};
          break;
        case RuleId::kNegELb:
          c = Judgment{sigma, u, delta, 0};
          break;
        default:
          c = Judgment{sigma, Term::atom(t), beta, 0};
          break;
      }
      break;
    }

    case RuleId::kProdIIndep: {
      const Judgment& a = *p[0];
      const Judgment& b = *p[1];
      same_sigma_or_fail(rule, a.sigma, b.sigma, "first vs second premise");
      std::vector<std::string> va, vb;
      a.subject.collect_variables(va);
      b.subject.collect_variables(vb);
      for (const auto& v : va) {
        if (std::find(vb.begin(), vb.end(), v) != vb.end()) {
          shape(rule, "components share variable '" + v + "'");
        }
      }
      out.side.push_back(
          require_independent(a.sigma, a.subject, b.subject, options));
      c = Judgment{a.sigma, Term::pair(a.subject, b.subject),
                   Value::prod(a.value, b.value), 0};
      break;
    }
  }

  double raw = rule_formula(rule, dir, probs);
  if (!(raw >= -kRangeTolerance && raw <= 1.0 + kRangeTolerance)) {
    fail(ErrorCode::kConsistencyError,
         std::string(rule_name(rule)) + ": premises are jointly incoherent, "
         "result " + print_probability(raw) + " lies outside [0,1]");
  }
  c.probability = std::clamp(raw, 0.0, 1.0);
  return out;
}

std::vector<const Judgment*> conclusions(const std::vector<Derivation>& ds) {
  std::vector<const Judgment*> out;
  for (const auto& d : ds) out.push_back(&d.conclusion);
  return out;
}

}  // namespace

Derivation apply_rule(RuleId rule, std::vector<Derivation> premises,
                      const Schema& schema, const RuleOptions& options) {
  std::optional<Provenance> prov;
  for (std::size_t i = 0; i < premises.size(); ++i) {
    const auto& pp = premises[i].provenance;
    if (i == 0) {
      prov = pp;
    } else if (prov.has_value() != pp.has_value() ||
               (prov && !(*prov == *pp))) {
      fail(ErrorCode::kProvenanceMismatch,
           std::string(rule_name(rule)) + ": premise " + std::to_string(i) +
               " comes from a different training set or algorithm");
    }
  }
  Inference inf = infer(rule, conclusions(premises), schema, options);
  Derivation d;
  d.conclusion = std::move(inf.conclusion);
  d.rule = rule;
  d.direction = options.direction;
  d.premises = std::move(premises);
  d.side_conditions = std::move(inf.side);
  d.provenance = prov;
  return d;
}

// ---------------------------------------------------------------- Checking

namespace {

class Checker {
 public:
  Checker(const Schema& schema, const ProbabilitySource* source,
          std::optional<Provenance> root)
      : schema_(schema), source_(source), root_(std::move(root)) {}

  CheckReport report;

  void check(const Derivation& d, const std::string& path) {
    auto add = [&](Violation::Kind k, std::string msg) {
      report.violations.push_back(
          Violation{k, path.empty() ? "root" : path, std::move(msg)});
    };
    if (d.provenance.has_value() != root_.has_value() ||
        (d.provenance && !(*d.provenance == *root_))) {
      add(Violation::Kind::kProvenanceMismatch,
          "provenance differs from the root's");
    }
    for (std::size_t i = 0; i < d.premises.size(); ++i) {
      check(d.premises[i], path.empty() ? std::to_string(i)
                                        : path + "." + std::to_string(i));
    }
    const Judgment& c = d.conclusion;
    if (d.rule == RuleId::kAtQuery) {
      if (!d.premises.empty()) {
        add(Violation::Kind::kShape, "AtQuery node has premises");
      }
      if (source_ == nullptr) return;
      try {
        double q = source_->query(c.sigma, c.subject, c.value);
        if (std::fabs(q - c.probability) > kCheckTolerance) {
          add(Violation::Kind::kLeafMismatch,
              "leaf claims " + print_probability(c.probability) +
                  " but the source gives " + print_probability(q));
        }
      } catch (const Error& e) {
        add(Violation::Kind::kLeafMismatch, e.what());
      }
      return;
    }
    RuleOptions opts;
    opts.direction = d.direction;
    opts.source = source_;
    if (d.rule == RuleId::kImpIE && d.direction == Direction::kForward) {
      Term s = reduce_projections(c.subject);
      if (s.kind() == Term::Kind::kCond && s.left().is_atom()) {
        opts.variable = s.left().name();
      }
    }
    for (const auto& sc : d.side_conditions) {
      if (const auto* f = std::get_if<IndependenceFact>(&sc)) {
        // Asserted facts are taken as given; tested ones are re-tested
        // when the source can, else their recorded numbers are checked.
        bool retest = !f->asserted && source_ != nullptr &&
                      source_->test_independence(c.sigma, f->left, f->right,
                                                 f->tolerance);
        if (!retest) opts.independence = *f;
        opts.independence_tolerance = f->tolerance;
      }
    }
    try {
      Inference inf = infer(d.rule, conclusions(d.premises), schema_, opts);
      if (!same_shape(inf.conclusion, c)) {
        add(Violation::Kind::kShape,
            "conclusion '" + print_query(c) + "' does not follow; the rule "
            "gives '" + print_query(inf.conclusion) + "'");
      } else if (std::fabs(inf.conclusion.probability - c.probability) >
                 kCheckTolerance) {
        add(Violation::Kind::kFormulaViolation,
            std::string(rule_name(d.rule)) + " gives " +
                print_probability(inf.conclusion.probability) +
                " but the node claims " + print_probability(c.probability));
      }
    } catch (const Error& e) {
      switch (e.code()) {
        case ErrorCode::kSideConditionUnproved:
          add(Violation::Kind::kSideCondition, e.what());
          break;
        case ErrorCode::kZeroDenominator:
        case ErrorCode::kConsistencyError:
          add(Violation::Kind::kFormulaViolation, e.what());
          break;
        default:
          add(Violation::Kind::kShape, e.what());
          break;
      }
    }
  }

 private:
  const Schema& schema_;
  const ProbabilitySource* source_;
  std::optional<Provenance> root_;
};

}  // namespace

CheckReport check_derivation(const Derivation& d, const Schema& schema,
                             const ProbabilitySource* source) {
  Checker checker(schema, source, d.provenance);
  checker.check(d, "");
  return std::move(checker.report);
}

// ---------------------------------------------------------------- Auto

namespace {

class AutoDeriver {
 public:
  AutoDeriver(const ProbabilitySource& source, const Schema& schema,
              const DeriveOptions& opts)
      : source_(source), schema_(schema), opts_(opts) {}

  Derivation derive(const Sigma& sigma, const Term& t, const Value& v) {
    RuleOptions ro;
    ro.source = &source_;
    ro.independence_tolerance = opts_.independence_tolerance;
    switch (v.kind()) {
      case Value::Kind::kAtom:
        if (!t.is_atom()) break;
        return step("AtQuery", t, v, [&] {
          return at_query(source_, sigma, t, v);
        });
      case Value::Kind::kNeg:
        return step("NegIER", t, v, [&] {
          return apply_rule(RuleId::kNegIER, {derive(sigma, t, v.inner())},
                            schema_, ro);
        });
      case Value::Kind::kOr:
        return step("OrIR", t, v, [&] {
          return apply_rule(
              RuleId::kOrIR,
              {derive(sigma, t, v.left()), derive(sigma, t, v.right())},
              schema_, ro);
        });
      case Value::Kind::kProd:
        if (t.kind() != Term::Kind::kPair) break;
        try {
          return step("ProdIIndep", t, v, [&] {
            if (opts_.assert_independence) {
              ro.independence =
                  IndependenceFact{t.left(), t.right(), true, 0, 0};
            }
            return apply_rule(RuleId::kProdIIndep,
                              {derive(sigma, t.left(), v.left()),
                               derive(sigma, t.right(), v.right())},
                              schema_, ro);
          });
        } catch (const Error&) {
          // Dependent components: condition one on the other.
          if (t.left().is_atom() && v.left().deterministic()) {
            return step("ProdI1", t, v, [&] {
              return apply_rule(
                  RuleId::kProdI1,
                  {derive(extend(sigma, t.left(), v.left()), t.right(),
                          v.right()),
                   derive(sigma, t.left(), v.left())},
                  schema_, ro);
            });
          }
          if (t.right().is_atom() && v.right().deterministic()) {
            return step("ProdI2", t, v, [&] {
              return apply_rule(
                  RuleId::kProdI2,
                  {derive(extend(sigma, t.right(), v.right()), t.left(),
                          v.left()),
                   derive(sigma, t.right(), v.right())},
                  schema_, ro);
            });
          }
          throw;
        }
      case Value::Kind::kArrow:
        if (t.kind() != Term::Kind::kCond || !t.left().is_atom()) break;
        return step("ImpIE", t, v, [&] {
          Attribution a{t.left().name(), v.left()};
          validate_attribution(a, schema_);
          Sigma ext = sigma;
          ext.push_back(a);
          ro.variable = a.variable;
          return apply_rule(RuleId::kImpIE,
                            {derive(ext, t.right(), v.right())}, schema_, ro);
        });
    }
    fail(ErrorCode::kDerivationFailed,
         "no right introduction rule builds " + print_term(t) + " : " +
             print_value(v));
  }

 private:
  Sigma extend(const Sigma& sigma, const Term& var, const Value& v) const {
    Attribution a{var.name(), v};
    validate_attribution(a, schema_);
    Sigma out = sigma;
    out.push_back(std::move(a));
    return out;
  }

  template <typename F>
  Derivation step(const char* rule, const Term& t, const Value& v, F&& f) {
    try {
      return f();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kDerivationFailed) throw;
      fail(ErrorCode::kDerivationFailed,
           std::string(rule) + " failed for " + print_term(t) + " : " +
               print_value(v) + ": " + e.what());
    }
  }

  const ProbabilitySource& source_;
  const Schema& schema_;
  const DeriveOptions& opts_;
};

}  // namespace

Derivation derive_value(const ProbabilitySource& source, const Sigma& sigma,
                        const Term& subject, const Value& value,
                        const Schema& schema, const DeriveOptions& opts) {
  AutoDeriver d(source, schema, opts);
  return d.derive(sigma, reduce_projections(subject), value);
}

double DerivingSource::query(const Sigma& sigma, const Term& subject,
                             const Value& value) const {
  try {
    return base_.query(sigma, subject, value);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kUnknownCondition) throw;
  }
  try {
    return derive_value(base_, sigma, subject, value, schema_, opts_)
        .conclusion.probability;
  } catch (const Error& e) {
    fail(ErrorCode::kUnknownCondition, e.what());
  }
}

// ---------------------------------------------------------------- Format

namespace {

void format_to(const Derivation& d, const std::string& path, int depth,
               std::ostringstream& out) {
  out << std::string(2 * static_cast<std::size_t>(depth), ' ')
      << (path.empty() ? "root" : path) << "  " << rule_name(d.rule);
  if (d.rule == RuleId::kImpIE || d.rule == RuleId::kNegIER) {
    out << (d.direction == Direction::kForward ? "[fwd]" : "[bwd]");
  }
  out << "  " << print_judgment(d.conclusion) << '\n';
  for (std::size_t i = 0; i < d.premises.size(); ++i) {
    format_to(d.premises[i],
              path.empty() ? std::to_string(i) : path + "." + std::to_string(i),
              depth + 1, out);
  }
}

}  // namespace

std::string format_derivation(const Derivation& d) {
  std::ostringstream out;
  format_to(d, "", 0, out);
  return out.str();
}

}  // namespace tndpq
