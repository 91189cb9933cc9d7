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

#include "tndpq/construction.h"

#include <algorithm>
#include <cmath>

#include "tndpq/exclusivity.h"

namespace tndpq {

bool construction_rule(RuleId rule, Direction dir) {
  return is_right_introduction(rule, dir);
}

bool deconstruction_rule(RuleId rule, Direction dir) {
  return is_right_elimination(rule, dir);
}

ScriptRun run_plan(const Script& plan, PlanMode mode, const Schema& schema,
                   const ProbabilitySource* source,
                   const std::map<std::string, Derivation>& inputs) {
  RunOptions opts;
  if (mode == PlanMode::kConstruct) {
    opts.permit = construction_rule;
    opts.restriction = "a construction (right introduction rules only)";
  } else {
    opts.permit = deconstruction_rule;
    opts.restriction = "a deconstruction (right elimination rules only)";
  }
  return run_script(plan, schema, source, inputs, opts);
}

Derivation construct(const std::map<std::string, Derivation>& inputs,
                     const Script& plan, const Schema& schema,
                     const ProbabilitySource* source) {
  return run_plan(plan, PlanMode::kConstruct, schema, source, inputs).result();
}

Derivation deconstruct(const std::map<std::string, Derivation>& inputs,
                       const Script& plan, const Schema& schema,
                       const ProbabilitySource* source) {
  return run_plan(plan, PlanMode::kDeconstruct, schema, source, inputs)
      .result();
}

// ---------------------------------------------------------------- Closures

bool ClosureSpec::allows(Connective c) const {
  return std::find(connectives.begin(), connectives.end(), c) !=
         connectives.end();
}

namespace {

bool member(const Value& v, const ClosureSpec& spec, std::size_t depth,
            const Schema& schema) {
  if (std::find(spec.base.begin(), spec.base.end(), v) != spec.base.end()) {
    return true;
  }
  if (spec.left && spec.right && v.kind() == Value::Kind::kProd &&
      member(v.left(), *spec.left, spec.left->depth, schema) &&
      member(v.right(), *spec.right, spec.right->depth, schema)) {
    return true;
  }
  if (depth == 0) return false;
  switch (v.kind()) {
    case Value::Kind::kAtom:
      return false;
    case Value::Kind::kNeg:
      return spec.allows(Connective::kNeg) &&
             member(v.inner(), spec, depth - 1, schema);
    case Value::Kind::kProd:
      return spec.allows(Connective::kProd) &&
             member(v.left(), spec, depth - 1, schema) &&
             member(v.right(), spec, depth - 1, schema);
    case Value::Kind::kArrow:
      return spec.allows(Connective::kArrow) &&
             member(v.left(), spec, depth - 1, schema) &&
             member(v.right(), spec, depth - 1, schema);
    case Value::Kind::kOr: {
      if (!spec.allows(Connective::kExclusiveOr)) return false;
      if (!member(v.left(), spec, depth - 1, schema) ||
          !member(v.right(), spec, depth - 1, schema)) {
        return false;
      }
      auto term = infer_term(v, schema);
      if (!term) return false;
      try {
        return exclusive(*term, v.left(), v.right(), schema);
      } catch (const Error&) {
        return false;
      }
    }
  }
  return false;
}

void collect(const Value& v, std::vector<Value>& out) {
  if (std::find(out.begin(), out.end(), v) != out.end()) return;
  out.push_back(v);
  switch (v.kind()) {
    case Value::Kind::kAtom:
      break;
    case Value::Kind::kNeg:
      collect(v.inner(), out);
      break;
    default:
      collect(v.left(), out);
      collect(v.right(), out);
  }
}

std::shared_ptr<const ClosureSpec> relevance_for(
    const Term& t, const std::map<std::string, std::vector<Value>>& v,
    const std::vector<Connective>& connectives, std::size_t depth) {
  auto spec = std::make_shared<ClosureSpec>();
  spec->connectives = connectives;
  spec->depth = depth;
  switch (t.kind()) {
    case Term::Kind::kAtom: {
      auto it = v.find(t.name());
      if (it == v.end()) {
        fail(ErrorCode::kPreconditionFailed,
             "relevance map has no entry for " + t.name());
      }
      spec->base = it->second;
      break;
    }
    case Term::Kind::kPair:
      spec->left = relevance_for(t.left(), v, connectives, depth);
      spec->right = relevance_for(t.right(), v, connectives, depth);
      break;
    case Term::Kind::kCond:
      fail(ErrorCode::kUnsupportedTarget,
           "relevance extension covers pairs only, not the conditional '" +
               print_term(t) + "'");
    default:
      fail(ErrorCode::kUnsupportedTarget,
           "projection '" + print_term(t) + "' does not reduce");
  }
  return spec;
}

}  // namespace

bool closure_member(const Value& value, const ClosureSpec& spec,
                    const Schema& schema) {
  return member(value, spec, spec.depth, schema);
}

std::vector<Value> subvalues(const Value& value) {
  std::vector<Value> out;
  collect(value, out);
  return out;
}

std::vector<std::pair<Term, ClosureSpec>> derive_relevance(
    const std::map<std::string, std::vector<Value>>& v,
    const std::vector<Term>& targets, Relation kind, std::size_t depth) {
  std::vector<Connective> connectives{Connective::kExclusiveOr};
  if (kind == Relation::kET) connectives.push_back(Connective::kNeg);
  if (kind == Relation::kJT) {
    fail(ErrorCode::kPreconditionFailed,
         "JT ignores relevance; there is nothing to extend");
  }
  std::vector<std::pair<Term, ClosureSpec>> out;
  for (const auto& t : targets) {
    Term r = reduce_projections(t);
    out.emplace_back(r, *relevance_for(r, v, connectives, depth));
  }
  return out;
}

// ---------------------------------------------------------------- Preservation

namespace {

bool scalar_holds(Relation kind, double f, double g, double tol,
                  std::string& condition) {
  bool equal = std::fabs(g - f) <= tol;
  bool at_least = g >= f - tol;
  bool zeros = (std::fabs(g) <= tol) == (std::fabs(f) <= tol);
  switch (kind) {
    case Relation::kJT:
    case Relation::kET:
      condition = "copy = original";
      return equal;
    case Relation::kAT:
      condition = "copy >= original";
      return at_least;
    case Relation::kWT:
      condition = "copy >= original and zero iff zero";
      return at_least && zeros;
  }
  return false;
}

bool bot_free(const Value& v) { return v.negation_free(); }

}  // namespace

TrustReport verify_preservation(
    const ProbabilitySource& original, const ProbabilitySource& copy,
    const std::map<std::string, Derivation>& original_inputs,
    const std::map<std::string, Derivation>& copy_inputs, const Script& plan,
    Relation kind, PlanMode mode, const Schema& schema,
    const PreservationOptions& options) {
  TrustReport report;
  report.kind = std::string(relation_name(kind)) +
                (mode == PlanMode::kConstruct ? " construct" : " deconstruct");

  bool inequality_kind = kind == Relation::kAT || kind == Relation::kWT;
  if (inequality_kind && mode == PlanMode::kDeconstruct) {
    if (!options.allow_empirical) {
      fail(ErrorCode::kTheoremDoesNotApply,
           "no theorem preserves " + std::string(relation_name(kind)) +
               " under deconstruction");
    }
    report.empirical = true;
    report.notes.push_back(
        "no preservation theorem covers this mode; verdict is empirical");
  }

  for (const auto& [name, d] : original_inputs) {
    if (!copy_inputs.count(name)) {
      fail(ErrorCode::kPreconditionFailed,
           "input '" + name + "' is missing on the copy side");
    }
  }

  ScriptRun o = run_plan(plan, mode, schema, &original, original_inputs);
  ScriptRun c = run_plan(plan, mode, schema, &copy, copy_inputs);

  // Hypothesis: the premises of the plan are pairwise trustworthy.
  std::vector<Value> premise_values;
  auto hypothesis = [&](const std::string& name, const Judgment& jo,
                        const Judgment& jc) {
    if (!same_shape(jo, jc)) {
      fail(ErrorCode::kIncomparableSystems,
           "premise '" + name + "' differs in shape between the sides");
    }
    std::string cond;
    if (!scalar_holds(kind, jo.probability, jc.probability, options.tol,
                      cond)) {
      fail(ErrorCode::kPreconditionFailed,
           "premise '" + name + "' is not " + std::string(relation_name(kind)) +
               ": original " + print_probability(jo.probability) +
               ", copy " + print_probability(jc.probability));
    }
    premise_values.push_back(jo.value);
  };
  for (const auto& [name, d] : original_inputs) {
    hypothesis(name, d.conclusion, copy_inputs.at(name).conclusion);
  }
  for (const auto& step : plan.steps) {
    if (step.rule == RuleId::kAtQuery) {
      hypothesis(step.id, o.steps.at(step.id).conclusion,
                 c.steps.at(step.id).conclusion);
    }
  }

  std::vector<Value> agreed_subvalues;
  for (const auto& v : premise_values) {
    for (auto& s : subvalues(v)) agreed_subvalues.push_back(std::move(s));
  }

  for (const auto& step : plan.steps) {
    if (step.rule == RuleId::kAtQuery) continue;
    const Judgment& jo = o.steps.at(step.id).conclusion;
    const Judgment& jc = c.steps.at(step.id).conclusion;
    if (!same_shape(jo, jc) ||
        reduce_projections(jo.subject) != reduce_projections(jc.subject)) {
      fail(ErrorCode::kIncomparableSystems,
           "step '" + step.id + "' concludes different judgments");
    }
    if (inequality_kind && mode == PlanMode::kConstruct && !bot_free(jo.value) &&
        !report.empirical) {
      report.empirical = true;
      report.notes.push_back("step '" + step.id + "' concludes '" +
                             print_value(jo.value) +
                             "', which contains negation; verdict is "
                             "empirical");
    }
    if (kind == Relation::kET && mode == PlanMode::kDeconstruct &&
        std::find(agreed_subvalues.begin(), agreed_subvalues.end(),
                  jo.value) == agreed_subvalues.end() &&
        !report.empirical) {
      report.empirical = true;
      report.notes.push_back("step '" + step.id + "' concludes '" +
                             print_value(jo.value) +
                             "', not a sub-value of an agreed value; verdict "
                             "is empirical");
    }
    for (const auto& prem : o.steps.at(step.id).premises) {
      if (!same_sigma(prem.conclusion.sigma, jo.sigma)) {
        report.notes.push_back("step '" + step.id + "' (" +
                               std::string(rule_name(step.rule)) +
                               ") changes the list of value attributions");
        break;
      }
    }
    std::string cond;
    bool ok = scalar_holds(kind, jo.probability, jc.probability, options.tol,
                           cond);
    report.add(Evidence{step.id, print_query(jo), jo.probability,
                        jc.probability, cond, ok});
  }
  return report;
}

}  // namespace tndpq
