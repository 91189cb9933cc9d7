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

#include "tndpq/selftest.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>

#include "tndpq/construction.h"
#include "tndpq/exclusivity.h"
#include "tndpq/script.h"

namespace tndpq {

// ---------------------------------------------------------------- Fixtures

std::size_t Fixtures::uniform(std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
}

bool Fixtures::coin(double p) {
  return std::bernoulli_distribution(p)(rng_);
}

Schema Fixtures::schema(std::size_t variables, std::size_t min_atoms,
                        std::size_t max_atoms) {
  Schema s;
  for (std::size_t v = 0; v < variables; ++v) {
    std::size_t n = uniform(min_atoms, max_atoms);
    std::vector<std::string> atoms;
    for (std::size_t i = 0; i < n; ++i) {
      atoms.push_back("v" + std::to_string(v) + static_cast<char>('a' + i));
    }
    s.add_variable("V" + std::to_string(v), std::move(atoms));
  }
  return s;
}

Value Fixtures::class_o(const Variable& var, std::size_t depth,
                        bool allow_negation) {
  if (depth == 0 || coin(0.3)) {
    return Value::atom(var.atoms[uniform(0, var.atoms.size() - 1)]);
  }
  if (allow_negation && coin(0.35)) {
    return Value::neg(class_o(var, depth - 1, allow_negation));
  }
  return Value::disj(class_o(var, depth - 1, allow_negation),
                     class_o(var, depth - 1, allow_negation));
}

Value Fixtures::disjunction_of(const Variable& var,
                               const std::vector<std::size_t>& indices) {
  Value v = Value::atom(var.atoms[indices.front()]);
  for (std::size_t i = 1; i < indices.size(); ++i) {
    v = Value::disj(v, Value::atom(var.atoms[indices[i]]));
  }
  return v;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
Fixtures::disjoint_sets(std::size_t atoms) {
  std::vector<std::size_t> perm(atoms);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng_);
  std::size_t a = uniform(1, atoms - 1);
  std::size_t b = uniform(1, atoms - a);
  std::vector<std::size_t> x(perm.begin(), perm.begin() + a);
  std::vector<std::size_t> y(perm.begin() + a, perm.begin() + a + b);
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  return {x, y};
}

Value Fixtures::compound(const Term& term, const Schema& schema,
                         std::size_t complexity,
                         bool negation_free_antecedents) {
  std::function<Value(const Term&, std::size_t)> gen;
  std::vector<Value> antecedents;
  auto component = [&](const Term& t, std::size_t budget) -> Value {
    if (t.is_atom()) {
      return class_o(*schema.find_variable(t.name()), 2);
    }
    return gen(t, std::max<std::size_t>(budget, 1));
  };
  gen = [&](const Term& t, std::size_t budget) -> Value {
    if (budget <= 1 || coin(0.35)) {
      if (t.kind() == Term::Kind::kPair) {
        return Value::prod(component(t.left(), budget / 2),
                           component(t.right(), budget / 2));
      }
      // Conditional: reuse antecedents often so that disjunctions cohere.
      Value ant;
      if (!antecedents.empty() && coin(0.6)) {
        ant = antecedents[uniform(0, antecedents.size() - 1)];
      } else {
        ant = class_o(*schema.find_variable(t.left().name()), 1,
                      !negation_free_antecedents);
        antecedents.push_back(ant);
      }
      return Value::arrow(ant, component(t.right(), budget / 2));
    }
    if (coin(0.3)) return Value::neg(gen(t, budget));
    std::size_t left = uniform(1, budget - 1);
    return Value::disj(gen(t, left), gen(t, budget - left));
  };
  return gen(term, std::max<std::size_t>(complexity, 1));
}

TrainingSet Fixtures::table(const Schema& schema, std::size_t rows,
                            std::string id) {
  TrainingSet ts{std::move(id), schema, {}};
  const auto& vars = schema.variables();
  // Skewed per-variable weights give varied conditionals.
  std::vector<std::vector<double>> weights;
  for (const auto& v : vars) {
    std::vector<double> w;
    for (std::size_t i = 0; i < v.atoms.size(); ++i) {
      w.push_back(static_cast<double>(uniform(1, 6)));
    }
    weights.push_back(std::move(w));
  }
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<std::size_t> row(vars.size());
    for (std::size_t v = 0; v < vars.size(); ++v) {
      // Some dependence on the previous variable.
      if (v > 0 && coin(0.3)) {
        row[v] = row[v - 1] % vars[v].atoms.size();
      } else {
        std::discrete_distribution<std::size_t> d(weights[v].begin(),
                                                  weights[v].end());
        row[v] = d(rng_);
      }
    }
    ts.rows.push_back(std::move(row));
  }
  return ts;
}

std::vector<double> Fixtures::dyadic(std::size_t n, int denominator,
                                     double zero_chance) {
  std::vector<int> units(n, 0);
  std::vector<std::size_t> live;
  for (std::size_t i = 0; i < n; ++i) {
    if (!coin(zero_chance)) live.push_back(i);
  }
  if (live.empty()) live.push_back(uniform(0, n - 1));
  for (int k = 0; k < denominator; ++k) {
    units[live[uniform(0, live.size() - 1)]] += 1;
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = static_cast<double>(units[i]) / denominator;
  }
  return out;
}

// ---------------------------------------------------------------- Suites

namespace {

class Suite {
 public:
  explicit Suite(std::string name) { result_.name = std::move(name); }

  void check(bool ok, const std::function<std::string()>& what) {
    ++result_.cases;
    if (!ok && result_.failures++ == 0) result_.first_failure = what();
  }

  SuiteResult finish(std::chrono::steady_clock::time_point start) {
    result_.seconds = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
    return result_;
  }

 private:
  SuiteResult result_;
};

Term random_term(Fixtures& fx, const Schema& s,
                 const std::vector<std::string>& vars, std::size_t depth) {
  if (vars.size() < 2 || depth == 0 || fx.coin(0.3)) {
    return Term::atom(vars[fx.uniform(0, vars.size() - 1)]);
  }
  std::vector<std::string> shuffled = vars;
  std::shuffle(shuffled.begin(), shuffled.end(), fx.rng());
  std::size_t cut = fx.uniform(1, shuffled.size() - 1);
  std::vector<std::string> l(shuffled.begin(), shuffled.begin() + cut);
  std::vector<std::string> r(shuffled.begin() + cut, shuffled.end());
  Term lt = random_term(fx, s, l, depth - 1);
  Term rt = random_term(fx, s, r, depth - 1);
  if (fx.coin(0.7)) return Term::pair(lt, rt);
  return Term::cond(lt, rt);
}

Value value_for(Fixtures& fx, const Term& t, const Schema& s) {
  switch (t.kind()) {
    case Term::Kind::kAtom:
      return fx.class_o(*s.find_variable(t.name()), 3);
    case Term::Kind::kPair:
      return fx.coin(0.5)
                 ? Value::prod(value_for(fx, t.left(), s),
                               value_for(fx, t.right(), s))
                 : Value::disj(Value::prod(value_for(fx, t.left(), s),
                                           value_for(fx, t.right(), s)),
                               Value::neg(Value::prod(
                                   value_for(fx, t.left(), s),
                                   value_for(fx, t.right(), s))));
    default:
      return Value::arrow(value_for(fx, t.left(), s),
                          value_for(fx, t.right(), s));
  }
}

SuiteResult syntax_suite(Fixtures& fx, std::size_t cases) {
  auto start = std::chrono::steady_clock::now();
  Suite suite("syntax round-trip");
  for (std::size_t c = 0; c < cases; ++c) {
    Schema s = fx.schema(fx.uniform(2, 4), 2, 4);
    std::vector<std::string> names;
    for (const auto& v : s.variables()) names.push_back(v.name);
    std::shuffle(names.begin(), names.end(), fx.rng());
    std::size_t split = fx.uniform(0, names.size() - 1);
    Judgment j;
    for (std::size_t i = 0; i < split; ++i) {
      j.sigma.push_back(
          Attribution{names[i], fx.class_o(*s.find_variable(names[i]), 3)});
    }
    std::vector<std::string> rest(names.begin() + split, names.end());
    j.subject = random_term(fx, s, rest, 2);
    j.value = value_for(fx, j.subject, s);
    j.probability =
        std::uniform_real_distribution<double>(0.0, 1.0)(fx.rng());
    std::string text = print_judgment(j);
    bool ok = false;
    try {
      Judgment back = parse_judgment(text, s);
      ok = same_judgment(back, j) && print_judgment(back) == text;
    } catch (const Error&) {
      ok = false;
    }
    suite.check(ok, [&] { return text; });

    if (j.subject.kind() == Term::Kind::kPair) {
      Term nested = fx.coin() ? Term::fst(Term::pair(j.subject, Term::atom("Z")))
                              : Term::snd(Term::pair(Term::atom("Z"), j.subject));
      Term once = reduce_projections(nested);
      suite.check(once == j.subject && reduce_projections(once) == once,
                  [&] { return print_term(nested); });
    }
  }
  return suite.finish(start);
}

SuiteResult exclusivity_suite(Fixtures& fx, std::size_t atomic_cases,
                              std::size_t compound_cases) {
  auto start = std::chrono::steady_clock::now();
  Suite suite("exclusivity vs oracle");
  for (std::size_t c = 0; c < atomic_cases; ++c) {
    Schema s = fx.schema(fx.uniform(1, 3), 2, 4);
    const Variable& v = s.variables()[fx.uniform(0, s.variables().size() - 1)];
    Value b = fx.class_o(v, 4);
    Value d = fx.class_o(v, 4);
    Term t = Term::atom(v.name);
    bool e = exclusive(t, b, d, s);
    suite.check(e == oracle_exclusive(t, b, d, s) && e == exclusive(t, d, b, s),
                [&] { return print_value(b) + " vs " + print_value(d); });
  }
  for (std::size_t c = 0; c < compound_cases; ++c) {
    Schema s = fx.schema(fx.uniform(2, 3), 2, 4);
    std::vector<std::string> names;
    for (const auto& v : s.variables()) names.push_back(v.name);
    std::shuffle(names.begin(), names.end(), fx.rng());
    Term t;
    if (names.size() == 3 && fx.coin(0.3)) {
      t = Term::pair(Term::pair(Term::atom(names[0]), Term::atom(names[1])),
                     Term::atom(names[2]));
    } else if (fx.coin(0.5)) {
      t = Term::pair(Term::atom(names[0]), Term::atom(names[1]));
    } else {
      t = Term::cond(Term::atom(names[0]), Term::atom(names[1]));
    }
    Value b = fx.compound(t, s, fx.uniform(1, 3), true);
    Value d = fx.compound(t, s, fx.uniform(1, 3), true);
    bool e = exclusive(t, b, d, s);
    suite.check(e == oracle_exclusive(t, b, d, s) && e == exclusive(t, d, b, s),
                [&] {
                  return print_term(t) + ": " + print_value(b) + " vs " +
                         print_value(d);
                });
  }
  return suite.finish(start);
}

// Three variables T, U, S from a random table; premises by AtQuery.
struct CalculusWorld {
  Schema schema;
  TrainingSet table;
  std::string t, u, s;
  Sigma sigma;
  Value beta, gamma, delta, delta2;

  CalculusWorld(Fixtures& fx, std::size_t max_vars, std::size_t max_rows)
      : schema(fx.schema(fx.uniform(3, max_vars), 2, 4)),
        table(fx.table(schema, fx.uniform(20, max_rows), "G")) {
    std::vector<std::string> names;
    for (const auto& v : schema.variables()) names.push_back(v.name);
    std::shuffle(names.begin(), names.end(), fx.rng());
    t = names[0];
    u = names[1];
    s = names[2];
    for (std::size_t i = 2; i < names.size(); ++i) {
      if (i == 2 || fx.coin(0.3)) {
        sigma.push_back(
            Attribution{names[i], fx.class_o(*schema.find_variable(names[i]),
                                             2)});
      }
    }
    const Variable& tv = *schema.find_variable(t);
    const Variable& uv = *schema.find_variable(u);
    auto [g, b] = fx.disjoint_sets(tv.atoms.size());
    gamma = fx.disjunction_of(tv, g);
    beta = fx.disjunction_of(tv, b);
    auto [d1, d2] = fx.disjoint_sets(uv.atoms.size());
    delta = fx.disjunction_of(uv, d1);
    delta2 = fx.disjunction_of(uv, d2);
  }

  Sigma with(const std::string& var, const Value& v) const {
    Sigma out = sigma;
    out.push_back(Attribution{var, v});
    return out;
  }
};

bool near(double a, double b) { return std::fabs(a - b) <= 1e-9; }

// Runs `body`; instances that hit an empty support or a vanishing
// denominator are redrawn, up to a bound.
template <typename F>
void draw(std::size_t cases, F&& body) {
  std::size_t done = 0, attempts = 0;
  while (done < cases && attempts < cases * 50) {
    ++attempts;
    try {
      if (body()) ++done;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kUnknownCondition &&
          e.code() != ErrorCode::kZeroDenominator &&
          e.code() != ErrorCode::kEmptySupport) {
        throw;
      }
    }
  }
}

SuiteResult inversion_suite(Fixtures& fx, std::size_t cases) {
  auto start = std::chrono::steady_clock::now();
  Suite suite("inversion principle");
  auto recover = [&](const char* name, const Derivation& got,
                     const Derivation& want) {
    suite.check(same_shape(got.conclusion, want.conclusion) &&
                    near(got.conclusion.probability,
                         want.conclusion.probability),
                [&] {
                  return std::string(name) + ": " +
                         print_judgment(got.conclusion) + " vs " +
                         print_judgment(want.conclusion);
                });
  };
  draw(cases, [&] {
    CalculusWorld w(fx, 4, 80);
    TableSource src(w.table, Estimator::parse("freq"));
    const Schema& sc = w.schema;
    auto q = [&](const Sigma& sg, const std::string& var, const Value& v) {
      return at_query(src, sg, Term::atom(var), v);
    };
    Derivation tb = q(w.sigma, w.t, w.beta);
    Derivation tg = q(w.sigma, w.t, w.gamma);
    Derivation ud = q(w.sigma, w.u, w.delta);
    Derivation ud2 = q(w.sigma, w.u, w.delta2);
    Derivation ud_tb = q(w.with(w.t, w.beta), w.u, w.delta);
    Derivation ud_tg = q(w.with(w.t, w.gamma), w.u, w.delta);
    Derivation tb_ud = q(w.with(w.u, w.delta), w.t, w.beta);

    // All eliminations are computed before any check so that a redraw
    // never leaves a partial instance behind.
    RuleOptions fwd, bwd;
    bwd.direction = Direction::kBackward;
    RuleOptions imp;
    imp.variable = w.t;

    Derivation p1 = apply_rule(RuleId::kProdI1, {ud_tb, tb}, sc);
    Derivation e1a = apply_rule(RuleId::kProdE1a, {p1, ud_tb}, sc);
    Derivation e1b = apply_rule(RuleId::kProdE1b, {p1, tb}, sc);
    Derivation p2 = apply_rule(RuleId::kProdI2, {tb_ud, ud}, sc);
    Derivation e2a = apply_rule(RuleId::kProdE2a, {p2, tb_ud}, sc);
    Derivation e2b = apply_rule(RuleId::kProdE2b, {p2, ud}, sc);
    Derivation orr = apply_rule(RuleId::kOrIR, {ud, ud2}, sc);
    Derivation era = apply_rule(RuleId::kOrERa, {orr, ud}, sc);
    Derivation erb = apply_rule(RuleId::kOrERb, {orr, ud2}, sc);
    Derivation orl = apply_rule(RuleId::kOrIL, {ud_tg, ud_tb, tg, tb}, sc);
    Derivation ela = apply_rule(RuleId::kOrELa, {orl, ud_tb, tg, tb}, sc);
    Derivation elb = apply_rule(RuleId::kOrELb, {orl, ud_tg, tg, tb}, sc);
    Derivation elc = apply_rule(RuleId::kOrELc, {ud_tg, ud_tb, orl, tb}, sc);
    Derivation eld = apply_rule(RuleId::kOrELd, {ud_tg, ud_tb, orl, tg}, sc);
    Derivation nil = apply_rule(RuleId::kNegIL, {tb, ud, ud_tb}, sc);
    Derivation nea = apply_rule(RuleId::kNegELa, {tb, ud, nil}, sc);
    Derivation neb = apply_rule(RuleId::kNegELb, {tb, ud_tb, nil}, sc);
    Derivation nec = apply_rule(RuleId::kNegELc, {ud, ud_tb, nil}, sc);
    Derivation imf = apply_rule(RuleId::kImpIE, {ud_tb}, sc, imp);
    Derivation imb = apply_rule(RuleId::kImpIE, {imf}, sc, bwd);
    Derivation nf = apply_rule(RuleId::kNegIER, {ud}, sc, fwd);
    Derivation nb = apply_rule(RuleId::kNegIER, {nf}, sc, bwd);

    recover("ProdE1a", e1a, tb);
    recover("ProdE1b", e1b, ud_tb);
    recover("ProdE2a", e2a, ud);
    recover("ProdE2b", e2b, tb_ud);
    recover("OrERa", era, ud2);
    recover("OrERb", erb, ud);
    recover("OrELa", ela, ud_tg);
    recover("OrELb", elb, ud_tb);
    recover("OrELc", elc, tg);
    recover("OrELd", eld, tb);
    recover("NegELa", nea, ud_tb);
    recover("NegELb", neb, ud);
    recover("NegELc", nec, tb);
    recover("ImpIE", imb, ud_tb);
    recover("NegIER", nb, ud);
    return true;
  });
  return suite.finish(start);
}

// P(event | given) by row counting.
double counted(const TrainingSet& ts, const Sigma& event, const Sigma& given) {
  Sigma both = given;
  both.insert(both.end(), event.begin(), event.end());
  double n = 0, k = 0;
  for (const auto& row : ts.rows) {
    if (!row_satisfies(row, given, ts.schema)) continue;
    n += 1;
    if (row_satisfies(row, both, ts.schema)) k += 1;
  }
  if (n == 0) fail(ErrorCode::kEmptySupport, "counting oracle: no support");
  return k / n;
}

SuiteResult coherence_suite(Fixtures& fx, std::size_t cases) {
  auto start = std::chrono::steady_clock::now();
  Suite suite("calculus vs counting");
  draw(cases, [&] {
    CalculusWorld w(fx, 6, 200);
    TableSource src(w.table, Estimator::parse("freq"));
    const Schema& sc = w.schema;
    const TrainingSet& ts = w.table;
    auto q = [&](const Sigma& sg, const std::string& var, const Value& v) {
      return at_query(src, sg, Term::atom(var), v);
    };
    Attribution tb{w.t, w.beta}, tg{w.t, w.gamma}, ud{w.u, w.delta};
    Attribution ud2{w.u, w.delta2};
    Value both = Value::disj(w.gamma, w.beta);

    Derivation l_tb = q(w.sigma, w.t, w.beta);
    Derivation l_tg = q(w.sigma, w.t, w.gamma);
    Derivation l_ud = q(w.sigma, w.u, w.delta);
    Derivation l_ud2 = q(w.sigma, w.u, w.delta2);
    Derivation l_ud_tb = q(w.with(w.t, w.beta), w.u, w.delta);
    Derivation l_ud_tg = q(w.with(w.t, w.gamma), w.u, w.delta);

    struct Expect {
      const char* name;
      Derivation d;
      double oracle;
    };
    std::vector<Expect> checks;
    checks.push_back({"OrIL", apply_rule(RuleId::kOrIL,
                                         {l_ud_tg, l_ud_tb, l_tg, l_tb}, sc),
                      counted(ts, {ud}, w.with(w.t, both))});
    checks.push_back({"NegIL", apply_rule(RuleId::kNegIL,
                                          {l_tb, l_ud, l_ud_tb}, sc),
                      counted(ts, {ud}, w.with(w.t, Value::neg(w.beta)))});
    Derivation l_ud_ntb = q(w.with(w.t, Value::neg(w.beta)), w.u, w.delta);
    checks.push_back({"NegELb", apply_rule(RuleId::kNegELb,
                                           {l_tb, l_ud_tb, l_ud_ntb}, sc),
                      counted(ts, {ud}, w.sigma)});
    Derivation prod = apply_rule(RuleId::kProdI1, {l_ud_tb, l_tb}, sc);
    checks.push_back({"ProdI1", prod, counted(ts, {tb, ud}, w.sigma)});
    checks.push_back({"OrIR", apply_rule(RuleId::kOrIR, {l_ud, l_ud2}, sc),
                      counted(ts, {Attribution{w.u, Value::disj(w.delta,
                                                                w.delta2)}},
                              w.sigma)});
    checks.push_back({"ProdE1a", apply_rule(RuleId::kProdE1a,
                                            {prod, l_ud_tb}, sc),
                      counted(ts, {tb}, w.sigma)});
    Derivation l_both = q(w.with(w.t, both), w.u, w.delta);
    checks.push_back({"OrELa", apply_rule(RuleId::kOrELa,
                                          {l_both, l_ud_tb, l_tg, l_tb}, sc),
                      counted(ts, {ud}, w.with(w.t, w.gamma))});
    checks.push_back({"OrELc", apply_rule(RuleId::kOrELc,
                                          {l_ud_tg, l_ud_tb, l_both, l_tb}, sc),
                      counted(ts, {tg}, w.sigma)});
    checks.push_back({"NegELa", apply_rule(RuleId::kNegELa,
                                           {l_tb, l_ud, l_ud_ntb}, sc),
                      counted(ts, {ud}, w.with(w.t, w.beta))});
    checks.push_back({"NegELc", apply_rule(RuleId::kNegELc,
                                           {l_ud, l_ud_tb, l_ud_ntb}, sc),
                      counted(ts, {tb}, w.sigma)});
    for (const auto& c : checks) {
      suite.check(near(c.d.conclusion.probability, c.oracle), [&] {
        return std::string(c.name) + ": " + print_judgment(c.d.conclusion) +
               " but counting gives " + print_probability(c.oracle);
      });
    }
    return true;
  });
  return suite.finish(start);
}

SuiteResult algebra_suite(Fixtures& fx, std::size_t cases) {
  auto start = std::chrono::steady_clock::now();
  Suite suite("trust algebra");
  std::vector<SystemTriple> samples;
  for (std::size_t c = 0; c < cases; ++c) {
    std::size_t n = fx.uniform(2, 5);
    std::vector<double> a = fx.dyadic(n, 16);
    // Nearby systems make the antecedents of the laws fire often.
    auto nudge = [&](std::vector<double> v) {
      if (fx.coin(0.4)) return v;
      if (fx.coin(0.5)) return fx.dyadic(n, 16);
      std::size_t from = fx.uniform(0, n - 1), to = fx.uniform(0, n - 1);
      if (v[from] >= 1.0 / 16) {
        v[from] -= 1.0 / 16;
        v[to] += 1.0 / 16;
      }
      return v;
    };
    std::vector<double> b = nudge(a);
    std::vector<double> cc = nudge(b);
    samples.push_back({a, b, cc});
  }
  PropertyReport r = verify_algebra(samples, 0.0);
  for (const auto& row : r.rows) {
    suite.check(row.failures == 0,
                [&] { return row.name + ": " + row.counterexample; });
  }
  suite.check(r.et_not_wt.has_value(),
              [] { return std::string("no ET-but-not-WT witness"); });
  suite.check(r.wt_not_et.has_value(),
              [] { return std::string("no WT-but-not-ET witness"); });
  return suite.finish(start);
}

SuiteResult chain_suite() {
  auto start = std::chrono::steady_clock::now();
  Suite suite("diverging chains");
  const std::vector<double> base{0.2, 0.4, 0.3, 0.1, 0.0};
  struct Case {
    ChainVariant v;
    std::size_t m, k, l;
  };
  const Case cases[] = {
      {ChainVariant::kAT, 1, 2, 1},    {ChainVariant::kNonEtAT, 1, 2, 1},
      {ChainVariant::kWT, 1, 2, 1},    {ChainVariant::kWT, 1, 2, 3},
      {ChainVariant::kNonEtWT, 2, 3, 1}, {ChainVariant::kET, 1, 2, 3},
  };
  for (const auto& c : cases) {
    ChainReport r = build_chain(base, base, c.m, c.k, c.v, 50, c.l);
    suite.check(r.certified, [&] {
      return std::string(chain_variant_name(c.v)) + ": " +
             (r.failures.empty() ? "" : r.failures.front());
    });
  }
  return suite.finish(start);
}

// Moves probability units inside or outside the prefix while keeping the
// hypotheses of the square.
SuiteResult square_suite(Fixtures& fx, std::size_t cases) {
  auto start = std::chrono::steady_clock::now();
  Suite suite("composition square");
  const double unit = 1.0 / 64;
  for (std::size_t c = 0; c < cases; ++c) {
    std::size_t n = fx.uniform(2, 6);
    std::size_t m = fx.uniform(1, n);
    std::vector<double> a0 = fx.dyadic(n, 64, 0.1);
    std::vector<double> b0 = a0;
    std::vector<double> a1 = a0;
    // a1: shuffle mass among atoms after the prefix only.
    if (m < n) {
      for (int s = 0; s < 8; ++s) {
        std::size_t from = fx.uniform(m, n - 1), to = fx.uniform(m, n - 1);
        if (a1[from] >= unit) {
          a1[from] -= unit;
          a1[to] += unit;
        }
      }
    }
    // b1: move mass into the prefix from anywhere after it.
    std::vector<double> b1 = b0;
    if (m < n) {
      for (int s = 0; s < 8; ++s) {
        std::size_t from = fx.uniform(m, n - 1), to = fx.uniform(0, m - 1);
        if (b1[from] >= unit) {
          b1[from] -= unit;
          b1[to] += unit;
        }
      }
    }
    TrustReport r = compose_square(a0, b0, a1, b1, m, 0.0);
    suite.check(r.verdict, [&] {
      return r.failed_condition.value_or("square failed");
    });
  }
  return suite.finish(start);
}

// Two independent variables per side served by SystemSource.
struct PreservationWorld {
  Schema schema;
  std::vector<AppliedSystem> orig, copy;

  static AppliedSystem system(const Variable& v, std::vector<double> p,
                              const char* training) {
    AppliedSystem as;
    as.training = training;
    as.estimator = "A";
    as.variable = v.name;
    for (std::size_t i = 0; i < v.atoms.size(); ++i) {
      as.distribution.emplace_back(v.atoms[i], p[i]);
    }
    return as;
  }
};

Value relevant_value(Fixtures& fx, const Term& t, const Schema& s,
                     std::size_t m, std::size_t depth, bool with_neg) {
  auto atom_value = [&](const std::string& var) {
    const Variable& v = *s.find_variable(var);
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), fx.rng());
    idx.resize(fx.uniform(1, m));
    std::sort(idx.begin(), idx.end());
    Value out = fx.disjunction_of(v, idx);
    if (with_neg && fx.coin(0.3)) out = Value::neg(out);
    return out;
  };
  switch (t.kind()) {
    case Term::Kind::kAtom:
      return atom_value(t.name());
    case Term::Kind::kPair: {
      Value p = Value::prod(relevant_value(fx, t.left(), s, m, 0, with_neg),
                            relevant_value(fx, t.right(), s, m, 0, with_neg));
      if (depth > 0 && fx.coin(0.5)) {
        Value q =
            Value::prod(relevant_value(fx, t.left(), s, m, 0, with_neg),
                        relevant_value(fx, t.right(), s, m, 0, with_neg));
        if (exclusive(t, p, q, s)) return Value::disj(p, q);
      }
      if (with_neg && fx.coin(0.2)) return Value::neg(p);
      return p;
    }
    default:
      return Value::arrow(atom_value(t.left().name()),
                          relevant_value(fx, t.right(), s, m, 0, with_neg));
  }
}

SuiteResult preservation_suite(Fixtures& fx, std::size_t cases) {
  auto start = std::chrono::steady_clock::now();
  Suite suite("preservation");
  Schema s;
  s.add_variable("C", {"c1", "c2", "c3", "c4"});
  s.add_variable("H", {"h1", "h2", "h3", "h4"});
  const std::size_t m = 2;
  const Term terms[] = {
      Term::atom("C"), Term::pair(Term::atom("C"), Term::atom("H")),
      Term::cond(Term::atom("C"), Term::atom("H"))};
  const Relation kinds[] = {Relation::kJT, Relation::kET, Relation::kAT,
                            Relation::kWT};
  for (std::size_t c = 0; c < cases; ++c) {
    Relation kind = kinds[c % 4];
    std::vector<AppliedSystem> orig, copy;
    for (const auto& v : s.variables()) {
      std::vector<double> f = fx.dyadic(4, 64, kind == Relation::kWT ? 0.2 : 0.0);
      std::vector<double> g = f;
      const double unit = 1.0 / 64;
      for (int k = 0; k < 6; ++k) {
        std::size_t from = fx.uniform(m, 3), to = fx.uniform(
            kind == Relation::kET ? m : 0, 3);
        if (kind == Relation::kJT) break;
        // WT keeps zeros where they are.
        if (g[from] >= (kind == Relation::kWT ? 2 * unit : unit) &&
            (kind != Relation::kWT || g[to] > 0)) {
          g[from] -= unit;
          g[to] += unit;
        }
      }
      orig.push_back(PreservationWorld::system(v, f, "G"));
      copy.push_back(PreservationWorld::system(v, g, "D"));
    }
    SystemSource so(orig, s, true), sc(copy, s, true);
    const Term& t = terms[fx.uniform(0, 2)];
    bool with_neg = kind == Relation::kET || kind == Relation::kJT;
    Value v = relevant_value(fx, t, s, m, 1, with_neg);
    Derivation d;
    try {
      d = derive_value(so, {}, t, v, s);
    } catch (const Error& e) {
      suite.check(false, [&] { return std::string(e.what()); });
      continue;
    }
    Script plan = script_from_derivation(d);
    TrustReport r = verify_preservation(so, sc, {}, {}, plan, kind,
                                        PlanMode::kConstruct, s);
    suite.check(r.verdict && !r.empirical, [&] {
      return std::string(relation_name(kind)) + " " + print_term(t) + ":" +
             print_value(v) + ": " + r.failed_condition.value_or("empirical");
    });
  }
  return suite.finish(start);
}

}  // namespace

std::vector<SuiteResult> run_selftest(const SelftestOptions& options) {
  Fixtures fx(options.seed);
  std::size_t n = std::max<std::size_t>(options.cases, 1);
  std::vector<SuiteResult> out;
  out.push_back(syntax_suite(fx, n));
  out.push_back(exclusivity_suite(fx, n, n));
  out.push_back(inversion_suite(fx, n));
  out.push_back(coherence_suite(fx, n));
  out.push_back(algebra_suite(fx, n));
  out.push_back(chain_suite());
  out.push_back(square_suite(fx, n));
  out.push_back(preservation_suite(fx, n));
  return out;
}

}  // namespace tndpq
