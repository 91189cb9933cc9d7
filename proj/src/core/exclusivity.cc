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

#include "tndpq/exclusivity.h"

#include <algorithm>
#include <memory>

namespace tndpq {

// ---------------------------------------------------------------- StarTerm

StarTerm StarTerm::from_value(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::kAtom: {
      StarTerm t;
      t.kind_ = Kind::kAtom;
      t.atom_ = v.name();
      return t;
    }
    case Value::Kind::kNeg:
      return neg(from_value(v.inner()));
    case Value::Kind::kOr:
      return disj(from_value(v.left()), from_value(v.right()));
    default:
      fail(ErrorCode::kNonDeterministicValue,
           "value '" + print_value(v) + "' contains a product or conditional");
  }
}

StarTerm StarTerm::gen(std::set<std::size_t> indices) {
  StarTerm t;
  t.kind_ = Kind::kGen;
  t.indices_ = std::move(indices);
  return t;
}

StarTerm StarTerm::neg(StarTerm inner) {
  StarTerm t;
  t.kind_ = Kind::kNeg;
  t.children_.push_back(std::move(inner));
  return t;
}

StarTerm StarTerm::disj(StarTerm left, StarTerm right) {
  StarTerm t;
  t.kind_ = Kind::kOr;
  t.children_.push_back(std::move(left));
  t.children_.push_back(std::move(right));
  return t;
}

std::string StarTerm::to_string(const Variable& var) const {
  switch (kind_) {
    case Kind::kAtom: return atom_;
    case Kind::kNeg: return "~(" + children_[0].to_string(var) + ")";
    case Kind::kOr:
      return "(" + children_[0].to_string(var) + "+" +
             children_[1].to_string(var) + ")";
    case Kind::kGen: {
      std::string out = "(+){";
      bool first = true;
      for (auto i : indices_) {
        out += (first ? "" : ",") + var.atoms[i];
        first = false;
      }
      return out + "}";
    }
  }
  return {};
}

namespace {

std::size_t atom_index(const Variable& var, const std::string& atom) {
  auto it = std::find(var.atoms.begin(), var.atoms.end(), atom);
  if (it == var.atoms.end()) {
    fail(ErrorCode::kMixedVariables, "atom '" + atom +
                                         "' does not belong to variable '" +
                                         var.name + "'");
  }
  return static_cast<std::size_t>(it - var.atoms.begin());
}

std::set<std::size_t> complement(const std::set<std::size_t>& s,
                                 std::size_t n) {
  std::set<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (s.count(i) == 0) out.insert(i);
  }
  return out;
}

}  // namespace

std::optional<StarTerm> star_step(const StarTerm& t, const Variable& var) {
  using K = StarTerm::Kind;
  switch (t.kind()) {
    case K::kGen:
      return std::nullopt;
    case K::kAtom:
      // Rule 1: a positive atom becomes a singleton disjunction.
      return StarTerm::gen({atom_index(var, t.atom())});
    case K::kNeg: {
      const StarTerm& inner = t.children()[0];
      if (inner.kind() == K::kAtom) {
        // Rule 2: a negated atom becomes the disjunction of the others.
        return StarTerm::gen(
            complement({atom_index(var, inner.atom())}, var.atoms.size()));
      }
      if (inner.kind() == K::kGen) {
        // Rule 3: a negated generalized disjunction is complemented.
        return StarTerm::gen(complement(inner.indices(), var.atoms.size()));
      }
      if (auto next = star_step(inner, var)) return StarTerm::neg(*next);
      return std::nullopt;
    }
    case K::kOr: {
      const StarTerm& l = t.children()[0];
      const StarTerm& r = t.children()[1];
      if (auto next = star_step(l, var)) return StarTerm::disj(*next, r);
      if (auto next = star_step(r, var)) return StarTerm::disj(l, *next);
      // Generalized disjunctions are identified up to ACI, so two adjacent
      // ones are the same disjunction over the union of their indices.
      std::set<std::size_t> merged = l.indices();
      merged.insert(r.indices().begin(), r.indices().end());
      return StarTerm::gen(std::move(merged));
    }
  }
  return std::nullopt;
}

namespace {

const Variable& single_variable(const Value& value, const Schema& schema) {
  if (!value.deterministic()) {
    fail(ErrorCode::kNonDeterministicValue,
         "value '" + print_value(value) + "' contains a product or conditional");
  }
  std::vector<std::string> atoms;
  value.collect_atoms(atoms);
  const Variable& var = schema.variable_of_atom(atoms.front());
  for (const auto& a : atoms) {
    const Variable& other = schema.variable_of_atom(a);
    if (other.name != var.name) {
      fail(ErrorCode::kMixedVariables, "value '" + print_value(value) +
                                           "' mixes atoms of '" + var.name +
                                           "' and '" + other.name + "'");
    }
  }
  return var;
}

}  // namespace

IndexSet star_normalize(const Value& value, const Schema& schema) {
  const Variable& var = single_variable(value, schema);
  StarTerm t = StarTerm::from_value(value);
  while (auto next = star_step(t, var)) t = std::move(*next);
  return IndexSet{var.name, t.indices()};
}

bool atomic_exclusive(const std::string& variable, const Value& beta,
                      const Value& delta, const Schema& schema) {
  IndexSet b = star_normalize(beta, schema);
  IndexSet d = star_normalize(delta, schema);
  for (const IndexSet* s : {&b, &d}) {
    if (s->variable != variable) {
      fail(ErrorCode::kMixedVariables, "value over '" + s->variable +
                                           "' used for variable '" + variable +
                                           "'");
    }
  }
  for (auto i : b.indices) {
    if (d.indices.count(i) != 0) return false;
  }
  return true;
}

// ---------------------------------------------------------------- Decision

namespace {

Value meet(const Value& a, const Value& b) {
  return Value::neg(Value::disj(Value::neg(a), Value::neg(b)));
}

struct Rect {
  Value left;
  Value right;
};

// The value as a disjunction of products, pushing negation through with
// the three-way rewrite for products and De Morgan for disjunctions.
std::vector<Rect> rectangles(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::kProd:
      return {Rect{v.left(), v.right()}};
    case Value::Kind::kOr: {
      auto out = rectangles(v.left());
      auto more = rectangles(v.right());
      out.insert(out.end(), more.begin(), more.end());
      return out;
    }
    case Value::Kind::kNeg: {
      const Value& in = v.inner();
      switch (in.kind()) {
        case Value::Kind::kNeg:
          return rectangles(in.inner());
        case Value::Kind::kProd: {
          Value nl = Value::neg(in.left()), nr = Value::neg(in.right());
          return {Rect{nl, in.right()}, Rect{in.left(), nr}, Rect{nl, nr}};
        }
        case Value::Kind::kOr: {
          auto a = rectangles(Value::neg(in.left()));
          auto b = rectangles(Value::neg(in.right()));
          std::vector<Rect> out;
          out.reserve(a.size() * b.size());
          for (const auto& x : a) {
            for (const auto& y : b) {
              out.push_back(
                  Rect{meet(x.left, y.left), meet(x.right, y.right)});
            }
          }
          return out;
        }
        default:
          break;
      }
      break;
    }
    default:
      break;
  }
  fail(ErrorCode::kShapeMismatch,
       "value '" + print_value(v) + "' is not a value for a pair variable");
}

struct CondItem {
  bool coherent = true;
  Value antecedent = Value::atom("");
  Value consequent = Value::atom("");
};

class Decider {
 public:
  explicit Decider(const Schema& schema) : schema_(schema) {}

  std::vector<std::string> trace;

  bool decide(const Term& term, const Value& b, const Value& d, int depth) {
    switch (term.kind()) {
      case Term::Kind::kAtom: {
        for (const Value* v : {&b, &d}) {
          if (!v->deterministic()) {
            fail(ErrorCode::kShapeMismatch,
                 "value '" + print_value(*v) + "' is not a value for atomic "
                 "variable '" + term.name() + "'");
          }
        }
        bool r = atomic_exclusive(term.name(), b, d, schema_);
        IndexSet bi = star_normalize(b, schema_);
        IndexSet di = star_normalize(d, schema_);
        const Variable* var = schema_.find_variable(term.name());
        log(depth, term.name() + ": " + print_value(b) + " ~> " +
                       StarTerm::gen(bi.indices).to_string(*var) + " vs " +
                       print_value(d) + " ~> " +
                       StarTerm::gen(di.indices).to_string(*var) + ": " +
                       verdict(r));
        return r;
      }
      case Term::Kind::kPair: {
        check_disjoint_components(term);
        auto rb = rectangles(b);
        auto rd = rectangles(d);
        log(depth, print_term(term) + ": " + print_value(b) + " vs " +
                       print_value(d) + " as " + std::to_string(rb.size()) +
                       " x " + std::to_string(rd.size()) + " products");
        for (const auto& x : rb) {
          for (const auto& y : rd) {
            bool l = decide(term.left(), x.left, y.left, depth + 1);
            bool r = l || decide(term.right(), x.right, y.right, depth + 1);
            if (!r) {
              log(depth, print_term(term) + ": products overlap: " +
                             verdict(false));
              return false;
            }
          }
        }
        log(depth, print_term(term) + ": " + verdict(true));
        return true;
      }
      case Term::Kind::kCond: {
        auto ab = arrows(term.left(), b, depth);
        auto ad = arrows(term.left(), d, depth);
        log(depth, print_term(term) + ": " + print_value(b) + " vs " +
                       print_value(d) + " as " + std::to_string(ab.size()) +
                       " x " + std::to_string(ad.size()) + " conditionals");
        for (const auto& x : ab) {
          for (const auto& y : ad) {
            if (!x.coherent || !y.coherent) {
              log(depth, print_term(term) +
                             ": disjunction of conditionals with different "
                             "antecedents: " + verdict(false));
              return false;
            }
            if (!same_antecedent(term.left(), x.antecedent, y.antecedent,
                                 depth + 1)) {
              log(depth, print_term(term) + ": antecedents " +
                             print_value(x.antecedent) + " and " +
                             print_value(y.antecedent) + " differ: " +
                             verdict(false));
              return false;
            }
            if (!decide(term.right(), x.consequent, y.consequent, depth + 1)) {
              log(depth, print_term(term) + ": consequents overlap: " +
                             verdict(false));
              return false;
            }
          }
        }
        log(depth, print_term(term) + ": " + verdict(true));
        return true;
      }
      case Term::Kind::kFst:
      case Term::Kind::kSnd:
        break;
    }
    fail(ErrorCode::kShapeMismatch,
         "projection '" + print_term(term) + "' of a non-pair variable");
  }

 private:
  static std::string verdict(bool r) {
    return r ? "exclusive" : "not-exclusive";
  }

  void log(int depth, const std::string& line) {
    trace.push_back(std::string(2 * static_cast<std::size_t>(depth), ' ') +
                    line);
  }

  void check_disjoint_components(const Term& pair) {
    std::vector<std::string> l, r;
    pair.left().collect_variables(l);
    pair.right().collect_variables(r);
    for (const auto& v : l) {
      if (std::find(r.begin(), r.end(), v) != r.end()) {
        fail(ErrorCode::kShapeMismatch,
             "pair '" + print_term(pair) + "' repeats variable '" + v + "'");
      }
    }
  }

  // Semantic equality: each side excludes the other's complement.
  bool same_antecedent(const Term& t, const Value& x, const Value& y,
                       int depth) {
    Decider sub(schema_);
    return sub.decide(t, x, Value::neg(y), depth) &&
           sub.decide(t, Value::neg(x), y, depth);
  }

  std::vector<CondItem> arrows(const Term& ant_term, const Value& v,
                               int depth) {
    switch (v.kind()) {
      case Value::Kind::kArrow:
        return {CondItem{true, v.left(), v.right()}};
      case Value::Kind::kOr: {
        auto out = arrows(ant_term, v.left(), depth);
        auto more = arrows(ant_term, v.right(), depth);
        out.insert(out.end(), more.begin(), more.end());
        return out;
      }
      case Value::Kind::kNeg: {
        const Value& in = v.inner();
        switch (in.kind()) {
          case Value::Kind::kNeg:
            return arrows(ant_term, in.inner(), depth);
          case Value::Kind::kArrow:
            return {CondItem{true, in.left(), Value::neg(in.right())}};
          case Value::Kind::kOr: {
            auto a = arrows(ant_term, Value::neg(in.left()), depth);
            auto b = arrows(ant_term, Value::neg(in.right()), depth);
            std::vector<CondItem> out;
            for (const auto& x : a) {
              for (const auto& y : b) {
                if (!x.coherent || !y.coherent ||
                    !same_antecedent(ant_term, x.antecedent, y.antecedent,
                                     depth + 1)) {
                  out.push_back(CondItem{false, x.antecedent, x.consequent});
                } else {
                  out.push_back(CondItem{true, x.antecedent,
                                         meet(x.consequent, y.consequent)});
                }
              }
            }
            return out;
          }
          default:
            break;
        }
        break;
      }
      default:
        break;
    }
    fail(ErrorCode::kShapeMismatch, "value '" + print_value(v) +
                                        "' is not a value for a conditional "
                                        "variable");
  }

  const Schema& schema_;
};

}  // namespace

ExclusivityDecision decide_exclusive(const Term& term, const Value& beta,
                                     const Value& delta, const Schema& schema) {
  Decider d(schema);
  ExclusivityDecision out;
  out.exclusive = d.decide(reduce_projections(term), beta, delta, 0);
  out.trace = std::move(d.trace);
  return out;
}

bool exclusive(const Term& term, const Value& beta, const Value& delta,
               const Schema& schema) {
  return decide_exclusive(term, beta, delta, schema).exclusive;
}

// ---------------------------------------------------------------- Oracle

namespace {

using Bits = std::vector<bool>;

struct Denotation {
  enum class Kind { kSet, kCond, kIncoherent };
  Kind kind = Kind::kSet;
  Bits set;  // kSet: the models; kCond: the antecedent models
  std::shared_ptr<const Denotation> consequent;
};

class Oracle {
 public:
  Oracle(const Term& term, const Schema& schema, std::size_t budget)
      : schema_(schema) {
    std::vector<std::string> names;
    term.collect_variables(names);
    std::size_t atoms = 0;
    for (const auto& n : names) {
      if (std::find(vars_.begin(), vars_.end(), n) != vars_.end()) continue;
      const Variable* v = schema.find_variable(n);
      if (v == nullptr) {
        fail(ErrorCode::kUnknownSymbol, "unknown variable '" + n + "'");
      }
      vars_.push_back(n);
      radix_.push_back(v->atoms.size());
      atoms += v->atoms.size();
    }
    if (atoms > budget) {
      fail(ErrorCode::kOracleTooLarge,
           std::to_string(atoms) + " atoms exceed the oracle budget of " +
               std::to_string(budget));
    }
    worlds_ = 1;
    for (auto r : radix_) worlds_ *= r;
  }

  Denotation eval(const Term& term, const Value& v) {
    switch (term.kind()) {
      case Term::Kind::kAtom:
        return set(classical(term.name(), v));
      case Term::Kind::kPair:
        return set(pair_models(term, v));
      case Term::Kind::kCond:
        return conditional(term, v);
      default:
        fail(ErrorCode::kShapeMismatch,
             "projection '" + print_term(term) + "' of a non-pair variable");
    }
  }

  static bool exclusive(const Denotation& a, const Denotation& b) {
    using K = Denotation::Kind;
    if (a.kind == K::kIncoherent || b.kind == K::kIncoherent) return false;
    if (a.kind == K::kSet && b.kind == K::kSet) {
      for (std::size_t i = 0; i < a.set.size(); ++i) {
        if (a.set[i] && b.set[i]) return false;
      }
      return true;
    }
    if (a.kind == K::kCond && b.kind == K::kCond) {
      return a.set == b.set && exclusive(*a.consequent, *b.consequent);
    }
    return false;
  }

 private:
  static Denotation set(Bits b) {
    Denotation d;
    d.set = std::move(b);
    return d;
  }

  std::size_t position(const std::string& var) const {
    return static_cast<std::size_t>(
        std::find(vars_.begin(), vars_.end(), var) - vars_.begin());
  }

  std::size_t digit(std::size_t world, std::size_t var_pos) const {
    for (std::size_t i = 0; i < var_pos; ++i) world /= radix_[i];
    return world % radix_[var_pos];
  }

  Bits classical(const std::string& var, const Value& v) {
    switch (v.kind()) {
      case Value::Kind::kAtom: {
        const Variable* variable = schema_.find_variable(var);
        auto it = std::find(variable->atoms.begin(), variable->atoms.end(),
                            v.name());
        if (it == variable->atoms.end()) {
          fail(ErrorCode::kMixedVariables, "atom '" + v.name() +
                                               "' does not belong to '" + var +
                                               "'");
        }
        auto idx = static_cast<std::size_t>(it - variable->atoms.begin());
        std::size_t p = position(var);
        Bits out(worlds_);
        for (std::size_t w = 0; w < worlds_; ++w) out[w] = digit(w, p) == idx;
        return out;
      }
      case Value::Kind::kNeg:
        return negate(classical(var, v.inner()));
      case Value::Kind::kOr:
        return combine(classical(var, v.left()), classical(var, v.right()),
                       false);
      case Value::Kind::kProd:
        return combine(classical(var, v.left()), classical(var, v.right()),
                       true);
      case Value::Kind::kArrow:
        return combine(negate(classical(var, v.left())),
                       classical(var, v.right()), false);
    }
    return {};
  }

  Bits component(const Term& t, const Value& v) {
    Denotation d = eval(t, v);
    if (d.kind != Denotation::Kind::kSet) {
      fail(ErrorCode::kShapeMismatch,
           "the oracle does not evaluate conditional components of pairs");
    }
    return d.set;
  }

  Bits pair_models(const Term& t, const Value& v) {
    switch (v.kind()) {
      case Value::Kind::kProd:
        return combine(component(t.left(), v.left()),
                       component(t.right(), v.right()), true);
      case Value::Kind::kOr:
        return combine(pair_models(t, v.left()), pair_models(t, v.right()),
                       false);
      case Value::Kind::kNeg:
        return negate(pair_models(t, v.inner()));
      default:
        fail(ErrorCode::kShapeMismatch, "value '" + print_value(v) +
                                            "' is not a value for a pair "
                                            "variable");
    }
  }

  Denotation conditional(const Term& t, const Value& v) {
    switch (v.kind()) {
      case Value::Kind::kArrow: {
        Denotation d;
        d.kind = Denotation::Kind::kCond;
        d.set = component(t.left(), v.left());
        d.consequent = std::make_shared<Denotation>(eval(t.right(), v.right()));
        return d;
      }
      case Value::Kind::kOr:
        return join(conditional(t, v.left()), conditional(t, v.right()));
      case Value::Kind::kNeg:
        return complement_of(conditional(t, v.inner()));
      default:
        fail(ErrorCode::kShapeMismatch, "value '" + print_value(v) +
                                            "' is not a value for a "
                                            "conditional variable");
    }
  }

  static Denotation incoherent() {
    Denotation d;
    d.kind = Denotation::Kind::kIncoherent;
    return d;
  }

  static Denotation join(const Denotation& a, const Denotation& b) {
    using K = Denotation::Kind;
    if (a.kind == K::kIncoherent || b.kind == K::kIncoherent) {
      return incoherent();
    }
    if (a.kind == K::kSet && b.kind == K::kSet) {
      return set(combine(a.set, b.set, false));
    }
    if (a.kind == K::kCond && b.kind == K::kCond && a.set == b.set) {
      Denotation c = join(*a.consequent, *b.consequent);
      if (c.kind == K::kIncoherent) return c;
      Denotation d = a;
      d.consequent = std::make_shared<Denotation>(std::move(c));
      return d;
    }
    return incoherent();
  }

  static Denotation complement_of(const Denotation& a) {
    using K = Denotation::Kind;
    switch (a.kind) {
      case K::kIncoherent: return a;
      case K::kSet: return set(negate(a.set));
      case K::kCond: {
        Denotation d = a;
        d.consequent = std::make_shared<Denotation>(complement_of(*a.consequent));
        return d;
      }
    }
    return a;
  }

  static Bits negate(Bits b) {
    b.flip();
    return b;
  }

  static Bits combine(Bits a, const Bits& b, bool conj) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = conj ? (a[i] && b[i]) : (a[i] || b[i]);
    }
    return a;
  }

  const Schema& schema_;
  std::vector<std::string> vars_;
  std::vector<std::size_t> radix_;
  std::size_t worlds_ = 1;
};

}  // namespace

bool oracle_exclusive(const Term& term, const Value& beta, const Value& delta,
                      const Schema& schema, std::size_t atom_budget) {
  Term t = reduce_projections(term);
  Oracle oracle(t, schema, atom_budget);
  return Oracle::exclusive(oracle.eval(t, beta), oracle.eval(t, delta));
}

// ---------------------------------------------------------------- infer_term

std::optional<Term> infer_term(const Value& value, const Schema& schema) {
  if (value.deterministic()) {
    std::vector<std::string> atoms;
    value.collect_atoms(atoms);
    auto first = schema.find_atom(atoms.front());
    if (!first) return std::nullopt;
    for (const auto& a : atoms) {
      auto ref = schema.find_atom(a);
      if (!ref || ref->variable != first->variable) return std::nullopt;
    }
    return Term::atom(schema.variables()[first->variable].name);
  }
  switch (value.kind()) {
    case Value::Kind::kNeg:
      return infer_term(value.inner(), schema);
    case Value::Kind::kProd:
    case Value::Kind::kArrow: {
      auto l = infer_term(value.left(), schema);
      auto r = infer_term(value.right(), schema);
      if (!l || !r) return std::nullopt;
      return value.kind() == Value::Kind::kProd ? Term::pair(*l, *r)
                                                : Term::cond(*l, *r);
    }
    case Value::Kind::kOr: {
      auto l = infer_term(value.left(), schema);
      auto r = infer_term(value.right(), schema);
      if (!l || !r || *l != *r) return std::nullopt;
      return l;
    }
    default:
      return std::nullopt;
  }
}

}  // namespace tndpq
