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

#include "tndpq/syntax.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace tndpq {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSyntaxError: return "SyntaxError";
    case ErrorCode::kUnknownSymbol: return "UnknownSymbol";
    case ErrorCode::kIllFormed: return "IllFormed";
    case ErrorCode::kMixedVariables: return "MixedVariables";
    case ErrorCode::kNonDeterministicValue: return "NonDeterministicValue";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kOracleTooLarge: return "OracleTooLarge";
    case ErrorCode::kZeroDenominator: return "ZeroDenominator";
    case ErrorCode::kSideConditionUnproved: return "SideConditionUnproved";
    case ErrorCode::kConsistencyError: return "ConsistencyError";
    case ErrorCode::kProvenanceMismatch: return "ProvenanceMismatch";
    case ErrorCode::kUnknownCondition: return "UnknownCondition";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kEmptySupport: return "EmptySupport";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
    case ErrorCode::kIncomparableSystems: return "IncomparableSystems";
    case ErrorCode::kPreconditionFailed: return "PreconditionFailed";
    case ErrorCode::kDerivationFailed: return "DerivationFailed";
    case ErrorCode::kRuleNotAllowed: return "RuleNotAllowed";
    case ErrorCode::kTheoremDoesNotApply: return "TheoremDoesNotApply";
    case ErrorCode::kUnsupportedTarget: return "UnsupportedTarget";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

namespace {

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
         c == '\'';
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool valid_identifier(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), is_ident_char);
}

}  // namespace

// ---------------------------------------------------------------- Schema

void Schema::add_variable(std::string name, std::vector<std::string> atoms) {
  if (!valid_identifier(name)) {
    fail(ErrorCode::kParseError, "invalid variable name '" + name + "'");
  }
  if (find_variable(name) != nullptr) {
    fail(ErrorCode::kParseError, "duplicate variable '" + name + "'");
  }
  if (atoms.size() < 2) {
    fail(ErrorCode::kParseError,
         "variable '" + name + "' needs at least two atomic values");
  }
  std::set<std::string> seen;
  for (const auto& a : atoms) {
    if (!valid_identifier(a)) {
      fail(ErrorCode::kParseError, "invalid atom name '" + a + "'");
    }
    if (!seen.insert(a).second) {
      fail(ErrorCode::kParseError,
           "duplicate atom '" + a + "' in variable '" + name + "'");
    }
    if (find_atom(a)) {
      fail(ErrorCode::kParseError,
           "atom '" + a + "' already belongs to variable '" +
               variable_of_atom(a).name + "'");
    }
  }
  variables_.push_back(Variable{std::move(name), std::move(atoms)});
}

Schema Schema::parse(std::string_view text) {
  Schema schema;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::string body = trim(line);
    if (body.empty()) continue;
    auto eq = body.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::kParseError,
           "schema line " + std::to_string(lineno) + ": expected '='");
    }
    std::string name = trim(std::string_view(body).substr(0, eq));
    std::vector<std::string> atoms;
    std::string_view rest = std::string_view(body).substr(eq + 1);
    while (true) {
      auto bar = rest.find('|');
      atoms.push_back(trim(rest.substr(0, bar)));
      if (bar == std::string_view::npos) break;
      rest = rest.substr(bar + 1);
    }
    try {
      schema.add_variable(std::move(name), std::move(atoms));
    } catch (const Error& e) {
      fail(ErrorCode::kParseError,
           "schema line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return schema;
}

Schema Schema::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open schema file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const Variable* Schema::find_variable(std::string_view name) const {
  for (const auto& v : variables_) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

std::optional<std::size_t> Schema::variable_index(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<Schema::AtomRef> Schema::find_atom(std::string_view atom) const {
  for (std::size_t v = 0; v < variables_.size(); ++v) {
    const auto& atoms = variables_[v].atoms;
    for (std::size_t a = 0; a < atoms.size(); ++a) {
      if (atoms[a] == atom) return AtomRef{v, a};
    }
  }
  return std::nullopt;
}

const Variable& Schema::variable_of_atom(std::string_view atom) const {
  auto ref = find_atom(atom);
  if (!ref) fail(ErrorCode::kUnknownSymbol, "unknown atom '" +
                                                std::string(atom) + "'");
  return variables_[ref->variable];
}

std::string Schema::to_text() const {
  std::string out;
  for (const auto& v : variables_) {
    out += v.name + " =";
    for (std::size_t i = 0; i < v.atoms.size(); ++i) {
      out += (i == 0 ? " " : " | ") + v.atoms[i];
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------- Value

Value Value::atom(std::string name) {
  return Value(std::make_shared<const Node>(
      Node{Kind::kAtom, std::move(name), {}}));
}

Value Value::neg(Value inner) {
  return Value(std::make_shared<const Node>(
      Node{Kind::kNeg, {}, {std::move(inner)}}));
}

Value Value::disj(Value left, Value right) {
  return Value(std::make_shared<const Node>(
      Node{Kind::kOr, {}, {std::move(left), std::move(right)}}));
}

Value Value::prod(Value left, Value right) {
  return Value(std::make_shared<const Node>(
      Node{Kind::kProd, {}, {std::move(left), std::move(right)}}));
}

Value Value::arrow(Value left, Value right) {
  return Value(std::make_shared<const Node>(
      Node{Kind::kArrow, {}, {std::move(left), std::move(right)}}));
}

bool Value::deterministic() const {
  switch (kind()) {
    case Kind::kAtom: return true;
    case Kind::kNeg: return inner().deterministic();
    case Kind::kOr: return left().deterministic() && right().deterministic();
    case Kind::kProd:
    case Kind::kArrow: return false;
  }
  return false;
}

bool Value::negation_free() const {
  switch (kind()) {
    case Kind::kAtom: return true;
    case Kind::kNeg: return false;
    default: return left().negation_free() && right().negation_free();
  }
}

std::size_t Value::depth() const {
  switch (kind()) {
    case Kind::kAtom: return 0;
    case Kind::kNeg: return 1 + inner().depth();
    default: return 1 + std::max(left().depth(), right().depth());
  }
}

void Value::collect_atoms(std::vector<std::string>& out) const {
  if (kind() == Kind::kAtom) {
    out.push_back(name());
    return;
  }
  for (const auto& c : node_->children) c.collect_atoms(out);
}

int Value::compare(const Value& a, const Value& b) {
  if (a.node_ == b.node_) return 0;
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  if (a.kind() == Kind::kAtom) return a.name().compare(b.name());
  const auto& ca = a.node_->children;
  const auto& cb = b.node_->children;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    if (int c = compare(ca[i], cb[i]); c != 0) return c;
  }
  return 0;
}

bool operator==(const Value& a, const Value& b) {
  return Value::compare(a, b) == 0;
}

bool operator<(const Value& a, const Value& b) {
  return Value::compare(a, b) < 0;
}

// ---------------------------------------------------------------- Term

Term Term::atom(std::string name) {
  return Term(std::make_shared<const Node>(
      Node{Kind::kAtom, std::move(name), {}}));
}

Term Term::pair(Term left, Term right) {
  return Term(std::make_shared<const Node>(
      Node{Kind::kPair, {}, {std::move(left), std::move(right)}}));
}

Term Term::fst(Term inner) {
  return Term(std::make_shared<const Node>(
      Node{Kind::kFst, {}, {std::move(inner)}}));
}

Term Term::snd(Term inner) {
  return Term(std::make_shared<const Node>(
      Node{Kind::kSnd, {}, {std::move(inner)}}));
}

Term Term::cond(Term antecedent, Term consequent) {
  return Term(std::make_shared<const Node>(
      Node{Kind::kCond, {}, {std::move(antecedent), std::move(consequent)}}));
}

void Term::collect_variables(std::vector<std::string>& out) const {
  if (kind() == Kind::kAtom) {
    out.push_back(name());
    return;
  }
  for (const auto& c : node_->children) c.collect_variables(out);
}

int Term::compare(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return 0;
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  if (a.kind() == Kind::kAtom) return a.name().compare(b.name());
  const auto& ca = a.node_->children;
  const auto& cb = b.node_->children;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    if (int c = compare(ca[i], cb[i]); c != 0) return c;
  }
  return 0;
}

bool operator==(const Term& a, const Term& b) {
  return Term::compare(a, b) == 0;
}

bool operator<(const Term& a, const Term& b) {
  return Term::compare(a, b) < 0;
}

Term reduce_projections(const Term& term) {
  switch (term.kind()) {
    case Term::Kind::kAtom:
      return term;
    case Term::Kind::kPair:
      return Term::pair(reduce_projections(term.left()),
                        reduce_projections(term.right()));
    case Term::Kind::kCond:
      return Term::cond(reduce_projections(term.left()),
                        reduce_projections(term.right()));
    case Term::Kind::kFst:
    case Term::Kind::kSnd: {
      Term inner = reduce_projections(term.inner());
      if (inner.kind() == Term::Kind::kPair) {
        return term.kind() == Term::Kind::kFst ? inner.left() : inner.right();
      }
      return term.kind() == Term::Kind::kFst ? Term::fst(inner)
                                             : Term::snd(inner);
    }
  }
  return term;
}

// ---------------------------------------------------------------- Sigma

const Attribution* find_attribution(const Sigma& sigma, std::string_view var) {
  for (const auto& a : sigma) {
    if (a.variable == var) return &a;
  }
  return nullptr;
}

bool same_sigma(const Sigma& a, const Sigma& b) {
  if (a.size() != b.size()) return false;
  for (const auto& x : a) {
    const Attribution* y = find_attribution(b, x.variable);
    if (y == nullptr || y->value != x.value) return false;
  }
  return true;
}

Sigma canonical_sigma(const Sigma& sigma, const Schema& schema) {
  Sigma out = sigma;
  std::stable_sort(out.begin(), out.end(),
                   [&](const Attribution& x, const Attribution& y) {
                     auto ix = schema.variable_index(x.variable);
                     auto iy = schema.variable_index(y.variable);
                     return ix.value_or(SIZE_MAX) < iy.value_or(SIZE_MAX);
                   });
  return out;
}

bool same_shape(const Judgment& a, const Judgment& b) {
  return same_sigma(a.sigma, b.sigma) && a.subject == b.subject &&
         a.value == b.value;
}

bool same_judgment(const Judgment& a, const Judgment& b) {
  return same_shape(a, b) && a.probability == b.probability;
}

// ---------------------------------------------------------------- Printing

namespace {

int value_precedence(Value::Kind k) {
  switch (k) {
    case Value::Kind::kArrow: return 1;
    case Value::Kind::kOr: return 2;
    case Value::Kind::kProd: return 3;
    case Value::Kind::kNeg: return 4;
    case Value::Kind::kAtom: return 5;
  }
  return 0;
}

void print_value_to(const Value& v, std::string& out);

void print_operand(const Value& v, int min_prec, std::string& out) {
  if (value_precedence(v.kind()) < min_prec) {
    out += '(';
    print_value_to(v, out);
    out += ')';
  } else {
    print_value_to(v, out);
  }
}

void print_value_to(const Value& v, std::string& out) {
  switch (v.kind()) {
    case Value::Kind::kAtom:
      out += v.name();
      return;
    case Value::Kind::kNeg:
      out += '~';
      print_operand(v.inner(), 4, out);
      return;
    case Value::Kind::kOr:
      print_operand(v.left(), 2, out);
      out += '+';
      print_operand(v.right(), 3, out);
      return;
    case Value::Kind::kProd:
      print_operand(v.left(), 3, out);
      out += '*';
      print_operand(v.right(), 4, out);
      return;
    case Value::Kind::kArrow:
      print_operand(v.left(), 2, out);
      out += "->";
      print_operand(v.right(), 1, out);
      return;
  }
}

void print_term_to(const Term& t, std::string& out) {
  switch (t.kind()) {
    case Term::Kind::kAtom:
      out += t.name();
      return;
    case Term::Kind::kPair:
      out += '<';
      print_term_to(t.left(), out);
      out += ", ";
      print_term_to(t.right(), out);
      out += '>';
      return;
    case Term::Kind::kFst:
    case Term::Kind::kSnd:
      out += t.kind() == Term::Kind::kFst ? "fst(" : "snd(";
      print_term_to(t.inner(), out);
      out += ')';
      return;
    case Term::Kind::kCond:
      out += '[';
      print_term_to(t.left(), out);
      out += ']';
      print_term_to(t.right(), out);
      return;
  }
}

}  // namespace

std::string print_value(const Value& value) {
  std::string out;
  print_value_to(value, out);
  return out;
}

std::string print_term(const Term& term) {
  std::string out;
  print_term_to(term, out);
  return out;
}

std::string print_sigma(const Sigma& sigma) {
  std::string out;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (i > 0) out += ", ";
    out += sigma[i].variable + ":" + print_value(sigma[i].value);
  }
  return out;
}

std::string print_probability(double p) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, p);
  return std::string(buf, res.ptr);
}

std::string print_query(const Judgment& j) {
  std::string out = print_sigma(j.sigma);
  out += out.empty() ? "|> " : " |> ";
  out += print_term(j.subject) + " : " + print_value(j.value);
  return out;
}

std::string print_judgment(const Judgment& j) {
  return print_query(j) + " @ " + print_probability(j.probability);
}

// ---------------------------------------------------------------- Parsing

namespace {

class Parser {
 public:
  Parser(std::string_view text, const Schema& schema)
      : text_(text), schema_(schema) {}

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }

  bool peek(std::string_view tok) {
    skip_ws();
    return text_.substr(pos_, tok.size()) == tok;
  }

  bool accept(std::string_view tok) {
    if (!peek(tok)) return false;
    pos_ += tok.size();
    return true;
  }

  void expect(std::string_view tok) {
    if (!accept(tok)) {
      throw SyntaxError(pos_, "expected '" + std::string(tok) + "'" +
                                  found_suffix());
    }
  }

  std::string found_suffix() const {
    if (pos_ >= text_.size()) return ", found end of input";
    return ", found '" + std::string(1, text_[pos_]) + "'";
  }

  std::string identifier() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    if (start == pos_) {
      throw SyntaxError(pos_, "expected identifier" + found_suffix());
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  std::size_t pos() const { return pos_; }

  // value := sum ("->" value)?
  Value value() {
    Value left = sum();
    if (accept("->")) return Value::arrow(left, value());
    return left;
  }

  Value sum() {
    Value left = product();
    while (accept("+")) left = Value::disj(left, product());
    return left;
  }

  Value product() {
    Value left = unary();
    while (accept("*")) left = Value::prod(left, unary());
    return left;
  }

  Value unary() {
    if (accept("~")) return Value::neg(unary());
    if (accept("(")) {
      Value v = value();
      expect(")");
      return v;
    }
    std::size_t at = (skip_ws(), pos_);
    std::string name = identifier();
    if (!schema_.find_atom(name)) {
      throw Error(ErrorCode::kUnknownSymbol,
                  "at " + std::to_string(at) + ": unknown atom '" + name + "'");
    }
    return Value::atom(std::move(name));
  }

  Term term() {
    if (accept("<")) {
      Term l = term();
      expect(",");
      Term r = term();
      expect(">");
      return Term::pair(l, r);
    }
    if (accept("[")) {
      Term a = term();
      expect("]");
      return Term::cond(a, term());
    }
    std::size_t at = (skip_ws(), pos_);
    std::string name = identifier();
    if ((name == "fst" || name == "snd") && accept("(")) {
      Term inner = term();
      expect(")");
      return name == "fst" ? Term::fst(inner) : Term::snd(inner);
    }
    if (schema_.find_variable(name) == nullptr) {
      throw Error(ErrorCode::kUnknownSymbol, "at " + std::to_string(at) +
                                                 ": unknown variable '" +
                                                 name + "'");
    }
    return Term::atom(std::move(name));
  }

  Sigma sigma() {
    Sigma out;
    if (peek("|>") || at_end()) return out;
    do {
      std::size_t at = (skip_ws(), pos_);
      std::string var = identifier();
      if (schema_.find_variable(var) == nullptr) {
        throw Error(ErrorCode::kUnknownSymbol, "at " + std::to_string(at) +
                                                   ": unknown variable '" +
                                                   var + "'");
      }
      expect(":");
      Attribution a{var, value()};
      try {
        validate_attribution(a, schema_);
      } catch (const Error& e) {
        throw Error(e.code(), "at " + std::to_string(at) + ": " + e.what());
      }
      out.push_back(std::move(a));
    } while (accept(","));
    return out;
  }

  double probability() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E' ||
            text_[pos_] == '-' || text_[pos_] == '+')) {
      ++pos_;
    }
    double p = 0.0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, p);
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_ ||
        start == pos_) {
      throw SyntaxError(start, "expected probability literal");
    }
    return p;
  }

  void finish() {
    if (!at_end()) {
      throw SyntaxError(pos_, "unexpected trailing input" + found_suffix());
    }
  }

 private:
  std::string_view text_;
  const Schema& schema_;
  std::size_t pos_ = 0;
};

Judgment parse_judgment_impl(std::string_view text, const Schema& schema,
                             bool require_probability) {
  Parser p(text, schema);
  Judgment j;
  j.sigma = p.sigma();
  p.expect("|>");
  j.subject = p.term();
  p.expect(":");
  j.value = p.value();
  if (p.accept("@")) {
    j.probability = p.probability();
  } else if (require_probability) {
    p.expect("@");
  } else {
    j.probability = std::numeric_limits<double>::quiet_NaN();
  }
  p.finish();
  validate_judgment(j, schema);
  return j;
}

bool pair_components_distinct(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::kAtom: return true;
    case Term::Kind::kPair:
      return t.left() != t.right() && pair_components_distinct(t.left()) &&
             pair_components_distinct(t.right());
    case Term::Kind::kFst:
    case Term::Kind::kSnd: return pair_components_distinct(t.inner());
    case Term::Kind::kCond:
      return pair_components_distinct(t.left()) &&
             pair_components_distinct(t.right());
  }
  return true;
}

// The value must be built for the subject: class-O values over the variable
// for atoms, products for pairs and arrows for conditionals, each closed
// under negation and disjunction.
void check_value_shape(const Term& t, const Value& v, const Schema& schema) {
  if (v.kind() == Value::Kind::kNeg) {
    check_value_shape(t, v.inner(), schema);
    return;
  }
  if (v.kind() == Value::Kind::kOr) {
    check_value_shape(t, v.left(), schema);
    check_value_shape(t, v.right(), schema);
    return;
  }
  auto mismatch = [&] {
    fail(ErrorCode::kShapeMismatch, "value '" + print_value(v) +
                                        "' does not fit term '" +
                                        print_term(t) + "'");
  };
  switch (t.kind()) {
    case Term::Kind::kAtom: {
      if (v.kind() != Value::Kind::kAtom) mismatch();
      const Variable* var = schema.find_variable(t.name());
      if (var != nullptr &&
          std::find(var->atoms.begin(), var->atoms.end(), v.name()) ==
              var->atoms.end() &&
          schema.find_atom(v.name())) {
        fail(ErrorCode::kMixedVariables, "atom '" + v.name() +
                                             "' is not a value of variable '" +
                                             t.name() + "'");
      }
      return;
    }
    case Term::Kind::kPair:
      if (v.kind() != Value::Kind::kProd) mismatch();
      check_value_shape(t.left(), v.left(), schema);
      check_value_shape(t.right(), v.right(), schema);
      return;
    case Term::Kind::kCond:
      if (v.kind() != Value::Kind::kArrow) mismatch();
      check_value_shape(t.left(), v.left(), schema);
      check_value_shape(t.right(), v.right(), schema);
      return;
    case Term::Kind::kFst:
    case Term::Kind::kSnd:
      return;  // checked after reduction
  }
}

}  // namespace

void validate_attribution(const Attribution& a, const Schema& schema) {
  const Variable* var = schema.find_variable(a.variable);
  if (var == nullptr) {
    fail(ErrorCode::kUnknownSymbol, "unknown variable '" + a.variable + "'");
  }
  if (!a.value.deterministic()) {
    fail(ErrorCode::kIllFormed, "attribution to '" + a.variable +
                                    "' uses a product or conditional value");
  }
  std::vector<std::string> atoms;
  a.value.collect_atoms(atoms);
  for (const auto& atom : atoms) {
    if (std::find(var->atoms.begin(), var->atoms.end(), atom) ==
        var->atoms.end()) {
      fail(ErrorCode::kIllFormed, "atom '" + atom +
                                      "' is not a value of variable '" +
                                      a.variable + "'");
    }
  }
}

void validate_judgment(const Judgment& j, const Schema& schema) {
  std::set<std::string> seen;
  for (const auto& a : j.sigma) {
    validate_attribution(a, schema);
    if (!seen.insert(a.variable).second) {
      fail(ErrorCode::kIllFormed,
           "variable '" + a.variable + "' attributed twice in the antecedent");
    }
  }
  std::vector<std::string> vars;
  j.subject.collect_variables(vars);
  for (const auto& v : vars) {
    if (schema.find_variable(v) == nullptr) {
      fail(ErrorCode::kUnknownSymbol, "unknown variable '" + v + "'");
    }
    if (seen.count(v) != 0) {
      fail(ErrorCode::kIllFormed,
           "subject variable '" + v + "' also occurs in the antecedent");
    }
  }
  if (!pair_components_distinct(reduce_projections(j.subject))) {
    fail(ErrorCode::kIllFormed, "pair with identical components in '" +
                                    print_term(j.subject) + "'");
  }
  std::vector<std::string> atoms;
  j.value.collect_atoms(atoms);
  for (const auto& a : atoms) {
    if (!schema.find_atom(a)) {
      fail(ErrorCode::kUnknownSymbol, "unknown atom '" + a + "'");
    }
  }
  check_value_shape(reduce_projections(j.subject), j.value, schema);
  if (!std::isnan(j.probability) &&
      !(j.probability >= 0.0 && j.probability <= 1.0)) {
    fail(ErrorCode::kIllFormed,
         "probability " + print_probability(j.probability) +
             " lies outside [0,1]");
  }
}

Value parse_value(std::string_view text, const Schema& schema) {
  Parser p(text, schema);
  Value v = p.value();
  p.finish();
  return v;
}

Term parse_term(std::string_view text, const Schema& schema) {
  Parser p(text, schema);
  Term t = p.term();
  p.finish();
  return t;
}

Sigma parse_sigma(std::string_view text, const Schema& schema) {
  Parser p(text, schema);
  Sigma s = p.sigma();
  p.finish();
  std::set<std::string> seen;
  for (const auto& a : s) {
    if (!seen.insert(a.variable).second) {
      fail(ErrorCode::kIllFormed,
           "variable '" + a.variable + "' attributed twice in the antecedent");
    }
  }
  return s;
}

Judgment parse_judgment(std::string_view text, const Schema& schema) {
  return parse_judgment_impl(text, schema, true);
}

Judgment parse_query(std::string_view text, const Schema& schema) {
  return parse_judgment_impl(text, schema, false);
}

}  // namespace tndpq
