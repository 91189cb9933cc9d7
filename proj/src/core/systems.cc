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

#include "tndpq/systems.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "tndpq/exclusivity.h"

namespace tndpq {

// ---------------------------------------------------------------- CSV

namespace {

struct CsvCell {
  std::string text;
  std::size_t row;
  std::size_t col;
};

// RFC 4180 records. Rows and columns are 1-based in messages.
std::vector<std::vector<CsvCell>> parse_csv(std::string_view in) {
  std::vector<std::vector<CsvCell>> rows;
  std::vector<CsvCell> row;
  std::string cell;
  std::size_t r = 1, c = 1;
  bool quoted = false, was_quoted = false, any = false;
  auto end_cell = [&] {
    row.push_back(CsvCell{cell, r, c});
    cell.clear();
    was_quoted = false;
    ++c;
  };
  auto end_row = [&] {
    end_cell();
    // A blank line is not a record.
    if (!(row.size() == 1 && row[0].text.empty())) rows.push_back(row);
    row.clear();
    ++r;
    c = 1;
  };
  for (std::size_t i = 0; i < in.size(); ++i) {
    char ch = in[i];
    any = true;
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < in.size() && in[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += ch;
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (!cell.empty() || was_quoted) {
          fail(ErrorCode::kParseError, "csv row " + std::to_string(r) +
                                           " column " + std::to_string(c) +
                                           ": stray quote");
        }
        quoted = was_quoted = true;
        break;
      case ',':
        end_cell();
        break;
      case '\r':
        if (i + 1 < in.size() && in[i + 1] == '\n') ++i;
        end_row();
        any = false;
        break;
      case '\n':
        end_row();
        any = false;
        break;
      default:
        if (was_quoted) {
          fail(ErrorCode::kParseError, "csv row " + std::to_string(r) +
                                           " column " + std::to_string(c) +
                                           ": text after closing quote");
        }
        cell += ch;
    }
  }
  if (quoted) {
    fail(ErrorCode::kParseError,
         "csv row " + std::to_string(r) + ": unterminated quoted field");
  }
  if (any) end_row();
  return rows;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TrainingSet parse_training_set(std::string_view csv, const Schema& schema,
                               std::string id) {
  auto rows = parse_csv(csv);
  if (rows.empty()) fail(ErrorCode::kParseError, "csv has no header row");
  const auto& vars = schema.variables();
  std::vector<std::size_t> column_var;
  std::vector<bool> seen(vars.size(), false);
  for (const auto& cell : rows[0]) {
    auto vi = schema.variable_index(cell.text);
    if (!vi) {
      fail(ErrorCode::kSchemaMismatch, "csv header column " +
                                           std::to_string(cell.col) +
                                           ": unknown variable '" + cell.text +
                                           "'");
    }
    if (seen[*vi]) {
      fail(ErrorCode::kSchemaMismatch,
           "csv header: duplicate variable '" + cell.text + "'");
    }
    seen[*vi] = true;
    column_var.push_back(*vi);
  }
  for (std::size_t v = 0; v < vars.size(); ++v) {
    if (!seen[v]) {
      fail(ErrorCode::kSchemaMismatch,
           "csv header lacks variable '" + vars[v].name + "'");
    }
  }
  TrainingSet ts{std::move(id), schema, {}};
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != column_var.size()) {
      fail(ErrorCode::kParseError,
           "csv row " + std::to_string(row.front().row) + ": expected " +
               std::to_string(column_var.size()) + " fields, got " +
               std::to_string(row.size()));
    }
    std::vector<std::size_t> out(vars.size());
    for (std::size_t c = 0; c < row.size(); ++c) {
      const auto& atoms = vars[column_var[c]].atoms;
      auto it = std::find(atoms.begin(), atoms.end(), row[c].text);
      if (it == atoms.end()) {
        fail(ErrorCode::kSchemaMismatch,
             "csv row " + std::to_string(row[c].row) + " column " +
                 std::to_string(row[c].col) + ": '" + row[c].text +
                 "' is not an atom of " + vars[column_var[c]].name);
      }
      out[column_var[c]] = static_cast<std::size_t>(it - atoms.begin());
    }
    ts.rows.push_back(std::move(out));
  }
  return ts;
}

TrainingSet load_training_set(const std::string& path, const Schema& schema,
                              std::string id) {
  if (id.empty()) id = std::filesystem::path(path).stem().string();
  return parse_training_set(read_file(path), schema, std::move(id));
}

// ---------------------------------------------------------------- Estimator

Estimator Estimator::parse(std::string_view spec, std::string id) {
  Estimator e;
  e.id = id.empty() ? std::string(spec) : std::move(id);
  if (spec == "freq") return e;
  constexpr std::string_view kLaplace = "laplace:";
  if (spec.substr(0, kLaplace.size()) == kLaplace) {
    auto num = spec.substr(kLaplace.size());
    double a = 0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), a);
    if (ec != std::errc() || ptr != num.data() + num.size() || !(a > 0) ||
        !std::isfinite(a)) {
      fail(ErrorCode::kParseError,
           "laplace smoothing must be a positive number: '" +
               std::string(spec) + "'");
    }
    e.kind = Kind::kLaplace;
    e.alpha = a;
    return e;
  }
  fail(ErrorCode::kParseError,
       "estimator must be 'freq' or 'laplace:<alpha>', got '" +
           std::string(spec) + "'");
}

std::string Estimator::spec() const {
  if (kind == Kind::kFrequency) return "freq";
  return "laplace:" + print_probability(alpha);
}

// ---------------------------------------------------------------- Systems

std::vector<double> AppliedSystem::probabilities() const {
  std::vector<double> out;
  for (const auto& [a, p] : distribution) out.push_back(p);
  return out;
}

double AppliedSystem::probability_of(std::string_view atom) const {
  for (const auto& [a, p] : distribution) {
    if (a == atom) return p;
  }
  fail(ErrorCode::kUnknownSymbol, "'" + std::string(atom) +
                                      "' is not an atom of " + variable);
}

bool same_system(const AppliedSystem& a, const AppliedSystem& b) {
  return a.training == b.training && a.estimator == b.estimator &&
         same_sigma(a.sigma, b.sigma) && a.variable == b.variable &&
         a.distribution == b.distribution;
}

namespace {

struct CompiledSigma {
  std::vector<std::pair<std::size_t, std::vector<bool>>> clauses;

  bool matches(const std::vector<std::size_t>& row) const {
    for (const auto& [v, allowed] : clauses) {
      if (!allowed[row[v]]) return false;
    }
    return true;
  }
};

CompiledSigma compile(const Sigma& sigma, const Schema& schema) {
  CompiledSigma out;
  for (const auto& a : sigma) {
    validate_attribution(a, schema);
    auto vi = schema.variable_index(a.variable);
    IndexSet set = star_normalize(a.value, schema);
    std::vector<bool> allowed(schema.variables()[*vi].atoms.size(), false);
    for (auto i : set.indices) allowed[i] = true;
    out.clauses.emplace_back(*vi, std::move(allowed));
  }
  return out;
}

std::size_t target_index(const Sigma& sigma, const std::string& variable,
                         const Schema& schema) {
  auto vi = schema.variable_index(variable);
  if (!vi) fail(ErrorCode::kUnknownSymbol, "unknown variable '" + variable + "'");
  if (find_attribution(sigma, variable) != nullptr) {
    fail(ErrorCode::kIllFormed,
         "target '" + variable + "' is attributed in the antecedent");
  }
  return *vi;
}

std::vector<double> estimate(const std::vector<double>& counts, double n,
                             const Estimator& est, const std::string& where) {
  std::vector<double> out(counts.size());
  if (est.kind == Estimator::Kind::kFrequency) {
    if (n == 0) {
      fail(ErrorCode::kEmptySupport, "no training row satisfies " + where);
    }
    for (std::size_t i = 0; i < counts.size(); ++i) out[i] = counts[i] / n;
  } else {
    double den = n + est.alpha * static_cast<double>(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
      out[i] = (counts[i] + est.alpha) / den;
    }
  }
  return out;
}

std::vector<double> distribution_of(const TrainingSet& ts,
                                    const Estimator& est,
                                    const CompiledSigma& cs, std::size_t var,
                                    const std::string& where) {
  std::vector<double> counts(ts.schema.variables()[var].atoms.size(), 0.0);
  double n = 0;
  for (const auto& row : ts.rows) {
    if (!cs.matches(row)) continue;
    counts[row[var]] += 1;
    n += 1;
  }
  return estimate(counts, n, est, where);
}

std::string describe(const Sigma& sigma, const std::string& variable) {
  return "'" + print_sigma(sigma) + "' (target " + variable + ")";
}

}  // namespace

bool row_satisfies(const std::vector<std::size_t>& row, const Sigma& sigma,
                   const Schema& schema) {
  return compile(sigma, schema).matches(row);
}

AppliedSystem conditional_distribution(const TrainingSet& ts,
                                       const Estimator& est,
                                       const Sigma& sigma,
                                       const std::string& variable) {
  std::size_t var = target_index(sigma, variable, ts.schema);
  CompiledSigma cs = compile(sigma, ts.schema);
  auto probs = distribution_of(ts, est, cs, var, describe(sigma, variable));
  AppliedSystem as;
  as.training = ts.id;
  as.estimator = est.id;
  as.sigma = canonical_sigma(sigma, ts.schema);
  as.variable = variable;
  const auto& atoms = ts.schema.variables()[var].atoms;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    as.distribution.emplace_back(atoms[i], probs[i]);
  }
  return as;
}

IndependenceWitness independent(const TrainingSet& ts, const Estimator& est,
                                const Sigma& sigma, const std::string& t,
                                const std::string& u, double tol) {
  std::size_t tv = target_index(sigma, t, ts.schema);
  std::size_t uv = target_index(sigma, u, ts.schema);
  if (tv == uv) {
    fail(ErrorCode::kIllFormed, "independence of a variable with itself");
  }
  CompiledSigma cs = compile(sigma, ts.schema);
  auto marginal = distribution_of(ts, est, cs, uv, describe(sigma, u));
  const auto& tatoms = ts.schema.variables()[tv].atoms;
  IndependenceWitness w;
  for (std::size_t a = 0; a < tatoms.size(); ++a) {
    CompiledSigma ext = cs;
    std::vector<bool> only(tatoms.size(), false);
    only[a] = true;
    ext.clauses.emplace_back(tv, std::move(only));
    std::vector<double> cond;
    try {
      cond = distribution_of(ts, est, ext, uv, describe(sigma, u));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kEmptySupport) continue;
      throw;
    }
    for (std::size_t i = 0; i < cond.size(); ++i) {
      w.max_deviation = std::max(w.max_deviation, std::fabs(cond[i] - marginal[i]));
    }
  }
  w.independent = w.max_deviation <= tol;
  return w;
}

// ---------------------------------------------------------------- Files

std::string applied_system_to_text(const AppliedSystem& as,
                                   const Schema& schema) {
  std::ostringstream out;
  out << "system " << as.training << ' ' << as.estimator << '\n';
  out << "sigma " << print_sigma(canonical_sigma(as.sigma, schema)) << '\n';
  out << "var " << as.variable << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& [a, p] : as.distribution) out << a << ' ' << p << '\n';
  return out.str();
}

AppliedSystem parse_applied_system(std::string_view text,
                                   const Schema& schema) {
  std::istringstream in{std::string(text)};
  std::string line;
  int n = 0;
  auto next = [&](const char* what) -> std::string {
    while (std::getline(in, line)) {
      ++n;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty() && line.front() != '#') return line;
    }
    fail(ErrorCode::kParseError,
         std::string("system file: missing '") + what + "' line");
  };
  auto keyword = [&](const std::string& l, const std::string& kw) {
    if (l.rfind(kw + " ", 0) != 0 && l != kw) {
      fail(ErrorCode::kParseError, "system file line " + std::to_string(n) +
                                       ": expected '" + kw + "'");
    }
    return l.size() > kw.size() ? l.substr(kw.size() + 1) : std::string{};
  };
  AppliedSystem as;
  {
    std::istringstream ids(keyword(next("system"), "system"));
    if (!(ids >> as.training >> as.estimator)) {
      fail(ErrorCode::kParseError,
           "system file line " + std::to_string(n) +
               ": expected 'system <training> <estimator>'");
    }
  }
  as.sigma = parse_sigma(keyword(next("sigma"), "sigma"), schema);
  {
    std::istringstream v(keyword(next("var"), "var"));
    v >> as.variable;
  }
  const Variable* var = schema.find_variable(as.variable);
  if (var == nullptr) {
    fail(ErrorCode::kUnknownSymbol,
         "system file: unknown variable '" + as.variable + "'");
  }
  if (find_attribution(as.sigma, as.variable) != nullptr) {
    fail(ErrorCode::kIllFormed,
         "system file: target is attributed in sigma");
  }
  double sum = 0;
  for (const auto& atom : var->atoms) {
    std::istringstream l(next("atom"));
    std::string name, num;
    if (!(l >> name >> num)) {
      fail(ErrorCode::kParseError, "system file line " + std::to_string(n) +
                                       ": expected '<atom> <probability>'");
    }
    if (name != atom) {
      fail(ErrorCode::kParseError,
           "system file line " + std::to_string(n) + ": expected atom '" +
               atom + "', got '" + name + "'");
    }
    double p = 0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), p);
    if (ec != std::errc() || ptr != num.data() + num.size()) {
      fail(ErrorCode::kParseError, "system file line " + std::to_string(n) +
                                       ": bad probability '" + num + "'");
    }
    if (!(p >= 0.0) || p > 1.0) {
      fail(ErrorCode::kInvariantViolation,
           "system file line " + std::to_string(n) + ": probability " + num +
               " outside [0,1]");
    }
    sum += p;
    as.distribution.emplace_back(atom, p);
  }
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") != std::string::npos &&
        line.front() != '#') {
      fail(ErrorCode::kParseError,
           "system file line " + std::to_string(n) + ": unexpected text");
    }
  }
  if (std::fabs(sum - 1.0) > kSumTolerance) {
    fail(ErrorCode::kInvariantViolation,
         "system file: probabilities sum to " + print_probability(sum));
  }
  return as;
}

void save_applied_system(const AppliedSystem& as, const std::string& path,
                         const Schema& schema) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path + "'");
  out << applied_system_to_text(as, schema);
  if (!out) fail(ErrorCode::kIo, "write failed for '" + path + "'");
}

AppliedSystem load_applied_system(const std::string& path,
                                  const Schema& schema) {
  return parse_applied_system(read_file(path), schema);
}

double value_probability(const AppliedSystem& as, const Value& value,
                         const Schema& schema) {
  IndexSet set = star_normalize(value, schema);
  if (set.variable != as.variable) {
    fail(ErrorCode::kShapeMismatch, "value '" + print_value(value) +
                                        "' does not range over " +
                                        as.variable);
  }
  double p = 0;
  for (auto i : set.indices) p += as.distribution[i].second;
  return std::min(p, 1.0);
}

// ---------------------------------------------------------------- Sources

namespace {

std::string atomic_subject(const Term& subject) {
  Term s = reduce_projections(subject);
  if (!s.is_atom()) {
    fail(ErrorCode::kUnknownCondition,
         "AtQuery needs an atomic subject, got '" + print_term(subject) + "'");
  }
  return s.name();
}

void deterministic_or_unknown(const Value& value) {
  if (!value.deterministic()) {
    fail(ErrorCode::kUnknownCondition,
         "AtQuery needs a deterministic value, got '" + print_value(value) +
             "'");
  }
}

}  // namespace

double TableSource::query(const Sigma& sigma, const Term& subject,
                          const Value& value) const {
  std::string var = atomic_subject(subject);
  deterministic_or_unknown(value);
  try {
    return value_probability(conditional_distribution(ts_, est_, sigma, var),
                             value, ts_.schema);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kEmptySupport) {
      fail(ErrorCode::kUnknownCondition, e.what());
    }
    throw;
  }
}

std::optional<Provenance> TableSource::provenance() const {
  return Provenance{ts_.id, est_.id};
}

std::optional<IndependenceFact> TableSource::test_independence(
    const Sigma& sigma, const Term& t, const Term& u, double tol) const {
  Term rt = reduce_projections(t);
  Term ru = reduce_projections(u);
  if (!rt.is_atom() || !ru.is_atom()) return std::nullopt;
  auto w = independent(ts_, est_, sigma, rt.name(), ru.name(), tol);
  return IndependenceFact{t, u, false, w.max_deviation, tol};
}

const AppliedSystem* SystemSource::find(const Sigma& sigma,
                                        const std::string& variable) const {
  for (const auto& s : systems_) {
    if (s.variable == variable && same_sigma(s.sigma, sigma)) return &s;
  }
  if (!independent_) return nullptr;
  Sigma reduced;
  for (const auto& a : sigma) {
    bool modelled = std::any_of(
        systems_.begin(), systems_.end(),
        [&](const AppliedSystem& s) { return s.variable == a.variable; });
    if (!modelled) reduced.push_back(a);
  }
  for (const auto& s : systems_) {
    if (s.variable == variable && same_sigma(s.sigma, reduced)) return &s;
  }
  return nullptr;
}

double SystemSource::query(const Sigma& sigma, const Term& subject,
                           const Value& value) const {
  std::string var = atomic_subject(subject);
  deterministic_or_unknown(value);
  const AppliedSystem* s = find(sigma, var);
  if (s == nullptr) {
    fail(ErrorCode::kUnknownCondition,
         "no applied system for " + describe(sigma, var));
  }
  return value_probability(*s, value, schema_);
}

std::optional<Provenance> SystemSource::provenance() const {
  if (systems_.empty()) return std::nullopt;
  Provenance p{systems_[0].training, systems_[0].estimator};
  for (const auto& s : systems_) {
    if (!(Provenance{s.training, s.estimator} == p)) return std::nullopt;
  }
  return p;
}

std::optional<IndependenceFact> SystemSource::test_independence(
    const Sigma& sigma, const Term& t, const Term& u, double tol) const {
  (void)sigma;
  if (!independent_) return std::nullopt;
  return IndependenceFact{t, u, true, 0.0, tol};
}

}  // namespace tndpq
