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

#include "tndpq/trust.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "tndpq/exclusivity.h"

namespace tndpq {

std::string_view relation_name(Relation r) {
  switch (r) {
    case Relation::kJT: return "jt";
    case Relation::kET: return "et";
    case Relation::kWT: return "wt";
    case Relation::kAT: return "at";
  }
  return "?";
}

TrustKind TrustKind::prefix(Relation r, std::size_t m) {
  TrustKind k;
  k.relation = r;
  k.m = m;
  return k;
}

TrustKind TrustKind::set(Relation r, std::vector<Value> values) {
  TrustKind k;
  k.relation = r;
  k.set_based = true;
  k.values = std::move(values);
  return k;
}

TrustKind TrustKind::parse(std::string_view text) {
  auto colon = text.find(':');
  std::string_view head = text.substr(0, colon);
  TrustKind k;
  if (head == "jt") {
    k.relation = Relation::kJT;
  } else if (head == "et") {
    k.relation = Relation::kET;
  } else if (head == "wt") {
    k.relation = Relation::kWT;
  } else if (head == "at") {
    k.relation = Relation::kAT;
  } else {
    fail(ErrorCode::kParseError,
         "kind must be jt, et:<m>, wt:<m> or at:<m>, got '" +
             std::string(text) + "'");
  }
  if (k.relation == Relation::kJT) {
    if (colon != std::string_view::npos) {
      fail(ErrorCode::kParseError, "jt takes no prefix length");
    }
    return k;
  }
  if (colon == std::string_view::npos) {
    fail(ErrorCode::kParseError,
         std::string(head) + " needs a prefix length, e.g. " +
             std::string(head) + ":2");
  }
  auto num = text.substr(colon + 1);
  auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), k.m);
  if (ec != std::errc() || ptr != num.data() + num.size() || k.m == 0) {
    fail(ErrorCode::kParseError,
         "bad prefix length '" + std::string(num) + "'");
  }
  return k;
}

std::string TrustKind::name() const {
  std::string out(relation_name(relation));
  if (set_based) return out + "set";
  if (relation != Relation::kJT) out += ":" + std::to_string(m);
  return out;
}

// ---------------------------------------------------------------- Relations

namespace {

bool eq(double g, double f, double tol) { return std::fabs(g - f) <= tol; }
bool ge(double g, double f, double tol) { return g >= f - tol; }
bool zero(double p, double tol) { return std::fabs(p) <= tol; }

void require_sizes(const std::vector<double>& a, const std::vector<double>& b,
                   std::size_t m) {
  if (a.size() != b.size()) {
    fail(ErrorCode::kIncomparableSystems,
         "distributions have " + std::to_string(a.size()) + " and " +
             std::to_string(b.size()) + " atoms");
  }
  if (m > a.size()) {
    fail(ErrorCode::kPreconditionFailed,
         "prefix length " + std::to_string(m) + " exceeds " +
             std::to_string(a.size()) + " atoms");
  }
}

bool prefix_all(const std::vector<double>& g, const std::vector<double>& f,
                std::size_t m, double tol, bool (*cmp)(double, double, double)) {
  require_sizes(g, f, m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!cmp(g[i], f[i], tol)) return false;
  }
  return true;
}

bool same_zeros(const std::vector<double>& g, const std::vector<double>& f,
                double tol) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (zero(g[i], tol) != zero(f[i], tol)) return false;
  }
  return true;
}

}  // namespace

bool jt_holds(const std::vector<double>& copy,
              const std::vector<double>& original, double tol) {
  return prefix_all(copy, original, copy.size(), tol, eq);
}

bool et_holds(const std::vector<double>& copy,
              const std::vector<double>& original, std::size_t m, double tol) {
  return prefix_all(copy, original, m, tol, eq);
}

bool wt_holds(const std::vector<double>& copy,
              const std::vector<double>& original, std::size_t m, double tol) {
  return prefix_all(copy, original, m, tol, ge) &&
         same_zeros(copy, original, tol);
}

bool at_holds(const std::vector<double>& copy,
              const std::vector<double>& original, std::size_t m, double tol) {
  return prefix_all(copy, original, m, tol, ge);
}

bool relation_holds(Relation r, const std::vector<double>& copy,
                    const std::vector<double>& original, std::size_t m,
                    double tol) {
  switch (r) {
    case Relation::kJT: return jt_holds(copy, original, tol);
    case Relation::kET: return et_holds(copy, original, m, tol);
    case Relation::kWT: return wt_holds(copy, original, m, tol);
    case Relation::kAT: return at_holds(copy, original, m, tol);
  }
  return false;
}

// ---------------------------------------------------------------- Reports

void TrustReport::add(Evidence e) {
  if (!e.satisfied) {
    verdict = false;
    if (!failed_condition) {
      failed_condition = (e.where.empty() ? "" : e.where + ", ") + e.value +
                         ": " + e.condition;
    }
  }
  evidence.push_back(std::move(e));
}

void TrustReport::merge(const TrustReport& other) {
  for (const auto& e : other.evidence) add(e);
  for (const auto& n : other.notes) {
    if (std::find(notes.begin(), notes.end(), n) == notes.end()) {
      notes.push_back(n);
    }
  }
  empirical = empirical || other.empirical;
}

namespace {

constexpr const char* kEqual = "copy = original";
constexpr const char* kAtLeast = "copy >= original";
constexpr const char* kZeros = "copy zero iff original zero";

void compare_systems(const AppliedSystem& original, const AppliedSystem& copy,
                     TrustReport& report) {
  if (original.variable != copy.variable) {
    fail(ErrorCode::kIncomparableSystems,
         "systems target different variables: " + original.variable +
             " vs " + copy.variable);
  }
  if (original.distribution.size() != copy.distribution.size()) {
    fail(ErrorCode::kIncomparableSystems, "systems have different atoms");
  }
  for (std::size_t i = 0; i < original.distribution.size(); ++i) {
    if (original.distribution[i].first != copy.distribution[i].first) {
      fail(ErrorCode::kIncomparableSystems,
           "systems list atoms differently: " +
               original.distribution[i].first + " vs " +
               copy.distribution[i].first);
    }
  }
  if (!same_sigma(original.sigma, copy.sigma)) {
    fail(ErrorCode::kIncomparableSystems,
         "systems are applied to different attribution lists: '" +
             print_sigma(original.sigma) + "' vs '" +
             print_sigma(copy.sigma) + "'");
  }
  bool same_training = original.training == copy.training;
  bool same_estimator = original.estimator == copy.estimator;
  if (!same_training && !same_estimator) {
    report.notes.push_back(
        "warning: both components differ; training set and algorithm both "
        "changed, outside the one-component copy discipline");
  } else if (same_training && same_estimator) {
    report.notes.push_back(
        "note: original and copy share training set and algorithm");
  } else if (!same_training) {
    report.notes.push_back("copy with a different training set");
  } else {
    report.notes.push_back("copy with a different learning algorithm");
  }
}

void relevant_evidence(const AppliedSystem& original,
                       const AppliedSystem& copy, Relation relation,
                       const std::vector<bool>& relevant, double tol,
                       const std::string& where, TrustReport& report) {
  const auto& od = original.distribution;
  const auto& cd = copy.distribution;
  for (std::size_t i = 0; i < od.size(); ++i) {
    double f = od[i].second, g = cd[i].second;
    bool in = relation == Relation::kJT || relevant[i];
    if (in) {
      bool equal = relation == Relation::kJT || relation == Relation::kET;
      report.add(Evidence{where, od[i].first, f, g,
                          equal ? kEqual : kAtLeast,
                          equal ? eq(g, f, tol) : ge(g, f, tol)});
    }
    if (relation == Relation::kWT) {
      report.add(
          Evidence{where, od[i].first, f, g, kZeros, zero(g, tol) == zero(f, tol)});
    }
  }
}

}  // namespace

TrustReport check_local(const AppliedSystem& original,
                        const AppliedSystem& copy, const TrustKind& kind,
                        double tol) {
  if (kind.set_based) {
    fail(ErrorCode::kShapeMismatch,
         "value-set kinds apply to compound variables; use check_nonatomic");
  }
  TrustReport report;
  report.kind = kind.name();
  compare_systems(original, copy, report);
  std::size_t n = original.distribution.size();
  if (kind.relation != Relation::kJT && (kind.m < 1 || kind.m > n)) {
    fail(ErrorCode::kPreconditionFailed,
         "prefix length " + std::to_string(kind.m) + " outside 1.." +
             std::to_string(n));
  }
  std::vector<bool> relevant(n, false);
  for (std::size_t i = 0; i < kind.m && i < n; ++i) relevant[i] = true;
  relevant_evidence(original, copy, kind.relation, relevant, tol, "", report);
  return report;
}

TrustReport check_relevant(const AppliedSystem& original,
                           const AppliedSystem& copy, Relation relation,
                           const std::vector<std::string>& relevant,
                           double tol) {
  TrustReport report;
  report.kind = std::string(relation_name(relation)) + "(v)";
  compare_systems(original, copy, report);
  std::vector<bool> mask(original.distribution.size(), false);
  for (const auto& name : relevant) {
    bool found = false;
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (original.distribution[i].first == name) mask[i] = found = true;
    }
    if (!found) {
      fail(ErrorCode::kUnknownSymbol,
           "relevant value '" + name + "' is not an atom of " +
               original.variable);
    }
  }
  relevant_evidence(original, copy, relation, mask, tol, "", report);
  return report;
}

TrustReport check_general(const SystemSpec& original, const SystemSpec& copy,
                          const std::vector<Sigma>& sigmas,
                          const std::vector<std::string>& targets,
                          const RelevanceMap& v, Relation relation,
                          double tol) {
  TrustReport report;
  report.kind = "general " + std::string(relation_name(relation));
  for (const auto& sigma : sigmas) {
    for (const auto& a : targets) {
      std::string where = "sigma '" + print_sigma(sigma) + "', " + a;
      AppliedSystem o, c;
      try {
        o = conditional_distribution(*original.training, original.estimator,
                                     sigma, a);
        c = conditional_distribution(*copy.training, copy.estimator, sigma, a);
      } catch (const Error& e) {
        throw Error(e.code(), where + ": " + e.what());
      }
      std::vector<std::string> relevant;
      if (relation != Relation::kJT) {
        auto it = v.find(a);
        if (it == v.end()) {
          fail(ErrorCode::kPreconditionFailed,
               "relevance map has no entry for " + a);
        }
        relevant = it->second;
      }
      TrustReport local = check_relevant(o, c, relation, relevant, tol);
      for (auto& e : local.evidence) e.where = where;
      report.merge(local);
    }
  }
  return report;
}

// ---------------------------------------------------------------- Compound

namespace {

std::vector<Value> base_values(const Term& t, const Schema& schema) {
  std::vector<Value> out;
  switch (t.kind()) {
    case Term::Kind::kAtom: {
      const Variable* v = schema.find_variable(t.name());
      if (v == nullptr) {
        fail(ErrorCode::kUnknownSymbol, "unknown variable '" + t.name() + "'");
      }
      for (const auto& a : v->atoms) out.push_back(Value::atom(a));
      break;
    }
    case Term::Kind::kPair:
      for (const auto& l : base_values(t.left(), schema)) {
        for (const auto& r : base_values(t.right(), schema)) {
          out.push_back(Value::prod(l, r));
        }
      }
      break;
    case Term::Kind::kCond:
      for (const auto& l : base_values(t.left(), schema)) {
        for (const auto& r : base_values(t.right(), schema)) {
          out.push_back(Value::arrow(l, r));
        }
      }
      break;
    default:
      fail(ErrorCode::kShapeMismatch,
           "no values for unreduced projection '" + print_term(t) + "'");
  }
  return out;
}

}  // namespace

std::vector<Value> zero_probes(const Term& term, const Schema& schema) {
  Term t = reduce_projections(term);
  std::vector<Value> base = base_values(t, schema);
  std::vector<Value> out = base;
  for (std::size_t i = 0; i < base.size(); ++i) {
    for (std::size_t j = i + 1; j < base.size(); ++j) {
      if (exclusive(t, base[i], base[j], schema)) {
        out.push_back(Value::disj(base[i], base[j]));
      }
    }
  }
  return out;
}

TrustReport check_nonatomic(const ProbabilitySource& original,
                            const ProbabilitySource& copy, const Term& term,
                            const Sigma& sigma, const TrustKind& kind,
                            const Schema& schema, double tol,
                            const DeriveOptions& opts) {
  if (!kind.set_based) {
    fail(ErrorCode::kShapeMismatch,
         "compound variables take value-set kinds (jtset, etset, wtset, "
         "atset)");
  }
  TrustReport report;
  report.kind = kind.name();
  Term t = reduce_projections(term);
  auto prob = [&](const ProbabilitySource& s, const Value& v) {
    return derive_value(s, sigma, t, v, schema, opts).conclusion.probability;
  };
  std::vector<Value> checked = kind.values;
  bool with_probes =
      kind.relation == Relation::kWT || kind.relation == Relation::kJT;
  if (with_probes) {
    for (auto& p : zero_probes(t, schema)) {
      if (std::find(checked.begin(), checked.end(), p) == checked.end()) {
        checked.push_back(std::move(p));
      }
    }
    report.notes.push_back(
        "zero clause checked over the listed values plus " +
        std::to_string(checked.size() - kind.values.size()) +
        " negation-free probes");
  }
  for (std::size_t i = 0; i < checked.size(); ++i) {
    const Value& v = checked[i];
    bool listed = i < kind.values.size();
    double f = prob(original, v);
    double g = prob(copy, v);
    std::string name = print_value(v);
    switch (kind.relation) {
      case Relation::kJT:
        report.add(Evidence{"", name, f, g, kEqual, eq(g, f, tol)});
        break;
      case Relation::kET:
        report.add(Evidence{"", name, f, g, kEqual, eq(g, f, tol)});
        break;
      case Relation::kAT:
        report.add(Evidence{"", name, f, g, kAtLeast, ge(g, f, tol)});
        break;
      case Relation::kWT:
        if (listed) {
          report.add(Evidence{"", name, f, g, kAtLeast, ge(g, f, tol)});
        }
        report.add(
            Evidence{"", name, f, g, kZeros, zero(g, tol) == zero(f, tol)});
        break;
    }
  }
  return report;
}

// ---------------------------------------------------------------- Algebra

bool PropertyReport::ok() const {
  for (const auto& r : rows) {
    if (r.failures != 0) return false;
  }
  return et_not_wt.has_value() && wt_not_et.has_value();
}

namespace {

std::string show(const std::vector<double>& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    out += (i ? ", " : "") + print_probability(v[i]);
  }
  return out + ")";
}

class AlgebraRun {
 public:
  explicit AlgebraRun(double tol) : tol_(tol) {}

  PropertyReport report;

  // Records an implication instance; vacuous ones are not counted.
  void implies(const char* table, const char* name, bool antecedent,
               bool consequent, const std::string& context) {
    PropertyRow& row = find(table, name);
    if (!antecedent) return;
    ++row.checked;
    if (!consequent) {
      if (row.failures++ == 0) row.counterexample = context;
    }
  }

  double tol() const { return tol_; }

 private:
  PropertyRow& find(const char* table, const char* name) {
    for (auto& r : report.rows) {
      if (r.name == name) return r;
    }
    report.rows.push_back(PropertyRow{table, name, 0, 0, {}});
    return report.rows.back();
  }

  double tol_;
};

}  // namespace

PropertyReport verify_algebra(const std::vector<SystemTriple>& samples,
                              double tol) {
  AlgebraRun run(tol);
  constexpr const char* kT5 = "fundamental";
  constexpr const char* kT6 = "coordination";
  struct Named {
    Relation r;
    const char* trans;
    const char* trans2;
    const char* refl;
    const char* weak;
  };
  const Named graded[] = {
      {Relation::kET, "ET transitivity", "ET transitivity'", "ET reflexivity",
       "ET weakening"},
      {Relation::kWT, "WT transitivity", "WT transitivity'", "WT reflexivity",
       "WT weakening"},
      {Relation::kAT, "AT transitivity", "AT transitivity'", "AT reflexivity",
       "AT weakening"},
  };
  for (const auto& [a, b, c] : samples) {
    if (a.size() != b.size() || a.size() != c.size() || a.empty()) {
      fail(ErrorCode::kIncomparableSystems,
           "algebra samples must share their atom count");
    }
    const std::size_t n = a.size();
    std::string ab = "a=" + show(a) + " b=" + show(b);
    std::string abc = ab + " c=" + show(c);
    bool jt_ab = jt_holds(a, b, tol);
    bool jt_ba = jt_holds(b, a, tol);
    bool jt_bc = jt_holds(b, c, tol);
    run.implies(kT5, "JT reflexivity", true, jt_holds(a, a, tol), ab);
    run.implies(kT5, "JT symmetry", jt_ab, jt_ba, ab);
    run.implies(kT5, "JT transitivity", jt_ab && jt_bc, jt_holds(a, c, tol),
                abc);

    for (std::size_t m = 1; m <= n; ++m) {
      std::string abm = ab + " m=" + std::to_string(m);
      bool et = et_holds(a, b, m, tol);
      bool wt = wt_holds(a, b, m, tol);
      bool at = at_holds(a, b, m, tol);
      for (const auto& g : graded) {
        bool ab_m = relation_holds(g.r, a, b, m, tol);
        run.implies(kT5, g.refl, true, relation_holds(g.r, a, a, m, tol), abm);
        run.implies(kT5, g.trans2, ab_m && relation_holds(g.r, b, c, m, tol),
                    relation_holds(g.r, a, c, m, tol), abc + " m=" +
                    std::to_string(m));
        for (std::size_t l = 1; l <= n; ++l) {
          std::string ml = " m=" + std::to_string(m) + " l=" + std::to_string(l);
          std::size_t lo = std::min(m, l);
          run.implies(kT5, g.trans, ab_m && relation_holds(g.r, b, c, l, tol),
                      relation_holds(g.r, a, c, lo, tol), abc + ml);
          if (l <= m) {
            run.implies(kT5, g.weak, ab_m, relation_holds(g.r, a, b, l, tol),
                        ab + ml);
          }
        }
      }
      for (std::size_t l = 1; l <= m; ++l) {
        run.implies(kT5, "ET symmetry", et, et_holds(b, a, l, tol),
                    ab + " m=" + std::to_string(m) + " l=" + std::to_string(l));
      }

      run.implies(kT6, "AT Bottom", et || wt || jt_ab, at, abm);
      run.implies(kT6, "JT Top", jt_ab, at && et && wt, abm);
      run.implies(kT6, "JT Top'", jt_ab, et && wt, abm);
      run.implies(kT6, "m=n to Top", (et || wt || at) && m == n, jt_ab, abm);
      run.implies(kT6, "AT + m=n = Top", at && m == n, jt_ab, abm);
      for (std::size_t l = 1; l <= n; ++l) {
        std::string ml = ab + " m=" + std::to_string(m) + " l=" +
                         std::to_string(l);
        std::size_t lo = std::min(m, l);
        run.implies(kT6, "Semi-Antisymmetry AT",
                    at && at_holds(b, a, l, tol), et_holds(a, b, lo, tol), ml);
        run.implies(kT6, "Semi-Antisymmetry WT",
                    wt && wt_holds(b, a, l, tol), et_holds(a, b, lo, tol), ml);
      }

      if (et && !wt && !run.report.et_not_wt) run.report.et_not_wt = abm;
      if (wt && !et && !run.report.wt_not_et) run.report.wt_not_et = abm;
    }
  }
  return std::move(run.report);
}

TrustReport compose_square(const std::vector<double>& a0,
                           const std::vector<double>& b0,
                           const std::vector<double>& a1,
                           const std::vector<double>& b1, std::size_t m,
                           double tol) {
  if (m == 0 || m > a0.size()) {
    fail(ErrorCode::kPreconditionFailed, "prefix length out of range");
  }
  if (!jt_holds(a0, b0, tol)) {
    fail(ErrorCode::kPreconditionFailed,
         "hypothesis a0 JT b0 fails: a0=" + show(a0) + " b0=" + show(b0));
  }
  if (!et_holds(a1, a0, m, tol)) {
    fail(ErrorCode::kPreconditionFailed,
         "hypothesis a1 ET(" + std::to_string(m) + ") a0 fails: a1=" +
             show(a1) + " a0=" + show(a0));
  }
  if (!at_holds(b1, b0, m, tol)) {
    fail(ErrorCode::kPreconditionFailed,
         "hypothesis b1 AT(" + std::to_string(m) + ") b0 fails: b1=" +
             show(b1) + " b0=" + show(b0));
  }
  TrustReport report;
  report.kind = "at:" + std::to_string(m);
  for (std::size_t i = 0; i < m; ++i) {
    report.add(Evidence{"b1 vs a1", "#" + std::to_string(i + 1), a1[i], b1[i],
                        kAtLeast, ge(b1[i], a1[i], tol)});
  }
  return report;
}

// ---------------------------------------------------------------- Chains

std::string_view chain_variant_name(ChainVariant v) {
  switch (v) {
    case ChainVariant::kAT: return "at";
    case ChainVariant::kNonEtAT: return "nonet-at";
    case ChainVariant::kWT: return "wt";
    case ChainVariant::kNonEtWT: return "nonet-wt";
    case ChainVariant::kET: return "et";
  }
  return "?";
}

std::optional<ChainVariant> chain_variant_from_name(std::string_view name) {
  for (auto v : {ChainVariant::kAT, ChainVariant::kNonEtAT, ChainVariant::kWT,
                 ChainVariant::kNonEtWT, ChainVariant::kET}) {
    if (chain_variant_name(v) == name) return v;
  }
  return std::nullopt;
}

ChainReport build_chain(const std::vector<double>& a0,
                        const std::vector<double>& b0, std::size_t m,
                        std::size_t k, ChainVariant variant, std::size_t steps,
                        std::size_t l, double tol) {
  const std::size_t n = a0.size();
  auto pre = [](const std::string& msg) {
    fail(ErrorCode::kPreconditionFailed, msg);
  };
  if (b0.size() != n) pre("a0 and b0 have different atom counts");
  if (!jt_holds(a0, b0, tol)) pre("a0 JT b0 does not hold");
  if (m < 1 || m >= n) pre("need 1 <= m < n");
  if (k < m + 1 || k > n) pre("k must lie in m+1..n");
  if (zero(a0[k - 1], tol)) pre("the frequency of atom k is zero");

  Relation rel = Relation::kAT;
  bool non_et = false;
  std::size_t r = 1;  // receiving atom
  switch (variant) {
    case ChainVariant::kNonEtAT:
      non_et = true;
      [[fallthrough]];
    case ChainVariant::kAT:
      break;
    case ChainVariant::kNonEtWT:
      non_et = true;
      if (l < 1 || l > m) pre("the non-ET WT chain needs 1 <= l <= m");
      [[fallthrough]];
    case ChainVariant::kWT:
      rel = Relation::kWT;
      if (l < 1 || l > n || l == k) pre("l must be an atom index other than k");
      if (zero(a0[l - 1], tol)) pre("the frequency of atom l is zero");
      r = l;
      break;
    case ChainVariant::kET:
      rel = Relation::kET;
      if (l < m + 1 || l > n || l == k) pre("the ET chain needs l in m+1..n, l != k");
      if (zero(a0[l - 1], tol)) pre("the frequency of atom l is zero");
      r = l;
      break;
  }

  ChainReport report{variant, m, k, l, {}, true, {}};
  ChainStep s0;
  s0.f = a0;
  s0.g = b0;
  s0.cross_jt = jt_holds(s0.g, s0.f, tol);
  s0.cross_et = et_holds(s0.g, s0.f, m, tol);
  report.steps.push_back(std::move(s0));
  for (std::size_t i = 1; i <= steps; ++i) {
    const ChainStep& prev = report.steps.back();
    ChainStep s;
    s.f = prev.f;
    s.g = prev.g;
    s.f[r - 1] = prev.f[r - 1] + prev.f[k - 1] / 2.0;
    s.f[k - 1] = prev.f[k - 1] / 2.0;
    s.g[r - 1] = prev.g[r - 1] + prev.g[k - 1] / 3.0;
    s.g[k - 1] = prev.g[k - 1] * 2.0 / 3.0;
    s.a_to_parent = relation_holds(rel, s.f, prev.f, m, tol);
    s.b_to_parent = relation_holds(rel, s.g, prev.g, m, tol);
    s.cross_jt = jt_holds(s.g, s.f, tol);
    s.cross_et = et_holds(s.g, s.f, m, tol);
    std::string at = "step " + std::to_string(i) + ": ";
    if (!s.a_to_parent) report.failures.push_back(at + "chain a breaks the relation");
    if (!s.b_to_parent) report.failures.push_back(at + "chain b breaks the relation");
    if (s.cross_jt) report.failures.push_back(at + "chains are JT");
    if (non_et && s.cross_et) report.failures.push_back(at + "chains are ET(m)");
    report.steps.push_back(std::move(s));
  }
  report.certified = report.failures.empty();
  return report;
}

}  // namespace tndpq
