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

#include "tndpq/tndpq.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <iomanip>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "tndpq/calculus.h"
#include "tndpq/construction.h"
#include "tndpq/exclusivity.h"
#include "tndpq/script.h"
#include "tndpq/selftest.h"
#include "tndpq/systems.h"
#include "tndpq/trust.h"

struct tndpq_schema {
  std::shared_ptr<const tndpq::Schema> schema;
};

struct tndpq_training {
  std::shared_ptr<const tndpq::Schema> schema;
  tndpq::TrainingSet table;
};

struct tndpq_system {
  std::shared_ptr<const tndpq::Schema> schema;
  tndpq::AppliedSystem system;
};

struct tndpq_source {
  std::shared_ptr<const tndpq::Schema> schema;
  std::unique_ptr<tndpq::ProbabilitySource> base;
  std::unique_ptr<tndpq::DerivingSource> deriving;
};

namespace {

thread_local std::string last_error;

tndpq_status status_of(tndpq::ErrorCode code) {
  return static_cast<tndpq_status>(static_cast<int>(code) + 1);
}

tndpq_status invalid(const char* what) {
  last_error = std::string("invalid argument: ") + what;
  return TNDPQ_INVALID_ARGUMENT;
}

// Runs `body` and turns exceptions into status codes.
template <typename F>
tndpq_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return TNDPQ_OK;
  } catch (const tndpq::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return TNDPQ_INTERNAL_ERROR;
  } catch (const std::exception& e) {
    last_error = e.what();
    return TNDPQ_INTERNAL_ERROR;
  }
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit(char** out, const std::string& s) {
  if (out) *out = dup(s);
}

void attach_source(tndpq_source& src) {
  src.deriving =
      std::make_unique<tndpq::DerivingSource>(*src.base, *src.schema);
}

std::string number(double p) {
  std::ostringstream os;
  os << std::setprecision(12) << p;
  return os.str();
}

std::string vector_text(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += number(v[i]);
  }
  return out;
}

std::string format_report(const tndpq::TrustReport& r, tndpq_format format) {
  std::ostringstream os;
  if (format == TNDPQ_FORMAT_TSV) {
    os << "kind\t" << r.kind << '\n';
    for (const auto& e : r.evidence) {
      os << "evidence\t" << e.where << '\t' << e.value << '\t'
         << number(e.p_original) << '\t' << number(e.p_copy) << '\t'
         << e.condition << '\t' << (e.satisfied ? "ok" : "fail") << '\n';
    }
    for (const auto& n : r.notes) os << "note\t" << n << '\n';
    if (r.failed_condition) os << "failed\t" << *r.failed_condition << '\n';
    os << "empirical\t" << (r.empirical ? "true" : "false") << '\n';
    return os.str();
  }
  os << "trust check " << r.kind << '\n';
  for (const auto& n : r.notes) os << "  " << n << '\n';
  for (const auto& e : r.evidence) {
    os << "  " << (e.satisfied ? "ok  " : "FAIL") << "  ";
    if (!e.where.empty()) os << e.where << "  ";
    os << e.value << "  original " << number(e.p_original) << "  copy "
       << number(e.p_copy) << "  (" << e.condition << ")\n";
  }
  if (r.failed_condition) os << "  failed: " << *r.failed_condition << '\n';
  if (r.empirical) os << "  verdict is empirical\n";
  return os.str();
}

}  // namespace

extern "C" {

const char* tndpq_last_error(void) { return last_error.c_str(); }

const char* tndpq_status_name(tndpq_status status) {
  switch (status) {
    case TNDPQ_OK:
      return "Ok";
    case TNDPQ_INVALID_ARGUMENT:
      return "InvalidArgument";
    case TNDPQ_INTERNAL_ERROR:
      return "InternalError";
    default:
      if (status > TNDPQ_OK && status <= TNDPQ_IO_ERROR) {
        return tndpq::error_code_name(
                   static_cast<tndpq::ErrorCode>(status - 1))
            .data();
      }
      return "Unknown";
  }
}

void tndpq_string_free(char* s) { std::free(s); }

tndpq_status tndpq_schema_load(const char* path, tndpq_schema** out) {
  if (!path || !out) return invalid("schema_load");
  return guarded([&] {
    auto s = std::make_shared<tndpq::Schema>(tndpq::Schema::load(path));
    *out = new tndpq_schema{std::move(s)};
  });
}

tndpq_status tndpq_schema_parse(const char* text, tndpq_schema** out) {
  if (!text || !out) return invalid("schema_parse");
  return guarded([&] {
    auto s = std::make_shared<tndpq::Schema>(tndpq::Schema::parse(text));
    *out = new tndpq_schema{std::move(s)};
  });
}

void tndpq_schema_free(tndpq_schema* schema) { delete schema; }

tndpq_status tndpq_parse(const tndpq_schema* schema, const char* judgment,
                         char** canonical) {
  if (!schema || !judgment || !canonical) return invalid("parse");
  return guarded([&] {
    tndpq::Judgment j = tndpq::parse_query(judgment, *schema->schema);
    std::string line = std::isnan(j.probability) ? tndpq::print_query(j)
                                                 : tndpq::print_judgment(j);
    line += "\n" + tndpq::print_term(tndpq::reduce_projections(j.subject));
    *canonical = dup(line + "\n");
  });
}

tndpq_status tndpq_exclusive(const tndpq_schema* schema, const char* term,
                             const char* left, const char* right,
                             int* exclusive, char** trace) {
  if (!schema || !term || !left || !right || !exclusive) {
    return invalid("exclusive");
  }
  return guarded([&] {
    const tndpq::Schema& s = *schema->schema;
    auto d = tndpq::decide_exclusive(tndpq::parse_term(term, s),
                                     tndpq::parse_value(left, s),
                                     tndpq::parse_value(right, s), s);
    std::string text;
    for (const auto& line : d.trace) text += line + "\n";
    *exclusive = d.exclusive ? 1 : 0;
    emit(trace, text);
  });
}

tndpq_status tndpq_training_load(const tndpq_schema* schema,
                                 const char* csv_path, tndpq_training** out) {
  if (!schema || !csv_path || !out) return invalid("training_load");
  return guarded([&] {
    auto t = std::make_unique<tndpq_training>();
    t->schema = schema->schema;
    t->table = tndpq::load_training_set(csv_path, *schema->schema);
    *out = t.release();
  });
}

void tndpq_training_free(tndpq_training* training) { delete training; }

tndpq_status tndpq_learn(const tndpq_training* training, const char* sigma,
                         const char* target, const char* estimator,
                         tndpq_system** out) {
  if (!training || !target || !out) return invalid("learn");
  return guarded([&] {
    const tndpq::Schema& s = *training->schema;
    tndpq::Sigma sg = sigma && *sigma ? tndpq::parse_sigma(sigma, s)
                                      : tndpq::Sigma{};
    tndpq::Estimator est =
        tndpq::Estimator::parse(estimator && *estimator ? estimator : "freq");
    auto sys = std::make_unique<tndpq_system>();
    sys->schema = training->schema;
    sys->system =
        tndpq::conditional_distribution(training->table, est, sg, target);
    *out = sys.release();
  });
}

tndpq_status tndpq_system_load(const tndpq_schema* schema, const char* path,
                               tndpq_system** out) {
  if (!schema || !path || !out) return invalid("system_load");
  return guarded([&] {
    auto sys = std::make_unique<tndpq_system>();
    sys->schema = schema->schema;
    sys->system = tndpq::load_applied_system(path, *schema->schema);
    *out = sys.release();
  });
}

tndpq_status tndpq_system_save(const tndpq_system* system, const char* path) {
  if (!system || !path) return invalid("system_save");
  return guarded([&] {
    tndpq::save_applied_system(system->system, path, *system->schema);
  });
}

tndpq_status tndpq_system_text(const tndpq_system* system, char** text) {
  if (!system || !text) return invalid("system_text");
  return guarded([&] {
    *text = dup(tndpq::applied_system_to_text(system->system, *system->schema));
  });
}

tndpq_status tndpq_system_size(const tndpq_system* system, size_t* atoms) {
  if (!system || !atoms) return invalid("system_size");
  *atoms = system->system.distribution.size();
  return TNDPQ_OK;
}

void tndpq_system_free(tndpq_system* system) { delete system; }

tndpq_status tndpq_source_from_training(const tndpq_training* training,
                                        const char* estimator,
                                        tndpq_source** out) {
  if (!training || !out) return invalid("source_from_training");
  return guarded([&] {
    auto src = std::make_unique<tndpq_source>();
    src->schema = training->schema;
    src->base = std::make_unique<tndpq::TableSource>(
        training->table,
        tndpq::Estimator::parse(estimator && *estimator ? estimator : "freq"));
    attach_source(*src);
    *out = src.release();
  });
}

tndpq_status tndpq_source_from_systems(const tndpq_system* const* systems,
                                       size_t count, int independent_variables,
                                       tndpq_source** out) {
  if (!systems || count == 0 || !out) return invalid("source_from_systems");
  return guarded([&] {
    std::vector<tndpq::AppliedSystem> list;
    for (size_t i = 0; i < count; ++i) {
      if (!systems[i]) tndpq::fail(tndpq::ErrorCode::kIo, "null system");
      if (systems[i]->schema != systems[0]->schema) {
        tndpq::fail(tndpq::ErrorCode::kSchemaMismatch,
                    "systems were loaded against different schemas");
      }
      list.push_back(systems[i]->system);
    }
    auto src = std::make_unique<tndpq_source>();
    src->schema = systems[0]->schema;
    src->base = std::make_unique<tndpq::SystemSource>(
        std::move(list), *src->schema, independent_variables != 0);
    attach_source(*src);
    *out = src.release();
  });
}

void tndpq_source_free(tndpq_source* source) { delete source; }

tndpq_status tndpq_compare(const tndpq_system* original,
                           const tndpq_system* copy, const char* kind,
                           double tol, tndpq_format format, int* verdict,
                           char** report) {
  if (!original || !copy || !kind || !verdict) return invalid("compare");
  if (!(tol >= 0)) return invalid("tolerance must be >= 0");
  return guarded([&] {
    tndpq::TrustReport r = tndpq::check_local(
        original->system, copy->system, tndpq::TrustKind::parse(kind), tol);
    *verdict = r.verdict ? 1 : 0;
    emit(report, format_report(r, format));
  });
}

tndpq_status tndpq_chain(const tndpq_system* system, const char* variant,
                         size_t m, size_t k, size_t l, size_t steps,
                         tndpq_format format, int* certified, char** table) {
  if (!system || !variant || !certified) return invalid("chain");
  return guarded([&] {
    auto v = tndpq::chain_variant_from_name(variant);
    if (!v) {
      tndpq::fail(tndpq::ErrorCode::kParseError,
                  std::string("unknown chain variant '") + variant + "'");
    }
    std::vector<double> base = system->system.probabilities();
    tndpq::ChainReport r = tndpq::build_chain(base, base, m, k, *v, steps, l);
    std::ostringstream os;
    const char* sep = format == TNDPQ_FORMAT_TSV ? "\t" : "  ";
    os << "step" << sep << "a" << sep << "b" << sep << "a-parent" << sep
       << "b-parent" << sep << "jt" << sep << "et\n";
    for (std::size_t i = 0; i < r.steps.size(); ++i) {
      const auto& s = r.steps[i];
      os << i << sep << vector_text(s.f) << sep << vector_text(s.g) << sep
         << (s.a_to_parent ? "yes" : "no") << sep
         << (s.b_to_parent ? "yes" : "no") << sep
         << (s.cross_jt ? "yes" : "no") << sep << (s.cross_et ? "yes" : "no")
         << '\n';
    }
    for (const auto& f : r.failures) os << "failure: " << f << '\n';
    *certified = r.certified ? 1 : 0;
    emit(table, os.str());
  });
}

tndpq_status tndpq_derive(const tndpq_schema* schema,
                          const tndpq_source* source, const char* script_path,
                          int check, int* ok, char** report) {
  if (!schema || !script_path || !ok) return invalid("derive");
  if (source && source->schema != schema->schema) {
    return invalid("source and schema differ");
  }
  return guarded([&] {
    const tndpq::Schema& s = *schema->schema;
    tndpq::Script script = tndpq::load_script(script_path, s);
    const tndpq::ProbabilitySource* src =
        source ? source->deriving.get() : nullptr;
    tndpq::RunOptions opts;
    opts.adopt_claims = check != 0;
    tndpq::ScriptRun run = tndpq::run_script(script, s, src, {}, opts);
    std::ostringstream os;
    for (const auto& id : run.order) {
      os << id << '\t' << tndpq::print_judgment(run.steps.at(id).conclusion)
         << '\n';
    }
    bool good = true;
    if (check) {
      tndpq::FactSource facts(script.facts);
      tndpq::ChainSource chained(src ? std::vector<const tndpq::ProbabilitySource*>{&facts, src}
                                     : std::vector<const tndpq::ProbabilitySource*>{&facts});
      for (const auto& root : run.roots) {
        tndpq::CheckReport cr =
            tndpq::check_derivation(run.steps.at(root), s, &chained);
        for (const auto& v : cr.violations) {
          good = false;
          os << "violation\t" << root << '\t' << v.path << '\t'
             << tndpq::violation_kind_name(v.kind) << '\t' << v.message
             << '\n';
        }
      }
      os << "check\t" << (good ? "ok" : "failed") << '\n';
    }
    *ok = good ? 1 : 0;
    emit(report, os.str());
  });
}

tndpq_status tndpq_preserve(const tndpq_schema* schema,
                            const tndpq_source* original,
                            const tndpq_source* copy, const char* plan_path,
                            const char* kind, const char* mode, int empirical,
                            double tol, tndpq_format format, int* verdict,
                            char** report) {
  if (!schema || !original || !copy || !plan_path || !kind || !mode ||
      !verdict) {
    return invalid("preserve");
  }
  if (!(tol >= 0)) return invalid("tolerance must be >= 0");
  return guarded([&] {
    const tndpq::Schema& s = *schema->schema;
    std::string k = kind;
    tndpq::Relation rel;
    if (k == "jt") {
      rel = tndpq::Relation::kJT;
    } else if (k == "et") {
      rel = tndpq::Relation::kET;
    } else if (k == "at") {
      rel = tndpq::Relation::kAT;
    } else if (k == "wt") {
      rel = tndpq::Relation::kWT;
    } else {
      tndpq::fail(tndpq::ErrorCode::kParseError,
                  "unknown kind '" + k + "'; expected jt, et, at or wt");
    }
    std::string md = mode;
    tndpq::PlanMode pm;
    if (md == "construct") {
      pm = tndpq::PlanMode::kConstruct;
    } else if (md == "deconstruct") {
      pm = tndpq::PlanMode::kDeconstruct;
    } else {
      tndpq::fail(tndpq::ErrorCode::kParseError,
                  "unknown mode '" + md +
                      "'; expected construct or deconstruct");
    }
    tndpq::Script plan = tndpq::load_script(plan_path, s);
    tndpq::PreservationOptions opts;
    opts.allow_empirical = empirical != 0;
    opts.tol = tol;
    tndpq::TrustReport r = tndpq::verify_preservation(
        *original->deriving, *copy->deriving, {}, {}, plan, rel, pm, s, opts);
    *verdict = r.verdict ? 1 : 0;
    emit(report, format_report(r, format));
  });
}

tndpq_status tndpq_selftest(unsigned long long seed, size_t cases,
                            int* passed, char** report) {
  if (!passed) return invalid("selftest");
  return guarded([&] {
    tndpq::SelftestOptions opts;
    opts.seed = seed;
    opts.cases = cases;
    auto results = tndpq::run_selftest(opts);
    std::ostringstream os;
    os << "seed\t" << seed << '\n';
    bool all = true;
    for (const auto& r : results) {
      all = all && r.failures == 0;
      os << (r.failures == 0 ? "pass" : "FAIL") << '\t' << r.name << '\t'
         << r.cases << " cases\t" << r.failures << " failures\t"
         << std::fixed << std::setprecision(3) << r.seconds << "s"
         << std::defaultfloat << '\n';
      if (r.failures) os << "  first failure: " << r.first_failure << '\n';
    }
    *passed = all ? 1 : 0;
    emit(report, os.str());
  });
}

}  // extern "C"
