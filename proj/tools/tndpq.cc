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

// Command-line front end over the C interface.
//
// Exit codes: 0 verdict true or success, 1 verdict false, 2 usage or data
// error.

#include <cstdio>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tndpq/tndpq.h"

namespace {

constexpr int kTrue = 0;
constexpr int kFalse = 1;
constexpr int kError = 2;

// Thrown to unwind with an exit code after a failed library call.
struct Exit {
  int code;
};

void check(tndpq_status s, const std::string& what) {
  if (s == TNDPQ_OK) return;
  std::cerr << "tndpq " << what << ": " << tndpq_status_name(s) << ": "
            << tndpq_last_error() << '\n';
  throw Exit{kError};
}

struct StringDeleter {
  void operator()(char* s) const { tndpq_string_free(s); }
};
using Text = std::unique_ptr<char, StringDeleter>;

struct SchemaDeleter {
  void operator()(tndpq_schema* p) const { tndpq_schema_free(p); }
};
struct TrainingDeleter {
  void operator()(tndpq_training* p) const { tndpq_training_free(p); }
};
struct SystemDeleter {
  void operator()(tndpq_system* p) const { tndpq_system_free(p); }
};
struct SourceDeleter {
  void operator()(tndpq_source* p) const { tndpq_source_free(p); }
};
using Schema = std::unique_ptr<tndpq_schema, SchemaDeleter>;
using Training = std::unique_ptr<tndpq_training, TrainingDeleter>;
using System = std::unique_ptr<tndpq_system, SystemDeleter>;
using Source = std::unique_ptr<tndpq_source, SourceDeleter>;

Schema load_schema(const std::string& path) {
  tndpq_schema* s = nullptr;
  check(tndpq_schema_load(path.c_str(), &s), "schema " + path);
  return Schema(s);
}

System load_system(const tndpq_schema* schema, const std::string& path) {
  tndpq_system* s = nullptr;
  check(tndpq_system_load(schema, path.c_str(), &s), "system " + path);
  return System(s);
}

bool is_csv(const std::string& path) {
  return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
}

// A source from either one CSV table or a list of system files. The
// trainings and systems are kept alive alongside the source.
struct LoadedSource {
  std::vector<Training> tables;
  std::vector<System> systems;
  Source source;
};

LoadedSource load_source(const tndpq_schema* schema,
                         const std::vector<std::string>& files,
                         const std::string& estimator) {
  LoadedSource out;
  if (files.size() == 1 && is_csv(files[0])) {
    tndpq_training* t = nullptr;
    check(tndpq_training_load(schema, files[0].c_str(), &t),
          "training " + files[0]);
    out.tables.emplace_back(t);
    tndpq_source* s = nullptr;
    check(tndpq_source_from_training(t, estimator.c_str(), &s), "source");
    out.source.reset(s);
    return out;
  }
  std::vector<const tndpq_system*> raw;
  for (const auto& f : files) {
    if (is_csv(f)) {
      std::cerr << "tndpq: a CSV source must be the only source file\n";
      throw Exit{kError};
    }
    out.systems.push_back(load_system(schema, f));
    raw.push_back(out.systems.back().get());
  }
  tndpq_source* s = nullptr;
  check(tndpq_source_from_systems(raw.data(), raw.size(), 1, &s), "source");
  out.source.reset(s);
  return out;
}

int verdict_line(const std::string& kind, bool verdict) {
  std::cout << "VERDICT " << kind << ' ' << (verdict ? "true" : "false")
            << '\n';
  return verdict ? kTrue : kFalse;
}

tndpq_format parse_format(const std::string& f) {
  return f == "tsv" ? TNDPQ_FORMAT_TSV : TNDPQ_FORMAT_HUMAN;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Derivations and trust checks for probabilistic classifiers"};
  app.require_subcommand(1);
  int code = kTrue;

  // parse
  auto* parse = app.add_subcommand("parse", "Print a judgment in canonical form");
  std::string schema_path, judgment;
  parse->add_option("schema", schema_path, "Schema file")->required();
  parse->add_option("judgment", judgment, "Judgment, probability optional")
      ->required();
  parse->callback([&] {
    Schema schema = load_schema(schema_path);
    char* out = nullptr;
    check(tndpq_parse(schema.get(), judgment.c_str(), &out), "parse");
    Text text(out);
    std::cout << text.get();
  });

  // learn
  auto* learn = app.add_subcommand("learn", "Materialize an applied system");
  std::string csv, sigma, target, estimator = "freq", output;
  learn->add_option("schema", schema_path, "Schema file")->required();
  learn->add_option("csv", csv, "Training data")->required();
  learn->add_option("--sigma", sigma, "Attribution list");
  learn->add_option("--target", target, "Target variable")->required();
  learn->add_option("--estimator", estimator, "freq or laplace:<alpha>");
  learn->add_option("-o,--output", output, "Output file")->required();
  learn->callback([&] {
    Schema schema = load_schema(schema_path);
    tndpq_training* t = nullptr;
    check(tndpq_training_load(schema.get(), csv.c_str(), &t), "training");
    Training table(t);
    tndpq_system* s = nullptr;
    check(tndpq_learn(t, sigma.c_str(), target.c_str(), estimator.c_str(), &s),
          "learn");
    System sys(s);
    check(tndpq_system_save(s, output.c_str()), "save");
    char* out = nullptr;
    check(tndpq_system_text(s, &out), "system");
    Text text(out);
    std::cout << text.get();
  });

  // derive
  auto* derive = app.add_subcommand("derive", "Run a proof script");
  std::vector<std::string> sources;
  std::string script;
  bool check_flag = false;
  derive->add_option("schema", schema_path, "Schema file")->required();
  derive->add_option("source", sources,
                     "One training CSV or any number of system files");
  derive->add_option("--script", script, "Proof script")->required();
  derive->add_option("--estimator", estimator, "Estimator for a CSV source");
  derive->add_flag("--check", check_flag, "Re-verify every concluded step");
  derive->callback([&] {
    Schema schema = load_schema(schema_path);
    LoadedSource src;
    if (!sources.empty()) src = load_source(schema.get(), sources, estimator);
    int ok = 0;
    char* out = nullptr;
    check(tndpq_derive(schema.get(), src.source.get(), script.c_str(),
                       check_flag ? 1 : 0, &ok, &out),
          "derive");
    Text text(out);
    std::cout << text.get();
    if (!ok) code = kError;
  });

  // exclusive
  auto* excl = app.add_subcommand("exclusive", "Decide mutual exclusivity");
  std::string term, left, right;
  bool explain = false;
  excl->add_option("schema", schema_path, "Schema file")->required();
  excl->add_option("term", term, "Term")->required();
  excl->add_option("value1", left, "First value")->required();
  excl->add_option("value2", right, "Second value")->required();
  excl->add_flag("--explain", explain, "Print the recursion trace");
  excl->callback([&] {
    Schema schema = load_schema(schema_path);
    int e = 0;
    char* out = nullptr;
    check(tndpq_exclusive(schema.get(), term.c_str(), left.c_str(),
                          right.c_str(), &e, &out),
          "exclusive");
    Text trace(out);
    if (explain) std::cout << trace.get();
    std::cout << (e ? "exclusive" : "not-exclusive") << '\n';
    code = e ? kTrue : kFalse;
  });

  // compare
  auto* compare = app.add_subcommand("compare", "Check a trust relation");
  std::string original, copy, kind = "jt", format = "human";
  double tol = 0.0;
  bool max_m = false;
  compare->add_option("schema", schema_path, "Schema file")->required();
  compare->add_option("original", original, "Original system")->required();
  compare->add_option("copy", copy, "Copy system")->required();
  compare->add_option("--kind", kind, "jt, et:<m>, wt:<m> or at:<m>");
  compare->add_option("--tol", tol, "Tolerance")->check(CLI::NonNegativeNumber);
  compare->add_option("--format", format, "human or tsv")
      ->check(CLI::IsMember({"human", "tsv"}));
  compare->add_flag("--max-m", max_m,
                    "Report the largest prefix for which the relation holds");
  compare->callback([&] {
    Schema schema = load_schema(schema_path);
    System o = load_system(schema.get(), original);
    System c = load_system(schema.get(), copy);
    if (max_m) {
      std::string rel = kind.substr(0, kind.find(':'));
      if (rel == "jt") {
        std::cerr << "tndpq: --max-m needs et, wt or at\n";
        throw Exit{kError};
      }
      std::size_t n = 0;
      check(tndpq_system_size(o.get(), &n), "system");
      std::size_t best = 0;
      for (std::size_t m = n; m >= 1 && best == 0; --m) {
        int v = 0;
        std::string k = rel + ":" + std::to_string(m);
        check(tndpq_compare(o.get(), c.get(), k.c_str(), tol,
                            parse_format(format), &v, nullptr),
              "compare");
        if (v) best = m;
      }
      std::cout << "max-m\t" << rel << '\t' << best << '\n';
      code = verdict_line(best ? rel + ":" + std::to_string(best) : rel,
                          best > 0);
      return;
    }
    int v = 0;
    char* out = nullptr;
    check(tndpq_compare(o.get(), c.get(), kind.c_str(), tol,
                        parse_format(format), &v, &out),
          "compare");
    Text report(out);
    std::cout << report.get();
    code = verdict_line(kind, v != 0);
  });

  // chain
  auto* chain = app.add_subcommand("chain", "Build diverging chains");
  std::string system_path, variant = "at";
  std::size_t m = 1, k = 2, l = 1, steps = 10;
  chain->add_option("schema", schema_path, "Schema file")->required();
  chain->add_option("system", system_path, "Seed system")->required();
  chain->add_option("--variant", variant, "at, nonet-at, wt, nonet-wt or et")
      ->check(CLI::IsMember({"at", "nonet-at", "wt", "nonet-wt", "et"}));
  chain->add_option("--m", m, "Prefix length")->required();
  chain->add_option("--k", k, "Donor atom, 1-based")->required();
  chain->add_option("--l", l, "Receiving atom, 1-based");
  chain->add_option("--steps", steps, "Chain length")->required();
  chain->add_option("--format", format, "human or tsv")
      ->check(CLI::IsMember({"human", "tsv"}));
  chain->callback([&] {
    Schema schema = load_schema(schema_path);
    System s = load_system(schema.get(), system_path);
    int certified = 0;
    char* out = nullptr;
    check(tndpq_chain(s.get(), variant.c_str(), m, k, l, steps,
                      parse_format(format), &certified, &out),
          "chain");
    Text table(out);
    std::cout << table.get();
    code = verdict_line("chain-" + variant, certified != 0);
  });

  // preserve
  auto* preserve = app.add_subcommand("preserve", "Check trust preservation");
  std::vector<std::string> orig_files, copy_files;
  std::string plan, mode = "construct";
  bool empirical = false;
  preserve->add_option("schema", schema_path, "Schema file")->required();
  preserve->add_option("--orig", orig_files, "Original sources")->required();
  preserve->add_option("--copy", copy_files, "Copy sources")->required();
  preserve->add_option("--plan", plan, "Plan script")->required();
  preserve->add_option("--kind", kind, "jt, et, at or wt")
      ->check(CLI::IsMember({"jt", "et", "at", "wt"}));
  preserve->add_option("--mode", mode, "construct or deconstruct")
      ->check(CLI::IsMember({"construct", "deconstruct"}));
  preserve->add_option("--estimator", estimator, "Estimator for CSV sources");
  preserve->add_option("--tol", tol, "Tolerance")
      ->check(CLI::NonNegativeNumber);
  preserve->add_option("--format", format, "human or tsv")
      ->check(CLI::IsMember({"human", "tsv"}));
  preserve->add_flag("--empirical", empirical,
                     "Compute a verdict where no theorem applies");
  preserve->callback([&] {
    Schema schema = load_schema(schema_path);
    LoadedSource o = load_source(schema.get(), orig_files, estimator);
    LoadedSource c = load_source(schema.get(), copy_files, estimator);
    int v = 0;
    char* out = nullptr;
    check(tndpq_preserve(schema.get(), o.source.get(), c.source.get(),
                         plan.c_str(), kind.c_str(), mode.c_str(),
                         empirical ? 1 : 0, tol, parse_format(format), &v,
                         &out),
          "preserve");
    Text report(out);
    std::cout << report.get();
    code = verdict_line(kind + "-" + mode, v != 0);
  });

  // selftest
  auto* selftest = app.add_subcommand("selftest", "Run the property suites");
  unsigned long long seed = 1;
  std::size_t cases = 200;
  selftest->add_option("--seed", seed, "Random seed");
  selftest->add_option("--cases", cases, "Cases per suite");
  selftest->callback([&] {
    int passed = 0;
    char* out = nullptr;
    check(tndpq_selftest(seed, cases, &passed, &out), "selftest");
    Text report(out);
    std::cout << report.get();
    code = verdict_line("selftest", passed != 0);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kError;
  } catch (const Exit& e) {
    return e.code;
  }
  return code;
}
