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

#include "tndpq/script.h"

#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace tndpq {

namespace {

[[noreturn]] void script_error(int line, const std::string& msg) {
  fail(ErrorCode::kParseError, "script line " + std::to_string(line) + ": " +
                                   msg);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_number(std::string_view s, int line) {
  s = trim(s);
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    script_error(line, "bad number '" + std::string(s) + "'");
  }
  return v;
}

// Splits off a double-quoted string at the front of `s`.
std::string take_quoted(std::string_view& s, int line) {
  s = trim(s);
  if (s.empty() || s.front() != '"') script_error(line, "expected '\"'");
  auto end = s.find('"', 1);
  if (end == std::string_view::npos) script_error(line, "unterminated string");
  std::string out(s.substr(1, end - 1));
  s.remove_prefix(end + 1);
  return out;
}

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

void parse_options(std::string_view s, PlanStep& step, int line) {
  for (const auto& w : words(s)) {
    auto eq = w.find('=');
    if (eq == std::string::npos) script_error(line, "bad option '" + w + "'");
    std::string key = w.substr(0, eq);
    std::string val = w.substr(eq + 1);
    if (key == "dir") {
      if (val == "fwd") {
        step.direction = Direction::kForward;
      } else if (val == "bwd") {
        step.direction = Direction::kBackward;
      } else {
        script_error(line, "dir must be fwd or bwd");
      }
    } else if (key == "var") {
      step.variable = val;
    } else if (key == "indep") {
      if (val != "assert") script_error(line, "indep accepts only 'assert'");
      step.assert_independence = true;
    } else if (key == "tol") {
      step.independence_tolerance = parse_number(val, line);
    } else {
      script_error(line, "unknown option '" + key + "'");
    }
  }
}

}  // namespace

Script parse_script(std::string_view text, const Schema& schema) {
  Script script;
  std::set<std::string> ids;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = trim(raw);
    if (s.empty() || s.front() == '#') continue;

    if (s.substr(0, 4) == "fact" && s.size() > 4 &&
        std::isspace(static_cast<unsigned char>(s[4]))) {
      s.remove_prefix(4);
      std::string body = take_quoted(s, line);
      if (!trim(s).empty()) script_error(line, "trailing text after fact");
      try {
        script.facts.push_back(parse_judgment(body, schema));
      } catch (const Error& e) {
        script_error(line, e.what());
      }
      continue;
    }

    auto eq = s.find('=');
    if (eq == std::string_view::npos) script_error(line, "expected 'id ='");
    PlanStep step;
    step.line = line;
    step.id = std::string(trim(s.substr(0, eq)));
    if (step.id.empty() || words(step.id).size() != 1) {
      script_error(line, "bad step id");
    }
    if (!ids.insert(step.id).second) {
      script_error(line, "duplicate step id '" + step.id + "'");
    }
    s = trim(s.substr(eq + 1));

    auto bar = s.find('|');
    // A '|' inside a quoted query is part of '|>'.
    if (!s.empty() && s.find('"') != std::string_view::npos) {
      auto close = s.rfind('"');
      bar = s.find('|', close);
    }
    if (bar != std::string_view::npos) {
      parse_options(s.substr(bar + 1), step, line);
      s = trim(s.substr(0, bar));
    }

    auto at = s.rfind('@');
    if (at != std::string_view::npos &&
        (s.find('"') == std::string_view::npos || at > s.rfind('"'))) {
      step.claimed = parse_number(s.substr(at + 1), line);
      s = trim(s.substr(0, at));
    }

    auto sp = s.find_first_of(" \t");
    std::string name(s.substr(0, sp));
    auto rule = rule_from_name(name);
    if (!rule) script_error(line, "unknown rule '" + name + "'");
    step.rule = *rule;
    s = sp == std::string_view::npos ? std::string_view{} : s.substr(sp);

    if (step.rule == RuleId::kAtQuery) {
      std::string body = take_quoted(s, line);
      if (!trim(s).empty()) script_error(line, "trailing text after query");
      try {
        step.query = parse_query(body, schema);
      } catch (const Error& e) {
        script_error(line, e.what());
      }
    } else {
      step.operands = words(s);
      if (step.operands.size() != rule_arity(step.rule)) {
        script_error(line, std::string(rule_name(step.rule)) + " takes " +
                               std::to_string(rule_arity(step.rule)) +
                               " operands");
      }
    }
    script.steps.push_back(std::move(step));
  }
  return script;
}

Script load_script(const std::string& path, const Schema& schema) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open script '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_script(buf.str(), schema);
}

std::string print_script(const Script& script) {
  std::ostringstream out;
  for (const auto& f : script.facts) {
    out << "fact \"" << print_judgment(f) << "\"\n";
  }
  for (const auto& s : script.steps) {
    out << s.id << " = " << rule_name(s.rule);
    if (s.rule == RuleId::kAtQuery) {
      out << " \"" << print_query(s.query) << '"';
    }
    for (const auto& o : s.operands) out << ' ' << o;
    if (s.claimed) out << " @ " << print_probability(*s.claimed);
    std::vector<std::string> opts;
    if (s.direction == Direction::kBackward) opts.push_back("dir=bwd");
    if (!s.variable.empty()) opts.push_back("var=" + s.variable);
    if (s.assert_independence) opts.push_back("indep=assert");
    if (!opts.empty()) {
      out << " |";
      for (const auto& o : opts) out << ' ' << o;
    }
    out << '\n';
  }
  return out.str();
}

namespace {

std::string emit(const Derivation& d, Script& script) {
  PlanStep step;
  step.rule = d.rule;
  step.direction = d.direction;
  if (d.rule == RuleId::kAtQuery) {
    step.query = d.conclusion;
  } else {
    for (const auto& p : d.premises) step.operands.push_back(emit(p, script));
  }
  if (d.rule == RuleId::kImpIE && d.direction == Direction::kForward) {
    Term s = reduce_projections(d.conclusion.subject);
    if (s.kind() == Term::Kind::kCond && s.left().is_atom()) {
      step.variable = s.left().name();
    }
  }
  for (const auto& sc : d.side_conditions) {
    if (const auto* f = std::get_if<IndependenceFact>(&sc)) {
      step.assert_independence = f->asserted;
      step.independence_tolerance = f->tolerance;
    }
  }
  step.id = "s" + std::to_string(script.steps.size() + 1);
  step.line = static_cast<int>(script.steps.size() + 1);
  script.steps.push_back(step);
  return step.id;
}

}  // namespace

Script script_from_derivation(const Derivation& d) {
  Script script;
  emit(d, script);
  return script;
}

ScriptRun run_script(const Script& script, const Schema& schema,
                     const ProbabilitySource* source,
                     const std::map<std::string, Derivation>& inputs,
                     const RunOptions& options) {
  FactSource facts(script.facts);
  std::vector<const ProbabilitySource*> chain{&facts};
  if (source != nullptr) chain.push_back(source);
  ChainSource combined(chain);

  ScriptRun run;
  std::set<std::string> used;
  auto lookup = [&](const std::string& id, int line) -> const Derivation& {
    if (auto it = run.steps.find(id); it != run.steps.end()) {
      used.insert(id);
      return it->second;
    }
    if (auto it = inputs.find(id); it != inputs.end()) return it->second;
    script_error(line, "unknown operand '" + id + "'");
  };

  for (const auto& step : script.steps) {
    if (options.permit != nullptr && step.rule != RuleId::kAtQuery &&
        !options.permit(step.rule, step.direction)) {
      fail(ErrorCode::kRuleNotAllowed,
           "line " + std::to_string(step.line) + ": " +
               std::string(rule_name(step.rule)) +
               (step.direction == Direction::kBackward ? " (bwd)" : "") +
               " is not permitted in " +
               (options.restriction ? options.restriction : "this plan"));
    }
    Derivation d;
    try {
      if (step.rule == RuleId::kAtQuery) {
        d = at_query(combined, step.query.sigma, step.query.subject,
                     step.query.value);
      } else {
        std::vector<Derivation> premises;
        for (const auto& o : step.operands) {
          premises.push_back(lookup(o, step.line));
        }
        RuleOptions ro;
        ro.direction = step.direction;
        ro.variable = step.variable;
        ro.source = &combined;
        ro.independence_tolerance = step.independence_tolerance;
        if (step.assert_independence && step.rule == RuleId::kProdIIndep) {
          ro.independence = IndependenceFact{
              premises[0].conclusion.subject, premises[1].conclusion.subject,
              true, 0.0, step.independence_tolerance};
        }
        d = apply_rule(step.rule, std::move(premises), schema, ro);
      }
    } catch (const Error& e) {
      throw Error(e.code(), "step '" + step.id + "' (line " +
                                std::to_string(step.line) + "): " + e.what());
    }
    if (options.adopt_claims && step.claimed) {
      d.conclusion.probability = *step.claimed;
    }
    run.order.push_back(step.id);
    run.steps.emplace(step.id, std::move(d));
  }
  if (run.order.empty()) fail(ErrorCode::kParseError, "script has no steps");
  for (const auto& id : run.order) {
    if (!used.count(id)) run.roots.push_back(id);
  }
  return run;
}

}  // namespace tndpq
