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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <string>

#include "doctest.h"
#include "tndpq/tndpq.h"

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  tndpq_string_free(s);
  return out;
}

tndpq_schema* age_schema() {
  tndpq_schema* s = nullptr;
  REQUIRE(tndpq_schema_parse("Age = le20 | mid20_30 | gt30\n", &s) ==
          TNDPQ_OK);
  return s;
}

}  // namespace

TEST_CASE("exclusivity through the C interface") {
  tndpq_schema* s = age_schema();
  int ex = -1;
  char* trace = nullptr;
  CHECK(tndpq_exclusive(s, "Age", "le20 + gt30", "mid20_30", &ex, &trace) ==
        TNDPQ_OK);
  CHECK(ex == 1);
  CHECK_FALSE(take(trace).empty());
  CHECK(tndpq_exclusive(s, "Age", "le20", "~mid20_30", &ex, nullptr) ==
        TNDPQ_OK);
  CHECK(ex == 0);
  tndpq_schema_free(s);
}

TEST_CASE("errors map to status codes") {
  tndpq_schema* s = age_schema();
  char* out = nullptr;
  CHECK(tndpq_parse(s, "|> Age : old @ 0.5", &out) ==
        TNDPQ_UNKNOWN_SYMBOL);
  CHECK(std::string(tndpq_last_error()).find("old") != std::string::npos);
  CHECK(std::string(tndpq_status_name(TNDPQ_UNKNOWN_SYMBOL)) != "");
  CHECK(tndpq_parse(s, nullptr, &out) == TNDPQ_INVALID_ARGUMENT);
  tndpq_schema* bad = nullptr;
  CHECK(tndpq_schema_load("/nonexistent/schema", &bad) == TNDPQ_IO_ERROR);
  tndpq_schema_free(s);
}

TEST_CASE("parse returns the canonical form") {
  tndpq_schema* s = age_schema();
  char* out = nullptr;
  REQUIRE(tndpq_parse(s, "|>   Age:le20+gt30 @ .5", &out) == TNDPQ_OK);
  CHECK(take(out).rfind("|> Age : le20+gt30 @ 0.5", 0) == 0);
  tndpq_schema_free(s);
}

TEST_CASE("compare identical systems") {
  tndpq_schema* s = age_schema();
  tndpq_system* sys = nullptr;
  const std::string path = TNDPQ_TEST_DATA "/age_a.sys";
  REQUIRE(tndpq_system_load(s, path.c_str(), &sys) == TNDPQ_OK);
  size_t n = 0;
  CHECK(tndpq_system_size(sys, &n) == TNDPQ_OK);
  CHECK(n == 3);
  int verdict = -1;
  char* report = nullptr;
  CHECK(tndpq_compare(sys, sys, "jt", 0.0, TNDPQ_FORMAT_TSV, &verdict,
                      &report) == TNDPQ_OK);
  CHECK(verdict == 1);
  CHECK(take(report).find("kind\t") != std::string::npos);
  tndpq_system_free(sys);
  tndpq_schema_free(s);
}

TEST_CASE("selftest runs") {
  int passed = 0;
  char* report = nullptr;
  CHECK(tndpq_selftest(3, 20, &passed, &report) == TNDPQ_OK);
  CHECK(passed == 1);
  CHECK(take(report).find("seed\t3") != std::string::npos);
}
