// Copyright 2026 The labeldebate Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include "fixtures.hpp"
#include "golden_cases.hpp"

#include <set>
#include <string>

using testing_support::golden_dir;
using testing_support::read_file;

TEST_CASE("built prompts match the stored goldens") {
  const auto cases = testing_support::golden_cases();
  std::set<std::string> files;
  for (const auto& c : cases) {
    CAPTURE(c.name);
    CHECK(c.actual == read_file(golden_dir() / c.golden_file));
    if (c.forbid_confidence) CHECK_FALSE(c.mentions_confidence);
    files.insert(c.golden_file);
  }
  CHECK(files.size() == 11);
}

TEST_CASE("debate prompts replay the agent's own answer as an assistant turn") {
  for (const auto& c : testing_support::golden_cases()) {
    CAPTURE(c.name);
    if (c.name.starts_with("debate")) {
      CHECK(c.message_count == 3);
    }
  }
}
