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

#pragma once

#include <string>
#include <vector>

namespace testing_support {

struct GoldenCase {
  std::string name;
  std::string golden_file;
  // Text the template produced for the golden inputs.
  std::string actual;
  std::size_t message_count = 0;
  bool forbid_confidence = false;
  // Any message of the bundle mentions "Confidence".
  bool mentions_confidence = false;
};

// Every stored prompt golden paired with the prompt built from the golden
// inputs.
std::vector<GoldenCase> golden_cases();

}  // namespace testing_support
