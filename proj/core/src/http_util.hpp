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

#include <httplib.h>

#include <chrono>
#include <memory>
#include <string>
#include <string_view>

namespace labeldebate::detail {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // path prefix without a trailing slash, may be empty
};

SplitUrl split_url(std::string_view url);

// A fresh client per call: httplib clients are not safe to share across
// threads issuing concurrent requests.
std::unique_ptr<httplib::Client> make_client(const std::string& origin,
                                             std::chrono::milliseconds timeout);

std::string describe(httplib::Error error);

}  // namespace labeldebate::detail
