// Copyright 2026 The comag Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef COMAG_TESTS_TEST_UTIL_HPP_
#define COMAG_TESTS_TEST_UTIL_HPP_

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace comag_test {

inline std::string read_fixture(const std::string& name) {
  const std::string path = std::string(COMAG_FIXTURES_DIR) + "/" + name;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace comag_test

#endif  // COMAG_TESTS_TEST_UTIL_HPP_
