// Copyright 2026 The bforge Authors
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


// Prints one PASS/FAIL line per acceptance criterion.

#include <cstdio>
#include <cstdlib>
#include <string>

#include "bforge/driver.hpp"

int main(int argc, char** argv) {
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
  const auto cs = bforge::run_acceptance(seed);
  bool ok = true;
  for (const auto& c : cs) {
    std::printf("Criterion %d: %s (%.2f s / %.0f s) %s\n", c.id, c.pass ? "PASS" : "FAIL",
                c.seconds, c.limit, c.title.c_str());
    for (const auto& f : c.failures) std::printf("    %s\n", f.c_str());
    ok = ok && c.pass;
  }
  return ok ? 0 : 1;
}
