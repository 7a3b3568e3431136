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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bforge/io.hpp"
#include "bforge/locc.hpp"

namespace bforge {

struct SimulateOptions {
  locc::RunOptions run;
  /** pauli-A, pauli-B, klein or dihedral */
  std::string group = "pauli-B";
  /** Extra empty terms for ct-ext. */
  int extra_terms = 2;
  bool force_mixed = false;
};

/** ct, ct-ext, two-level, group, ptl2, ptl3 */
std::vector<std::string> protocol_names();
std::vector<std::string> group_names();

/** Runs a protocol by name; unknown names raise Error listing the valid ones. */
locc::ProtocolTrace simulate(const std::string& protocol, const BipartiteOp& u,
                             const SimulateOptions& opts = {});

struct Criterion {
  int id = 0;
  std::string title;
  bool pass = false;
  double seconds = 0;
  double limit = 0;
  std::vector<std::string> details;
  std::vector<std::string> failures;
};

/** Runs one acceptance criterion (1..7). */
Criterion run_criterion(int id, std::uint64_t seed = 1);
std::vector<Criterion> run_acceptance(std::uint64_t seed = 1);
/** Timings are left out unless asked for, so the output is reproducible. */
io::Json to_json(const std::vector<Criterion>& cs, bool timing = false);

}  // namespace bforge
