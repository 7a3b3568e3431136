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
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "bforge/linalg.hpp"

namespace bforge::entpower {

/** alpha on A (x) R_A and beta on B (x) R_B, system index most significant. */
struct ProductInput {
  Vec alpha;
  Vec beta;
  int dRA = 1;
  int dRB = 1;
};

struct Config {
  int restarts = 64;
  /** Stop when one accepted step improves the entropy by less than this. */
  double tol = 1e-9;
  int max_iter = 2000;
  /** Default to dA and dB. */
  std::optional<int> dRA, dRB;
  std::uint64_t seed = 1;
};

struct Result {
  double best_value = 0;
  ProductInput best_input;
  int restarts = 0;
  bool converged = false;
  std::vector<double> history;
  double upper_bound = 0;
};

/** Entanglement (ebits) of (U (x) I) |alpha>|beta> across A R_A : B R_B. */
double output_entanglement(const BipartiteOp& u, const ProductInput& in);

Result maximize(const BipartiteOp& u, const Config& cfg = {});

/** Closed-form inputs: "I.1" (params m, n, q), "I.3", "II", "III". */
ProductInput fixture_inputs(const std::string& tag,
                            const nlohmann::json& params = nlohmann::json::object());
/** The operator each closed-form input belongs to. */
BipartiteOp fixture_operator(const std::string& tag,
                             const nlohmann::json& params = nlohmann::json::object());
/** Expected output entanglement of the closed-form input. */
double fixture_value(const std::string& tag);
std::vector<std::string> fixture_tags();

}  // namespace bforge::entpower
