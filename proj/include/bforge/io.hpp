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

#include <json.hpp>
#include <string>

#include "bforge/classical.hpp"
#include "bforge/costs.hpp"
#include "bforge/entpower.hpp"
#include "bforge/linalg.hpp"
#include "bforge/locc.hpp"

namespace bforge::io {

using Json = nlohmann::ordered_json;

/** Serializes with every floating value printed as %.17g; NaN and infinities become null. */
std::string dump(const Json& j, int indent = 2);
/** Indented "key: value" rendering for --format text. */
std::string render_text(const Json& j);

/** Sparse perm form for complex permutations (unless dense is forced), dense otherwise. */
Json op_to_json(const BipartiteOp& u, bool force_dense = false, double tol = kDefaultTol);
/** Errors name the offending field, e.g. "matrix[2][1]: expected [re, im]". */
BipartiteOp op_from_json(const nlohmann::json& j);
/** Parse errors carry line and column. */
BipartiteOp parse_op(const std::string& text);
BipartiteOp read_op_file(const std::string& path);

Json to_json(const LogExpr& e);
Json to_json(const CostReport& r);
Json to_json(const locc::ProtocolTrace& t, bool events = true);
Json to_json(const entpower::ProductInput& in);
Json to_json(const entpower::Result& r);
Json to_json(const classical::CnotSynthesis& s);

/** Structure report: rank, block profile, controlled and direct-sum forms, types, costs. */
Json analyze(const BipartiteOp& u, double tol = kDefaultTol);

}  // namespace bforge::io
