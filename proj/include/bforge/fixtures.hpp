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
#include <string>
#include <vector>

#include "bforge/linalg.hpp"

namespace bforge::fixtures {

BipartiteOp identity(int dA = 2, int dB = 2);
BipartiteOp cnot();
/** CNOT with B as the control. */
BipartiteOp cnot_ba();
BipartiteOp swap();
/** cnot_ba * cnot: |a,b> -> |b, a^b>. */
BipartiteOp dcnot();
BipartiteOp cz();

/** 5x6 permutation with blocks T1..T4. */
BipartiteOp example4();
/** 2^(r-1) distinct diagonal blocks, Schmidt rank r. */
BipartiteOp m_family(int r);
/** sum_k V_k (x) |k><k| with V_k = X^k on C^r. */
BipartiteOp controlled_b_family(int r);

struct Example1Params {
  std::vector<double> t{0.0, 1.0};
  std::vector<double> thetas{0.4, 0.9, 1.3};
  std::vector<double> phis{0.3, 1.1, 2.0};
};
BipartiteOp example1(const Example1Params& p = {});

struct Example2Params {
  double t = 0.5;
  std::vector<double> ys{3.0, 4.0};
  std::vector<double> bs{0.5, 0.8};
};
BipartiteOp example2(const Example2Params& p = {});
/** Accepted b for given (t, y); empty when none exists in (0, 1]. */
std::vector<double> example2_solve_b(double t, double y, int grid = 64);

BipartiteOp uketbra11();
/** D1 (x) I + D2 (x) (I_m + I_n + X_q + X_p) + D3 (x) (I_m + X_n + I_q + X_p), X a cyclic shift. */
BipartiteOp case_i(int m, int n, int q, int p);
BipartiteOp case_i1();
BipartiteOp case_i3();
BipartiteOp perm_u_4terms();
/** Small instance of the n = 2 nested direct-sum shape for complex permutations. */
BipartiteOp ubigg();

/** Product part plus controlled parts on disjoint A subspaces, mixed control sides. */
BipartiteOp mixed6();
BipartiteOp mixed43();
BipartiteOp flip_or_cnot();
/** A-controlled, rank 3, B = C^2 (+) C^1 direct sum. */
BipartiteOp dihedral_b3();

/** Random permutation unitary of the given Schmidt rank with dA, dB <= 4. */
BipartiteOp random_permutation(int rank, std::uint64_t seed);
/** Local permutations applied to both sides. */
BipartiteOp permute_locally(const BipartiteOp& u, std::uint64_t seed);

std::vector<std::string> names();
/** Dispatch by name; params may carry r, dA, dB, seed, rank, t, ys, bs, thetas, phis. */
BipartiteOp by_name(const std::string& name, const nlohmann::json& params = nlohmann::json::object());

Mat permutation_matrix(const std::vector<int>& image);

}  // namespace bforge::fixtures
