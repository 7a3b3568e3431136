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

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "bforge/linalg.hpp"

namespace bforge {

struct BlockProfile {
  int dA = 0;
  int dB = 0;
  std::vector<std::vector<bool>> grid;
  std::vector<int> row_counts;
  std::vector<int> col_counts;
  bool is_permutation = false;
  bool is_complex_permutation = false;
  BipartiteOp op;

  Mat block(int j, int k) const { return op.block(j, k); }
};

BlockProfile block_profile(const BipartiteOp& u, double tol = kDefaultTol);
bool is_permutation_matrix(const Mat& m, double tol = kDefaultTol);
bool is_complex_permutation_matrix(const Mat& m, double tol = kDefaultTol);

struct ControlTerm {
  std::vector<int> support;
  Mat op;
};

/**
 * Side A: U = (post_A (x) post_B) (sum_k P_k (x) V_k) (pre_A (x) pre_B),
 * side B: the same with sum_k V_k (x) P_k. Local factors are complex
 * permutation matrices.
 */
struct ControlledForm {
  Side side = Side::A;
  int dA = 0;
  int dB = 0;
  std::vector<ControlTerm> terms;
  Mat pre_A, post_A, pre_B, post_B;

  int control_dim() const { return side == Side::A ? dA : dB; }
  int target_dim() const { return side == Side::A ? dB : dA; }
  Mat core() const;
  Mat reconstruct() const;
};

std::optional<ControlledForm> detect_controlled(const BipartiteOp& u, Side side,
                                                bool up_to_phase = false,
                                                double tol = kDefaultTol);

struct Component {
  std::vector<int> support;
  BipartiteOp op;
};

std::vector<Component> direct_sum_decompose(const BipartiteOp& u, Side side,
                                            double tol = kDefaultTol);

struct Rank3Block {
  int offset = 0;
  int size = 0;
  Mat t2;
  Mat t3;
  double alpha = 0;
};

struct Rank3StandardForm {
  std::vector<int> s1, s2, s3;
  int w3_rank = 0;
  /** "a_direct_sum" when W3 has rank at most two, "b_direct_sum" otherwise. */
  std::string branch;
  bool has_b_form = false;
  bool simultaneously_diagonal = false;
  std::string b_form_note;
  int block1_dim = 0;
  std::vector<Rank3Block> blocks;
  Mat t2, t3;
  std::vector<std::array<cplx, 3>> coefficients;
  Mat a_post, b_post, b_pre;
  double reconstruction_error = 0;
  double gauge_residual = 0;

  Mat reconstruct() const;
};

Rank3StandardForm rank3_standard_form(const BipartiteOp& u,
                                      double tol = kDefaultTol);

struct TypePartition {
  std::string kind;
  std::vector<std::vector<int>> classes;

  int size() const { return static_cast<int>(classes.size()); }
  /** Class index of each basis element. */
  std::vector<int> labels(int n) const;
};

struct PermutationTypes {
  TypePartition input_A;
  int relative_output = 0;
  std::vector<int> relative_output_per_class;
  TypePartition output_B;
  /** Indices (row, col) of the blocks chosen as the basis for output_B. */
  std::vector<std::pair<int, int>> basis_blocks;
};

PermutationTypes permutation_type_partitions(const BipartiteOp& u,
                                             double tol = kDefaultTol);
TypePartition loose_type_partition(const BipartiteOp& u, Side side,
                                   double tol = kDefaultTol);

std::vector<std::vector<int>> covering_subsets(const std::vector<Mat>& s,
                                               std::size_t cap = 20,
                                               double tol = kDefaultTol);
/** Nonzero partial permutations in the span of linearly independent ones. */
std::vector<Mat> span_partial_permutations(const std::vector<Mat>& basis,
                                           double tol = kDefaultTol);

struct Rank3Classification {
  /** controlled-3-term, controlled-4-term or product+two-term. */
  std::string tag;
  std::optional<ControlledForm> controlled;
  Side sum_side = Side::A;
  /** Permutation applied to the outputs on the sum side before splitting. */
  Mat alignment;
  std::vector<Component> product_part;
  std::vector<Component> two_term_part;
  std::optional<ControlledForm> two_term_form;
  double reconstruction_error = 0;
};

Rank3Classification classify_rank3_permutation(const BipartiteOp& u,
                                               double tol = kDefaultTol);

ControlledForm rank2_standard_form(const BipartiteOp& u, bool complex,
                                   double tol = kDefaultTol);

struct PartialTransposeCheck {
  int lhs_rank = 0;
  int rhs_rank = 0;
  int k = 0;
  bool holds = false;
};

Mat partial_transpose_B(const BipartiteOp& u);
PartialTransposeCheck partial_transpose_check(const BipartiteOp& u, int k = 0,
                                              double tol = kDefaultTol);

/** Embed a component back into the full space: E (x) I on the given side. */
Mat embed_component(const Component& c, const BipartiteOp& full, Side side);

}  // namespace bforge
