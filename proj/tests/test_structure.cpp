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

#include <catch_amalgamated.hpp>
#include <cmath>

#include "bforge/costs.hpp"
#include "bforge/fixtures.hpp"
#include "bforge/structure.hpp"

using namespace bforge;

namespace {

const cplx kI(0, 1);

Mat diag(std::initializer_list<cplx> d) {
  Mat m = Mat::Zero(d.size(), d.size());
  int i = 0;
  for (cplx x : d) {
    m(i, i) = x;
    ++i;
  }
  return m;
}

BipartiteOp a_controlled(const std::vector<Mat>& v) {
  const int dA = static_cast<int>(v.size()), dB = static_cast<int>(v[0].rows());
  Mat m = Mat::Zero(dA * dB, dA * dB);
  for (int k = 0; k < dA; ++k) m += tensor(ketbra(dA, k, k), v[k]);
  return BipartiteOp(dA, dB, m);
}

bool same_set(std::vector<Mat> a, std::vector<Mat> b) {
  if (a.size() != b.size()) return false;
  for (const auto& x : a) {
    bool found = false;
    for (auto it = b.begin(); it != b.end(); ++it)
      if (fro(*it - x) < 1e-12) {
        b.erase(it);
        found = true;
        break;
      }
    if (!found) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("block profiles", "[structure]") {
  const auto p = block_profile(fixtures::example4());
  REQUIRE(p.dA == 5);
  for (int c : p.col_counts) CHECK(c == 2);
  CHECK(p.is_permutation);
  CHECK(p.is_complex_permutation);
  int nonzero = 0;
  for (const auto& row : p.grid)
    for (bool b : row) nonzero += b;
  CHECK(nonzero == 10);

  const auto id = block_profile(fixtures::identity(3, 3));
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) CHECK(id.grid[j][k] == (j == k));
  for (int c : id.row_counts) CHECK(c == 1);

  const auto sw = block_profile(fixtures::swap());
  for (const auto& row : sw.grid)
    for (bool b : row) CHECK(b);

  const BipartiteOp phased(2, 2, fixtures::cnot().m * kI);
  CHECK_FALSE(block_profile(phased).is_permutation);
  CHECK(block_profile(phased).is_complex_permutation);
}

TEST_CASE("controlled form detection", "[structure]") {
  const auto cn = detect_controlled(fixtures::cnot(), Side::A);
  REQUIRE(cn);
  std::vector<Mat> ops;
  for (const auto& t : cn->terms) ops.push_back(t.op);
  CHECK(same_set(ops, {Mat::Identity(2, 2), pauli_x()}));
  CHECK(fro(cn->reconstruct() - fixtures::cnot().m) < 1e-12);

  CHECK_FALSE(detect_controlled(fixtures::swap(), Side::A));
  CHECK_FALSE(detect_controlled(fixtures::swap(), Side::B));

  const auto m3 = detect_controlled(fixtures::m_family(3), Side::A);
  REQUIRE(m3);
  CHECK(m3->terms.size() == 4);

  const auto ba = detect_controlled(fixtures::cnot_ba(), Side::B);
  REQUIRE(ba);
  CHECK(ba->terms.size() == 2);
  CHECK(fro(ba->reconstruct() - fixtures::cnot_ba().m) < 1e-12);
}

TEST_CASE("direct sums", "[structure]") {
  const auto uk = direct_sum_decompose(fixtures::uketbra11(), Side::A);
  REQUIRE(uk.size() == 2);
  CHECK(uk[0].support == std::vector<int>{0});
  CHECK(uk[1].support == std::vector<int>{1, 2});

  const BipartiteOp dense(2, 3, random_unitary(6, 4));
  CHECK(direct_sum_decompose(dense, Side::A).size() == 1);
  CHECK(direct_sum_decompose(dense, Side::B).size() == 1);

  const auto e1 = direct_sum_decompose(fixtures::example1(), Side::B);
  REQUIRE(e1.size() == 2);
  for (const auto& c : e1) CHECK(c.support.size() == 2);
}

TEST_CASE("rank-3 standard form", "[structure]") {
  SECTION("Example 1 family") {
    const auto f = rank3_standard_form(fixtures::example1());
    CHECK(f.branch == "b_direct_sum");
    CHECK(f.block1_dim == 0);
    REQUIRE(f.blocks.size() == 2);
    for (const auto& b : f.blocks) {
      CHECK(b.size == 2);
      CHECK(std::abs(b.alpha) < 1e-9);
      CHECK(std::abs(b.t3(0, 1) - b.t3(1, 0)) < 1e-9);
      CHECK(std::abs(b.t3(0, 1).imag()) < 1e-9);
      CHECK(b.t3(0, 1).real() > 0);
    }
    CHECK(f.reconstruction_error < 1e-9);
    CHECK(f.gauge_residual < 1e-9);
  }
  SECTION("simultaneously diagonal") {
    const auto u = a_controlled({diag({1, 1, 1}), diag({1, -1, 1}), diag({1, 1, -1})});
    REQUIRE(schmidt_rank(u) == 3);
    const auto f = rank3_standard_form(u);
    CHECK(f.simultaneously_diagonal);
    CHECK(f.block1_dim == 3);
    CHECK(fro(f.reconstruct() - u.m) < 1e-9);
  }
  SECTION("Example 2 instance") {
    const auto f = rank3_standard_form(fixtures::example2());
    CHECK(f.block1_dim == 0);
    CHECK(f.blocks.size() == 2);
    CHECK(f.reconstruction_error < 1e-9);
  }
  SECTION("branches are exclusive") {
    for (const auto& u : {fixtures::example1(), fixtures::example2(), fixtures::dihedral_b3(),
                          fixtures::m_family(3)}) {
      const auto f = rank3_standard_form(u);
      CHECK((f.branch == "a_direct_sum") != (f.branch == "b_direct_sum"));
      CHECK(fro(f.reconstruct() - u.m) < 1e-9);
    }
  }
  CHECK_THROWS_AS(rank3_standard_form(fixtures::cnot()), Error);
}

TEST_CASE("Example 2 relation is solvable for every b", "[structure]") {
  const auto bs = fixtures::example2_solve_b(0.5, 3.0, 16);
  CHECK(bs.size() == 16);
  CHECK_THROWS_AS(fixtures::example2_solve_b(0.5, 1.5), Error);
}

TEST_CASE("permutation types", "[structure]") {
  const auto e4 = permutation_type_partitions(fixtures::example4());
  CHECK(e4.input_A.size() == 3);
  CHECK(e4.relative_output == 2);
  CHECK(e4.output_B.size() == 2);
  const auto id = permutation_type_partitions(fixtures::identity());
  CHECK(id.input_A.size() == 1);
  CHECK(id.relative_output == 1);
  CHECK(id.output_B.size() == 1);
  CHECK(permutation_type_partitions(fixtures::m_family(3)).input_A.size() == 4);

  CHECK(loose_type_partition(fixtures::identity(), Side::A).size() == 1);
  CHECK(loose_type_partition(fixtures::example4(), Side::A).size() == 3);
  for (int r = 2; r <= 5; ++r)
    CHECK(loose_type_partition(fixtures::m_family(r), Side::A).size() == (1 << (r - 1)));
}

TEST_CASE("loose types never exceed 2^(r-1)", "[structure][property]") {
  std::vector<BipartiteOp> us{fixtures::example4(), fixtures::cnot(), fixtures::swap(),
                              fixtures::dcnot(), fixtures::uketbra11()};
  for (int r = 1; r <= 5; ++r) us.push_back(fixtures::m_family(std::max(r, 2)));
  for (int r = 1; r <= 5; ++r)
    for (std::uint64_t s = 0; s < 4; ++s) us.push_back(fixtures::random_permutation(r, 50 + s));
  for (const auto& u : us) {
    const int lim = 1 << (schmidt_rank(u) - 1);
    CHECK(loose_type_partition(u, Side::A).size() <= lim);
    CHECK(loose_type_partition(u, Side::B).size() <= lim);
  }
}

TEST_CASE("blocks of a big row or column are independent", "[structure][property]") {
  std::vector<BipartiteOp> us{fixtures::example4(), fixtures::uketbra11(), fixtures::ubigg(),
                              fixtures::mixed43(), fixtures::m_family(4)};
  for (std::uint64_t s = 0; s < 10; ++s) us.push_back(fixtures::random_permutation(1 + s % 4, s));
  for (const auto& u : us) {
    const int r = schmidt_rank(u);
    for (int j = 0; j < u.dA; ++j) {
      std::vector<Mat> row, col;
      for (int k = 0; k < u.dA; ++k) {
        if (fro(u.block(j, k)) > 1e-9) row.push_back(u.block(j, k));
        if (fro(u.block(k, j)) > 1e-9) col.push_back(u.block(k, j));
      }
      for (const auto* set : {&row, &col}) {
        CHECK(!set->empty());
        CHECK(static_cast<int>(set->size()) <= r);
        CHECK(span_rank(*set) == static_cast<int>(set->size()));
      }
    }
  }
}

TEST_CASE("partial permutations in a span", "[structure]") {
  for (int r = 2; r <= 5; ++r) {
    std::vector<Mat> basis;
    for (int k = 0; k < r; ++k) basis.push_back(ketbra(r, k, k));
    CHECK(span_partial_permutations(basis).size() == static_cast<size_t>((1 << r) - 1));
  }
}

TEST_CASE("covering subsets", "[structure]") {
  CHECK(covering_subsets({Mat::Identity(3, 3)}).size() == 1);
  CHECK(covering_subsets({ketbra(2, 0, 0), ketbra(2, 1, 1), Mat::Identity(2, 2)}).size() == 2);
  CHECK_THROWS_AS(covering_subsets({ketbra(2, 0, 0)}), Error);
  CHECK_THROWS_AS(covering_subsets({Mat::Identity(2, 2) * 2.0}), Error);

  // All partial permutations in the span of the m(3) blocks.
  const auto u = fixtures::m_family(3);
  std::vector<Mat> basis;
  for (int j = 0; j < u.dA; ++j)
    for (int k = 0; k < u.dA; ++k) {
      const Mat b = u.block(j, k);
      if (fro(b) < 1e-9) continue;
      auto trial = basis;
      trial.push_back(b);
      if (span_rank(trial) > static_cast<int>(basis.size())) basis.push_back(b);
    }
  REQUIRE(basis.size() == 3);
  const auto s = span_partial_permutations(basis);
  const auto cov = covering_subsets(s, 64);
  CHECK(!cov.empty());
  CHECK(BigInt(static_cast<long>(cov.size())) <= bell(4));
}

TEST_CASE("rank-3 permutation classification", "[structure]") {
  CHECK(classify_rank3_permutation(fixtures::uketbra11()).tag == "product+two-term");
  CHECK(classify_rank3_permutation(fixtures::perm_u_4terms()).tag == "controlled-4-term");
  const auto three = a_controlled({Mat::Identity(3, 3), shift(3, 1), shift(3, 2)});
  CHECK(classify_rank3_permutation(three).tag == "controlled-3-term");
  // Pieces whose outputs sit on other indices than their inputs need the
  // alignment step; seed 300 is one of them.
  for (std::uint64_t s = 0; s < 60; ++s) {
    const auto u = fixtures::random_permutation(3, 300 + s);
    const auto c = classify_rank3_permutation(u);
    CHECK(c.reconstruction_error <= 1e-9);
  }
  CHECK_THROWS_AS(classify_rank3_permutation(fixtures::cnot()), Error);
}

TEST_CASE("rank-2 standard form", "[structure]") {
  const auto cn = rank2_standard_form(fixtures::cnot(), false);
  CHECK(cn.side == Side::A);
  CHECK(cn.terms.size() == 2);
  const auto ba = rank2_standard_form(fixtures::cnot_ba(), false);
  CHECK(ba.side == Side::B);
  CHECK(fro(ba.reconstruct() - fixtures::cnot_ba().m) < 1e-12);

  const BipartiteOp ph(2, 3,
                       tensor(ketbra(2, 0, 0), Mat::Identity(3, 3)) +
                           tensor(ketbra(2, 1, 1), diag({kI, kI, 1})));
  REQUIRE(schmidt_rank(ph) == 2);
  const auto f = rank2_standard_form(ph, true);
  CHECK(f.terms.size() == 2);
  CHECK(fro(f.reconstruct() - ph.m) < 1e-12);
  CHECK_THROWS_AS(rank2_standard_form(ph, false), Error);

  for (std::uint64_t s = 0; s < 25; ++s) {
    const auto u = fixtures::random_permutation(2, 700 + s);
    CHECK(fro(rank2_standard_form(u, false).reconstruct() - u.m) <= 1e-9);
  }
}

TEST_CASE("partial transpose inequality", "[structure]") {
  const auto sw = partial_transpose_check(fixtures::swap());
  CHECK(sw.lhs_rank == 4);
  CHECK(sw.rhs_rank == 1);
  CHECK(sw.k == 4);
  CHECK(sw.holds);
  const auto id = partial_transpose_check(fixtures::identity());
  CHECK(id.lhs_rank == 4);
  CHECK(id.rhs_rank == 4);
  CHECK(id.k == 1);
  CHECK(id.holds);
  CHECK(partial_transpose_check(fixtures::ubigg()).holds);
}

TEST_CASE("fixtures", "[structure]") {
  const auto e4 = fixtures::example4();
  CHECK(e4.dA == 5);
  CHECK(e4.dB == 6);
  CHECK(is_permutation_matrix(e4.m));
  const auto m2 = fixtures::m_family(2);
  CHECK(m2.dA == 2);
  CHECK(m2.dB == 2);
  CHECK(detect_controlled(m2, Side::A)->terms.size() == 2);
  CHECK(schmidt_rank(fixtures::example1()) == 3);
  for (const auto& name : fixtures::names()) {
    const auto u = fixtures::by_name(name, {{"r", 3}, {"rank", 3}});
    CHECK(is_unitary(u.m));
  }
  CHECK_THROWS_AS(fixtures::by_name("nope"), Error);
}
