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
#include "bforge/locc.hpp"

using namespace bforge;
using Catch::Matchers::WithinAbs;

TEST_CASE("Bell numbers", "[costs]") {
  const int want[] = {1, 1, 2, 5, 15, 52, 203, 877, 4140};
  for (int n = 0; n <= 8; ++n) CHECK(bell(n) == want[n]);
  CHECK(bell(20) == BigInt("51724158235372"));
}

TEST_CASE("rank-3 bound", "[costs]") {
  const auto a = bound_rank3(100, 2);
  CHECK_THAT(a.ebits, WithinAbs(2, 1e-12));
  CHECK_THAT(a.cbits, WithinAbs(4, 1e-12));
  CHECK_THAT(bound_rank3(3, 2).ebits, WithinAbs(std::log2(3.0), 1e-12));
  CHECK_THAT(bound_rank3(100, 3).ebits, WithinAbs(std::log2(6.0), 1e-12));
  CHECK_THROWS_AS(bound_rank3(2, 2), Error);
  CHECK_THROWS_AS(bound_rank3(3, 1), Error);
  for (int dA = 3; dA <= 64; ++dA)
    for (int dB = 2; dB <= 64; ++dB) {
      const double e = bound_rank3(dA, dB).ebits;
      CHECK(e <= std::log2(dA) + 1e-12);
      CHECK(e <= 2 * std::log2(dB) + 1e-12);
    }
}

TEST_CASE("permutation bound", "[costs]") {
  CHECK(bound_permutation(1).ebits == 0);
  CHECK_THAT(bound_permutation(2).ebits, WithinAbs(1, 1e-12));
  const auto r3 = bound_permutation(3);
  CHECK_THAT(r3.ebits, WithinAbs(2, 1e-12));
  CHECK_THAT(r3.cbits, WithinAbs(4, 1e-12));
  const auto r4 = bound_permutation(4);
  CHECK_THAT(r4.ebits, WithinAbs(std::log2(52.0 * 2 * 16), 1e-12));
  CHECK(r4.ebits < 10.71);
  CHECK(r4.source == "rank4-corollary");
  const double r5 = std::log2(203.0) + 5 + std::log2(5.0);
  CHECK_THAT(bound_permutation(5).ebits, WithinAbs(r5, 1e-12));
  CHECK_THAT(bound_permutation(5).ebits, WithinAbs(14.987, 1e-3));
  for (int r = 5; r <= 40; ++r) {
    const double first = log2_big(bell(r + 1)) + r + std::log2(r);
    CHECK_THAT(bound_permutation(r).ebits, WithinAbs(std::min(first, 8.0 * r - 8), 1e-9));
    CHECK_THAT(bound_permutation(r).cbits, WithinAbs(2 * bound_permutation(r).ebits, 1e-9));
  }
}

TEST_CASE("permutation bound is monotone", "[costs][property]") {
  for (int r = 1; r < 12; ++r) CHECK(bound_permutation(r).ebits <= bound_permutation(r + 1).ebits);
}

TEST_CASE("first term beats 8r-8 below 1100", "[costs][property]") {
  for (int r = 4; r <= 1099; ++r) {
    if (!permutation_first_term_smaller(r)) FAIL("crossover at r = " << r);
  }
  CHECK_FALSE(permutation_first_term_smaller(1));
  CHECK_FALSE(permutation_first_term_smaller(1636));
}

TEST_CASE("classical bound", "[costs]") {
  CHECK(bound_classical(2, true) == 8);
  CHECK(bound_classical(2, false) == 2);
  CHECK(bound_classical(4, true) == 24);
  CHECK(bound_classical(1, true) == 0);
  CHECK(bound_classical(1, false) == 0);
}

TEST_CASE("controlled bound", "[costs]") {
  CHECK_THAT(bound_controlled(2).ebits, WithinAbs(1, 1e-12));
  CHECK_THAT(bound_controlled(2).cbits, WithinAbs(2, 1e-12));
  CHECK(bound_controlled(1).ebits == 0);
  CHECK_THAT(bound_controlled(8).ebits, WithinAbs(3, 1e-12));
  CHECK_THROWS_AS(bound_controlled(0), Error);
}

TEST_CASE("symbolic expressions", "[costs]") {
  const auto e = LogExpr::log(3) + LogExpr::number(2);
  CHECK_THAT(e.value(), WithinAbs(std::log2(3.0) + 2, 1e-15));
  CHECK_THAT(e.scaled(2).value(), WithinAbs(2 * e.value(), 1e-15));
  CHECK(!e.str().empty());
}

TEST_CASE("recommendations", "[costs]") {
  const auto e4 = recommend(fixtures::example4());
  CHECK_THAT(e4.ebits, WithinAbs(std::log2(12.0), 1e-9));
  bool saw_teleport = false;
  for (const auto& a : e4.alternatives)
    if (std::abs(a.ebits.value() - 2 * std::log2(5.0)) < 1e-9) saw_teleport = true;
  CHECK(saw_teleport);
  CHECK_THAT(recommend(fixtures::cnot()).ebits, WithinAbs(1, 1e-12));
  CHECK(recommend(fixtures::identity()).ebits == 0);
  for (std::uint64_t s = 0; s < 5; ++s)
    CHECK(recommend(fixtures::random_permutation(3, 900 + s)).ebits <= 2 + 1e-12);
  CHECK(!recommend(BipartiteOp(2, 3, random_unitary(6, 2))).alternatives.empty());
}

TEST_CASE("ledgers stay within the bounds", "[costs][property]") {
  for (const auto& u : {fixtures::example4(), fixtures::m_family(3), fixtures::cnot(),
                        fixtures::uketbra11()}) {
    const int r = schmidt_rank(u);
    const auto t = locc::run_permutation_ptl2(u);
    CHECK(t.pass);
    const double slack = 3.0;  // each of the three stages rounds its log up to a qubit count at most
    CHECK(t.ledger.ebits <= log2_big(bell(r + 1)) + r + std::log2(std::max(r, 1)) + slack);
    const auto t3 = locc::run_permutation_ptl3(u);
    CHECK(t3.pass);
    CHECK(t3.ledger.ebits <= 8.0 * r - 8 + 1e-9);
  }
  const auto c = locc::run_basic_controlled(fixtures::cnot(),
                                            *detect_controlled(fixtures::cnot(), Side::A));
  CHECK(c.ledger.ebits <= bound_controlled(2).ebits + 1e-12);
}
