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

#include "bforge/fixtures.hpp"
#include "bforge/locc.hpp"
#include "bforge/structure.hpp"

using namespace bforge;
using namespace bforge::locc;
using Catch::Matchers::WithinAbs;

namespace {

ControlledForm controlled(const BipartiteOp& u) {
  for (Side s : {Side::A, Side::B})
    for (bool phase : {false, true})
      if (auto f = detect_controlled(u, s, phase)) return *f;
  FAIL("no controlled form");
  return {};
}

void check_totality(const ProtocolTrace& t) {
  double total = 0;
  for (const auto& b : t.branches) {
    total += b.probability;
    CHECK(b.ancillas_restored);
    CHECK(b.distance <= 1e-8);
  }
  CHECK_THAT(total, WithinAbs(1.0, 1e-9));
}

}  // namespace

TEST_CASE("basic controlled protocol", "[locc]") {
  const auto t = run_basic_controlled(fixtures::cnot(), controlled(fixtures::cnot()));
  CHECK(t.pass);
  CHECK_THAT(t.ledger.ebits, WithinAbs(1, 1e-12));
  CHECK_THAT(t.ledger.cbits, WithinAbs(2, 1e-12));
  CHECK(t.ledger_matches);
  check_totality(t);

  const auto id = run_basic_controlled(fixtures::identity(), controlled(fixtures::identity()));
  CHECK(id.pass);
  CHECK(id.ledger.ebits == 0);

  for (int r = 2; r <= 4; ++r) {
    const auto u = fixtures::m_family(r);
    const auto f = controlled(u);
    const auto tr = run_basic_controlled(u, f);
    CHECK(tr.pass);
    CHECK_THAT(tr.ledger.ebits, WithinAbs(std::log2(double(f.terms.size())), 1e-12));
  }
}

TEST_CASE("padded controlled protocol", "[locc]") {
  const auto u = fixtures::controlled_b_family(3);
  const auto f = controlled(u);
  const auto padded = pad_terms(f, static_cast<int>(f.terms.size()) + 2);
  CHECK(fro(padded.reconstruct() - u.m) < 1e-12);
  const auto t = run_basic_controlled(u, padded);
  CHECK(t.pass);
  CHECK_THAT(t.ledger.ebits, WithinAbs(std::log2(double(f.terms.size() + 2)), 1e-12));
}

TEST_CASE("corruption is caught", "[locc]") {
  RunOptions o;
  o.skip_final_correction = true;
  const auto t = run_basic_controlled(fixtures::cnot(), controlled(fixtures::cnot()), o);
  CHECK_FALSE(t.pass);
  CHECK(t.max_distance > 1e-3);
}

TEST_CASE("sampled mode follows one branch", "[locc]") {
  RunOptions o;
  o.sample = true;
  o.seed = 7;
  const auto t = run_permutation_ptl2(fixtures::example4(), o);
  CHECK(t.pass);
  CHECK(t.branches.size() == 1);
  const auto t2 = run_permutation_ptl2(fixtures::example4(), o);
  CHECK(t2.branches[0].outcomes == t.branches[0].outcomes);
}

TEST_CASE("two-level protocol", "[locc]") {
  for (const auto& u : {fixtures::uketbra11(), fixtures::cnot_ba(), fixtures::flip_or_cnot(),
                        fixtures::mixed6(), fixtures::mixed43()}) {
    const auto dec = two_level_decompose(u);
    CHECK(fro(dec.reconstruct(u.dA, u.dB) - u.m) < 1e-9);
    const auto t = run_two_level(u, dec);
    CHECK(t.pass);
    CHECK(t.ledger_matches);
    CHECK_THAT(t.ledger.ebits, WithinAbs(std::log2(double(dec.M() * dec.N())), 1e-9));
    check_totality(t);
  }
  const auto mixed = two_level_decompose(fixtures::uketbra11(), true);
  CHECK(mixed.mixed_sides);
  CHECK(run_two_level(fixtures::uketbra11(), mixed).pass);
}

TEST_CASE("group constructions", "[locc]") {
  for (int d = 2; d <= 4; ++d) {
    const auto g = pauli_group(d);
    CHECK(g.order == d * d);
    validate_group(g);
  }
  validate_group(klein_group({0.0, 1.0}));
  const int want[][2] = {{2, 6}, {3, 6}, {5, 10}};
  for (const auto& w : want) {
    const auto g = dihedral_group(w[0]);
    CHECK(g.order == w[1]);
    validate_group(g);
  }
}

TEST_CASE("group-type protocol", "[locc]") {
  SECTION("Example 1 with the Klein group") {
    const auto g = solve_group_expansion(fixtures::example1(), klein_group({0.0, 1.0}));
    CHECK(g.residual < 1e-9);
    const auto t = run_group_type(fixtures::example1(), g);
    CHECK(t.pass);
    CHECK_THAT(t.ledger.ebits, WithinAbs(2, 1e-12));
  }
  SECTION("CNOT with Paulis on B") {
    const auto g = solve_group_expansion(fixtures::cnot(), pauli_group(2, Side::B));
    CHECK(run_group_type(fixtures::cnot(), g).pass);
  }
  SECTION("dihedral") {
    const auto u = fixtures::dihedral_b3();
    const auto g = solve_group_expansion(u, dihedral_group(u.dB, Side::B));
    const auto t = run_group_type(u, g);
    CHECK(t.pass);
    check_totality(t);
  }
  SECTION("random operator with Paulis on A") {
    const BipartiteOp u(3, 2, random_unitary(6, 11));
    const auto g = solve_group_expansion(u, pauli_group(3, Side::A));
    CHECK(run_group_type(u, g).pass);
  }
}

TEST_CASE("permutation protocols", "[locc]") {
  const auto e4 = run_permutation_ptl2(fixtures::example4());
  CHECK(e4.pass);
  CHECK_THAT(e4.ledger.ebits, WithinAbs(std::log2(12.0), 1e-9));
  CHECK_THAT(e4.ledger.cbits, WithinAbs(2 * std::log2(12.0), 1e-9));
  const auto e4b = run_permutation_ptl3(fixtures::example4());
  CHECK(e4b.pass);
  CHECK(e4b.ledger.ebits <= 24 + 1e-9);
  for (const auto& u : {fixtures::identity(), fixtures::m_family(3), fixtures::cnot(),
                        fixtures::swap(), fixtures::dcnot(), fixtures::uketbra11()}) {
    const auto a = run_permutation_ptl2(u);
    const auto b = run_permutation_ptl3(u);
    CHECK(a.pass);
    CHECK(b.pass);
    check_totality(a);
    check_totality(b);
  }
  CHECK_THROWS_AS(run_permutation_ptl2(BipartiteOp(2, 2, random_unitary(4, 1))), Error);
}

TEST_CASE("machine bookkeeping", "[locc]") {
  Machine m(2, 2, {}, false, 0, true);
  const auto [a, b] = m.share("a", "b", 2);
  CHECK(m.party(a) == Party::Alice);
  CHECK(m.party(b) == Party::Bob);
  CHECK_THAT(m.ledger().ebits, WithinAbs(1, 1e-12));
  CHECK_THROWS_AS(m.gate({m.data_A(), m.data_B()}, Mat::Identity(4, 4), "nonlocal"), Error);
  const int t = m.teleport(m.data_A(), "moved");
  CHECK(m.party(t) == Party::Bob);
  CHECK_THAT(m.ledger().cbits, WithinAbs(2, 1e-12));
}

TEST_CASE("completing a unitary", "[locc]") {
  Mat cols = Mat::Zero(3, 1);
  cols(1, 0) = 1;
  const Mat u = complete_unitary(cols);
  CHECK(is_unitary(u));
  CHECK(fro(u.col(0) - cols.col(0)) < 1e-12);
}
