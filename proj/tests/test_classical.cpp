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
#include <sstream>

#include "bforge/classical.hpp"
#include "bforge/costs.hpp"
#include "bforge/structure.hpp"

using namespace bforge;
using namespace bforge::classical;

namespace {

void check_synthesis(const ReversibleMap& map) {
  const int r = classical_schmidt_rank(map);
  const auto nr = synthesize(map, Regime::NoRestore);
  const auto rs = synthesize(map, Regime::Restore);
  CHECK(verify_exhaustive(nr, map) == 0);
  CHECK(verify_exhaustive(rs, map) == 0);
  CHECK(nr.nonlocal_count <= bound_classical(r, false));
  CHECK(rs.nonlocal_count <= bound_classical(r, true));
  if (r >= 2) CHECK(nr.nonlocal_count <= rs.nonlocal_count);
  int cnots = 0;
  for (const auto& g : rs.gates) cnots += g.kind == Gate::Kind::Cnot;
  CHECK(cnots == rs.nonlocal_count);
}

}  // namespace

TEST_CASE("classical Schmidt rank", "[classical]") {
  CHECK(classical_schmidt_rank(identity_map(1, 1)) == 1);
  CHECK(classical_schmidt_rank(cnot_map()) == 2);
  CHECK(classical_schmidt_rank(dcnot_map()) == 4);
  CHECK(classical_schmidt_rank(swap_map()) == 4);
}

TEST_CASE("synthesis counts", "[classical]") {
  for (Regime g : {Regime::Restore, Regime::NoRestore})
    CHECK(synthesize(identity_map(2, 2), g).nonlocal_count == 0);
  CHECK(synthesize(cnot_map(), Regime::NoRestore).nonlocal_count == 1);
  const auto d = synthesize(dcnot_map(), Regime::NoRestore);
  CHECK(d.nonlocal_count == 2);
  CHECK(d.bound == 6);
  CHECK(synthesize(dcnot_map(), Regime::Restore).nonlocal_count <= 24);
}

TEST_CASE("replay", "[classical]") {
  CHECK(replay(synthesize(identity_map(2, 2), Regime::Restore), 0b1010).output == 0b1010);
  CHECK(replay(synthesize(cnot_map(), Regime::NoRestore), 0b10).output == 0b11);
  const auto d = synthesize(dcnot_map(), Regime::Restore);
  for (std::uint32_t a = 0; a < 2; ++a)
    for (std::uint32_t b = 0; b < 2; ++b) {
      const auto out = replay(d, (a << 1) | b);
      CHECK(out.output == ((b << 1) | (a ^ b)));
      CHECK(out.ancillas_clean);
    }
}

TEST_CASE("synthesis is exhaustively correct", "[classical][property]") {
  check_synthesis(identity_map(2, 2));
  check_synthesis(cnot_map());
  check_synthesis(dcnot_map());
  check_synthesis(swap_map());
  for (std::uint64_t s = 0; s < 3; ++s) {
    check_synthesis(random_map(2, 2, s));
    check_synthesis(random_map(3, 2, 10 + s));
    check_synthesis(random_structured_map(3, 3, 2, 20 + s));
  }
  check_synthesis(random_structured_map(4, 4, 2, 31));
}

TEST_CASE("truth tables", "[classical]") {
  const auto m = random_map(2, 3, 4);
  std::stringstream ss;
  write_truth_table(ss, m);
  const auto back = read_truth_table(ss, -1);
  CHECK(back.n_bits_A == 2);
  CHECK(back.m_bits_B == 3);
  CHECK(back.table == m.table);

  std::istringstream dup("00 01\n01 01\n10 10\n11 11\n");
  CHECK_THROWS_AS(read_truth_table(dup, 1), Error);
  std::istringstream bad("00 0x\n");
  CHECK_THROWS_AS(read_truth_table(bad, 1), Error);
}

TEST_CASE("map validation", "[classical]") {
  ReversibleMap m{1, 1, {0, 0, 1, 2}};
  CHECK_THROWS_AS(m.validate(), Error);
  CHECK(is_permutation_matrix(cnot_map().to_operator().m));
}
