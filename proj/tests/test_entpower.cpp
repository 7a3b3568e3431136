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
#include <random>

#include "bforge/entpower.hpp"
#include "bforge/fixtures.hpp"

using namespace bforge;
using namespace bforge::entpower;
using Catch::Matchers::WithinAbs;

namespace {

Vec random_state(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = cplx(g(rng), g(rng));
  return v / v.norm();
}

}  // namespace

TEST_CASE("output entanglement", "[entpower]") {
  Vec plus(2), zero(2);
  plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  zero << 1, 0;
  CHECK_THAT(output_entanglement(fixtures::identity(), {plus, zero}), WithinAbs(0, 1e-12));
  CHECK_THAT(output_entanglement(fixtures::cnot(), {plus, zero}), WithinAbs(1, 1e-12));
  CHECK_THROWS_AS(output_entanglement(fixtures::cnot(), {Vec::Ones(3) / std::sqrt(3.0), zero}),
                  Error);
}

TEST_CASE("closed-form inputs reproduce their values", "[entpower]") {
  for (const auto& tag : fixture_tags()) {
    const auto u = fixture_operator(tag);
    const auto in = fixture_inputs(tag);
    CHECK_THAT(in.alpha.norm(), WithinAbs(1, 1e-12));
    CHECK_THAT(in.beta.norm(), WithinAbs(1, 1e-12));
    CHECK_THAT(output_entanglement(u, in), WithinAbs(fixture_value(tag), 1e-12));
  }
  CHECK_THAT(fixture_value("I.1"), WithinAbs(1.39214722366453, 1e-12));
  CHECK_THROWS_AS(fixture_inputs("IV"), Error);
}

TEST_CASE("entanglement never exceeds log2 r", "[entpower][property]") {
  std::mt19937_64 rng(5);
  for (const auto& tag : fixture_tags()) {
    const auto u = fixture_operator(tag);
    const double cap = std::log2(schmidt_rank(u)) + 1e-9;
    for (int trial = 0; trial < 1000; ++trial) {
      const int ra = 1 + trial % 3, rb = 1 + (trial / 3) % 3;
      const ProductInput in{random_state(u.dA * ra, rng), random_state(u.dB * rb, rng), ra, rb};
      const double e = output_entanglement(u, in);
      if (e > cap) FAIL(tag << ": " << e << " > " << cap);
    }
  }
}

TEST_CASE("maximize on rank-2 permutations", "[entpower]") {
  Config cfg;
  cfg.restarts = 8;
  for (const auto& u : {fixtures::cnot(), fixtures::cnot_ba(), fixtures::m_family(2),
                        fixtures::random_permutation(2, 3)}) {
    const auto r = maximize(u, cfg);
    CHECK_THAT(r.best_value, WithinAbs(1, 1e-6));
    CHECK(r.best_value <= r.upper_bound + 1e-9);
    CHECK(static_cast<int>(r.history.size()) == cfg.restarts);
  }
}

TEST_CASE("maximize reaches the closed forms", "[entpower]") {
  Config cfg;
  cfg.restarts = 16;
  CHECK(maximize(fixture_operator("I.1"), cfg).best_value >= fixture_value("I.1") - 1e-5);
  CHECK_THAT(maximize(fixture_operator("I.3"), cfg).best_value, WithinAbs(std::log2(3.0), 1e-5));
}

TEST_CASE("estimates are local-unitary invariant", "[entpower][property]") {
  const auto u = fixtures::cnot();
  Config cfg;
  cfg.restarts = 8;
  const double base = maximize(u, cfg).best_value;
  for (std::uint64_t s = 0; s < 3; ++s) {
    const Mat pre = tensor(random_unitary(2, 10 + s), random_unitary(2, 20 + s));
    const Mat post = tensor(random_unitary(2, 30 + s), random_unitary(2, 40 + s));
    Config c2 = cfg;
    c2.seed = 100 + s;
    CHECK_THAT(maximize(BipartiteOp(2, 2, post * u.m * pre), c2).best_value, WithinAbs(base, 1e-5));
  }
}

TEST_CASE("without ancillas case I.1 falls short of log2 3", "[entpower][property]") {
  Config cfg;
  cfg.restarts = 16;
  cfg.dRA = 1;
  cfg.dRB = 1;
  const auto r = maximize(fixture_operator("I.1"), cfg);
  CHECK(r.best_value <= std::log2(3.0) - 0.15);
  CHECK(r.best_value > 0.5);
}
