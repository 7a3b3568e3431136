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
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "bforge/linalg.hpp"

namespace bforge::classical {

/** Bijection on n + m bits; input index (a << m) | b, A bits most significant. */
struct ReversibleMap {
  int n_bits_A = 0;
  int m_bits_B = 0;
  std::vector<std::uint32_t> table;

  int width() const { return n_bits_A + m_bits_B; }
  void validate() const;
  BipartiteOp to_operator() const;
};

ReversibleMap identity_map(int n, int m);
ReversibleMap cnot_map();
ReversibleMap dcnot_map();
ReversibleMap swap_map();
/** Uniformly random bijection on n + m bits. */
ReversibleMap random_map(int n, int m, std::uint64_t seed);
/** Random map that is a product of local bijections, composed with k nonlocal CNOT layers. */
ReversibleMap random_structured_map(int n, int m, int k, std::uint64_t seed);

/** Truth table: one line per input, "<in-bits> <out-bits>"; '#' starts a comment. */
ReversibleMap read_truth_table(std::istream& in, int n_bits_A);
void write_truth_table(std::ostream& out, const ReversibleMap& map);

int classical_schmidt_rank(const ReversibleMap& map);

enum class Regime { Restore, NoRestore };
inline const char* regime_name(Regime r) { return r == Regime::Restore ? "restore" : "no_restore"; }

enum class Party { A, B };

/**
 * A local gate acts on bits of one party (data bits first, then ancillas).
 * xor:  targets ^= table[controls]
 * perm: targets <- table[(controls << |targets|) | targets], a bijection per control value
 * A nonlocal CNOT copies control bit of `party` into target bit of the other party.
 */
struct Gate {
  enum class Kind { Xor, Perm, Cnot } kind = Kind::Xor;
  Party party = Party::A;
  std::vector<int> controls;
  std::vector<int> targets;
  std::vector<std::uint32_t> table;
  std::string label;
};

struct CnotSynthesis {
  Regime regime = Regime::NoRestore;
  std::string construction;
  int n_bits_A = 0, m_bits_B = 0;
  int ancillas_A = 0, ancillas_B = 0;
  std::vector<Gate> gates;
  int nonlocal_count = 0;
  int schmidt_rank = 0;
  long bound = 0;
  /** Counts of the constructions considered (restore regime). */
  std::vector<std::pair<std::string, int>> candidates;
};

struct ReplayResult {
  std::uint32_t output = 0;
  bool ancillas_clean = true;
};

ReplayResult replay(const CnotSynthesis& s, std::uint32_t input);

/** Checks every input; returns the number of mismatches (wrong output or dirty ancilla in restore). */
long verify_exhaustive(const CnotSynthesis& s, const ReversibleMap& map);

CnotSynthesis synthesize(const ReversibleMap& map, Regime regime);

}  // namespace bforge::classical
