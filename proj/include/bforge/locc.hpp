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
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "bforge/linalg.hpp"
#include "bforge/structure.hpp"

namespace bforge::locc {

enum class Party { Alice, Bob };
inline const char* party_name(Party p) { return p == Party::Alice ? "Alice" : "Bob"; }
inline Party other(Party p) { return p == Party::Alice ? Party::Bob : Party::Alice; }

struct Register {
  std::string name;
  Party party = Party::Alice;
  int dim = 1;
  /** data, ancilla or resource-half */
  std::string role;
};

struct Event {
  /** gate, measure, message, resource, teleport, free */
  std::string kind;
  std::string label;
  Party party = Party::Alice;
  std::vector<std::string> registers;
  /** Message alphabet size or resource Schmidt rank. */
  int size = 0;
  int outcome = -1;
};

struct Ledger {
  double ebits = 0;
  double cbits = 0;
};

struct BranchResult {
  std::vector<int> outcomes;
  double probability = 0;
  double distance = 0;
  bool ancillas_restored = true;
  Ledger ledger;
};

struct ProtocolTrace {
  std::string protocol;
  std::string mode;
  std::vector<Register> registers;
  std::vector<Event> events;
  Ledger ledger;
  Ledger expected;
  std::string expected_formula;
  bool ledger_matches = false;
  std::vector<BranchResult> branches;
  /** Choi matrix of the first branch, on (reference, A_out, B_out). */
  Mat channel;
  double max_distance = 0;
  bool ancillas_restored = true;
  bool pass = false;
  std::vector<std::string> notes;
};

struct RunOptions {
  /** enumerate every branch, or follow one seeded random branch */
  bool sample = false;
  std::uint64_t seed = 0;
  double tol = 1e-8;
  /** Corruption hook for tests: drop the last phase correction. */
  bool skip_final_correction = false;
};

class Machine;
/** A protocol body; returns the output registers (A side, B side). */
using Program = std::function<std::pair<int, int>(Machine&)>;

/**
 * Two-party state-vector machine. The data registers start maximally
 * entangled with a reference system, so the final state is the Choi vector.
 * Gates must act on registers of one party.
 */
class Machine {
 public:
  Machine(int dA, int dB, std::vector<int> prefix, bool sample, std::uint64_t seed, bool record);

  int data_A() const { return 0; }
  int data_B() const { return 1; }

  int alloc(const std::string& name, Party party, int dim, const std::string& role = "ancilla");
  /** Maximally entangled pair of Schmidt rank dim; returns (Alice half, Bob half). */
  std::pair<int, int> share(const std::string& alice_name, const std::string& bob_name, int dim);
  void gate(const std::vector<int>& regs, const Mat& g, const std::string& label);
  /** Standard-basis measurement; the outcome is sent to the other party. */
  int measure(int reg, const std::string& label);
  /** Frees a register, checking it is back in |0>. */
  void free(int reg);
  /** Moves a register to the other party; returns the new register. */
  int teleport(int reg, const std::string& new_name);

  int dim(int reg) const { return regs_.at(reg).dim; }
  Party party(int reg) const { return regs_.at(reg).party; }

  // Results, read by the executor.
  const std::vector<Register>& registers() const { return regs_; }
  const std::vector<Event>& events() const { return events_; }
  const std::vector<std::vector<int>>& pending() const { return pending_; }
  const std::vector<int>& outcomes() const { return outcomes_; }
  const Ledger& ledger() const { return ledger_; }
  double probability() const { return probability_; }
  bool hygiene() const { return hygiene_; }
  /** Frees everything but the outputs and returns the state on (ref, outA, outB). */
  Vec finish(int out_a, int out_b);

 private:
  int position(int reg) const;
  long stride(int pos) const;
  void record(Event e);

  std::vector<Register> regs_;
  std::vector<bool> live_;
  std::vector<int> order_;  // live registers in state order (after the reference)
  std::vector<int> dims_;   // dims in state order, reference first
  Vec psi_;
  std::vector<int> prefix_;
  std::vector<int> outcomes_;
  std::vector<std::vector<int>> pending_;
  bool sample_;
  std::uint64_t rng_state_;
  bool record_;
  std::vector<Event> events_;
  Ledger ledger_;
  double probability_ = 1;
  bool hygiene_ = true;
};

/** Runs a program over all branches (or one sampled branch) and compares each with the target. */
ProtocolTrace execute(const std::string& name, const BipartiteOp& target, const Program& program,
                      const Ledger& expected, const std::string& formula, const RunOptions& opts);

/** Per-branch Choi comparison; pass iff every branch is within tol and restores ancillas. */
std::pair<double, bool> verify_channel(const ProtocolTrace& trace, double tol = 1e-8);

// Basic controlled protocol.
ControlledForm pad_terms(const ControlledForm& form, int n_terms);
ProtocolTrace run_basic_controlled(const BipartiteOp& u, const ControlledForm& form,
                                   const RunOptions& opts = {});

// Two levels of control over an A-direct sum.
struct TwoLevelComponent {
  std::vector<int> support;
  ControlledForm lower;
};
struct TwoLevelDecomposition {
  std::vector<TwoLevelComponent> components;
  bool mixed_sides = false;
  int M() const { return static_cast<int>(components.size()); }
  int N() const;
  Mat reconstruct(int dA, int dB) const;
};
/** Splits u into A-direct-sum components with controlled lower forms. */
TwoLevelDecomposition two_level_decompose(const BipartiteOp& u, bool force_mixed = false,
                                          double tol = kDefaultTol);
ProtocolTrace run_two_level(const BipartiteOp& u, const TwoLevelDecomposition& dec,
                            const RunOptions& opts = {});

// Group-type expansion.
struct GroupSpec {
  std::string name;
  /** Side carrying the representation. */
  Side side = Side::A;
  int order = 0;
  std::vector<std::vector<int>> table;
  std::vector<Mat> rep;
  /** Isometry from the rep-side system into the representation space. */
  Mat embed;
  std::vector<std::vector<cplx>> cocycle;
  std::vector<Mat> W;
  double residual = 0;

  int rep_dim() const { return rep.empty() ? 0 : static_cast<int>(rep.front().rows()); }
  int identity() const;
  int inverse(int g) const;
};
GroupSpec pauli_group(int d, Side side = Side::A);
/** Klein four-group as block copies of the 2x2 Paulis, in the frame diag(1, e^{i t_j}). */
GroupSpec klein_group(const std::vector<double>& t, Side side = Side::B);
/** D_{2n}, n = 2 floor(d/2) + 1, with all irreps; the embedding pairs consecutive levels. */
GroupSpec dihedral_group(int d, Side side = Side::B);
/** Checks closure, associativity and the projective property. */
void validate_group(const GroupSpec& g, double tol = kDefaultTol);
GroupSpec solve_group_expansion(const BipartiteOp& u, GroupSpec spec, double tol = kDefaultTol);
ProtocolTrace run_group_type(const BipartiteOp& u, const GroupSpec& spec, const RunOptions& opts = {});

// Permutation protocols.
ProtocolTrace run_permutation_ptl2(const BipartiteOp& u, const RunOptions& opts = {});
ProtocolTrace run_permutation_ptl3(const BipartiteOp& u, const RunOptions& opts = {});

/** Complete orthonormal columns to a unitary. */
Mat complete_unitary(const Mat& cols);

}  // namespace bforge::locc
