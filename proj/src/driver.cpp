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

#include "bforge/driver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

#include "bforge/classical.hpp"
#include "bforge/costs.hpp"
#include "bforge/entpower.hpp"
#include "bforge/fixtures.hpp"
#include "bforge/structure.hpp"

namespace bforge {

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
  return s;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

ControlledForm controlled_any(const BipartiteOp& u) {
  for (Side s : {Side::A, Side::B}) {
    if (auto f = detect_controlled(u, s)) return *f;
    if (auto f = detect_controlled(u, s, true)) return *f;
  }
  throw Error("operator is not a controlled unitary in the computational basis of either side");
}

/** Collects check results for one criterion. */
struct Checker {
  Criterion& c;
  void expect(bool ok, const std::string& what) {
    (ok ? c.details : c.failures).push_back(what);
  }
  template <typename F>
  void guard(const std::string& what, F&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      c.failures.push_back(what + ": " + e.what());
    }
  }
};

bool near(double a, double b, double tol = 1e-9) { return std::abs(a - b) <= tol; }

// ---------------------------------------------------------------------------

void criterion_ranks(Checker& k) {
  const std::vector<std::pair<std::string, int>> want{
      {"swap", 4}, {"dcnot", 4}, {"cnot", 2}, {"example4", 4}};
  for (const auto& [name, r] : want)
    k.guard(name, [&] {
      const int got = schmidt_rank(fixtures::by_name(name));
      k.expect(got == r, name + " rank " + std::to_string(got) + " (want " + std::to_string(r) + ")");
    });
}

void check_trace(Checker& k, const std::string& label, const locc::ProtocolTrace& t,
                 double want_e, double want_c) {
  const bool ok = t.pass && t.ancillas_restored && t.max_distance <= 1e-8 && t.ledger_matches &&
                  near(t.ledger.ebits, want_e) && near(t.ledger.cbits, want_c);
  k.expect(ok, label + ": " + (t.pass ? "pass" : "FAIL") + ", branches " +
                   std::to_string(t.branches.size()) + ", distance " +
                   fmt("%.2e", t.max_distance) + ", ebits " + fmt("%.6f", t.ledger.ebits) +
                   " (want " + fmt("%.6f", want_e) + "), cbits " + fmt("%.6f", t.ledger.cbits) +
                   " (want " + fmt("%.6f", want_c) + ")");
}

void criterion_protocols(Checker& k, std::uint64_t seed) {
  using namespace locc;
  const std::vector<std::string> ct_fixtures{"cnot", "identity", "m_family", "controlled_b_family"};
  for (const auto& name : ct_fixtures)
    k.guard("ct " + name, [&] {
      const auto u = fixtures::by_name(name, {{"r", 3}});
      const ControlledForm f = controlled_any(u);
      const double n = static_cast<double>(f.terms.size());
      check_trace(k, "ct " + name, run_basic_controlled(u, f), std::log2(n), 2 * std::log2(n));
      const ControlledForm g = pad_terms(f, static_cast<int>(f.terms.size()) + 2);
      check_trace(k, "ct-ext " + name + " (+2 empty terms)", run_basic_controlled(u, g),
                  std::log2(n + 2), 2 * std::log2(n + 2));
    });

  // Two levels: plain and with mixed control sides.
  for (const auto& [name, forced] : std::vector<std::pair<std::string, bool>>{
           {"uketbra11", false}, {"cnot_ba", false}, {"flip_or_cnot", false},
           {"mixed6", false}, {"mixed43", false}, {"uketbra11", true}})
    k.guard("two-level " + name, [&] {
      const auto u = fixtures::by_name(name);
      const auto dec = two_level_decompose(u, forced);
      const double m = dec.M(), n = dec.N();
      const auto t = run_two_level(u, dec);
      const std::string label = t.protocol + " " + name + (forced ? " (mixed forced)" : "");
      if (dec.mixed_sides)
        check_trace(k, label, t, std::log2(m * n), 2 * std::log2(m * n * n));
      else
        check_trace(k, label, t, std::log2(m * n), 2 * std::log2(m * n));
    });

  struct GroupCase {
    std::string label;
    std::function<BipartiteOp()> op;
    std::function<GroupSpec()> group;
  };
  const std::vector<GroupCase> groups{
      {"example1 / klein", [] { return fixtures::example1(); },
       [] { return klein_group({0.0, 1.0}, Side::B); }},
      {"cnot / pauli(2) on B", [] { return fixtures::cnot(); },
       [] { return pauli_group(2, Side::B); }},
      {"dihedral_b3 / dihedral(6)", [] { return fixtures::dihedral_b3(); },
       [] { return dihedral_group(3, Side::B); }},
      {"random 3x2 / pauli(3) on A",
       [seed] { return BipartiteOp(3, 2, random_unitary(6, seed + 6)); },
       [] { return pauli_group(3, Side::A); }}};
  for (const auto& g : groups)
    k.guard("gp " + g.label, [&] {
      const GroupSpec spec = g.group();
      const double n = spec.order;
      check_trace(k, "gp " + g.label, run_group_type(g.op(), spec), std::log2(n), 2 * std::log2(n));
    });

  const std::vector<std::string> perms{"example4", "identity", "m_family", "cnot",
                                       "swap",     "dcnot",    "uketbra11"};
  for (const auto& name : perms)
    k.guard("ptl2 " + name, [&] {
      const auto u = fixtures::by_name(name, {{"r", 3}});
      const auto pt = permutation_type_partitions(u);
      const double e = std::log2(static_cast<double>(pt.input_A.size()) * pt.relative_output *
                                 pt.output_B.size());
      if (name == "example4")
        k.expect(near(e, std::log2(12.0)), "example4 type counts give log2 12");
      check_trace(k, "ptl2 " + name, run_permutation_ptl2(u), e, 2 * e);
    });
  for (const auto& name : perms)
    k.guard("ptl3 " + name, [&] {
      const auto u = fixtures::by_name(name, {{"r", 3}});
      const auto t = run_permutation_ptl3(u);
      const int r = schmidt_rank(u);
      const bool ok = t.pass && t.ledger_matches && t.max_distance <= 1e-8 &&
                      t.ledger.ebits <= 8.0 * r - 8 + 1e-9 && near(t.ledger.cbits, 2 * t.ledger.ebits);
      k.expect(ok, "ptl3 " + name + ": " + (t.pass ? "pass" : "FAIL") + ", distance " +
                       fmt("%.2e", t.max_distance) + ", ebits " + fmt("%.6f", t.ledger.ebits) +
                       " <= 8r-8 = " + std::to_string(8 * r - 8));
    });

  // The verifier must reject a broken run.
  k.guard("corrupted ct", [&] {
    const auto u = fixtures::cnot();
    RunOptions o;
    o.skip_final_correction = true;
    const auto t = run_basic_controlled(u, controlled_any(u), o);
    k.expect(!t.pass, "ct on cnot without the final correction is rejected (distance " +
                          fmt("%.3f", t.max_distance) + ")");
  });
}

void criterion_costs(Checker& k) {
  const std::vector<long> bells{1, 2, 5, 15, 52, 203};
  for (int i = 1; i <= 6; ++i)
    k.expect(bell(i) == bells[i - 1], "bell(" + std::to_string(i) + ") = " + bell(i).str());
  const auto p3 = bound_permutation(3);
  k.expect(near(p3.ebits, 2.0) && near(p3.cbits, 4.0), "rank-3 permutation bound " +
                                                           p3.ebits_expr.str() + " ebits");
  const auto p4 = bound_permutation(4);
  k.expect(near(p4.ebits, std::log2(1664.0)) && p4.ebits < 10.71 && p4.source == "rank4-corollary",
           "rank-4 permutation bound " + p4.ebits_expr.str() + " = " + fmt("%.9f", p4.ebits) +
               " < 10.71 from " + p4.source);
  int grid = 0;
  for (int dA = 3; dA <= 7; ++dA)
    for (int dB = 2; dB <= 5; ++dB) {
      const long g = 4L * (dB / 2) + 2;
      const double want = std::log2(static_cast<double>(std::min<long>({dA, 1L * dB * dB, g})));
      const auto b = bound_rank3(dA, dB);
      if (near(b.ebits, want, 1e-12)) {
        ++grid;
      } else {
        k.expect(false, "rank-3 bound at (" + std::to_string(dA) + ", " + std::to_string(dB) + ")");
      }
    }
  k.expect(grid == 20, "rank-3 bound matches the closed form on " + std::to_string(grid) +
                           " of 20 grid points");
  int bad = -1;
  for (int r = 4; r < 1100 && bad < 0; ++r)
    if (!permutation_first_term_smaller(r)) bad = r;
  k.expect(bad < 0, bad < 0 ? "types term is below 8r-8 for every 4 <= r < 1100 (exact integers)"
                            : "types term not below 8r-8 at r = " + std::to_string(bad));
}

void criterion_entpower(Checker& k, std::uint64_t seed) {
  using namespace entpower;
  Config cfg;
  cfg.seed = seed;
  for (const auto& name : {"cnot", "cnot_ba", "m_family"})
    k.guard(std::string("rank-2 ") + name, [&] {
      const auto r = maximize(fixtures::by_name(name, {{"r", 2}}), cfg);
      k.expect(near(r.best_value, 1.0, 1e-5),
               std::string("rank-2 ") + name + " maximum " + fmt("%.9f", r.best_value));
    });
  k.guard("rank-2 random", [&] {
    const auto r = maximize(fixtures::random_permutation(2, seed), cfg);
    k.expect(near(r.best_value, 1.0, 1e-5), "rank-2 random permutation maximum " +
                                                fmt("%.9f", r.best_value));
  });
  const double i1 = std::log2(9.0) - 16.0 / 9.0;
  for (const auto& tag : fixture_tags())
    k.guard(tag, [&] {
      const auto u = fixture_operator(tag);
      const double v = output_entanglement(u, fixture_inputs(tag));
      const double want = tag == "I.1" ? i1 : std::log2(3.0);
      k.expect(near(v, want, 1e-12) && near(fixture_value(tag), want, 1e-12),
               "case " + tag + " closed-form input " + fmt("%.15f", v) + " (want " +
                   fmt("%.15f", want) + ")");
      const auto r = maximize(u, cfg);
      k.expect(r.best_value >= v - 1e-5, "case " + tag + " optimizer reaches " +
                                              fmt("%.12f", r.best_value) + " in " +
                                              std::to_string(r.restarts) + " restarts");
    });
}

int distinct_diagonal_blocks(const BipartiteOp& u) {
  std::vector<Mat> seen;
  for (int j = 0; j < u.dA; ++j) {
    const Mat b = u.block(j, j);
    if (fro(b) <= kDefaultTol) continue;
    bool fresh = true;
    for (const auto& s : seen)
      if (fro(s - b) <= kDefaultTol) fresh = false;
    if (fresh) seen.push_back(b);
  }
  return static_cast<int>(seen.size());
}

/** Linearly independent nonzero blocks spanning the B space of a permutation unitary. */
std::vector<Mat> block_basis(const BipartiteOp& u) {
  std::vector<Mat> basis;
  for (int j = 0; j < u.dA; ++j)
    for (int l = 0; l < u.dA; ++l) {
      const Mat b = u.block(j, l);
      if (fro(b) <= kDefaultTol) continue;
      auto trial = basis;
      trial.push_back(b);
      if (span_rank(trial) > static_cast<int>(basis.size())) basis.push_back(b);
    }
  return basis;
}

void criterion_structure(Checker& k, std::uint64_t seed) {
  for (int r = 2; r <= 5; ++r)
    k.guard("m_family " + std::to_string(r), [&] {
      const auto u = fixtures::m_family(r);
      const int want = 1 << (r - 1);
      const auto f = detect_controlled(u, Side::A);
      k.expect(schmidt_rank(u) == r && distinct_diagonal_blocks(u) == want && f &&
                   static_cast<int>(f->terms.size()) == want &&
                   loose_type_partition(u, Side::A).size() == want,
               "m_family(" + std::to_string(r) + "): rank " + std::to_string(r) + ", " +
                   std::to_string(want) + " distinct diagonal blocks, " + std::to_string(want) +
                   " loose input types");
    });
  for (int r = 2; r <= 5; ++r)
    k.guard("b-span " + std::to_string(r), [&] {
      const auto u = fixtures::controlled_b_family(r);
      std::vector<Mat> basis;
      for (int b = 0; b < r; ++b) basis.push_back(ketbra(r, b, b));
      const auto s = span_partial_permutations(basis);
      k.expect(static_cast<int>(s.size()) == (1 << r) - 1 && schmidt_rank(u) == r,
               "controlled_b_family(" + std::to_string(r) + "): " + std::to_string(s.size()) +
                   " partial permutations in the B span");
    });

  // Loose-type bound and covering-subset bound on random permutation unitaries.
  int loose_ok = 0, cover_ok = 0, total = 0;
  for (int r = 1; r <= 4; ++r)
    for (std::uint64_t s = 0; s < 10; ++s)
      k.guard("random permutation", [&] {
        const auto u = fixtures::random_permutation(r, seed * 1000 + s);
        ++total;
        const int lim = 1 << (schmidt_rank(u) - 1);
        if (loose_type_partition(u, Side::A).size() <= lim &&
            loose_type_partition(u, Side::B).size() <= lim)
          ++loose_ok;
        const auto basis = block_basis(u);
        const auto set = span_partial_permutations(basis);
        const auto cov = covering_subsets(set, 64);
        if (BigInt(static_cast<long>(cov.size())) <= bell(static_cast<int>(basis.size()) + 1))
          ++cover_ok;
      });
  k.expect(total > 0 && loose_ok == total,
           "loose types <= 2^(r-1) on " + std::to_string(loose_ok) + "/" + std::to_string(total) +
               " random permutation unitaries");
  k.expect(total > 0 && cover_ok == total,
           "covering subsets <= B(r+1) on " + std::to_string(cover_ok) + "/" +
               std::to_string(total) + " random permutation unitaries");

  // Exhaustive over every set of nonzero 2x2 partial permutation matrices, sampled for 3x3.
  k.guard("covering exhaustive", [&] {
    auto all_partial = [](int d) {
      std::vector<Mat> out;
      std::vector<int> img(d, -1);
      std::function<void(int)> rec = [&](int c) {
        if (c == d) {
          Mat m = Mat::Zero(d, d);
          bool any = false;
          for (int j = 0; j < d; ++j)
            if (img[j] >= 0) {
              m(img[j], j) = 1;
              any = true;
            }
          if (any) out.push_back(m);
          return;
        }
        for (int r = -1; r < d; ++r) {
          bool used = false;
          for (int j = 0; j < c; ++j) used |= r >= 0 && img[j] == r;
          if (used) continue;
          img[c] = r;
          rec(c + 1);
        }
        img[c] = -1;
      };
      rec(0);
      return out;
    };
    auto check_set = [](const std::vector<Mat>& s) {
      const int d = static_cast<int>(s[0].rows());
      for (int c = 0; c < d; ++c) {
        bool occ = false;
        for (const auto& m : s) occ |= m.col(c).norm() > 0;
        if (!occ) return true;  // precondition not met; not an instance
      }
      const auto cov = covering_subsets(s, 64);
      return BigInt(static_cast<long>(cov.size())) <= bell(span_rank(s) + 1);
    };
    const auto p2 = all_partial(2);
    int sets = 0, good = 0;
    for (long mask = 1; mask < (1L << p2.size()); ++mask) {
      std::vector<Mat> s;
      for (size_t i = 0; i < p2.size(); ++i)
        if (mask & (1L << i)) s.push_back(p2[i]);
      ++sets;
      good += check_set(s);
    }
    const auto p3 = all_partial(3);
    std::mt19937_64 rng(seed);
    for (int trial = 0; trial < 300; ++trial) {
      std::vector<Mat> s;
      for (const auto& m : p3)
        if (rng() % 5 == 0) s.push_back(m);
      if (s.empty()) continue;
      ++sets;
      good += check_set(s);
    }
    k.expect(good == sets, "covering subsets <= B(r+1) on " + std::to_string(good) + "/" +
                               std::to_string(sets) + " sets of 2x2 (all) and 3x3 partial permutations");
  });

  int r2 = 0, r3 = 0, n2 = 0, n3 = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    k.guard("rank-2 classification", [&] {
      const auto u = fixtures::random_permutation(2, seed * 7919 + s);
      ++n2;
      if (fro(rank2_standard_form(u, false).reconstruct() - u.m) <= 1e-9) ++r2;
    });
    k.guard("rank-3 classification", [&] {
      const auto u = fixtures::random_permutation(3, seed * 7919 + s);
      ++n3;
      if (classify_rank3_permutation(u).reconstruction_error <= 1e-9) ++r3;
    });
  }
  k.expect(n2 == 20 && r2 == 20, "rank-2 classification reconstructs " + std::to_string(r2) + "/20");
  k.expect(n3 == 20 && r3 == 20, "rank-3 classification reconstructs " + std::to_string(r3) + "/20");

  int sf = 0, sf_total = 0;
  auto check_sf = [&](const std::string& label, const BipartiteOp& u) {
    k.guard(label, [&] {
      ++sf_total;
      const auto f = rank3_standard_form(u);
      if (f.reconstruction_error <= 1e-8 && f.gauge_residual <= 1e-8 &&
          fro(f.reconstruct() - u.m) <= 1e-8)
        ++sf;
      else
        k.expect(false, label + " standard form residuals " + fmt("%.2e", f.reconstruction_error) +
                            ", " + fmt("%.2e", f.gauge_residual));
    });
  };
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.1, 3.0);
  for (int i = 0; i < 6; ++i) {
    fixtures::Example1Params p;
    p.t = {0.0, 0.5 + 0.3 * i};
    p.thetas = {unif(rng), unif(rng)};
    p.phis = {unif(rng), unif(rng)};
    check_sf("example1 family " + std::to_string(i), fixtures::example1(p));
  }
  for (int i = 0; i < 6; ++i) {
    fixtures::Example2Params p;
    p.t = 0.3 + 0.1 * i;
    p.ys = {1.0 / p.t + 0.5, 1.0 / p.t + 2.0};
    p.bs = {0.2 + 0.1 * i, 0.9};
    check_sf("example2 family " + std::to_string(i), fixtures::example2(p));
  }
  k.expect(sf_total == 12 && sf == 12,
           "rank-3 standard form invariants hold on " + std::to_string(sf) + "/12 example families");
}

void criterion_classical(Checker& k, std::uint64_t seed) {
  using namespace classical;
  std::vector<std::pair<std::string, ReversibleMap>> maps{
      {"identity 2+2", identity_map(2, 2)}, {"cnot", cnot_map()}, {"dcnot", dcnot_map()},
      {"swap", swap_map()},                 {"random 2+2", random_map(2, 2, seed)},
      {"random 3+2", random_map(3, 2, seed + 1)}};
  for (int i = 0; i < 3; ++i)
    maps.push_back({"structured 3+3 #" + std::to_string(i), random_structured_map(3, 3, 2, seed + i)});
  maps.push_back({"structured 5+5", random_structured_map(5, 5, 2, seed)});
  maps.push_back({"structured 4+6", random_structured_map(4, 6, 3, seed)});
  for (const auto& [name, map] : maps)
    k.guard(name, [&] {
      const auto nr = synthesize(map, Regime::NoRestore);
      const auto rs = synthesize(map, Regime::Restore);
      const long bad = verify_exhaustive(nr, map) + verify_exhaustive(rs, map);
      const bool ok = bad == 0 && nr.nonlocal_count <= nr.bound && rs.nonlocal_count <= rs.bound &&
                      (nr.schmidt_rank < 2 || nr.nonlocal_count <= rs.nonlocal_count);
      k.expect(ok, name + ": rank " + std::to_string(nr.schmidt_rank) + ", no_restore " +
                       std::to_string(nr.nonlocal_count) + " <= " + std::to_string(nr.bound) +
                       ", restore " + std::to_string(rs.nonlocal_count) + " <= " +
                       std::to_string(rs.bound) + ", replay mismatches " + std::to_string(bad));
      if (name == "dcnot")
        k.expect(nr.nonlocal_count == 2 && nr.nonlocal_count <= 6 && nr.bound == 6,
                 "dcnot without restoring ancillas uses 2 nonlocal CNOTs (bound " +
                     std::to_string(nr.bound) + ")");
    });
}

void criterion_coverage(Checker& k) {
  // Formula-level checks at scales no simulation reaches.
  int ok = 0;
  for (int r = 5; r <= 64; ++r) {
    const auto b = bound_permutation(r);
    const double first = log2_big(bell(r + 1)) + r + std::log2(static_cast<double>(r));
    if (near(b.ebits, std::min(first, 8.0 * r - 8), 1e-9) && near(b.cbits, 2 * b.ebits)) ++ok;
  }
  k.expect(ok == 60, "permutation bound equals min(types term, 8r-8) for r = 5..64");
  int rk = 0;
  for (int dA = 3; dA <= 64; ++dA)
    for (int dB = 2; dB <= 64; ++dB) {
      const auto b = bound_rank3(dA, dB);
      if (b.ebits <= std::log2(static_cast<double>(dA)) + 1e-12 && b.ebits <= 2 * std::log2(dB) + 1e-12)
        ++rk;
    }
  k.expect(rk == 62 * 63, "rank-3 bound never exceeds log2 dA or 2 log2 dB for dA, dB <= 64");
  k.c.details.push_back(
      "large-scale claims are covered by exact formulas (criterion 3) and small-dimension "
      "invariant suites (criteria 2 and 5); they are not run as experiments");
}

const std::vector<std::pair<std::string, double>>& titles() {
  static const std::vector<std::pair<std::string, double>> t{
      {"Schmidt ranks of SWAP, DCNOT, CNOT and the rank-4 example", 1},
      {"protocol exactness and ledgers", 60},
      {"cost tables", 5},
      {"entangling power", 120},
      {"structural property suites", 60},
      {"classical synthesis", 30},
      {"coverage of large-scale claims", 5}};
  return t;
}

}  // namespace

std::vector<std::string> protocol_names() {
  return {"ct", "ct-ext", "two-level", "group", "ptl2", "ptl3"};
}

std::vector<std::string> group_names() { return {"pauli-A", "pauli-B", "klein", "dihedral"}; }

locc::ProtocolTrace simulate(const std::string& protocol, const BipartiteOp& u,
                             const SimulateOptions& opts) {
  using namespace locc;
  if (protocol == "ct") return run_basic_controlled(u, controlled_any(u), opts.run);
  if (protocol == "ct-ext") {
    if (opts.extra_terms < 0) throw Error("extra terms must be nonnegative");
    const ControlledForm f = controlled_any(u);
    return run_basic_controlled(u, pad_terms(f, static_cast<int>(f.terms.size()) + opts.extra_terms),
                                opts.run);
  }
  if (protocol == "two-level")
    return run_two_level(u, two_level_decompose(u, opts.force_mixed, opts.run.tol), opts.run);
  if (protocol == "group") {
    GroupSpec g;
    if (opts.group == "pauli-A") {
      g = pauli_group(u.dA, Side::A);
    } else if (opts.group == "pauli-B") {
      g = pauli_group(u.dB, Side::B);
    } else if (opts.group == "klein") {
      if (u.dB % 2) throw Error("klein group needs an even dB");
      std::vector<double> t(u.dB / 2, 0.0);
      for (size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i);
      g = klein_group(t, Side::B);
    } else if (opts.group == "dihedral") {
      g = dihedral_group(u.dB, Side::B);
    } else {
      throw Error("unknown group '" + opts.group + "'; valid: " + join(group_names()));
    }
    return run_group_type(u, g, opts.run);
  }
  if (protocol == "ptl2") return run_permutation_ptl2(u, opts.run);
  if (protocol == "ptl3") return run_permutation_ptl3(u, opts.run);
  throw Error("unknown protocol '" + protocol + "'; valid: " + join(protocol_names()));
}

Criterion run_criterion(int id, std::uint64_t seed) {
  if (id < 1 || id > 7) throw Error("criterion id must be 1..7");
  Criterion c;
  c.id = id;
  c.title = titles()[id - 1].first;
  c.limit = titles()[id - 1].second;
  Checker k{c};
  const auto t0 = std::chrono::steady_clock::now();
  switch (id) {
    case 1: criterion_ranks(k); break;
    case 2: criterion_protocols(k, seed); break;
    case 3: criterion_costs(k); break;
    case 4: criterion_entpower(k, seed); break;
    case 5: criterion_structure(k, seed); break;
    case 6: criterion_classical(k, seed); break;
    default: criterion_coverage(k); break;
  }
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (c.seconds > c.limit)
    c.failures.push_back("time " + fmt("%.2f", c.seconds) + " s exceeds " + fmt("%.0f", c.limit) + " s");
  c.pass = c.failures.empty() && !c.details.empty();
  return c;
}

std::vector<Criterion> run_acceptance(std::uint64_t seed) {
  std::vector<Criterion> out;
  for (int id = 1; id <= 7; ++id) out.push_back(run_criterion(id, seed));
  // The coverage note only holds if the suites it leans on pass.
  Criterion& cov = out[6];
  for (int dep : {2, 3, 5})
    if (!out[dep - 1].pass) {
      cov.failures.push_back("depends on criterion " + std::to_string(dep));
      cov.pass = false;
    }
  return out;
}

io::Json to_json(const std::vector<Criterion>& cs, bool timing) {
  io::Json rows = io::Json::array();
  bool all = true;
  for (const auto& c : cs) {
    all = all && c.pass;
    rows.push_back(io::Json{{"criterion", c.id},
                            {"title", c.title},
                            {"pass", c.pass},
                            {"limit_seconds", c.limit},
                            {"checks", c.details},
                            {"failures", c.failures}});
    if (timing) rows.back()["seconds"] = c.seconds;
  }
  return io::Json{{"all_pass", all}, {"criteria", rows}};
}

}  // namespace bforge
