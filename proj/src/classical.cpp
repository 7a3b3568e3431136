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

#include "bforge/classical.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "bforge/costs.hpp"
#include "bforge/structure.hpp"

namespace bforge::classical {

namespace {

int bits_for(int count) {
  int k = 0;
  while ((1 << k) < count) ++k;
  return k;
}

std::uint32_t pack(std::uint64_t state, const std::vector<int>& bits) {
  std::uint32_t v = 0;
  for (size_t i = 0; i < bits.size(); ++i) v |= static_cast<std::uint32_t>((state >> bits[i]) & 1U) << i;
  return v;
}

void unpack(std::uint64_t& state, const std::vector<int>& bits, std::uint32_t v) {
  for (size_t i = 0; i < bits.size(); ++i) {
    state &= ~(std::uint64_t{1} << bits[i]);
    state |= static_cast<std::uint64_t>((v >> i) & 1U) << bits[i];
  }
}

std::vector<int> concat(std::vector<int> a, const std::vector<int>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::vector<int> range(int first, int k) {
  std::vector<int> v(k);
  std::iota(v.begin(), v.end(), first);
  return v;
}

constexpr int kMaxGateInputs = 20;

class Builder {
 public:
  Builder(const ReversibleMap& map, Regime regime, std::string construction) {
    s_.regime = regime;
    s_.construction = std::move(construction);
    s_.n_bits_A = map.n_bits_A;
    s_.m_bits_B = map.m_bits_B;
    used_[0] = map.n_bits_A;
    used_[1] = map.m_bits_B;
  }

  std::vector<int> data(Party p) const { return range(0, p == Party::A ? s_.n_bits_A : s_.m_bits_B); }

  std::vector<int> alloc(Party p, int k) {
    const int i = p == Party::A ? 0 : 1;
    auto bits = range(used_[i], k);
    used_[i] += k;
    (p == Party::A ? s_.ancillas_A : s_.ancillas_B) += k;
    return bits;
  }

  template <class F>
  void xor_gate(Party p, const std::vector<int>& controls, const std::vector<int>& targets, F fn,
                const std::string& label) {
    if (targets.empty()) return;
    check_width(controls.size());
    Gate g{Gate::Kind::Xor, p, controls, targets, {}, label};
    g.table.resize(std::size_t{1} << controls.size());
    for (std::uint32_t c = 0; c < g.table.size(); ++c) g.table[c] = fn(c);
    s_.gates.push_back(std::move(g));
  }

  template <class F>
  void perm_gate(Party p, const std::vector<int>& controls, const std::vector<int>& targets, F fn,
                 const std::string& label) {
    if (targets.empty()) return;
    check_width(controls.size() + targets.size());
    Gate g{Gate::Kind::Perm, p, controls, targets, {}, label};
    const std::uint32_t nt = 1U << targets.size();
    g.table.resize(std::size_t{1} << (controls.size() + targets.size()));
    for (std::uint32_t c = 0; c < (1U << controls.size()); ++c) {
      std::vector<bool> seen(nt, false);
      for (std::uint32_t v = 0; v < nt; ++v) {
        const std::uint32_t w = fn(c, v);
        if (w >= nt || seen[w]) throw Error("local gate '" + label + "' is not a bijection");
        seen[w] = true;
        g.table[(c << targets.size()) | v] = w;
      }
    }
    s_.gates.push_back(std::move(g));
  }

  void cnots(Party from, const std::vector<int>& src, const std::vector<int>& dst, const std::string& label) {
    if (src.size() != dst.size()) throw Error("cnot register widths differ");
    for (size_t i = 0; i < src.size(); ++i) {
      s_.gates.push_back({Gate::Kind::Cnot, from, {src[i]}, {dst[i]}, {}, label});
      ++s_.nonlocal_count;
    }
  }

  void swap_bits(Party p, const std::vector<int>& a, const std::vector<int>& b, const std::string& label) {
    const int k = static_cast<int>(a.size());
    perm_gate(p, {}, concat(a, b),
              [k](std::uint32_t, std::uint32_t v) { return (v >> k) | ((v & ((1U << k) - 1)) << k); },
              label);
  }

  CnotSynthesis take() { return std::move(s_); }

 private:
  static void check_width(size_t w) {
    if (w > kMaxGateInputs) throw Error("local gate has too many input bits");
  }
  CnotSynthesis s_;
  int used_[2] = {0, 0};
};

struct Tables {
  int n, m, dA, dB;
  std::vector<std::uint32_t> t;
  int outA(int a, int b) const { return static_cast<int>(t[(a << m) | b] >> m); }
  int outB(int a, int b) const { return static_cast<int>(t[(a << m) | b] & ((1U << m) - 1)); }
};

Tables tables_of(const ReversibleMap& map) {
  return {map.n_bits_A, map.m_bits_B, 1 << map.n_bits_A, 1 << map.m_bits_B, map.table};
}

/** Loose types of a map (A side: x -> class, B side: y -> class) and the outputs they determine. */
struct LooseData {
  std::vector<int> la, lb;
  int da = 1, db = 1;
  std::vector<std::vector<int>> outA;  // [x][s]
  std::vector<std::vector<int>> outB;  // [y][t]
};

LooseData loose_data(const ReversibleMap& map) {
  const BipartiteOp u = map.to_operator();
  const Tables tb = tables_of(map);
  LooseData d;
  const TypePartition pa = loose_type_partition(u, Side::A), pb = loose_type_partition(u, Side::B);
  d.la = pa.labels(tb.dA);
  d.lb = pb.labels(tb.dB);
  d.da = pa.size();
  d.db = pb.size();
  d.outA.assign(tb.dA, std::vector<int>(d.db, -1));
  d.outB.assign(tb.dB, std::vector<int>(d.da, -1));
  for (int x = 0; x < tb.dA; ++x)
    for (int y = 0; y < tb.dB; ++y) {
      int& ja = d.outA[x][d.lb[y]];
      if (ja >= 0 && ja != tb.outA(x, y)) throw NumericError("loose type does not determine the A output");
      ja = tb.outA(x, y);
      int& jb = d.outB[y][d.la[x]];
      if (jb >= 0 && jb != tb.outB(x, y)) throw NumericError("loose type does not determine the B output");
      jb = tb.outB(x, y);
    }
  return d;
}

ReversibleMap inverse(const ReversibleMap& map) {
  ReversibleMap inv = map;
  for (std::uint32_t i = 0; i < map.table.size(); ++i) inv.table[map.table[i]] = i;
  return inv;
}

std::uint32_t lookup(const std::vector<std::vector<int>>& tab, std::uint32_t x, std::uint32_t s) {
  if (x >= tab.size() || s >= tab[x].size() || tab[x][s] < 0) return 0;
  return static_cast<std::uint32_t>(tab[x][s]);
}

/** Exchange loose types, write outputs to fresh bits; returns the output bits per party. */
void loose_exchange(Builder& bld, const LooseData& d, int n, int m, bool uncompute,
                    std::vector<int>& outA_bits, std::vector<int>& outB_bits, const std::vector<int>& srcA,
                    const std::vector<int>& srcB, bool write_xor_into_src) {
  const int ka = bits_for(d.da), kb = bits_for(d.db);
  const auto ta = bld.alloc(Party::A, ka);
  bld.xor_gate(Party::A, srcA, ta, [&](std::uint32_t x) { return static_cast<std::uint32_t>(d.la[x]); },
               "compute loose type");
  const auto tb = bld.alloc(Party::B, kb);
  bld.xor_gate(Party::B, srcB, tb, [&](std::uint32_t y) { return static_cast<std::uint32_t>(d.lb[y]); },
               "compute loose type");
  const auto ra = bld.alloc(Party::B, ka);
  bld.cnots(Party::A, ta, ra, "send loose type");
  const auto rb = bld.alloc(Party::A, kb);
  bld.cnots(Party::B, tb, rb, "send loose type");
  const int sa = static_cast<int>(srcA.size()), sb = static_cast<int>(srcB.size());
  if (!write_xor_into_src) {
    outA_bits = bld.alloc(Party::A, n);
    outB_bits = bld.alloc(Party::B, m);
  }
  // Target of the write: fresh output bits, or the erased inputs.
  bld.xor_gate(Party::A, concat(srcA, rb), outA_bits,
               [&](std::uint32_t c) { return lookup(d.outA, c & ((1U << sa) - 1), c >> sa); }, "write output");
  bld.xor_gate(Party::B, concat(srcB, ra), outB_bits,
               [&](std::uint32_t c) { return lookup(d.outB, c & ((1U << sb) - 1), c >> sb); }, "write output");
  if (!uncompute) return;
  bld.cnots(Party::A, ta, ra, "clear loose type copy");
  bld.cnots(Party::B, tb, rb, "clear loose type copy");
  bld.xor_gate(Party::A, srcA, ta, [&](std::uint32_t x) { return static_cast<std::uint32_t>(d.la[x]); },
               "uncompute loose type");
  bld.xor_gate(Party::B, srcB, tb, [&](std::uint32_t y) { return static_cast<std::uint32_t>(d.lb[y]); },
               "uncompute loose type");
}

CnotSynthesis build_no_restore(const ReversibleMap& map) {
  Builder bld(map, Regime::NoRestore, "loose-type exchange");
  const LooseData d = loose_data(map);
  std::vector<int> oa, ob;
  loose_exchange(bld, d, map.n_bits_A, map.m_bits_B, false, oa, ob, bld.data(Party::A), bld.data(Party::B),
                 false);
  bld.swap_bits(Party::A, bld.data(Party::A), oa, "move output");
  bld.swap_bits(Party::B, bld.data(Party::B), ob, "move output");
  return bld.take();
}

CnotSynthesis build_restore_loose(const ReversibleMap& map) {
  Builder bld(map, Regime::Restore, "loose-type compute and erase");
  const LooseData fwd = loose_data(map);
  const LooseData bwd = loose_data(inverse(map));
  std::vector<int> oa, ob;
  loose_exchange(bld, fwd, map.n_bits_A, map.m_bits_B, true, oa, ob, bld.data(Party::A), bld.data(Party::B),
                 false);
  // Erase the inputs from the outputs using the inverse map's loose types.
  std::vector<int> da = bld.data(Party::A), db = bld.data(Party::B);
  loose_exchange(bld, bwd, map.n_bits_A, map.m_bits_B, true, da, db, oa, ob, true);
  bld.swap_bits(Party::A, bld.data(Party::A), oa, "move output");
  bld.swap_bits(Party::B, bld.data(Party::B), ob, "move output");
  return bld.take();
}

CnotSynthesis build_restore_types(const ReversibleMap& map) {
  Builder bld(map, Regime::Restore, "type compute and erase");
  const BipartiteOp u = map.to_operator();
  const Tables tb = tables_of(map);
  const int n = tb.n, m = tb.m;
  const PermutationTypes types = permutation_type_partitions(u);
  const int d = types.input_A.size();
  const auto t_of = types.input_A.labels(tb.dA);
  const int dH = types.output_B.size();
  const auto tau = types.output_B.labels(tb.dB);

  // Blocks as maps y -> y' (or -1), canonical list per type from its first member.
  auto block = [&](int j, int x) {
    std::vector<int> b(tb.dB, -1);
    bool any = false;
    for (int y = 0; y < tb.dB; ++y)
      if (tb.outA(x, y) == j) {
        b[y] = tb.outB(x, y);
        any = true;
      }
    return any ? b : std::vector<int>{};
  };
  std::vector<std::vector<std::vector<int>>> L(d);
  for (int t = 0; t < d; ++t) {
    const int x0 = types.input_A.classes[t].front();
    for (int j = 0; j < tb.dA; ++j)
      if (auto b = block(j, x0); !b.empty()) L[t].push_back(b);
  }
  int dF = 1;
  for (const auto& l : L) dF = std::max(dF, static_cast<int>(l.size()));
  auto beta_of = [&](int x, int j) {
    const auto b = block(j, x);
    const auto& l = L[t_of[x]];
    for (size_t k = 0; k < l.size(); ++k)
      if (l[k] == b) return static_cast<int>(k);
    throw NumericError("block is missing from its type's block list");
  };
  const int kd = bits_for(d), kF = bits_for(dF), kH = bits_for(dH);

  // W_t on (data_B, f): (y, 0) -> (M y, beta), completed per t.
  std::vector<std::vector<std::uint32_t>> W(1U << kd);
  const std::uint32_t nw = 1U << (m + kF);
  for (std::uint32_t t = 0; t < W.size(); ++t) {
    std::vector<std::uint32_t> img(nw, UINT32_MAX);
    std::vector<bool> used(nw, false);
    if (t < static_cast<std::uint32_t>(d)) {
      const int x0 = types.input_A.classes[t].front();
      for (int y = 0; y < tb.dB; ++y) {
        const std::uint32_t to = static_cast<std::uint32_t>(tb.outB(x0, y)) |
                                 (static_cast<std::uint32_t>(beta_of(x0, tb.outA(x0, y))) << m);
        img[y] = to;
        used[to] = true;
      }
    }
    std::uint32_t next = 0;
    for (std::uint32_t v = 0; v < nw; ++v) {
      if (img[v] != UINT32_MAX) continue;
      while (used[next]) ++next;
      img[v] = next;
      used[next] = true;
    }
    W[t] = img;
  }
  // Pi_{t, beta}: x -> j, completed per (t, beta).
  std::vector<std::vector<std::uint32_t>> Pi(1U << (kd + kF));
  for (std::uint32_t c = 0; c < Pi.size(); ++c) {
    const std::uint32_t t = c & ((1U << kd) - 1), b = c >> kd;
    std::vector<std::uint32_t> img(tb.dA, UINT32_MAX);
    std::vector<bool> used(tb.dA, false);
    if (t < static_cast<std::uint32_t>(d) && b < L[t].size())
      for (int x : types.input_A.classes[t])
        for (int j = 0; j < tb.dA; ++j)
          if (block(j, x) == L[t][b]) {
            img[x] = j;
            used[j] = true;
          }
    std::uint32_t next = 0;
    for (int x = 0; x < tb.dA; ++x) {
      if (img[x] != UINT32_MAX) continue;
      while (used[next]) ++next;
      img[x] = next;
      used[next] = true;
    }
    Pi[c] = img;
  }
  // (j, tau(y')) -> (t, beta)
  std::map<std::pair<int, int>, std::uint32_t> back;
  for (int x = 0; x < tb.dA; ++x)
    for (int y = 0; y < tb.dB; ++y) {
      const int j = tb.outA(x, y);
      const std::uint32_t val = static_cast<std::uint32_t>(t_of[x]) |
                                (static_cast<std::uint32_t>(beta_of(x, j)) << kd);
      auto [it, fresh] = back.emplace(std::make_pair(j, tau[tb.outB(x, y)]), val);
      if (!fresh && it->second != val)
        throw NumericError("output and output type do not determine the input type");
    }

  const auto dA_bits = bld.data(Party::A), dB_bits = bld.data(Party::B);
  const auto a = bld.alloc(Party::A, kd);
  bld.xor_gate(Party::A, dA_bits, a, [&](std::uint32_t x) { return static_cast<std::uint32_t>(t_of[x]); },
               "compute type");
  const auto e = bld.alloc(Party::B, kd);
  bld.cnots(Party::A, a, e, "send type");
  const auto f = bld.alloc(Party::B, kF);
  bld.perm_gate(Party::B, e, concat(dB_bits, f), [&](std::uint32_t t, std::uint32_t v) { return W[t][v]; },
                "type-controlled W");
  bld.cnots(Party::A, a, e, "clear type copy");
  const auto f2 = bld.alloc(Party::A, kF);
  bld.cnots(Party::B, f, f2, "move relative output");
  bld.cnots(Party::A, f2, f, "move relative output");
  bld.perm_gate(Party::A, concat(a, f2), dA_bits, [&](std::uint32_t c, std::uint32_t x) { return Pi[c][x]; },
                "controlled V");
  const auto h = bld.alloc(Party::B, kH);
  auto tau_fn = [&](std::uint32_t y) { return static_cast<std::uint32_t>(tau[y]); };
  bld.xor_gate(Party::B, dB_bits, h, tau_fn, "compute output type");
  const auto h2 = bld.alloc(Party::A, kH);
  bld.cnots(Party::B, h, h2, "send output type");
  bld.xor_gate(Party::B, dB_bits, h, tau_fn, "uncompute output type");
  bld.xor_gate(Party::A, concat(dA_bits, h2), concat(a, f2),
               [&](std::uint32_t c) {
                 auto it = back.find({static_cast<int>(c & ((1U << n) - 1)), static_cast<int>(c >> n)});
                 return it == back.end() ? 0U : it->second;
               },
               "uncompute type");
  bld.xor_gate(Party::B, dB_bits, h, tau_fn, "compute output type");
  bld.cnots(Party::B, h, h2, "clear output type copy");
  bld.xor_gate(Party::B, dB_bits, h, tau_fn, "uncompute output type");
  return bld.take();
}

}  // namespace

void ReversibleMap::validate() const {
  if (n_bits_A < 0 || m_bits_B < 0 || width() > 24) throw Error("bit counts out of range");
  const std::size_t size = std::size_t{1} << width();
  if (table.size() != size)
    throw Error("table has " + std::to_string(table.size()) + " entries, expected " + std::to_string(size));
  std::vector<bool> seen(size, false);
  for (auto v : table) {
    if (v >= size || seen[v]) throw Error("map is not a bijection");
    seen[v] = true;
  }
}

BipartiteOp ReversibleMap::to_operator() const {
  validate();
  const int dA = 1 << n_bits_A, dB = 1 << m_bits_B;
  Mat p = Mat::Zero(dA * dB, dA * dB);
  for (std::uint32_t i = 0; i < table.size(); ++i) p(table[i], i) = 1;
  return BipartiteOp(dA, dB, p);
}

ReversibleMap identity_map(int n, int m) {
  ReversibleMap r{n, m, std::vector<std::uint32_t>(std::size_t{1} << (n + m))};
  std::iota(r.table.begin(), r.table.end(), 0U);
  return r;
}

ReversibleMap cnot_map() { return {1, 1, {0b00, 0b01, 0b11, 0b10}}; }

ReversibleMap dcnot_map() {
  // (a, b) -> (b, a ^ b)
  ReversibleMap r{1, 1, std::vector<std::uint32_t>(4)};
  for (std::uint32_t a = 0; a < 2; ++a)
    for (std::uint32_t b = 0; b < 2; ++b) r.table[(a << 1) | b] = (b << 1) | (a ^ b);
  return r;
}

ReversibleMap swap_map() { return {1, 1, {0b00, 0b10, 0b01, 0b11}}; }

ReversibleMap random_map(int n, int m, std::uint64_t seed) {
  ReversibleMap r = identity_map(n, m);
  std::mt19937_64 rng(seed);
  std::shuffle(r.table.begin(), r.table.end(), rng);
  return r;
}

ReversibleMap random_structured_map(int n, int m, int k, std::uint64_t seed) {
  if (n < 1 || m < 1) throw Error("structured maps need at least one bit per party");
  std::mt19937_64 rng(seed);
  const std::uint32_t dA = 1U << n, dB = 1U << m;
  auto local_perm = [&](std::uint32_t d) {
    std::vector<std::uint32_t> p(d);
    std::iota(p.begin(), p.end(), 0U);
    std::shuffle(p.begin(), p.end(), rng);
    return p;
  };
  ReversibleMap r = identity_map(n, m);
  auto apply_local = [&] {
    const auto pa = local_perm(dA), pb = local_perm(dB);
    for (auto& v : r.table) v = (pa[v >> m] << m) | pb[v & (dB - 1)];
  };
  apply_local();
  for (int layer = 0; layer < k; ++layer) {
    const bool a_to_b = rng() & 1;
    const std::uint32_t cb = rng() % (a_to_b ? n : m), tbit = rng() % (a_to_b ? m : n);
    for (auto& v : r.table) {
      std::uint32_t x = v >> m, y = v & (dB - 1);
      if (a_to_b) y ^= ((x >> cb) & 1U) << tbit;
      else x ^= ((y >> cb) & 1U) << tbit;
      v = (x << m) | y;
    }
    apply_local();
  }
  return r;
}

ReversibleMap read_truth_table(std::istream& in, int n_bits_A) {
  std::string line;
  int lineno = 0, width = -1;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      std::istringstream cs(line.substr(hash + 1));
      std::string key;
      int v;
      if (cs >> key >> v && key == "bits-a" && n_bits_A < 0) n_bits_A = v;
      line.erase(hash);
    }
    std::istringstream ls(line);
    std::string a, b, extra;
    if (!(ls >> a)) continue;
    if (!(ls >> b) || (ls >> extra))
      throw Error("truth table line " + std::to_string(lineno) + ": expected '<in-bits> <out-bits>'");
    if (a.size() != b.size())
      throw Error("truth table line " + std::to_string(lineno) + ": input and output widths differ");
    if (width < 0) width = static_cast<int>(a.size());
    if (static_cast<int>(a.size()) != width)
      throw Error("truth table line " + std::to_string(lineno) + ": width differs from earlier lines");
    if (width > 24) throw Error("truth table wider than 24 bits");
    auto parse = [&](const std::string& s) {
      std::uint32_t v = 0;
      for (char c : s) {
        if (c != '0' && c != '1')
          throw Error("truth table line " + std::to_string(lineno) + ": bits must be 0 or 1");
        v = (v << 1) | static_cast<std::uint32_t>(c - '0');
      }
      return v;
    };
    rows.emplace_back(parse(a), parse(b));
  }
  if (width < 0) throw Error("truth table is empty");
  if (n_bits_A < 0 || n_bits_A > width) throw Error("number of A bits is missing or exceeds the width");
  ReversibleMap r{n_bits_A, width - n_bits_A, std::vector<std::uint32_t>(std::size_t{1} << width)};
  std::vector<bool> seen(r.table.size(), false);
  for (auto [i, o] : rows) {
    if (seen[i]) throw Error("truth table lists an input twice");
    seen[i] = true;
    r.table[i] = o;
  }
  if (rows.size() != r.table.size()) throw Error("truth table does not list every input");
  r.validate();
  return r;
}

void write_truth_table(std::ostream& out, const ReversibleMap& map) {
  map.validate();
  const int w = map.width();
  out << "# bits-a " << map.n_bits_A << "\n";
  for (std::uint32_t i = 0; i < map.table.size(); ++i) {
    for (int b = w - 1; b >= 0; --b) out << ((i >> b) & 1U);
    out << ' ';
    for (int b = w - 1; b >= 0; --b) out << ((map.table[i] >> b) & 1U);
    out << '\n';
  }
}

int classical_schmidt_rank(const ReversibleMap& map) { return schmidt_rank(map.to_operator()); }

ReplayResult replay(const CnotSynthesis& s, std::uint32_t input) {
  const int w = s.n_bits_A + s.m_bits_B;
  if (w < 32 && (input >> w) != 0) throw Error("input wider than the map");
  const std::uint32_t bmask = (1U << s.m_bits_B) - 1;
  std::uint64_t st[2] = {input >> s.m_bits_B, input & bmask};
  for (const auto& g : s.gates) {
    const int p = g.party == Party::A ? 0 : 1;
    switch (g.kind) {
      case Gate::Kind::Xor: {
        const std::uint32_t v = g.table[pack(st[p], g.controls)];
        unpack(st[p], g.targets, pack(st[p], g.targets) ^ v);
        break;
      }
      case Gate::Kind::Perm: {
        const std::uint32_t c = pack(st[p], g.controls), v = pack(st[p], g.targets);
        unpack(st[p], g.targets, g.table[(static_cast<std::size_t>(c) << g.targets.size()) | v]);
        break;
      }
      case Gate::Kind::Cnot: {
        const std::uint64_t bit = (st[p] >> g.controls[0]) & 1U;
        st[1 - p] ^= bit << g.targets[0];
        break;
      }
    }
  }
  ReplayResult r;
  const std::uint64_t amask = (std::uint64_t{1} << s.n_bits_A) - 1;
  r.output = static_cast<std::uint32_t>(((st[0] & amask) << s.m_bits_B) | (st[1] & bmask));
  r.ancillas_clean = (st[0] >> s.n_bits_A) == 0 && (st[1] >> s.m_bits_B) == 0;
  return r;
}

long verify_exhaustive(const CnotSynthesis& s, const ReversibleMap& map) {
  long bad = 0;
  for (std::uint32_t i = 0; i < map.table.size(); ++i) {
    const ReplayResult r = replay(s, i);
    if (r.output != map.table[i] || (s.regime == Regime::Restore && !r.ancillas_clean)) ++bad;
  }
  return bad;
}

CnotSynthesis synthesize(const ReversibleMap& map, Regime regime) {
  map.validate();
  const int r = classical_schmidt_rank(map);
  std::vector<CnotSynthesis> options;
  if (regime == Regime::NoRestore) {
    options.push_back(build_no_restore(map));
  } else {
    options.push_back(build_restore_types(map));
    options.push_back(build_restore_loose(map));
  }
  std::vector<std::pair<std::string, int>> candidates;
  for (auto& o : options) {
    if (verify_exhaustive(o, map) != 0)
      throw Error("synthesized circuit '" + o.construction + "' fails replay");
    candidates.emplace_back(o.construction, o.nonlocal_count);
  }
  auto best = std::min_element(options.begin(), options.end(), [](const auto& a, const auto& b) {
    return a.nonlocal_count < b.nonlocal_count;
  });
  CnotSynthesis s = std::move(*best);
  s.candidates = std::move(candidates);
  s.schmidt_rank = r;
  s.bound = bound_classical(r, regime == Regime::Restore);
  return s;
}

}  // namespace bforge::classical
