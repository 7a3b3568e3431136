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

#include "bforge/costs.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "bforge/structure.hpp"

namespace bforge {

BigInt bell(int n) {
  if (n < 0) throw Error("bell: n must be nonnegative");
  static std::mutex mu;
  static std::vector<BigInt> cache{1, 1};
  // Last row of the Bell triangle; its final entry is the newest cached value.
  static std::vector<BigInt> row{1};
  std::lock_guard<std::mutex> lock(mu);
  while (static_cast<int>(cache.size()) <= n) {
    std::vector<BigInt> next{row.back()};
    next.reserve(row.size() + 1);
    for (const BigInt& x : row) next.push_back(next.back() + x);
    row.swap(next);
    cache.push_back(row.back());
  }
  return cache[n];
}

double log2_big(const BigInt& x) {
  if (x <= 0) throw Error("log2 of nonpositive integer");
  const unsigned msb = boost::multiprecision::msb(x);
  if (msb < 63) return std::log2(static_cast<double>(x.convert_to<unsigned long long>()));
  BigInt top = x >> (msb - 62);
  return static_cast<double>(msb - 62) + std::log2(static_cast<double>(top.convert_to<unsigned long long>()));
}

long ceil_log2_big(const BigInt& x) {
  if (x <= 0) throw Error("ceil_log2 of nonpositive integer");
  if (x == 1) return 0;
  const long msb = static_cast<long>(boost::multiprecision::msb(x));
  const BigInt p = BigInt(1) << msb;
  return p == x ? msb : msb + 1;
}

LogExpr LogExpr::log(const BigInt& arg, double coef) {
  LogExpr e;
  if (arg != 1) e.terms.emplace_back(coef, arg);
  return e;
}

LogExpr LogExpr::number(double c) {
  LogExpr e;
  e.constant = c;
  return e;
}

LogExpr LogExpr::operator+(const LogExpr& o) const {
  LogExpr e = *this;
  e.terms.insert(e.terms.end(), o.terms.begin(), o.terms.end());
  e.constant += o.constant;
  return e;
}

LogExpr LogExpr::scaled(double k) const {
  LogExpr e = *this;
  for (auto& t : e.terms) t.first *= k;
  e.constant *= k;
  return e;
}

double LogExpr::value() const {
  double v = constant;
  for (const auto& [c, a] : terms) v += c * log2_big(a);
  return v;
}

std::string LogExpr::str() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [c, a] : terms) {
    if (!first) os << " + ";
    first = false;
    if (c != 1.0) os << c << "*";
    os << "log2(" << a.str() << ")";
  }
  if (constant != 0 || first) {
    if (!first) os << " + ";
    os << constant;
  }
  return os.str();
}

CostReport make_report(std::vector<CostAlternative> alts) {
  if (alts.empty()) throw Error("no applicable cost alternative");
  std::stable_sort(alts.begin(), alts.end(), [](const auto& x, const auto& y) {
    return x.ebits.value() < y.ebits.value() - 1e-12;
  });
  CostReport r;
  const auto& best = alts.front();
  r.ebits = std::max(0.0, best.ebits.value());
  r.cbits = std::max(0.0, best.cbits.value());
  r.ebits_expr = best.ebits;
  r.cbits_expr = best.cbits;
  r.source = best.source;
  r.applicable_protocol = best.protocol;
  r.alternatives = std::move(alts);
  return r;
}

CostReport bound_rank3(int dA, int dB) {
  if (dA < 3 || dB < 2) throw Error("bound_rank3 requires dA >= 3 and dB >= 2");
  const long g = 4L * (dB / 2) + 2;
  const long e = std::min<long>({dA, static_cast<long>(dB) * dB, g});
  const long c = std::min<long>({dA, static_cast<long>(dB) * dB, std::max<long>(12, g)});
  return make_report({{"rank3-theorem", "two-level-or-group", LogExpr::log(e), LogExpr::log(c, 2.0)}});
}

bool permutation_first_term_smaller(int r) {
  if (r < 1) throw Error("rank must be positive");
  if (8 * r - 8 < 0) return false;
  const BigInt lhs = bell(r + 1) * r * (BigInt(1) << r);
  const BigInt rhs = BigInt(1) << (8 * r - 8);
  return lhs < rhs;
}

CostReport bound_permutation(int r) {
  if (r < 1) throw Error("rank must be positive");
  std::vector<CostAlternative> alts;
  const LogExpr first = LogExpr::log(bell(r + 1)) + LogExpr::number(r) + LogExpr::log(BigInt(r));
  alts.push_back({"permutation-theorem-types", "ptl2", first, first.scaled(2)});
  const LogExpr second = LogExpr::number(8.0 * r - 8);
  alts.push_back({"permutation-theorem-loose-types", "ptl3", second, second.scaled(2)});
  if (r == 1) alts.push_back({"product", "local", LogExpr::number(0), LogExpr::number(0)});
  if (r == 2)
    alts.push_back({"rank2-permutation", "ct", LogExpr::number(1), LogExpr::number(2)});
  if (r == 3)
    alts.push_back({"rank3-permutation", "two-level", LogExpr::number(2), LogExpr::number(4)});
  if (r == 4) {
    const LogExpr c = LogExpr::log(BigInt(52) * 2 * 16);
    alts.push_back({"rank4-corollary", "ptl2", c, c.scaled(2)});
  }
  return make_report(std::move(alts));
}

long bound_classical(int r, bool restore_ancillas) {
  if (r < 1) throw Error("rank must be positive");
  if (!restore_ancillas) return 2L * r - 2;
  const long first = 2 * ceil_log2_big(bell(r + 1)) + 2L * r + 2 * ceil_log2_big(BigInt(r));
  return std::min(first, 8L * r - 8);
}

CostReport bound_controlled(int n_terms) {
  if (n_terms < 1) throw Error("term count must be positive");
  return make_report({{"controlled", "ct", LogExpr::log(BigInt(n_terms)),
                       LogExpr::log(BigInt(n_terms), 2.0)}});
}

namespace {

/** Number of projector groups coupled off-diagonally by an extra block. */
int persch_n(const BipartiteOp& u, int row, int r, double tol) {
  const int dA = u.dA, dB = u.dB;
  std::vector<Mat> blocks;
  for (int k = 0; k < dA; ++k)
    if (u.block(row, k).norm() > tol) blocks.push_back(u.block(row, k));
  if (static_cast<int>(blocks.size()) != r - 1) return -1;
  std::vector<int> grow(dB, -1), gcol(dB, -1);
  for (size_t i = 0; i < blocks.size(); ++i)
    for (int y = 0; y < dB; ++y) {
      if (blocks[i].row(y).norm() > tol) grow[y] = static_cast<int>(i);
      if (blocks[i].col(y).norm() > tol) gcol[y] = static_cast<int>(i);
    }
  Mat extra;
  for (int j = 0; j < dA && extra.size() == 0; ++j)
    for (int k = 0; k < dA; ++k) {
      Mat b = u.block(j, k);
      if (b.norm() > tol && !in_span(blocks, b, tol)) {
        extra = b;
        break;
      }
    }
  if (extra.size() == 0) return -1;
  std::vector<bool> coupled(blocks.size(), false);
  for (int y1 = 0; y1 < dB; ++y1)
    for (int y = 0; y < dB; ++y)
      if (std::abs(extra(y1, y)) > tol && grow[y1] >= 0 && gcol[y] >= 0 && grow[y1] != gcol[y]) {
        coupled[grow[y1]] = true;
        coupled[gcol[y]] = true;
      }
  return static_cast<int>(std::count(coupled.begin(), coupled.end(), true));
}

void add_row_count_alternatives(const BipartiteOp& u, int r, bool real,
                                std::vector<CostAlternative>& alts, double tol) {
  BlockProfile p = block_profile(u, tol);
  int best_row = -1, best_col = -1;
  for (int j = 0; j < u.dA; ++j) {
    if (best_row < 0 || p.row_counts[j] > p.row_counts[best_row]) best_row = j;
    if (best_col < 0 || p.col_counts[j] > p.col_counts[best_col]) best_col = j;
  }
  const int max_count = std::max(p.row_counts[best_row], p.col_counts[best_col]);
  if (max_count == r && r >= 2) {
    alts.push_back({"row-with-r-blocks", "ct", LogExpr::log(BigInt(r)), LogExpr::log(BigInt(r), 2.0)});
    return;
  }
  if (max_count != r - 1 || r < 3) return;
  int n;
  if (p.row_counts[best_row] == r - 1) {
    n = persch_n(u, best_row, r, tol);
  } else {
    BipartiteOp ut(u.dA, u.dB, u.m.transpose());
    n = persch_n(ut, best_col, r, tol);
  }
  auto push = [&](const std::string& src, const LogExpr& e) {
    alts.push_back({src, "multi-level", e, e.scaled(2)});
  };
  if (n >= 2 && n <= r - 2) {
    const int m = std::max(n, r - n - 1);
    push("row-with-r-1-blocks(n=" + std::to_string(n) + ")",
         LogExpr::number(2) + LogExpr::log(BigInt(m)));
  } else if (n == 0) {
    push("row-with-r-1-blocks(n=0)", LogExpr::number(2) + LogExpr::log(BigInt(r - 1)));
    if (real)
      push("row-with-r-1-blocks(n=0,real)", LogExpr::number(1) + LogExpr::log(BigInt(r - 1)));
  } else if (n == r - 1) {
    push("row-with-r-1-blocks(n=r-1)", LogExpr::number(1) + LogExpr::log(BigInt(r - 1)));
  }
}

}  // namespace

CostReport recommend(const BipartiteOp& u, double tol) {
  if (!is_unitary(u.m, tol)) throw Error("non-unitary input");
  std::vector<CostAlternative> alts;
  std::vector<std::string> notes;
  const int dmin = std::min(u.dA, u.dB);
  alts.push_back({"two-way-teleportation", "teleport", LogExpr::log(BigInt(dmin), 2.0),
                  LogExpr::log(BigInt(dmin), 4.0)});
  const int r = schmidt_rank(u, tol);
  if (r == 1) alts.push_back({"product", "local", LogExpr::number(0), LogExpr::number(0)});
  std::optional<ControlledForm> cfA, cfB;
  for (Side s : {Side::A, Side::B}) {
    auto f = detect_controlled(u, s, true, tol);
    if (!f) continue;
    (s == Side::A ? cfA : cfB) = f;
    const long n = static_cast<long>(f->terms.size());
    alts.push_back({std::string("controlled-from-") + side_name(s), "ct", LogExpr::log(BigInt(n)),
                    LogExpr::log(BigInt(n), 2.0)});
  }
  if (r == 3 && cfA && u.dA >= 3)
    alts.push_back({"rank3-theorem", "two-level-or-group",
                    bound_rank3(u.dA, u.dB).ebits_expr, bound_rank3(u.dA, u.dB).cbits_expr});
  if (r == 3 && cfB && u.dB >= 3)
    alts.push_back({"rank3-theorem(swapped)", "two-level-or-group",
                    bound_rank3(u.dB, u.dA).ebits_expr, bound_rank3(u.dB, u.dA).cbits_expr});
  alts.push_back({"group-pauli-A", "group", LogExpr::log(BigInt(u.dA), 2.0),
                  LogExpr::log(BigInt(u.dA), 4.0)});
  alts.push_back({"group-pauli-B", "group", LogExpr::log(BigInt(u.dB), 2.0),
                  LogExpr::log(BigInt(u.dB), 4.0)});
  const bool real_perm = is_permutation_matrix(u.m, tol);
  const bool cplx_perm = is_complex_permutation_matrix(u.m, tol);
  if (cplx_perm && r >= 2) add_row_count_alternatives(u, r, real_perm, alts, tol);
  if (real_perm) {
    if (r == 2) alts.push_back({"rank2-permutation", "ct", LogExpr::number(1), LogExpr::number(2)});
    if (r == 3)
      alts.push_back({"rank3-permutation", "two-level", LogExpr::number(2), LogExpr::number(4)});
    auto pt = permutation_type_partitions(u, tol);
    const LogExpr t = LogExpr::log(BigInt(pt.input_A.size())) +
                      LogExpr::log(BigInt(pt.relative_output)) +
                      LogExpr::log(BigInt(pt.output_B.size()));
    alts.push_back({"type-protocol", "ptl2", t, t.scaled(2)});
    auto la = loose_type_partition(u, Side::A, tol), lb = loose_type_partition(u, Side::B, tol);
    BipartiteOp ud(u.dA, u.dB, u.m.adjoint());
    auto la2 = loose_type_partition(ud, Side::A, tol), lb2 = loose_type_partition(ud, Side::B, tol);
    const LogExpr l = (LogExpr::log(BigInt(la.size())) + LogExpr::log(BigInt(lb.size())) +
                       LogExpr::log(BigInt(la2.size())) + LogExpr::log(BigInt(lb2.size())))
                          .scaled(2);
    alts.push_back({"loose-type-protocol", "ptl3", l, l.scaled(2)});
    if (r >= 2) {
      CostReport bp = bound_permutation(r);
      alts.push_back({"permutation-bound:" + bp.source, bp.applicable_protocol, bp.ebits_expr,
                      bp.cbits_expr});
    }
    if (r == 4) {
      BlockProfile p = block_profile(u, tol);
      const int maxc = *std::max_element(p.col_counts.begin(), p.col_counts.end());
      if (maxc == 4) {
        alts.push_back({"rank4-corollary(4-blocks)", "ct", LogExpr::number(2), LogExpr::number(4)});
      } else if (maxc == 3) {
        alts.push_back({"rank4-corollary(3-blocks)", "multi-level", LogExpr::number(3),
                        LogExpr::number(6)});
      } else {
        const LogExpr c = LogExpr::log(BigInt(52) * 2 * 16);
        alts.push_back({"rank4-corollary(types)", "ptl2", c, c.scaled(2)});
      }
    }
  }
  if (cplx_perm && !real_perm && r == 3) {
    Mat off = u.m;
    off.diagonal().setZero();
    if (off.norm() <= tol) notes.push_back("no constant bound known for diagonal rank-3 complex permutation unitaries");
  }
  CostReport rep = make_report(std::move(alts));
  rep.notes = notes;
  return rep;
}

}  // namespace bforge
