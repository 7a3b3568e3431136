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

#include "bforge/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bforge/structure.hpp"

namespace bforge::io {

namespace {

void put_number(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void dump_rec(const Json& j, int indent, int depth, std::string& out) {
  const std::string pad = indent > 0 ? std::string(indent * (depth + 1), ' ') : "";
  const std::string close = indent > 0 ? std::string(indent * depth, ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad;
        out += Json(it.key()).dump();
        out += indent > 0 ? ": " : ":";
        dump_rec(it.value(), indent, depth + 1, out);
      }
      out += nl;
      out += close;
      out += "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& e : j)
        if (e.is_structured() && !(e.is_array() && e.size() <= 2 && !e.empty() &&
                                   e.front().is_number()))
          flat = false;
      out += "[";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : ",";
        if (!flat) {
          out += nl;
          out += pad;
        }
        first = false;
        dump_rec(e, flat ? 0 : indent, depth + 1, out);
      }
      if (!flat) {
        out += nl;
        out += close;
      }
      out += "]";
      return;
    }
    case Json::value_t::number_float:
      put_number(out, j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

void text_rec(const Json& j, int depth, std::string& out) {
  const std::string pad(2 * depth, ' ');
  auto scalar = [](const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    return dump(v, 0);
  };
  auto simple = [](const Json& v) {
    if (!v.is_array()) return !v.is_structured();
    for (const auto& e : v)
      if (e.is_structured()) return false;
    return true;
  };
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (simple(it.value())) {
        out += pad + it.key() + ": " + scalar(it.value()) + "\n";
      } else {
        out += pad + it.key() + ":\n";
        text_rec(it.value(), depth + 1, out);
      }
    }
  } else if (j.is_array()) {
    for (const auto& e : j) {
      if (simple(e)) {
        out += pad + "- " + scalar(e) + "\n";
      } else {
        out += pad + "-\n";
        text_rec(e, depth + 1, out);
      }
    }
  } else {
    out += pad + scalar(j) + "\n";
  }
}

cplx read_complex(const nlohmann::json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw Error(where + ": expected [re, im]");
  return {v[0].get<double>(), v[1].get<double>()};
}

int read_dim(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw Error(std::string(key) + ": missing field");
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long>() < 1 || v.get<long>() > 4096)
    throw Error(std::string(key) + ": expected a positive integer");
  return v.get<int>();
}

Json supports_json(const std::vector<std::vector<int>>& classes) {
  Json a = Json::array();
  for (const auto& c : classes) a.push_back(c);
  return a;
}

Json controlled_json(const ControlledForm& f, const BipartiteOp& u) {
  Json t = Json::array();
  for (const auto& term : f.terms) t.push_back(Json{{"support", term.support}});
  return Json{{"side", side_name(f.side)}, {"terms", f.terms.size()}, {"supports", t},
              {"reconstruction_error", fro(f.reconstruct() - u.m)}};
}

template <typename F>
Json guarded(F&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return Json{{"error", e.what()}};
  }
}

}  // namespace

std::string dump(const Json& j, int indent) {
  std::string out;
  dump_rec(j, indent, 0, out);
  return out;
}

std::string render_text(const Json& j) {
  std::string out;
  text_rec(j, 0, out);
  return out;
}

Json op_to_json(const BipartiteOp& u, bool force_dense, double tol) {
  Json j{{"dA", u.dA}, {"dB", u.dB}};
  const long n = u.dim();
  if (!force_dense && is_complex_permutation_matrix(u.m, tol)) {
    Json perm = Json::array();
    for (long c = 0; c < n; ++c)
      for (long r = 0; r < n; ++r) {
        const cplx v = u.m(r, c);
        if (std::abs(v) <= tol) continue;
        Json e{{"col", c}, {"row", r}};
        if (std::abs(v - cplx(1, 0)) > 1e-15) e["phase"] = Json::array({v.real(), v.imag()});
        perm.push_back(e);
      }
    j["perm"] = perm;
    return j;
  }
  Json rows = Json::array();
  for (long r = 0; r < n; ++r) {
    Json row = Json::array();
    for (long c = 0; c < n; ++c) row.push_back(Json::array({u.m(r, c).real(), u.m(r, c).imag()}));
    rows.push_back(row);
  }
  j["matrix"] = rows;
  return j;
}

BipartiteOp op_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error("top level: expected an object with dA, dB and matrix or perm");
  const int dA = read_dim(j, "dA"), dB = read_dim(j, "dB");
  const long n = static_cast<long>(dA) * dB;
  if (n > 4096) throw Error("dA*dB: dimension too large");
  const bool has_m = j.contains("matrix"), has_p = j.contains("perm");
  if (has_m == has_p) throw Error("top level: exactly one of matrix or perm is required");
  Mat m = Mat::Zero(n, n);
  if (has_m) {
    const auto& rows = j.at("matrix");
    if (!rows.is_array() || static_cast<long>(rows.size()) != n)
      throw Error("matrix: expected " + std::to_string(n) + " rows");
    for (long r = 0; r < n; ++r) {
      const auto& row = rows[r];
      const std::string where = "matrix[" + std::to_string(r) + "]";
      if (!row.is_array() || static_cast<long>(row.size()) != n)
        throw Error(where + ": expected " + std::to_string(n) + " entries");
      for (long c = 0; c < n; ++c)
        m(r, c) = read_complex(row[c], where + "[" + std::to_string(c) + "]");
    }
  } else {
    const auto& perm = j.at("perm");
    if (!perm.is_array()) throw Error("perm: expected an array");
    for (size_t i = 0; i < perm.size(); ++i) {
      const auto& e = perm[i];
      const std::string where = "perm[" + std::to_string(i) + "]";
      if (!e.is_object()) throw Error(where + ": expected an object");
      for (const char* key : {"col", "row"}) {
        if (!e.contains(key) || !e.at(key).is_number_integer())
          throw Error(where + "." + key + ": expected an integer");
        const long v = e.at(key).get<long>();
        if (v < 0 || v >= n)
          throw Error(where + "." + key + ": index " + std::to_string(v) + " out of range");
      }
      const long c = e.at("col").get<long>(), r = e.at("row").get<long>();
      if (std::abs(m(r, c)) != 0) throw Error(where + ": duplicate entry");
      m(r, c) = e.contains("phase") ? read_complex(e.at("phase"), where + ".phase") : cplx(1, 0);
    }
  }
  return BipartiteOp(dA, dB, std::move(m));
}

BipartiteOp parse_op(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // Recover line and column from the byte offset.
    const size_t pos = std::min<size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    long line = 1, col = 1;
    for (size_t i = 0; i < pos; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error("line " + std::to_string(line) + ", column " + std::to_string(col) +
                ": JSON syntax error");
  }
  return op_from_json(j);
}

BipartiteOp read_op_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(path + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_op(ss.str());
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

Json to_json(const LogExpr& e) { return Json{{"expr", e.str()}, {"value", e.value()}}; }

Json to_json(const CostReport& r) {
  Json alts = Json::array();
  for (const auto& a : r.alternatives)
    alts.push_back(Json{{"source", a.source},
                        {"protocol", a.protocol},
                        {"ebits", to_json(a.ebits)},
                        {"cbits", to_json(a.cbits)}});
  return Json{{"ebits", r.ebits},
              {"cbits", r.cbits},
              {"ebits_expr", r.ebits_expr.str()},
              {"cbits_expr", r.cbits_expr.str()},
              {"source", r.source},
              {"protocol", r.applicable_protocol},
              {"alternatives", alts},
              {"notes", r.notes}};
}

Json to_json(const locc::ProtocolTrace& t, bool events) {
  Json regs = Json::array();
  for (const auto& r : t.registers)
    regs.push_back(
        Json{{"name", r.name}, {"party", locc::party_name(r.party)}, {"dim", r.dim}, {"role", r.role}});
  Json branches = Json::array();
  for (const auto& b : t.branches)
    branches.push_back(Json{{"outcomes", b.outcomes},
                            {"probability", b.probability},
                            {"distance", b.distance},
                            {"ancillas_restored", b.ancillas_restored},
                            {"ebits", b.ledger.ebits},
                            {"cbits", b.ledger.cbits}});
  Json j{{"protocol", t.protocol},
         {"mode", t.mode},
         {"pass", t.pass},
         {"max_distance", t.max_distance},
         {"ancillas_restored", t.ancillas_restored},
         {"ledger", Json{{"ebits", t.ledger.ebits}, {"cbits", t.ledger.cbits}}},
         {"expected", Json{{"ebits", t.expected.ebits},
                           {"cbits", t.expected.cbits},
                           {"formula", t.expected_formula}}},
         {"ledger_matches", t.ledger_matches},
         {"branch_count", t.branches.size()},
         {"registers", regs}};
  if (events) {
    Json ev = Json::array();
    for (const auto& e : t.events) {
      Json x{{"kind", e.kind}, {"label", e.label}, {"party", locc::party_name(e.party)},
             {"registers", e.registers}};
      if (e.size > 0) x["size"] = e.size;
      if (e.outcome >= 0) x["outcome"] = e.outcome;
      ev.push_back(x);
    }
    j["events"] = ev;
  }
  j["branches"] = branches;
  j["notes"] = t.notes;
  return j;
}

Json to_json(const entpower::ProductInput& in) {
  auto vec = [](const Vec& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(Json::array({v(i).real(), v(i).imag()}));
    return a;
  };
  return Json{{"dRA", in.dRA}, {"dRB", in.dRB}, {"alpha", vec(in.alpha)}, {"beta", vec(in.beta)}};
}

Json to_json(const entpower::Result& r) {
  return Json{{"best_value", r.best_value},
              {"upper_bound", r.upper_bound},
              {"restarts", r.restarts},
              {"converged", r.converged},
              {"history", r.history},
              {"best_input", to_json(r.best_input)}};
}

Json to_json(const classical::CnotSynthesis& s) {
  Json gates = Json::array();
  for (const auto& g : s.gates) {
    const char* kind = g.kind == classical::Gate::Kind::Xor    ? "xor"
                       : g.kind == classical::Gate::Kind::Perm ? "perm"
                                                               : "cnot";
    Json x{{"kind", kind},
           {"party", g.party == classical::Party::A ? "A" : "B"},
           {"controls", g.controls},
           {"targets", g.targets}};
    if (!g.table.empty()) x["table"] = g.table;
    if (!g.label.empty()) x["label"] = g.label;
    gates.push_back(x);
  }
  Json cands = Json::array();
  for (const auto& [name, count] : s.candidates)
    cands.push_back(Json{{"construction", name}, {"nonlocal_count", count}});
  return Json{{"regime", classical::regime_name(s.regime)},
              {"construction", s.construction},
              {"n_bits_A", s.n_bits_A},
              {"m_bits_B", s.m_bits_B},
              {"ancillas_A", s.ancillas_A},
              {"ancillas_B", s.ancillas_B},
              {"schmidt_rank", s.schmidt_rank},
              {"nonlocal_count", s.nonlocal_count},
              {"bound", s.bound},
              {"candidates", cands},
              {"gates", gates}};
}

Json analyze(const BipartiteOp& u, double tol) {
  Json j{{"dA", u.dA}, {"dB", u.dB}};
  const bool unitary = is_unitary(u.m, tol);
  j["unitary"] = unitary;
  if (!unitary) j["warning"] = "input is not unitary; unitary-only analyses are skipped";
  if (fro(u.m) == 0) {
    j["error"] = "zero operator";
    return j;
  }
  const OperatorSchmidt os = operator_schmidt(u, tol);
  j["schmidt_rank"] = os.rank;
  j["schmidt_coefficients"] = os.coefficients;

  const BlockProfile p = block_profile(u, tol);
  Json grid = Json::array();
  for (const auto& row : p.grid) {
    std::string s;
    for (bool b : row) s += b ? '1' : '0';
    grid.push_back(s);
  }
  j["block_profile"] = Json{{"grid", grid},
                            {"row_counts", p.row_counts},
                            {"col_counts", p.col_counts},
                            {"is_permutation", p.is_permutation},
                            {"is_complex_permutation", p.is_complex_permutation}};
  if (!unitary) return j;

  Json ctl = Json::object();
  for (Side s : {Side::A, Side::B}) {
    auto f = detect_controlled(u, s, false, tol);
    if (!f) f = detect_controlled(u, s, true, tol);
    ctl[side_name(s)] = f ? controlled_json(*f, u) : Json(nullptr);
  }
  j["controlled"] = ctl;

  Json ds = Json::object();
  for (Side s : {Side::A, Side::B})
    ds[side_name(s)] = guarded([&] {
      Json comps = Json::array();
      for (const auto& c : direct_sum_decompose(u, s, tol))
        comps.push_back(Json{{"support", c.support}, {"schmidt_rank", schmidt_rank(c.op, tol)}});
      return comps;
    });
  j["direct_sum"] = ds;

  if (os.rank == 2 && p.is_complex_permutation)
    j["standard_form"] = guarded([&] {
      auto f = rank2_standard_form(u, !p.is_permutation, tol);
      Json x = controlled_json(f, u);
      x["kind"] = "rank-2 controlled";
      return x;
    });
  if (os.rank == 3) {
    j["standard_form"] = guarded([&] {
      const Rank3StandardForm f = rank3_standard_form(u, tol);
      return Json{{"kind", "rank-3"},
                  {"branch", f.branch},
                  {"w3_rank", f.w3_rank},
                  {"block1_dim", f.block1_dim},
                  {"blocks", f.blocks.size()},
                  {"simultaneously_diagonal", f.simultaneously_diagonal},
                  {"reconstruction_error", f.reconstruction_error},
                  {"gauge_residual", f.gauge_residual}};
    });
    if (p.is_permutation)
      j["rank3_classification"] = guarded([&] {
        const auto c = classify_rank3_permutation(u, tol);
        return Json{{"tag", c.tag}, {"reconstruction_error", c.reconstruction_error}};
      });
  }

  if (p.is_complex_permutation) {
    j["types"] = guarded([&] {
      const PermutationTypes t = permutation_type_partitions(u, tol);
      const TypePartition la = loose_type_partition(u, Side::A, tol);
      const TypePartition lb = loose_type_partition(u, Side::B, tol);
      return Json{{"input_types", t.input_A.size()},
                  {"input_classes", supports_json(t.input_A.classes)},
                  {"relative_output", t.relative_output},
                  {"output_types", t.output_B.size()},
                  {"output_classes", supports_json(t.output_B.classes)},
                  {"loose_types_A", la.size()},
                  {"loose_types_B", lb.size()}};
    });
  }

  j["partial_transpose"] = guarded([&] {
    const auto c = partial_transpose_check(u, 0, tol);
    return Json{{"k", c.k}, {"rank_U", c.lhs_rank}, {"rank_TB", c.rhs_rank}, {"holds", c.holds}};
  });
  j["cost"] = guarded([&] { return to_json(recommend(u, tol)); });
  return j;
}

}  // namespace bforge::io
