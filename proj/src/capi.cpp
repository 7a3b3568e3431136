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

#include "bforge/bforge.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>

#include "bforge/classical.hpp"
#include "bforge/costs.hpp"
#include "bforge/driver.hpp"
#include "bforge/entpower.hpp"
#include "bforge/fixtures.hpp"
#include "bforge/io.hpp"

struct bf_context {
  double tol = bforge::kDefaultTol;
  std::uint64_t seed = 1;
  std::string error;
};

struct bf_operator {
  bforge::BipartiteOp op;
};

namespace {

using bforge::io::Json;

char* copy_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

nlohmann::json parse_params(const char* text, const char* what) {
  if (!text || !*text) return nlohmann::json::object();
  try {
    auto j = nlohmann::json::parse(text);
    if (!j.is_object()) throw bforge::Error(std::string(what) + ": expected a JSON object");
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw bforge::Error(std::string(what) + ": " + e.what());
  }
}

std::string unknown(const std::string& kind, const std::string& name,
                    const std::vector<std::string>& valid) {
  std::string s = "unknown " + kind + " '" + name + "'; valid: ";
  for (size_t i = 0; i < valid.size(); ++i) s += (i ? ", " : "") + valid[i];
  return s;
}

template <typename F>
bf_status guarded(bf_context* ctx, F&& fn) {
  if (!ctx) return BF_ERR_INPUT;
  ctx->error.clear();
  try {
    fn();
    return BF_OK;
  } catch (const bforge::NumericError& e) {
    ctx->error = e.what();
    return BF_ERR_NUMERIC;
  } catch (const bforge::Error& e) {
    ctx->error = e.what();
    return BF_ERR_INPUT;
  } catch (const nlohmann::json::exception& e) {
    ctx->error = e.what();
    return BF_ERR_INPUT;
  } catch (const std::exception& e) {
    ctx->error = e.what();
    return BF_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw bforge::Error(std::string(what) + " is null");
}

void emit(const Json& j, char** out) {
  require(out, "output pointer");
  *out = copy_string(bforge::io::dump(j));
}

}  // namespace

extern "C" {

const char* bf_version(void) { return "0.1.0"; }

const char* bf_status_name(bf_status s) {
  switch (s) {
    case BF_OK: return "ok";
    case BF_ERR_INPUT: return "input error";
    case BF_ERR_NUMERIC: return "numeric error";
    default: return "internal error";
  }
}

bf_status bf_context_new(bf_context** out) {
  if (!out) return BF_ERR_INPUT;
  *out = new (std::nothrow) bf_context();
  return *out ? BF_OK : BF_ERR_INTERNAL;
}

void bf_context_free(bf_context* ctx) { delete ctx; }

bf_status bf_context_set_tol(bf_context* ctx, double tol) {
  return guarded(ctx, [&] {
    if (!(tol > 0) || tol >= 1) throw bforge::Error("tolerance must be in (0, 1)");
    ctx->tol = tol;
  });
}

bf_status bf_context_set_seed(bf_context* ctx, uint64_t seed) {
  return guarded(ctx, [&] { ctx->seed = seed; });
}

const char* bf_last_error(const bf_context* ctx) { return ctx ? ctx->error.c_str() : "null context"; }

void bf_string_free(char* s) { std::free(s); }

bf_status bf_operator_from_json(bf_context* ctx, const char* json, bf_operator** out) {
  return guarded(ctx, [&] {
    require(json, "json");
    require(out, "output pointer");
    *out = new bf_operator{bforge::io::parse_op(json)};
  });
}

bf_status bf_operator_from_file(bf_context* ctx, const char* path, bf_operator** out) {
  return guarded(ctx, [&] {
    require(path, "path");
    require(out, "output pointer");
    *out = new bf_operator{bforge::io::read_op_file(path)};
  });
}

bf_status bf_operator_fixture(bf_context* ctx, const char* name, const char* params_json,
                              bf_operator** out) {
  return guarded(ctx, [&] {
    require(name, "name");
    require(out, "output pointer");
    const auto names = bforge::fixtures::names();
    if (std::find(names.begin(), names.end(), name) == names.end())
      throw bforge::Error(unknown("fixture", name, names));
    auto params = parse_params(params_json, "fixture parameters");
    if (!params.contains("seed")) params["seed"] = static_cast<int>(ctx->seed % 2147483648ULL);
    *out = new bf_operator{bforge::fixtures::by_name(name, params)};
  });
}

void bf_operator_free(bf_operator* op) { delete op; }

bf_status bf_operator_dims(const bf_operator* op, int* dA, int* dB) {
  if (!op || !dA || !dB) return BF_ERR_INPUT;
  *dA = op->op.dA;
  *dB = op->op.dB;
  return BF_OK;
}

bf_status bf_operator_to_json(bf_context* ctx, const bf_operator* op, int dense, char** out) {
  return guarded(ctx, [&] {
    require(op, "operator");
    emit(bforge::io::op_to_json(op->op, dense != 0, ctx->tol), out);
  });
}

bf_status bf_fixture_names(bf_context* ctx, char** out_json) {
  return guarded(ctx, [&] { emit(Json(bforge::fixtures::names()), out_json); });
}

bf_status bf_schmidt_rank(bf_context* ctx, const bf_operator* op, int* out) {
  return guarded(ctx, [&] {
    require(op, "operator");
    require(out, "output pointer");
    *out = bforge::schmidt_rank(op->op, ctx->tol);
  });
}

bf_status bf_analyze(bf_context* ctx, const bf_operator* op, char** out_json) {
  return guarded(ctx, [&] {
    require(op, "operator");
    emit(bforge::io::analyze(op->op, ctx->tol), out_json);
  });
}

bf_status bf_bound_permutation(bf_context* ctx, int r, char** out_json) {
  return guarded(ctx, [&] { emit(bforge::io::to_json(bforge::bound_permutation(r)), out_json); });
}

bf_status bf_bound_rank3(bf_context* ctx, int dA, int dB, char** out_json) {
  return guarded(ctx, [&] { emit(bforge::io::to_json(bforge::bound_rank3(dA, dB)), out_json); });
}

bf_status bf_bound_controlled(bf_context* ctx, int n_terms, char** out_json) {
  return guarded(ctx,
                 [&] { emit(bforge::io::to_json(bforge::bound_controlled(n_terms)), out_json); });
}

bf_status bf_bound_classical(bf_context* ctx, int r, int restore, long* out) {
  return guarded(ctx, [&] {
    require(out, "output pointer");
    *out = bforge::bound_classical(r, restore != 0);
  });
}

bf_status bf_recommend(bf_context* ctx, const bf_operator* op, char** out_json) {
  return guarded(ctx, [&] {
    require(op, "operator");
    emit(bforge::io::to_json(bforge::recommend(op->op, ctx->tol)), out_json);
  });
}

bf_status bf_protocol_names(bf_context* ctx, char** out_json) {
  return guarded(ctx, [&] { emit(Json(bforge::protocol_names()), out_json); });
}

bf_status bf_simulate(bf_context* ctx, const bf_operator* op, const char* protocol,
                      const char* options_json, char** out_json, int* pass) {
  return guarded(ctx, [&] {
    require(op, "operator");
    require(protocol, "protocol");
    const auto names = bforge::protocol_names();
    if (std::find(names.begin(), names.end(), protocol) == names.end())
      throw bforge::Error(unknown("protocol", protocol, names));
    const auto o = parse_params(options_json, "simulate options");
    bforge::SimulateOptions so;
    so.run.tol = ctx->tol;
    so.run.seed = ctx->seed;
    const std::string mode = o.value("mode", "enumerate");
    if (mode != "enumerate" && mode != "sample")
      throw bforge::Error(unknown("mode", mode, {"enumerate", "sample"}));
    so.run.sample = mode == "sample";
    so.run.skip_final_correction = o.value("corrupt", false);
    so.group = o.value("group", so.group);
    const auto groups = bforge::group_names();
    if (std::find(groups.begin(), groups.end(), so.group) == groups.end())
      throw bforge::Error(unknown("group", so.group, groups));
    so.extra_terms = o.value("extra_terms", so.extra_terms);
    so.force_mixed = o.value("force_mixed", false);
    const auto trace = bforge::simulate(protocol, op->op, so);
    emit(bforge::io::to_json(trace, o.value("events", true)), out_json);
    if (pass) *pass = trace.pass ? 1 : 0;
  });
}

bf_status bf_entpower_maximize(bf_context* ctx, const bf_operator* op, const char* options_json,
                               char** out_json) {
  return guarded(ctx, [&] {
    require(op, "operator");
    const auto o = parse_params(options_json, "entpower options");
    bforge::entpower::Config cfg;
    cfg.seed = ctx->seed;
    cfg.restarts = o.value("restarts", cfg.restarts);
    cfg.max_iter = o.value("max_iter", cfg.max_iter);
    cfg.tol = o.value("tol", cfg.tol);
    if (cfg.restarts < 1 || cfg.max_iter < 1 || !(cfg.tol > 0))
      throw bforge::Error("restarts, max_iter and tol must be positive");
    if (o.contains("dRA")) cfg.dRA = o.at("dRA").get<int>();
    if (o.contains("dRB")) cfg.dRB = o.at("dRB").get<int>();
    const auto r = bforge::entpower::maximize(op->op, cfg);
    Json j = bforge::io::to_json(r);
    j["dA"] = op->op.dA;
    j["dB"] = op->op.dB;
    emit(j, out_json);
  });
}

bf_status bf_entpower_case(bf_context* ctx, const char* tag, const char* params_json,
                           char** out_json) {
  return guarded(ctx, [&] {
    require(tag, "tag");
    const auto tags = bforge::entpower::fixture_tags();
    if (std::find(tags.begin(), tags.end(), tag) == tags.end())
      throw bforge::Error(unknown("case", tag, tags));
    const auto params = parse_params(params_json, "case parameters");
    const auto u = bforge::entpower::fixture_operator(tag, params);
    const auto in = bforge::entpower::fixture_inputs(tag, params);
    emit(Json{{"case", tag},
              {"value", bforge::entpower::output_entanglement(u, in)},
              {"expected", bforge::entpower::fixture_value(tag)},
              {"operator", bforge::io::op_to_json(u, false, ctx->tol)},
              {"input", bforge::io::to_json(in)}},
         out_json);
  });
}

bf_status bf_synthesize(bf_context* ctx, const char* truth_table, int n_bits_A, const char* regime,
                        char** out_json) {
  return guarded(ctx, [&] {
    require(truth_table, "truth table");
    require(regime, "regime");
    using namespace bforge::classical;
    const std::string rg = regime;
    if (rg != "restore" && rg != "no_restore")
      throw bforge::Error(unknown("regime", rg, {"restore", "no_restore"}));
    std::istringstream in(truth_table);
    const ReversibleMap map = read_truth_table(in, n_bits_A);
    const auto s = synthesize(map, rg == "restore" ? Regime::Restore : Regime::NoRestore);
    const long bad = verify_exhaustive(s, map);
    Json j = bforge::io::to_json(s);
    j["replay_mismatches"] = bad;
    j["verified"] = bad == 0;
    emit(j, out_json);
  });
}

bf_status bf_classical_map(bf_context* ctx, const char* name, const char* params_json,
                           char** out_table) {
  return guarded(ctx, [&] {
    require(name, "name");
    require(out_table, "output pointer");
    using namespace bforge::classical;
    const auto p = parse_params(params_json, "map parameters");
    const std::string n = name;
    const int na = p.value("n", 2), mb = p.value("m", 2);
    const std::uint64_t seed = p.value("seed", ctx->seed);
    ReversibleMap map;
    if (n == "identity") map = identity_map(na, mb);
    else if (n == "cnot") map = cnot_map();
    else if (n == "dcnot") map = dcnot_map();
    else if (n == "swap") map = swap_map();
    else if (n == "random") map = random_map(na, mb, seed);
    else if (n == "structured") map = random_structured_map(na, mb, p.value("k", 2), seed);
    else
      throw bforge::Error(
          unknown("map", n, {"identity", "cnot", "dcnot", "swap", "random", "structured"}));
    std::ostringstream out;
    write_truth_table(out, map);
    *out_table = copy_string(out.str());
  });
}

bf_status bf_report(bf_context* ctx, int timing, char** out_json, int* all_pass) {
  return guarded(ctx, [&] {
    const auto cs = bforge::run_acceptance(ctx->seed);
    const Json j = bforge::to_json(cs, timing != 0);
    if (all_pass) *all_pass = j.at("all_pass").get<bool>() ? 1 : 0;
    emit(j, out_json);
  });
}

bf_status bf_json_to_text(bf_context* ctx, const char* json, char** out_text) {
  return guarded(ctx, [&] {
    require(json, "json");
    require(out_text, "output pointer");
    *out_text = copy_string(bforge::io::render_text(Json::parse(json)));
  });
}

}  // extern "C"
