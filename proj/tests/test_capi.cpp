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
#include <json.hpp>
#include <string>

#include "bforge/bforge.h"

namespace {

struct Ctx {
  bf_context* c = nullptr;
  Ctx() { REQUIRE(bf_context_new(&c) == BF_OK); }
  ~Ctx() { bf_context_free(c); }
};

std::string take(char* s) {
  std::string out = s ? s : "";
  bf_string_free(s);
  return out;
}

nlohmann::json take_json(char* s) { return nlohmann::json::parse(take(s)); }

}  // namespace

TEST_CASE("operators through handles", "[capi]") {
  Ctx ctx;
  bf_operator* op = nullptr;
  REQUIRE(bf_operator_fixture(ctx.c, "example4", nullptr, &op) == BF_OK);
  int dA = 0, dB = 0;
  REQUIRE(bf_operator_dims(op, &dA, &dB) == BF_OK);
  CHECK(dA == 5);
  CHECK(dB == 6);
  int r = 0;
  REQUIRE(bf_schmidt_rank(ctx.c, op, &r) == BF_OK);
  CHECK(r == 4);

  char* js = nullptr;
  REQUIRE(bf_operator_to_json(ctx.c, op, 0, &js) == BF_OK);
  const std::string sparse = take(js);
  CHECK(nlohmann::json::parse(sparse).contains("perm"));
  bf_operator* back = nullptr;
  REQUIRE(bf_operator_from_json(ctx.c, sparse.c_str(), &back) == BF_OK);
  REQUIRE(bf_schmidt_rank(ctx.c, back, &r) == BF_OK);
  CHECK(r == 4);

  char* an = nullptr;
  REQUIRE(bf_analyze(ctx.c, op, &an) == BF_OK);
  const auto a = take_json(an);
  CHECK(a["schmidt_rank"] == 4);

  bf_operator_free(back);
  bf_operator_free(op);
}

TEST_CASE("error codes and messages", "[capi]") {
  Ctx ctx;
  bf_operator* op = nullptr;
  CHECK(bf_operator_fixture(ctx.c, "nope", nullptr, &op) == BF_ERR_INPUT);
  const std::string msg = bf_last_error(ctx.c);
  CHECK(msg.find("example4") != std::string::npos);
  CHECK(op == nullptr);

  CHECK(bf_operator_from_json(ctx.c, "{\"dA\": 2", &op) == BF_ERR_INPUT);
  CHECK(std::string(bf_last_error(ctx.c)).find("line") != std::string::npos);
  CHECK(bf_operator_from_json(ctx.c, "{\"dA\": 2, \"dB\": 2}", &op) == BF_ERR_INPUT);
  CHECK(bf_context_set_tol(ctx.c, -1) == BF_ERR_INPUT);

  REQUIRE(bf_operator_fixture(ctx.c, "cnot", nullptr, &op) == BF_OK);
  CHECK(std::string(bf_last_error(ctx.c)).empty());
  char* out = nullptr;
  int pass = 0;
  CHECK(bf_simulate(ctx.c, op, "bogus", nullptr, &out, &pass) == BF_ERR_INPUT);
  CHECK(std::string(bf_last_error(ctx.c)).find("ptl2") != std::string::npos);
  bf_operator_free(op);
  CHECK(std::string(bf_status_name(BF_ERR_NUMERIC)).size() > 0);
}

TEST_CASE("bounds", "[capi]") {
  Ctx ctx;
  char* out = nullptr;
  REQUIRE(bf_bound_permutation(ctx.c, 4, &out) == BF_OK);
  const auto j = take_json(out);
  CHECK(j["source"] == "rank4-corollary");
  CHECK(j["ebits"].get<double>() < 10.71);
  long n = 0;
  REQUIRE(bf_bound_classical(ctx.c, 4, 1, &n) == BF_OK);
  CHECK(n == 24);
  CHECK(bf_bound_rank3(ctx.c, 2, 2, &out) == BF_ERR_INPUT);
}

TEST_CASE("simulation", "[capi]") {
  Ctx ctx;
  bf_operator* op = nullptr;
  REQUIRE(bf_operator_fixture(ctx.c, "cnot", nullptr, &op) == BF_OK);
  char* out = nullptr;
  int pass = 0;
  REQUIRE(bf_simulate(ctx.c, op, "ct", nullptr, &out, &pass) == BF_OK);
  CHECK(pass == 1);
  CHECK(take_json(out)["pass"] == true);
  REQUIRE(bf_simulate(ctx.c, op, "ct", "{\"corrupt\": true}", &out, &pass) == BF_OK);
  bf_string_free(out);
  CHECK(pass == 0);
  bf_operator_free(op);
}

TEST_CASE("classical through the C API", "[capi]") {
  Ctx ctx;
  char* table = nullptr;
  REQUIRE(bf_classical_map(ctx.c, "dcnot", nullptr, &table) == BF_OK);
  const std::string t = take(table);
  char* out = nullptr;
  REQUIRE(bf_synthesize(ctx.c, t.c_str(), -1, "no_restore", &out) == BF_OK);
  const auto j = take_json(out);
  CHECK(j["nonlocal_count"] == 2);
  CHECK(j["verified"] == true);
  CHECK(bf_synthesize(ctx.c, t.c_str(), -1, "sometimes", &out) == BF_ERR_INPUT);
}

TEST_CASE("outputs are deterministic", "[capi]") {
  std::string first;
  for (int i = 0; i < 2; ++i) {
    Ctx ctx;
    bf_context_set_seed(ctx.c, 42);
    bf_operator* op = nullptr;
    REQUIRE(bf_operator_fixture(ctx.c, "random_permutation", "{\"rank\": 3}", &op) == BF_OK);
    char* out = nullptr;
    REQUIRE(bf_operator_to_json(ctx.c, op, 1, &out) == BF_OK);
    const std::string s = take(out);
    if (i == 0)
      first = s;
    else
      CHECK(s == first);
    bf_operator_free(op);
  }
}
