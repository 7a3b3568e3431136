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

#include <boost/multiprecision/cpp_int.hpp>
#include <string>
#include <vector>

#include "bforge/linalg.hpp"

namespace bforge {

using BigInt = boost::multiprecision::cpp_int;

/** Bell number via the Bell triangle; bell(0) = 1. */
BigInt bell(int n);
double log2_big(const BigInt& x);
/** Smallest k with 2^k >= x, for x >= 1. */
long ceil_log2_big(const BigInt& x);

/** sum_i coef_i * log2(arg_i) + constant, kept symbolic for golden output. */
struct LogExpr {
  std::vector<std::pair<double, BigInt>> terms;
  double constant = 0;

  static LogExpr log(const BigInt& arg, double coef = 1.0);
  static LogExpr number(double c);
  LogExpr operator+(const LogExpr& o) const;
  LogExpr scaled(double k) const;
  double value() const;
  std::string str() const;
};

struct CostAlternative {
  std::string source;
  std::string protocol;
  LogExpr ebits;
  LogExpr cbits;
};

struct CostReport {
  double ebits = 0;
  double cbits = 0;
  LogExpr ebits_expr;
  LogExpr cbits_expr;
  std::string source;
  std::string applicable_protocol;
  std::vector<CostAlternative> alternatives;
  std::vector<std::string> notes;
};

/** Picks the cheapest alternative and sorts the list by ebits. */
CostReport make_report(std::vector<CostAlternative> alts);

CostReport bound_rank3(int dA, int dB);
CostReport bound_permutation(int r);
long bound_classical(int r, bool restore_ancillas);
CostReport bound_controlled(int n_terms);
CostReport recommend(const BipartiteOp& u, double tol = kDefaultTol);

/** Exact check that B_{r+1} * r * 2^r < 2^(8r-8). */
bool permutation_first_term_smaller(int r);

}  // namespace bforge
