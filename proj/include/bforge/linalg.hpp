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

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bforge {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;

constexpr double kDefaultTol = 1e-8;

/** Raised for malformed arguments and violated preconditions. */
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/** Raised when a structural lemma or numerical invariant fails to hold. */
class NumericError : public Error {
 public:
  using Error::Error;
};

enum class Side { A, B };

inline const char* side_name(Side s) { return s == Side::A ? "A" : "B"; }

/**
 * Operator on H_A (x) H_B. Composite index i = a * dB + b.
 */
struct BipartiteOp {
  int dA = 1;
  int dB = 1;
  Mat m;

  BipartiteOp() = default;
  BipartiteOp(int da, int db, Mat mat);

  int dim() const { return dA * dB; }
  /** Block <j|_A U |k>_A, a dB x dB matrix. */
  Mat block(int j, int k) const;
  /** Same operator with the roles of A and B exchanged. */
  BipartiteOp swapped() const;
};

struct OperatorSchmidt {
  int rank = 0;
  std::vector<double> coefficients;
  std::vector<Mat> a_ops;
  std::vector<Mat> b_ops;
  double reconstruction_error = 0;
};

Mat tensor(const Mat& a, const Mat& b);
Mat tensor(std::initializer_list<Mat> ops);

/** dA^2 x dB^2 matrix with rows (a,a') and columns (b,b'). */
Mat reshuffle(const BipartiteOp& u);
BipartiteOp unreshuffle(const Mat& r, int dA, int dB);

OperatorSchmidt operator_schmidt(const BipartiteOp& u, double tol = kDefaultTol);
int schmidt_rank(const BipartiteOp& u, double tol = kDefaultTol);

double von_neumann_entropy(const Mat& rho, double tol = kDefaultTol);
Mat partial_trace(const Mat& state, const std::vector<int>& dims,
                  const std::vector<int>& keep);

Mat choi_of_unitary(const BipartiteOp& u, double tol = kDefaultTol);
/** Frobenius distance after aligning the global phase. */
double choi_distance(const Mat& c1, const Mat& c2);

int distinct_values(const std::vector<cplx>& values, double tol = kDefaultTol);
/** Single-linkage cluster label per value, labels ordered by first member. */
std::vector<int> cluster_values(const std::vector<cplx>& values, double tol);

// Small utilities.
bool is_unitary(const Mat& u, double tol = kDefaultTol);
int matrix_rank(const Mat& m, double tol = kDefaultTol);
/** Rank of a set of matrices viewed as vectors. */
int span_rank(const std::vector<Mat>& ms, double tol = kDefaultTol);
bool in_span(const std::vector<Mat>& basis, const Mat& m, double tol = kDefaultTol);
Mat fourier(int n);
/** X|k> = |k + step mod n>. */
Mat shift(int n, int step);
/** Z|k> = w^k |k>, w = exp(2 pi i / n). */
Mat clock(int n);
Mat pauli_x();
Mat pauli_y();
Mat pauli_z();
Mat direct_sum(const std::vector<Mat>& parts);
Mat ketbra(int n, int row, int col);
Mat swap_gate(int dA, int dB);
Mat random_unitary(int n, std::uint64_t seed);
double fro(const Mat& m);
/** e^{i phi} maximizing Re tr(a^dag e^{i phi} b) alignment of b onto a. */
cplx phase_align(const Mat& a, const Mat& b);

}  // namespace bforge
