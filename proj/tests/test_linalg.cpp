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
#include <cmath>
#include <functional>
#include <random>

#include "bforge/fixtures.hpp"
#include "bforge/io.hpp"
#include "bforge/linalg.hpp"

using namespace bforge;
using Catch::Matchers::WithinAbs;

namespace {

const cplx kI(0, 1);

Mat random_matrix(int r, int c, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = cplx(n(rng), n(rng));
  return m;
}

// Brute-force rank of the reshuffled matrix, built entry by entry.
int schmidt_rank_oracle(const BipartiteOp& u) {
  const int dA = u.dA, dB = u.dB;
  Mat r(dA * dA, dB * dB);
  for (int a = 0; a < dA; ++a)
    for (int ap = 0; ap < dA; ++ap)
      for (int b = 0; b < dB; ++b)
        for (int bp = 0; bp < dB; ++bp) r(a * dA + ap, b * dB + bp) = u.m(a * dB + b, ap * dB + bp);
  Eigen::JacobiSVD<Mat> svd(r);
  const auto& s = svd.singularValues();
  int k = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) k += s(i) > 1e-8 * s(0);
  return k;
}

/** Connected components of the nonzero pattern graph (rows and columns as one vertex set). */
int pattern_components(const Mat& v, double tol = 1e-9) {
  const int n = static_cast<int>(v.rows());
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (std::abs(v(i, j)) > tol) parent[find(i)] = find(j);
  int c = 0;
  for (int i = 0; i < n; ++i) c += find(i) == i;
  return c;
}

}  // namespace

TEST_CASE("tensor products", "[linalg]") {
  CHECK(tensor(Mat::Identity(2, 2), Mat::Identity(2, 2)).isApprox(Mat::Identity(4, 4)));
  const Mat p0 = ketbra(2, 0, 0), p1 = ketbra(2, 1, 1);
  const Mat t = tensor(p0, pauli_x());
  CHECK(t.block(0, 0, 2, 2).isApprox(pauli_x()));
  CHECK(fro(t) == Catch::Approx(std::sqrt(2.0)));
  Mat cnot = Mat::Zero(4, 4);
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1;
  CHECK((tensor(p1, pauli_x()) + tensor(p0, Mat::Identity(2, 2)) - cnot).norm() < 1e-15);
  CHECK(fixtures::cnot().m.isApprox(cnot));
}

TEST_CASE("Schmidt ranks of standard gates", "[linalg]") {
  CHECK(schmidt_rank(fixtures::swap()) == 4);
  CHECK(schmidt_rank(fixtures::dcnot()) == 4);
  CHECK(schmidt_rank(fixtures::cnot()) == 2);
  CHECK(schmidt_rank_oracle(fixtures::cnot()) == 2);
  for (int dA = 1; dA <= 4; ++dA)
    for (int dB = 1; dB <= 4; ++dB) CHECK(schmidt_rank(fixtures::identity(dA, dB)) == 1);
  CHECK_THROWS_AS(schmidt_rank(BipartiteOp(2, 2, Mat::Zero(4, 4))), Error);
}

TEST_CASE("Schmidt rank of random sums of products", "[linalg][property]") {
  std::mt19937_64 rng(11);
  for (int dA = 2; dA <= 6; dA += 2)
    for (int dB = 2; dB <= 6; dB += 2)
      for (int r = 1; r <= std::min(6, std::min(dA * dA, dB * dB)); ++r) {
        Mat m = Mat::Zero(dA * dB, dA * dB);
        for (int j = 0; j < r; ++j) m += tensor(random_matrix(dA, dA, rng), random_matrix(dB, dB, rng));
        const BipartiteOp u(dA, dB, m);
        const auto os = operator_schmidt(u);
        CHECK(os.rank == r);
        CHECK(schmidt_rank_oracle(u) == r);
        Mat rec = Mat::Zero(dA * dB, dA * dB);
        for (int j = 0; j < os.rank; ++j) rec += os.coefficients[j] * tensor(os.a_ops[j], os.b_ops[j]);
        CHECK(fro(rec - m) <= 1e-9 * fro(m));
      }
}

TEST_CASE("random unitaries have full Schmidt rank", "[linalg][property]") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const BipartiteOp u(3, 2, random_unitary(6, s));
    CHECK(is_unitary(u.m));
    CHECK(schmidt_rank(u) == 4);
    CHECK(schmidt_rank(u) == schmidt_rank_oracle(u));
    CHECK(unreshuffle(reshuffle(u), 3, 2).m.isApprox(u.m));
    CHECK(schmidt_rank(u.swapped()) == 4);
  }
}

TEST_CASE("von Neumann entropy", "[linalg]") {
  Vec psi(2);
  psi << 0.6, cplx(0, 0.8);
  CHECK_THAT(von_neumann_entropy(psi * psi.adjoint()), WithinAbs(0.0, 1e-12));
  CHECK_THAT(von_neumann_entropy(Mat::Identity(2, 2) / 2.0), WithinAbs(1.0, 1e-12));
  CHECK_THAT(von_neumann_entropy(Mat::Identity(3, 3) / 3.0), WithinAbs(std::log2(3.0), 1e-12));
}

TEST_CASE("partial trace", "[linalg]") {
  Vec phi = Vec::Zero(4);
  phi(0) = phi(3) = 1 / std::sqrt(2.0);
  CHECK(partial_trace(phi * phi.adjoint(), {2, 2}, {0}).isApprox(Mat::Identity(2, 2) / 2.0));

  std::mt19937_64 rng(3);
  Mat a = random_matrix(2, 2, rng), b = random_matrix(3, 3, rng);
  a = a * a.adjoint();
  a /= a.trace();
  b = b * b.adjoint();
  b /= b.trace();
  CHECK(partial_trace(tensor(a, b), {2, 3}, {0}).isApprox(a));
  CHECK(partial_trace(tensor(a, b), {2, 3}, {1}).isApprox(b));

  Vec in = Vec::Zero(4);
  in(0) = in(2) = 1 / std::sqrt(2.0);  // |+>|0>
  const Vec out = fixtures::cnot().m * in;
  Mat half = Mat::Zero(2, 2);
  half(0, 0) = half(1, 1) = 0.5;
  CHECK((partial_trace(out * out.adjoint(), {2, 2}, {1}) - half).norm() < 1e-14);
}

TEST_CASE("Choi matrices", "[linalg]") {
  const Mat c = choi_of_unitary(fixtures::identity());
  Vec omega = Vec::Zero(16);
  for (int i = 0; i < 4; ++i) omega(i * 4 + i) = 1;
  CHECK((c - omega * omega.adjoint()).norm() < 1e-14);
  const BipartiteOp u(2, 2, random_unitary(4, 5));
  const BipartiteOp v(2, 2, std::polar(1.0, 0.7) * u.m);
  CHECK(choi_distance(choi_of_unitary(u), choi_of_unitary(v)) < 1e-12);
  CHECK(choi_distance(choi_of_unitary(fixtures::cnot()), choi_of_unitary(fixtures::swap())) > 0.1);
}

TEST_CASE("distinct values", "[linalg]") {
  CHECK(distinct_values({1.0, 1.0, 1.0}) == 1);
  CHECK(distinct_values({1.0, kI, -1.0}) == 3);
  const double a = 0.3;
  CHECK(distinct_values({std::polar(1.0, a), -std::polar(1.0, -a)}) == 2);
  CHECK(cluster_values({1.0, 2.0, 1.0 + 1e-12}, 1e-8) == std::vector<int>{0, 1, 0});
}

TEST_CASE("three eigenvalues iff I, D, D^dag independent", "[linalg][property]") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ang(0, 2 * M_PI);
  for (int order = 3; order <= 8; ++order)
    for (int trial = 0; trial < 40; ++trial) {
      // Draw phases from a small pool so that low counts occur often.
      const int pool = 1 + trial % 4;
      std::vector<double> choices(pool);
      for (auto& x : choices) x = ang(rng);
      std::vector<cplx> diag(order);
      for (auto& d : diag) d = std::polar(1.0, choices[rng() % pool]);
      Mat dm = Mat::Zero(order, order);
      for (int i = 0; i < order; ++i) dm(i, i) = diag[i];
      const bool three = distinct_values(diag) >= 3;
      const bool indep = span_rank({Mat::Identity(order, order), dm, Mat(dm.adjoint())}) == 3;
      CHECK(three == indep);
    }
}

TEST_CASE("real combinations of the 2x2 family are proportional to unitaries", "[linalg][property]") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> ang(0, 2 * M_PI);
  for (int trial = 0; trial < 200; ++trial) {
    const cplx w = std::polar(1.0, ang(rng)), x = std::polar(1.0, ang(rng));
    Mat a = Mat::Identity(2, 2), b = Mat::Zero(2, 2), c = Mat::Zero(2, 2);
    b(0, 0) = w;
    b(1, 1) = std::conj(w);
    c(0, 1) = x;
    c(1, 0) = -std::conj(x);
    const Mat v = n(rng) * a + n(rng) * b + n(rng) * c;
    const Mat g = v * v.adjoint();
    CHECK((g - g.trace() / 2.0 * Mat::Identity(2, 2)).norm() < 1e-10);
  }
}

TEST_CASE("unitary combinations of D and the off-diagonal U are block diagonal", "[linalg][property]") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> ang(0, 2 * M_PI);
  for (int n = 2; n <= 5; ++n)
    for (int trial = 0; trial < 20; ++trial) {
      // U is a locally permuted direct sum; x is constant on each block and y = -conj(x) there,
      // so D + U~ has orthogonal rows.
      const bool equal = trial % 3 == 0;
      const int cut = equal ? n : 1 + static_cast<int>(rng() % (n - 1));
      Mat core = Mat::Zero(n, n);
      core.topLeftCorner(cut, cut) = random_unitary(cut, rng());
      if (cut < n) core.bottomRightCorner(n - cut, n - cut) = random_unitary(n - cut, rng());
      std::vector<int> p(n), q(n);
      for (int i = 0; i < n; ++i) p[i] = q[i] = i;
      std::shuffle(p.begin(), p.end(), rng);
      std::shuffle(q.begin(), q.end(), rng);
      const Mat P = fixtures::permutation_matrix(p), Q = fixtures::permutation_matrix(q);
      const Mat u = P * core * Q;
      const cplx x1 = std::polar(1.0, ang(rng)), x2 = equal ? x1 : std::polar(1.0, ang(rng));
      Mat d = Mat::Zero(2 * n, 2 * n);
      // Row j of U (after P) sits in block 1 iff P^T maps it below the cut.
      for (int j = 0; j < n; ++j) {
        const int row_block = (P.transpose() * Vec::Unit(n, j)).head(cut).norm() > 0.5 ? 0 : 1;
        const int col_block = (Q * Vec::Unit(n, j)).head(cut).norm() > 0.5 ? 0 : 1;
        d(j, j) = row_block == 0 ? x1 : x2;
        d(n + j, n + j) = -std::conj(col_block == 0 ? x1 : x2);
      }
      Mat ut = Mat::Zero(2 * n, 2 * n);
      ut.topRightCorner(n, n) = u;
      ut.bottomLeftCorner(n, n) = u.adjoint();
      const double c = 0.5 + trial * 0.1;
      const Mat v = c * d + ut;
      const Mat g = v * v.adjoint();
      REQUIRE((g - g.trace() / double(2 * n) * Mat::Identity(2 * n, 2 * n)).norm() < 1e-9);
      Mat xm = Mat::Zero(2 * n, 2 * n);
      if (equal) {
        Eigen::ComplexEigenSolver<Mat> es(u);
        // Eigenvectors of a unitary with simple spectrum are orthogonal; orthonormalize for safety.
        Eigen::HouseholderQR<Mat> qr(es.eigenvectors());
        Mat w = qr.householderQ();
        xm.topLeftCorner(n, n) = w;
        xm.bottomRightCorner(n, n) = w;
      } else {
        xm = Mat::Identity(2 * n, 2 * n);
      }
      CHECK(pattern_components(xm.adjoint() * v * xm, 1e-7) >= 2);
    }
}

TEST_CASE("utility matrices", "[linalg]") {
  for (int n = 2; n <= 5; ++n) {
    CHECK(is_unitary(fourier(n)));
    CHECK(is_unitary(clock(n)));
    CHECK(is_unitary(shift(n, 1)));
    CHECK((clock(n) * shift(n, 1) - std::polar(1.0, 2 * M_PI / n) * shift(n, 1) * clock(n)).norm() <
          1e-12);
  }
  CHECK(matrix_rank(Mat::Identity(3, 3)) == 3);
  CHECK(in_span({ketbra(2, 0, 0), ketbra(2, 1, 1)}, Mat::Identity(2, 2)));
  CHECK_FALSE(in_span({ketbra(2, 0, 0)}, pauli_x()));
  CHECK(is_unitary(swap_gate(2, 3)));
}

TEST_CASE("operator JSON round trip and diagnostics", "[linalg][io]") {
  const auto e4 = fixtures::example4();
  const auto j = io::op_to_json(e4);
  CHECK(j.contains("perm"));
  const auto back = io::parse_op(io::dump(j));
  CHECK(back.dA == 5);
  CHECK(back.dB == 6);
  CHECK(fro(back.m - e4.m) == 0);
  const BipartiteOp u(2, 2, random_unitary(4, 9));
  const auto dense = io::parse_op(io::dump(io::op_to_json(u)));
  CHECK(fro(dense.m - u.m) == 0);  // %.17g round-trips doubles exactly

  auto message = [](const std::string& text) {
    try {
      io::parse_op(text);
    } catch (const Error& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("{\"dA\": 1,\n \"dB\": 1,\n \"matrix\": [[[1, 0]]],\n}").find("line 4") !=
        std::string::npos);
  CHECK(message(R"({"dA": 1, "dB": 2, "matrix": [[[1,0],[0,0]],[[0,0],[1]]]})")
            .find("matrix[1][1]") != std::string::npos);
  CHECK(message(R"({"dA": 1, "dB": 2, "perm": [{"col": 0, "row": 5}]})").find("perm[0].row") !=
        std::string::npos);
  CHECK(message(R"({"dB": 2, "perm": []})").find("dA") != std::string::npos);
  const auto sparse = io::parse_op(R"({"dA": 1, "dB": 2, "perm": [{"col": 0, "row": 1},
                                      {"col": 1, "row": 0, "phase": [0, 1]}]})");
  CHECK(sparse.m(1, 0) == cplx(1, 0));
  CHECK(sparse.m(0, 1) == kI);
}

TEST_CASE("number format is fixed at 17 significant digits", "[io]") {
  io::Json j{{"x", 0.1}, {"n", 3}, {"v", {1.0, 2.5}}};
  CHECK(io::dump(j, 0) == R"({"x":0.10000000000000001,"n":3,"v":[1, 2.5]})");
}
