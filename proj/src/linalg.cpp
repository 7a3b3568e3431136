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

#include "bforge/linalg.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <cmath>
#include <numeric>
#include <random>
#include <tuple>

namespace bforge {

BipartiteOp::BipartiteOp(int da, int db, Mat mat)
    : dA(da), dB(db), m(std::move(mat)) {
  if (da < 1 || db < 1) throw Error("dimensions must be positive");
  if (m.rows() != da * db || m.cols() != da * db) {
    throw Error(
        "matrix order " + std::to_string(m.rows()) + "x" +
        std::to_string(m.cols()) + " does not match dA*dB = " +
        std::to_string(da * db));
  }
  if (!m.allFinite()) throw Error("matrix has non-finite entries");
}

Mat BipartiteOp::block(int j, int k) const {
  return m.block(j * dB, k * dB, dB, dB);
}

BipartiteOp BipartiteOp::swapped() const {
  // Index a * dB + b becomes b * dA + a on both sides.
  const int n = dim();
  std::vector<int> to(n);
  for (int a = 0; a < dA; ++a)
    for (int b = 0; b < dB; ++b) to[a * dB + b] = b * dA + a;
  Mat r(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) r(to[i], to[j]) = m(i, j);
  return BipartiteOp(dB, dA, r);
}

Mat tensor(const Mat& a, const Mat& b) {
  Mat r(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return r;
}

Mat tensor(std::initializer_list<Mat> ops) {
  Mat r = Mat::Identity(1, 1);
  for (const Mat& o : ops) r = tensor(r, o);
  return r;
}

Mat reshuffle(const BipartiteOp& u) {
  const int dA = u.dA, dB = u.dB;
  Mat r(dA * dA, dB * dB);
  for (int a = 0; a < dA; ++a)
    for (int a2 = 0; a2 < dA; ++a2)
      for (int b = 0; b < dB; ++b)
        for (int b2 = 0; b2 < dB; ++b2)
          r(a * dA + a2, b * dB + b2) = u.m(a * dB + b, a2 * dB + b2);
  return r;
}

BipartiteOp unreshuffle(const Mat& r, int dA, int dB) {
  Mat m(dA * dB, dA * dB);
  for (int a = 0; a < dA; ++a)
    for (int a2 = 0; a2 < dA; ++a2)
      for (int b = 0; b < dB; ++b)
        for (int b2 = 0; b2 < dB; ++b2)
          m(a * dB + b, a2 * dB + b2) = r(a * dA + a2, b * dB + b2);
  return BipartiteOp(dA, dB, m);
}

OperatorSchmidt operator_schmidt(const BipartiteOp& u, double tol) {
  const double norm = fro(u.m);
  if (norm == 0.0) throw Error("zero operator");
  Mat r = reshuffle(u);
  Eigen::BDCSVD<Mat> svd(r, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  OperatorSchmidt out;
  const double smax = s(0);
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    if (s(j) <= tol * smax) break;
    out.coefficients.push_back(s(j));
    Mat a(u.dA, u.dA), b(u.dB, u.dB);
    for (int x = 0; x < u.dA; ++x)
      for (int y = 0; y < u.dA; ++y) a(x, y) = svd.matrixU()(x * u.dA + y, j);
    for (int x = 0; x < u.dB; ++x)
      for (int y = 0; y < u.dB; ++y)
        b(x, y) = std::conj(svd.matrixV()(x * u.dB + y, j));
    out.a_ops.push_back(a);
    out.b_ops.push_back(b);
  }
  out.rank = static_cast<int>(out.coefficients.size());
  Mat rec = Mat::Zero(u.dim(), u.dim());
  for (int j = 0; j < out.rank; ++j)
    rec += out.coefficients[j] * tensor(out.a_ops[j], out.b_ops[j]);
  out.reconstruction_error = fro(rec - u.m);
  return out;
}

namespace {

/**
 * Rank of the reshuffled matrix for operators with one nonzero entry per
 * column: zero and repeated blocks are dropped before the SVD. Returns -1
 * when u is not that sparse.
 */
int sparse_schmidt_rank(const BipartiteOp& u, double tol) {
  const long n = u.dim();
  std::vector<long> row_of(n, -1);
  for (long c = 0; c < n; ++c)
    for (long i = 0; i < n; ++i) {
      if (std::abs(u.m(i, c)) <= tol) continue;
      if (row_of[c] >= 0) return -1;
      row_of[c] = i;
    }
  // Block (a, a2) as a sorted list of (position in the dB x dB block, value).
  using Entry = std::tuple<int, long long, long long>;
  std::map<std::pair<int, int>, std::vector<Entry>> blocks;
  const double q = 1e12;
  for (long c = 0; c < n; ++c) {
    if (row_of[c] < 0) continue;
    const long i = row_of[c];
    const int a = static_cast<int>(i / u.dB), b = static_cast<int>(i % u.dB);
    const int a2 = static_cast<int>(c / u.dB), b2 = static_cast<int>(c % u.dB);
    const cplx v = u.m(i, c);
    blocks[{a, a2}].emplace_back(b * u.dB + b2, std::llround(v.real() * q), std::llround(v.imag() * q));
  }
  std::map<std::vector<Entry>, int> distinct;
  for (auto& [key, entries] : blocks) {
    std::sort(entries.begin(), entries.end());
    distinct.emplace(entries, static_cast<int>(distinct.size()));
  }
  if (distinct.empty()) return 0;
  Mat r = Mat::Zero(static_cast<long>(distinct.size()), static_cast<long>(u.dB) * u.dB);
  for (const auto& [entries, row] : distinct)
    for (const auto& [pos, re, im] : entries) r(row, pos) = cplx(re / q, im / q);
  return matrix_rank(r, tol);
}

}  // namespace

int schmidt_rank(const BipartiteOp& u, double tol) {
  if (fro(u.m) == 0.0) throw Error("zero operator");
  if (u.dim() >= 64) {
    const int r = sparse_schmidt_rank(u, tol);
    if (r >= 0) return r;
  }
  return matrix_rank(reshuffle(u), tol);
}

double von_neumann_entropy(const Mat& rho, double tol) {
  if (rho.rows() != rho.cols()) throw Error("density matrix not square");
  if (fro(rho - rho.adjoint()) > tol * std::max(1.0, fro(rho)))
    throw Error("density matrix not Hermitian");
  if (std::abs(rho.trace() - cplx(1.0)) > std::max(tol, 1e-9) * rho.rows())
    throw Error("density matrix trace is not one");
  Eigen::SelfAdjointEigenSolver<Mat> es(rho, Eigen::EigenvaluesOnly);
  double e = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double l = es.eigenvalues()(i);
    if (l < -std::sqrt(tol)) throw Error("density matrix not positive semidefinite");
    if (l > tol) e -= l * std::log2(l);
  }
  return std::max(0.0, e);
}

Mat partial_trace(const Mat& state, const std::vector<int>& dims,
                  const std::vector<int>& keep) {
  long total = 1;
  for (int d : dims) {
    if (d < 1) throw Error("dimensions must be positive");
    total *= d;
  }
  if (state.rows() != total || state.cols() != total)
    throw Error("dimension mismatch in partial_trace");
  const int n = static_cast<int>(dims.size());
  std::vector<bool> kept(n, false);
  for (int k : keep) {
    if (k < 0 || k >= n) throw Error("partial_trace keep index out of range");
    kept[k] = true;
  }
  std::vector<long> stride(n, 1);
  for (int i = n - 2; i >= 0; --i) stride[i] = stride[i + 1] * dims[i + 1];
  long dk = 1, dt = 1;
  std::vector<int> kidx, tidx;
  for (int i = 0; i < n; ++i) {
    if (kept[i]) {
      dk *= dims[i];
      kidx.push_back(i);
    } else {
      dt *= dims[i];
      tidx.push_back(i);
    }
  }
  auto offsets = [&](const std::vector<int>& idx, long count) {
    std::vector<long> off(count, 0);
    for (long c = 0; c < count; ++c) {
      long rem = c, o = 0;
      for (int p = static_cast<int>(idx.size()) - 1; p >= 0; --p) {
        o += (rem % dims[idx[p]]) * stride[idx[p]];
        rem /= dims[idx[p]];
      }
      off[c] = o;
    }
    return off;
  };
  const auto ko = offsets(kidx, dk), to = offsets(tidx, dt);
  Mat out = Mat::Zero(dk, dk);
  for (long i = 0; i < dk; ++i)
    for (long j = 0; j < dk; ++j) {
      cplx s = 0;
      for (long t = 0; t < dt; ++t) s += state(ko[i] + to[t], ko[j] + to[t]);
      out(i, j) = s;
    }
  return out;
}

Mat choi_of_unitary(const BipartiteOp& u, double tol) {
  if (!is_unitary(u.m, tol)) throw Error("non-unitary input");
  const long d = u.dim();
  Vec v(d * d);
  for (long i = 0; i < d; ++i)
    for (long j = 0; j < d; ++j) v(i * d + j) = u.m(j, i);
  return v * v.adjoint();
}

double choi_distance(const Mat& c1, const Mat& c2) {
  if (c1.rows() != c2.rows() || c1.cols() != c2.cols())
    throw Error("Choi matrices have different shapes");
  return fro(c1 - phase_align(c1, c2) * c2);
}

std::vector<int> cluster_values(const std::vector<cplx>& values, double tol) {
  const int n = static_cast<int>(values.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(values[i] - values[j]) <= tol) {
        int a = find(i), b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
  std::vector<int> label(n, -1), root_label(n, -1);
  int next = 0;
  for (int i = 0; i < n; ++i) {
    int r = find(i);
    if (root_label[r] < 0) root_label[r] = next++;
    label[i] = root_label[r];
  }
  return label;
}

int distinct_values(const std::vector<cplx>& values, double tol) {
  auto l = cluster_values(values, tol);
  return l.empty() ? 0 : *std::max_element(l.begin(), l.end()) + 1;
}

bool is_unitary(const Mat& u, double tol) {
  if (u.rows() != u.cols()) return false;
  return fro(u.adjoint() * u - Mat::Identity(u.rows(), u.cols())) <=
         tol * std::max<double>(1.0, std::sqrt(static_cast<double>(u.rows())));
}

int matrix_rank(const Mat& m, double tol) {
  if (m.size() == 0) return 0;
  Eigen::BDCSVD<Mat> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * s(0)) ++r;
  return r;
}

static Mat stack_vectors(const std::vector<Mat>& ms) {
  if (ms.empty()) return Mat();
  const long n = ms[0].size();
  Mat s(n, static_cast<long>(ms.size()));
  for (size_t j = 0; j < ms.size(); ++j)
    s.col(j) = Eigen::Map<const Vec>(ms[j].data(), n);
  return s;
}

int span_rank(const std::vector<Mat>& ms, double tol) {
  return ms.empty() ? 0 : matrix_rank(stack_vectors(ms), tol);
}

bool in_span(const std::vector<Mat>& basis, const Mat& m, double tol) {
  if (basis.empty()) return fro(m) <= tol;
  Mat s = stack_vectors(basis);
  Vec v = Eigen::Map<const Vec>(m.data(), m.size());
  Vec c = s.completeOrthogonalDecomposition().solve(v);
  return (s * c - v).norm() <= tol * std::max(1.0, v.norm());
}

Mat fourier(int n) {
  Mat f(n, n);
  const double w = 2 * M_PI / n;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      f(j, k) = std::polar(1.0 / std::sqrt(static_cast<double>(n)),
                           w * ((static_cast<long>(j) * k) % n));
  return f;
}

Mat shift(int n, int step) {
  Mat x = Mat::Zero(n, n);
  for (int k = 0; k < n; ++k) x((((k + step) % n) + n) % n, k) = 1.0;
  return x;
}

Mat clock(int n) {
  Mat z = Mat::Zero(n, n);
  for (int k = 0; k < n; ++k) z(k, k) = std::polar(1.0, 2 * M_PI * k / n);
  return z;
}

Mat pauli_x() {
  Mat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Mat pauli_y() {
  Mat m(2, 2);
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}

Mat pauli_z() {
  Mat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Mat direct_sum(const std::vector<Mat>& parts) {
  long r = 0, c = 0;
  for (const Mat& p : parts) {
    r += p.rows();
    c += p.cols();
  }
  Mat out = Mat::Zero(r, c);
  long i = 0, j = 0;
  for (const Mat& p : parts) {
    out.block(i, j, p.rows(), p.cols()) = p;
    i += p.rows();
    j += p.cols();
  }
  return out;
}

Mat ketbra(int n, int row, int col) {
  Mat m = Mat::Zero(n, n);
  m(row, col) = 1.0;
  return m;
}

Mat swap_gate(int dA, int dB) {
  const int d = dA * dB;
  Mat s = Mat::Zero(d, d);
  for (int a = 0; a < dA; ++a)
    for (int b = 0; b < dB; ++b) s(b * dA + a, a * dB + b) = 1.0;
  return s;
}

Mat random_unitary(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Mat z(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) z(i, j) = cplx(g(rng), g(rng));
  Eigen::HouseholderQR<Mat> qr(z);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    cplx d = r(j, j);
    if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

double fro(const Mat& m) { return m.norm(); }

cplx phase_align(const Mat& a, const Mat& b) {
  cplx ip = b.conjugate().cwiseProduct(a).sum();
  if (std::abs(ip) < 1e-300) return 1.0;
  return ip / std::abs(ip);
}

}  // namespace bforge
