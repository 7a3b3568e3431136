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

#include "bforge/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace bforge::fixtures {

namespace {

const cplx kI(0, 1);

BipartiteOp checked(int dA, int dB, Mat m) {
  BipartiteOp u(dA, dB, std::move(m));
  if (!is_unitary(u.m, 1e-10)) throw NumericError("fixture construction is not unitary");
  return u;
}

/** sum_j |j><j| (x) S_j */
Mat a_controlled(const std::vector<Mat>& rows) {
  const int dA = static_cast<int>(rows.size());
  const int dB = static_cast<int>(rows.front().rows());
  Mat m = Mat::Zero(dA * dB, dA * dB);
  for (int j = 0; j < dA; ++j) m.block(j * dB, j * dB, dB, dB) = rows[j];
  return m;
}

Mat from_blocks(const std::vector<std::vector<Mat>>& blocks, int dB) {
  const int dA = static_cast<int>(blocks.size());
  Mat m = Mat::Zero(dA * dB, dA * dB);
  for (int j = 0; j < dA; ++j)
    for (int k = 0; k < dA; ++k)
      if (blocks[j][k].size() > 0) m.block(j * dB, k * dB, dB, dB) = blocks[j][k];
  return m;
}

Mat proj(int n, std::initializer_list<int> idx) {
  Mat p = Mat::Zero(n, n);
  for (int i : idx) p(i, i) = 1;
  return p;
}

/** Embeds a block-diagonal list of square matrices. */
Mat blockdiag(const std::vector<Mat>& parts) { return direct_sum(parts); }

Mat example2_t2(double b) {
  const double re = std::sqrt(1 - b * b);
  Mat t = Mat::Zero(2, 2);
  t(0, 0) = cplx(re, b);
  t(1, 1) = cplx(-re, b);
  return t;
}

Mat example2_t3(double t, double b) {
  const double p = t * b * std::sqrt((1 - b) / (1 + b));
  const double q = t * b;
  const double x = std::sqrt(std::max(0.0, 1 - p * p - q * q));
  Mat m(2, 2);
  m << cplx(p, q), x, x, cplx(-p, q);
  return m;
}

std::array<cplx, 3> example2_coefficients(double t, double y) {
  const double n = std::sqrt((1 + y * y) * (t * y - 1) * (t * y - 1) + t * t * y * y);
  const double c1 = (t * y - 1) / n;
  return {cplx(c1, 0), kI * c1 * t * y / (t * y - 1), kI * c1 * y};
}

double example2_residual(double t, double y, double b) {
  auto c = example2_coefficients(t, y);
  const double c1 = c[0].real(), c2 = c[1].imag(), c3 = c[2].imag();
  const double im_t2 = b, im_d3 = t * b;
  const cplx t2(std::sqrt(1 - b * b), b);
  const cplx d3(t * b * std::sqrt((1 - b) / (1 + b)), t * b);
  const double re = (t2 * std::conj(d3)).real();
  return c1 * c1 + c2 * c2 + c3 * c3 - 2 * c1 * c2 * im_t2 - 2 * c1 * c3 * im_d3 + 2 * c2 * c3 * re - 1;
}

}  // namespace

Mat permutation_matrix(const std::vector<int>& image) {
  const int n = static_cast<int>(image.size());
  Mat m = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) m(image[i], i) = 1;
  return m;
}

BipartiteOp identity(int dA, int dB) { return checked(dA, dB, Mat::Identity(dA * dB, dA * dB)); }

BipartiteOp cnot() { return checked(2, 2, a_controlled({Mat::Identity(2, 2), pauli_x()})); }

BipartiteOp cnot_ba() { return checked(2, 2, tensor(Mat::Identity(2, 2), proj(2, {0})) + tensor(pauli_x(), proj(2, {1}))); }

BipartiteOp swap() { return checked(2, 2, swap_gate(2, 2)); }

BipartiteOp dcnot() { return checked(2, 2, cnot_ba().m * cnot().m); }

BipartiteOp cz() { return checked(2, 2, a_controlled({Mat::Identity(2, 2), pauli_z()})); }

BipartiteOp example4() {
  const int dB = 6;
  Mat t1 = Mat::Zero(dB, dB), t2 = Mat::Zero(dB, dB), t4 = Mat::Zero(dB, dB);
  for (int i = 0; i < 3; ++i) t1(i, i) = 1;
  t2(0, 3) = t2(1, 4) = t2(2, 5) = 1;
  Mat t3 = t2.transpose();
  t4(3, 4) = t4(4, 3) = t4(5, 5) = 1;
  Mat z;
  std::vector<std::vector<Mat>> b = {
      {t1, t3, z, z, z}, {t2, z, t3, z, z}, {z, t2, z, t3, z}, {z, z, t2, z, t3}, {z, z, z, t2, t4}};
  return checked(5, dB, from_blocks(b, dB));
}

BipartiteOp m_family(int r) {
  if (r < 2 || r > 8) throw Error("m_family requires 2 <= r <= 8");
  const int dA = 1 << (r - 1), dB = 2 * r - 2;
  std::vector<Mat> rows;
  for (int s = 0; s < dA; ++s) {
    Mat v = Mat::Identity(dB, dB);
    for (int k = 2; k <= r; ++k)
      if (s & (1 << (k - 2))) {
        std::vector<int> img(dB);
        std::iota(img.begin(), img.end(), 0);
        std::swap(img[2 * k - 4], img[2 * k - 3]);
        v = permutation_matrix(img) * v;
      }
    rows.push_back(v);
  }
  return checked(dA, dB, a_controlled(rows));
}

BipartiteOp controlled_b_family(int r) {
  if (r < 1 || r > 8) throw Error("controlled_b_family requires 1 <= r <= 8");
  Mat m = Mat::Zero(r * r, r * r);
  for (int k = 0; k < r; ++k) m += tensor(shift(r, k), ketbra(r, k, k));
  return checked(r, r, m);
}

BipartiteOp example1(const Example1Params& p) {
  const int n = static_cast<int>(p.t.size());
  if (n < 1) throw Error("example1 needs at least one t value");
  if (p.thetas.size() != p.phis.size()) throw Error("example1: thetas and phis differ in length");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(p.t[i] - p.t[j]) < 1e-12) throw Error("example1: t values must differ");
  std::vector<Mat> z, x;
  for (double tj : p.t) {
    z.push_back(pauli_z());
    x.push_back(std::cos(tj) * pauli_x() + std::sin(tj) * pauli_y());
  }
  const Mat t1 = Mat::Identity(2 * n, 2 * n), t2 = blockdiag(z), t3 = blockdiag(x);
  std::vector<Mat> rows{t1, t2, t3};
  for (size_t j = 0; j < p.thetas.size(); ++j) {
    const double th = p.thetas[j], ph = p.phis[j];
    rows.push_back(std::cos(th) * t1 + kI * std::sin(th) * std::cos(ph) * t2 +
                   kI * std::sin(th) * std::sin(ph) * t3);
  }
  return checked(static_cast<int>(rows.size()), 2 * n, a_controlled(rows));
}

std::vector<double> example2_solve_b(double t, double y, int grid) {
  if (!(t > 0 && t < 1)) throw Error("example2 requires 0 < t < 1");
  if (!(y > 1 / t)) throw Error("example2 requires y > 1/t");
  std::vector<double> roots;
  for (int i = 1; i <= grid; ++i) {
    const double b = static_cast<double>(i) / grid;
    if (std::abs(example2_residual(t, y, b)) < 1e-12) roots.push_back(b);
  }
  return roots;
}

BipartiteOp example2(const Example2Params& p) {
  if (p.ys.empty() || p.bs.empty()) throw Error("example2 needs ys and bs");
  for (double y : p.ys) {
    if (!(y > 1 / p.t)) throw Error("example2 requires y > 1/t");
    for (double b : p.bs) {
      if (!(b > 0 && b <= 1)) throw Error("example2 requires b in (0, 1]");
      if (std::abs(example2_residual(p.t, y, b)) > 1e-12)
        throw Error("example2 relation unsatisfiable for the requested (t, y, b)");
    }
  }
  std::vector<Mat> t2s, t3s;
  for (double b : p.bs) {
    t2s.push_back(example2_t2(b));
    t3s.push_back(example2_t3(p.t, b));
  }
  const int dB = 2 * static_cast<int>(p.bs.size());
  const Mat t1 = Mat::Identity(dB, dB), t2 = blockdiag(t2s), t3 = blockdiag(t3s);
  std::vector<Mat> rows{t1, t2, t3};
  for (double y : p.ys) {
    auto c = example2_coefficients(p.t, y);
    rows.push_back(c[0] * t1 + c[1] * t2 + c[2] * t3);
  }
  return checked(static_cast<int>(rows.size()), dB, a_controlled(rows));
}

BipartiteOp uketbra11() {
  Mat m = tensor(proj(3, {0}), pauli_x());
  Mat swap12 = Mat::Zero(3, 3);
  swap12(1, 2) = swap12(2, 1) = 1;
  m += tensor(proj(3, {1, 2}), proj(2, {0})) + tensor(swap12, proj(2, {1}));
  return checked(3, 2, m);
}

/** D1 (x) I + D2 (x) (I_m + I_n + V1 + V2) + D3 (x) (I_m + V3 + I_q + V4) with V = X. */
BipartiteOp case_i(int m, int n, int q, int p) {
  if (m < 0 || n < 2 || q < 2 || p < 0 || p == 1)
    throw Error("case_i requires m >= 0, n >= 2, q >= 2 and p != 1");
  auto part = [](int d, bool flip) -> Mat {
    if (d == 0) return Mat(0, 0);
    if (!flip) return Mat::Identity(d, d);
    return shift(d, 1);
  };
  auto ds = [](std::vector<Mat> v) {
    v.erase(std::remove_if(v.begin(), v.end(), [](const Mat& x) { return x.size() == 0; }), v.end());
    return direct_sum(v);
  };
  const int dB = m + n + q + p;
  std::vector<Mat> rows{Mat::Identity(dB, dB),
                        ds({part(m, false), part(n, false), part(q, true), part(p, true)}),
                        ds({part(m, false), part(n, true), part(q, false), part(p, true)})};
  return checked(3, dB, a_controlled(rows));
}

BipartiteOp case_i1() { return case_i(0, 2, 2, 0); }

BipartiteOp case_i3() { return case_i(0, 2, 2, 2); }

BipartiteOp perm_u_4terms() {
  const Mat i2 = Mat::Identity(2, 2), x = pauli_x();
  std::vector<Mat> rows{Mat::Identity(4, 4), direct_sum({i2, x}), direct_sum({x, i2}),
                        direct_sum({x, x})};
  return checked(4, 4, a_controlled(rows));
}

BipartiteOp ubigg() {
  // B = span{0,1} (+) span{2}; first part (|0><0| (x) X + |1><1| (x) I), second X_A.
  Mat m = Mat::Zero(6, 6);
  Mat x2 = Mat::Zero(3, 3);
  x2(0, 1) = x2(1, 0) = 1;
  m += tensor(proj(2, {0}), x2) + tensor(proj(2, {1}), proj(3, {0, 1}));
  m += tensor(pauli_x(), proj(3, {2}));
  return checked(2, 3, m);
}

BipartiteOp mixed6() {
  // A{0,1}: controlled from A by {I, X}; A{2,3}: controlled from B; A{4,5}: controlled-H.
  Mat m = Mat::Zero(12, 12);
  auto put = [&](int off, const Mat& comp) { m.block(off * 2, off * 2, 4, 4) = comp; };
  put(0, cnot().m);
  put(2, cnot_ba().m);
  put(4, a_controlled({Mat::Identity(2, 2), (pauli_x() + pauli_z()) / std::sqrt(2.0)}));
  return checked(6, 2, m);
}

BipartiteOp mixed43() {
  Mat m = Mat::Zero(12, 12);
  Mat c1 = tensor(proj(2, {0}), Mat::Identity(3, 3)) + tensor(proj(2, {1}), shift(3, 1));
  Mat c2 = tensor(Mat::Identity(2, 2), proj(3, {0, 1})) + tensor(pauli_x(), proj(3, {2}));
  m.block(0, 0, 6, 6) = c1;
  m.block(6, 6, 6, 6) = c2;
  return checked(4, 3, m);
}

BipartiteOp flip_or_cnot() {
  Mat m = Mat::Zero(8, 8);
  m.block(0, 0, 4, 4) = tensor(pauli_x(), pauli_x());
  m.block(4, 4, 4, 4) = cnot_ba().m;
  return checked(4, 2, m);
}

BipartiteOp dihedral_b3() {
  const double t = 0.7, th = 0.5;
  auto ext = [](const Mat& two, cplx one) { return direct_sum({two, Mat::Constant(1, 1, one)}); };
  std::vector<Mat> rows{ext(Mat::Identity(2, 2), 1.0), ext(pauli_z(), 1.0),
                        ext(std::cos(t) * pauli_x() + std::sin(t) * pauli_y(), 1.0),
                        ext(std::cos(th) * Mat::Identity(2, 2) + kI * std::sin(th) * pauli_z(),
                            std::exp(kI * th))};
  return checked(4, 3, a_controlled(rows));
}

BipartiteOp permute_locally(const BipartiteOp& u, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto rp = [&](int n) {
    std::vector<int> img(n);
    std::iota(img.begin(), img.end(), 0);
    std::shuffle(img.begin(), img.end(), rng);
    return permutation_matrix(img);
  };
  Mat l = tensor(rp(u.dA), rp(u.dB)), r = tensor(rp(u.dA), rp(u.dB));
  return BipartiteOp(u.dA, u.dB, l * u.m * r);
}

BipartiteOp random_permutation(int rank, std::uint64_t seed) {
  if (rank < 1 || rank > 16) throw Error("random_permutation: rank out of range");
  std::mt19937_64 rng(seed);
  static const std::vector<std::pair<int, int>> dims{{2, 2}, {2, 3}, {3, 2}, {3, 3}, {2, 4}, {4, 2}, {3, 4}, {4, 3}};
  for (int attempt = 0; attempt < 200000; ++attempt) {
    auto [dA, dB] = dims[rng() % dims.size()];
    if (dA * dB < rank) continue;
    std::vector<int> img(dA * dB);
    std::iota(img.begin(), img.end(), 0);
    std::shuffle(img.begin(), img.end(), rng);
    BipartiteOp u(dA, dB, permutation_matrix(img));
    if (schmidt_rank(u) == rank) return u;
  }
  throw Error("random_permutation: no permutation of the requested rank found");
}

std::vector<std::string> names() {
  return {"identity", "cnot", "cnot_ba", "swap", "dcnot", "cz", "example4", "m_family",
          "controlled_b_family", "example1", "example2", "uketbra11", "case_i", "case_i1", "case_i3",
          "perm_u_4terms", "ubigg", "mixed6", "mixed43", "flip_or_cnot", "dihedral_b3",
          "random_permutation"};
}

BipartiteOp by_name(const std::string& name, const nlohmann::json& params) {
  auto get_int = [&](const char* key, int def) {
    return params.contains(key) ? params.at(key).get<int>() : def;
  };
  auto get_vec = [&](const char* key, std::vector<double> def) {
    return params.contains(key) ? params.at(key).get<std::vector<double>>() : def;
  };
  if (name == "identity") return identity(get_int("dA", 2), get_int("dB", 2));
  if (name == "cnot") return cnot();
  if (name == "cnot_ba") return cnot_ba();
  if (name == "swap") return swap();
  if (name == "dcnot") return dcnot();
  if (name == "cz") return cz();
  if (name == "example4") return example4();
  if (name == "m_family") return m_family(get_int("r", 3));
  if (name == "controlled_b_family") return controlled_b_family(get_int("r", 3));
  if (name == "example1") {
    Example1Params p;
    p.t = get_vec("t", p.t);
    p.thetas = get_vec("thetas", p.thetas);
    p.phis = get_vec("phis", p.phis);
    return example1(p);
  }
  if (name == "example2") {
    Example2Params p;
    if (params.contains("t")) p.t = params.at("t").get<double>();
    p.ys = get_vec("ys", p.ys);
    p.bs = get_vec("bs", p.bs);
    return example2(p);
  }
  if (name == "uketbra11") return uketbra11();
  if (name == "case_i")
    return case_i(get_int("m", 0), get_int("n", 2), get_int("q", 2), get_int("p", 0));
  if (name == "case_i1") return case_i1();
  if (name == "case_i3") return case_i3();
  if (name == "perm_u_4terms") return perm_u_4terms();
  if (name == "ubigg") return ubigg();
  if (name == "mixed6") return mixed6();
  if (name == "mixed43") return mixed43();
  if (name == "flip_or_cnot") return flip_or_cnot();
  if (name == "dihedral_b3") return dihedral_b3();
  if (name == "random_permutation")
    return random_permutation(get_int("rank", 2), static_cast<std::uint64_t>(get_int("seed", 0)));
  std::string all;
  for (const auto& n : names()) all += (all.empty() ? "" : ", ") + n;
  throw Error("unknown fixture '" + name + "'; known fixtures: " + all);
}

}  // namespace bforge::fixtures
