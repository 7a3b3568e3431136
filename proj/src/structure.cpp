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

#include "bforge/structure.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

#include "bforge/costs.hpp"

namespace bforge {

namespace {

bool nonzero(const Mat& m, double tol) { return fro(m) > tol; }

double scaled(double tol, const Mat& m) { return tol * std::max(1.0, fro(m)); }

void require_unitary(const BipartiteOp& u, double tol) {
  if (!is_unitary(u.m, tol)) throw Error("non-unitary input");
}

std::vector<std::vector<int>> components_of(int n,
                                            const std::vector<std::pair<int, int>>& edges) {
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  for (auto [a, b] : edges) {
    int x = find(a), y = find(b);
    if (x != y) parent[std::max(x, y)] = std::min(x, y);
  }
  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);
  std::vector<std::vector<int>> out;
  for (auto& [root, members] : groups) out.push_back(members);
  std::sort(out.begin(), out.end(),
            [](const auto& x, const auto& y) { return x.front() < y.front(); });
  return out;
}

BipartiteOp restrict_A(const BipartiteOp& u, const std::vector<int>& s) {
  const int n = static_cast<int>(s.size());
  Mat m(n * u.dB, n * u.dB);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m.block(i * u.dB, j * u.dB, u.dB, u.dB) = u.block(s[i], s[j]);
  return BipartiteOp(n, u.dB, m);
}

/**
 * Permutation P on the given side such that (P (x) I) U, or (I (x) P) U, has
 * the same index set as input and output support in every direct-sum piece.
 */
Mat output_alignment(const BipartiteOp& u, Side side, double tol) {
  const BipartiteOp w = side == Side::A ? u : u.swapped();
  const int d = w.dA;
  // Vertices 0..d-1 are outputs, d..2d-1 inputs.
  std::vector<std::pair<int, int>> edges;
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      if (nonzero(w.block(j, k), tol)) edges.emplace_back(j, d + k);
  Mat p = Mat::Zero(d, d);
  for (const auto& c : components_of(2 * d, edges)) {
    std::vector<int> outs, ins;
    for (int v : c) (v < d ? outs : ins).push_back(v < d ? v : v - d);
    if (outs.size() != ins.size()) throw NumericError("block graph is not balanced");
    for (size_t i = 0; i < outs.size(); ++i) p(ins[i], outs[i]) = 1.0;
  }
  return p;
}

Mat projector(int n, const std::vector<int>& support) {
  Mat p = Mat::Zero(n, n);
  for (int i : support) p(i, i) = 1.0;
  return p;
}

}  // namespace

bool is_permutation_matrix(const Mat& m, double tol) {
  if (!is_complex_permutation_matrix(m, tol)) return false;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (std::abs(m(i, j)) > tol && std::abs(m(i, j) - cplx(1.0)) > tol) return false;
  return true;
}

bool is_complex_permutation_matrix(const Mat& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const Eigen::Index n = m.rows();
  std::vector<int> rc(n, 0), cc(n, 0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double a = std::abs(m(i, j));
      if (a <= tol) continue;
      if (std::abs(a - 1.0) > tol) return false;
      ++rc[i];
      ++cc[j];
    }
  for (Eigen::Index i = 0; i < n; ++i)
    if (rc[i] != 1 || cc[i] != 1) return false;
  return true;
}

BlockProfile block_profile(const BipartiteOp& u, double tol) {
  require_unitary(u, tol);
  BlockProfile p;
  p.dA = u.dA;
  p.dB = u.dB;
  p.op = u;
  p.grid.assign(u.dA, std::vector<bool>(u.dA, false));
  p.row_counts.assign(u.dA, 0);
  p.col_counts.assign(u.dA, 0);
  for (int j = 0; j < u.dA; ++j)
    for (int k = 0; k < u.dA; ++k)
      if (nonzero(u.block(j, k), tol)) {
        p.grid[j][k] = true;
        ++p.row_counts[j];
        ++p.col_counts[k];
      }
  p.is_complex_permutation = is_complex_permutation_matrix(u.m, tol);
  p.is_permutation = p.is_complex_permutation && is_permutation_matrix(u.m, tol);
  return p;
}

Mat ControlledForm::core() const {
  const int dc = control_dim();
  Mat c = Mat::Zero(dA * dB, dA * dB);
  for (const auto& t : terms) {
    Mat p = projector(dc, t.support);
    c += side == Side::A ? tensor(p, t.op) : tensor(t.op, p);
  }
  return c;
}

Mat ControlledForm::reconstruct() const {
  return tensor(post_A, post_B) * core() * tensor(pre_A, pre_B);
}

std::optional<ControlledForm> detect_controlled(const BipartiteOp& u, Side side,
                                                bool up_to_phase, double tol) {
  require_unitary(u, tol);
  if (side == Side::B) {
    auto f = detect_controlled(u.swapped(), Side::A, up_to_phase, tol);
    if (!f) return std::nullopt;
    ControlledForm g;
    g.side = Side::B;
    g.dA = u.dA;
    g.dB = u.dB;
    g.terms = f->terms;
    g.pre_B = f->pre_A;
    g.post_B = f->post_A;
    g.pre_A = f->pre_B;
    g.post_A = f->post_B;
    return g;
  }
  const int dA = u.dA, dB = u.dB;
  std::vector<int> pi(dA, -1);
  std::vector<int> row_hits(dA, 0);
  for (int k = 0; k < dA; ++k) {
    int hits = 0;
    for (int j = 0; j < dA; ++j)
      if (nonzero(u.block(j, k), tol)) {
        ++hits;
        pi[k] = j;
        ++row_hits[j];
      }
    if (hits != 1) return std::nullopt;
  }
  for (int j = 0; j < dA; ++j)
    if (row_hits[j] != 1) return std::nullopt;

  ControlledForm f;
  f.side = Side::A;
  f.dA = dA;
  f.dB = dB;
  f.post_A = Mat::Zero(dA, dA);
  for (int k = 0; k < dA; ++k) f.post_A(pi[k], k) = 1.0;
  f.pre_A = Mat::Identity(dA, dA);
  f.pre_B = Mat::Identity(dB, dB);
  f.post_B = Mat::Identity(dB, dB);
  for (int k = 0; k < dA; ++k) {
    Mat t = u.block(pi[k], k);
    bool placed = false;
    for (auto& term : f.terms) {
      const Mat& rep = term.op;
      if (fro(t - rep) <= scaled(tol, rep)) {
        term.support.push_back(k);
        placed = true;
        break;
      }
      if (up_to_phase) {
        cplx c = (rep.adjoint() * t).trace() / (rep.adjoint() * rep).trace();
        if (std::abs(std::abs(c) - 1.0) <= tol * 10 && fro(t - c * rep) <= scaled(tol, rep)) {
          term.support.push_back(k);
          f.pre_A(k, k) = c / std::abs(c);
          placed = true;
          break;
        }
      }
    }
    if (!placed) f.terms.push_back({{k}, t});
  }
  return f;
}

std::vector<Component> direct_sum_decompose(const BipartiteOp& u, Side side, double tol) {
  require_unitary(u, tol);
  if (side == Side::B) {
    auto comps = direct_sum_decompose(u.swapped(), Side::A, tol);
    for (auto& c : comps) c.op = c.op.swapped();
    return comps;
  }
  std::vector<std::pair<int, int>> edges;
  for (int j = 0; j < u.dA; ++j)
    for (int k = 0; k < u.dA; ++k)
      if (j != k && nonzero(u.block(j, k), tol)) edges.emplace_back(j, k);
  std::vector<Component> out;
  for (auto& s : components_of(u.dA, edges)) out.push_back({s, restrict_A(u, s)});
  return out;
}

Mat embed_component(const Component& c, const BipartiteOp& full, Side side) {
  const int n = static_cast<int>(c.support.size());
  if (side == Side::A) {
    Mat e = Mat::Zero(full.dA, n);
    for (int i = 0; i < n; ++i) e(c.support[i], i) = 1.0;
    Mat ie = tensor(e, Mat::Identity(full.dB, full.dB));
    return ie * c.op.m * ie.adjoint();
  }
  Mat e = Mat::Zero(full.dB, n);
  for (int i = 0; i < n; ++i) e(c.support[i], i) = 1.0;
  Mat ie = tensor(Mat::Identity(full.dA, full.dA), e);
  return ie * c.op.m * ie.adjoint();
}

// ---------------------------------------------------------------------------
// Schmidt-rank-three standard form.

namespace {

Vec vec_of(const Mat& m) { return Eigen::Map<const Vec>(m.data(), m.size()); }

/** Least-squares coefficients of m in the given basis and the residual. */
std::pair<Vec, double> expand(const std::vector<Mat>& basis, const Mat& m) {
  Mat s(m.size(), static_cast<long>(basis.size()));
  for (size_t j = 0; j < basis.size(); ++j) s.col(j) = vec_of(basis[j]);
  Vec c = s.completeOrthogonalDecomposition().solve(vec_of(m));
  return {c, (s * c - vec_of(m)).norm()};
}

struct Lm2Result {
  bool ok = false;
  bool diagonal = false;
  std::string note;
  Mat z, t2, t3;
  cplx t2_phase = 1.0, t3_phase = 1.0;
  int block1_dim = 0;
  std::vector<Rank3Block> blocks;
  double residual = 0;
};

/** Eigenvalue clusters of a normal matrix with orthonormal eigenbases. */
struct Eigenspaces {
  std::vector<cplx> values;
  std::vector<Mat> bases;
};

Eigenspaces normal_eigenspaces(const Mat& t, double ctol) {
  Eigen::ComplexSchur<Mat> cs(t);
  const Mat& q = cs.matrixU();
  const Mat& tri = cs.matrixT();
  std::vector<cplx> ev(t.rows());
  for (Eigen::Index i = 0; i < t.rows(); ++i) ev[i] = tri(i, i);
  auto lab = cluster_values(ev, ctol);
  int nc = lab.empty() ? 0 : *std::max_element(lab.begin(), lab.end()) + 1;
  Eigenspaces es;
  for (int c = 0; c < nc; ++c) {
    std::vector<int> idx;
    cplx mean = 0;
    for (size_t i = 0; i < lab.size(); ++i)
      if (lab[i] == c) {
        idx.push_back(static_cast<int>(i));
        mean += ev[i];
      }
    Mat b(t.rows(), static_cast<long>(idx.size()));
    for (size_t i = 0; i < idx.size(); ++i) b.col(i) = q.col(idx[i]);
    es.values.push_back(mean / static_cast<double>(idx.size()));
    es.bases.push_back(b);
  }
  return es;
}

/** Orthonormal basis of the subspace diagonalizing the compression of m. */
Mat diagonalize_within(const Mat& basis, const Mat& m) {
  if (basis.cols() == 0) return basis;
  Mat c = basis.adjoint() * m * basis;
  Eigen::ComplexSchur<Mat> cs(c);
  return basis * cs.matrixU();
}

Lm2Result lm2_structure(const Mat& t2_in, const Mat& t3_in, double tol) {
  Lm2Result r;
  const int d = static_cast<int>(t2_in.rows());
  const double ctol = 1e-6;
  Mat t2 = t2_in, t3 = t3_in;
  Eigenspaces es = normal_eigenspaces(t2, ctol);
  Mat d3 = Mat::Zero(d, d);
  for (const Mat& b : es.bases) {
    Mat p = b * b.adjoint();
    d3 += p * t3 * p;
  }
  Mat e3 = t3 - d3;
  if (fro(e3) <= tol * std::sqrt(static_cast<double>(d))) {
    // T2 and T3 commute: a single diagonal block.
    Mat z(d, 0);
    for (const Mat& b : es.bases) {
      Mat v = diagonalize_within(b, t3);
      Mat nz(d, z.cols() + v.cols());
      nz << z, v;
      z = nz;
    }
    r.ok = true;
    r.diagonal = true;
    r.z = z;
    r.t2 = z.adjoint() * t2 * z;
    r.t3 = z.adjoint() * t3 * z;
    r.block1_dim = d;
    Rank3Block b1;
    b1.offset = 0;
    b1.size = d;
    b1.t2 = r.t2;
    b1.t3 = r.t3;
    r.blocks.push_back(b1);
    Mat off2 = r.t2, off3 = r.t3;
    off2.diagonal().setZero();
    off3.diagonal().setZero();
    r.residual = std::max(fro(off2), fro(off3));
    if (r.residual > tol * 10) {
      r.ok = false;
      r.note = "commuting pair failed to diagonalize";
    }
    return r;
  }
  // E3^dag = eta E3; rotate T3 so that E3 is Hermitian.
  const cplx eta = (e3.adjoint() * e3.adjoint()).trace() / (e3.adjoint() * e3).trace();
  if (fro(e3.adjoint() - eta * e3) > scaled(tol, e3) * 10) {
    r.note = "E3 is not proportional to its adjoint";
    r.residual = fro(e3.adjoint() - eta * e3);
    return r;
  }
  const cplx g3 = std::polar(1.0, std::arg(eta) / 2);
  t3 *= g3;
  d3 *= g3;
  e3 *= g3;
  r.t3_phase = g3;
  // T2 E3 = mu E3 T2^dag; rotate T2 so that mu = -1.
  Mat lhs = t2 * e3, rhs = e3 * t2.adjoint();
  const cplx mu = (rhs.adjoint() * lhs).trace() / (rhs.adjoint() * rhs).trace();
  if (fro(lhs - mu * rhs) > scaled(tol, lhs) * 10) {
    r.note = "T2 E3 is not proportional to E3 T2^dag";
    r.residual = fro(lhs - mu * rhs);
    return r;
  }
  double psi = std::arg(-std::conj(mu)) / 2;
  if (psi <= -M_PI / 2 + 1e-12) psi += M_PI;
  const cplx g2 = std::polar(1.0, psi);
  t2 *= g2;
  r.t2_phase = g2;
  for (auto& v : es.values) v *= g2;

  Mat k = e3 * e3;
  const double ktol = 1e-7 * std::max(1.0, fro(k));
  std::vector<Mat> block1;
  struct Pair {
    double alpha;
    int order;
    Vec v, w;
  };
  std::vector<Pair> pairs;
  int paired_dim = 0;
  for (size_t c = 0; c < es.values.size(); ++c) {
    const Mat& b = es.bases[c];
    Mat kc = b.adjoint() * k * b;
    kc = (kc + kc.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Mat> sa(kc);
    const auto& kv = sa.eigenvalues();
    std::vector<int> zero_idx;
    std::vector<cplx> pos_vals;
    std::vector<int> pos_idx;
    for (Eigen::Index i = 0; i < kv.size(); ++i) {
      if (kv(i) <= ktol) {
        zero_idx.push_back(static_cast<int>(i));
      } else {
        pos_idx.push_back(static_cast<int>(i));
        pos_vals.push_back(kv(i));
      }
    }
    if (!zero_idx.empty()) {
      Mat sub(d, static_cast<long>(zero_idx.size()));
      for (size_t i = 0; i < zero_idx.size(); ++i) sub.col(i) = b * sa.eigenvectors().col(zero_idx[i]);
      block1.push_back(diagonalize_within(sub, t3));
    }
    if (pos_idx.empty()) continue;
    const cplx lam = es.values[c];
    if (std::abs(lam + std::conj(lam)) <= ctol) {
      r.note = "coupled eigenspace with eigenvalue +-i";
      return r;
    }
    if (lam.real() < 0) {
      paired_dim += static_cast<int>(pos_idx.size());
      continue;
    }
    auto klab = cluster_values(pos_vals, 1e-6 * std::max(1.0, fro(k)));
    const int nk = *std::max_element(klab.begin(), klab.end()) + 1;
    for (int g = 0; g < nk; ++g) {
      std::vector<int> idx;
      double kappa = 0;
      for (size_t i = 0; i < pos_idx.size(); ++i)
        if (klab[i] == g) {
          idx.push_back(pos_idx[i]);
          kappa += pos_vals[i].real();
        }
      kappa /= static_cast<double>(idx.size());
      Mat sub(d, static_cast<long>(idx.size()));
      for (size_t i = 0; i < idx.size(); ++i) sub.col(i) = b * sa.eigenvectors().col(idx[i]);
      Mat vs = diagonalize_within(sub, d3);
      for (Eigen::Index i = 0; i < vs.cols(); ++i) {
        Vec v = vs.col(i);
        Vec w = e3 * v / std::sqrt(kappa);
        pairs.push_back({std::arg(lam), static_cast<int>(pairs.size()), v, w});
      }
      paired_dim += static_cast<int>(idx.size());
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
    if (std::abs(x.alpha - y.alpha) > 1e-9) return x.alpha < y.alpha;
    return x.order < y.order;
  });
  int d1 = 0;
  for (const Mat& m : block1) d1 += static_cast<int>(m.cols());
  if (d1 + 2 * static_cast<int>(pairs.size()) != d ||
      paired_dim != 2 * static_cast<int>(pairs.size())) {
    r.note = "eigenspace pairing does not cover the space";
    return r;
  }
  Mat z(d, d);
  int col = 0;
  for (const Mat& m : block1)
    for (Eigen::Index i = 0; i < m.cols(); ++i) z.col(col++) = m.col(i);
  for (const Pair& p : pairs) {
    z.col(col++) = p.v;
    z.col(col++) = p.w;
  }
  r.z = z;
  r.t2 = z.adjoint() * t2 * z;
  r.t3 = z.adjoint() * t3 * z;
  r.block1_dim = d1;
  double res = fro(z.adjoint() * z - Mat::Identity(d, d));
  // Expected block structure.
  Mat mask = Mat::Zero(d, d);
  for (int i = 0; i < d1; ++i) mask(i, i) = 1.0;
  if (d1 > 0) {
    Rank3Block b1;
    b1.offset = 0;
    b1.size = d1;
    b1.t2 = r.t2.topLeftCorner(d1, d1);
    b1.t3 = r.t3.topLeftCorner(d1, d1);
    r.blocks.push_back(b1);
  }
  for (size_t i = 0; i < pairs.size(); ++i) {
    const int o = d1 + 2 * static_cast<int>(i);
    mask.block(o, o, 2, 2).setOnes();
    Rank3Block b;
    b.offset = o;
    b.size = 2;
    b.t2 = r.t2.block(o, o, 2, 2);
    b.t3 = r.t3.block(o, o, 2, 2);
    b.alpha = pairs[i].alpha;
    const cplx ea = std::polar(1.0, b.alpha);
    res = std::max(res, std::abs(b.t2(0, 0) - ea));
    res = std::max(res, std::abs(b.t2(1, 1) + std::conj(ea)));
    res = std::max(res, std::abs(b.t3(0, 1) - b.t3(1, 0)));
    res = std::max(res, std::abs(b.t3(0, 1).imag()));
    if (b.t3(0, 1).real() <= tol) res = std::max(res, 1.0);
    r.blocks.push_back(b);
  }
  Mat off2 = r.t2;
  off2.diagonal().setZero();
  res = std::max(res, fro(off2));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (mask(i, j) == cplx(0.0)) res = std::max(res, std::abs(r.t3(i, j)));
  if (d1 > 0) {
    Mat b1 = r.t3.topLeftCorner(d1, d1);
    b1.diagonal().setZero();
    res = std::max(res, fro(b1));
  }
  r.residual = res;
  r.ok = res <= tol * 10;
  if (!r.ok) r.note = "block invariants not met";
  return r;
}

}  // namespace

Mat Rank3StandardForm::reconstruct() const {
  const int dA = static_cast<int>(coefficients.size());
  const int dB = static_cast<int>(t2.rows());
  Mat core = Mat::Zero(dA * dB, dA * dB);
  const Mat id = Mat::Identity(dB, dB);
  for (int j = 0; j < dA; ++j) {
    const auto& c = coefficients[j];
    core.block(j * dB, j * dB, dB, dB) = c[0] * id + c[1] * t2 + c[2] * t3;
  }
  return tensor(a_post, b_post) * core * tensor(Mat::Identity(dA, dA), b_pre);
}

Rank3StandardForm rank3_standard_form(const BipartiteOp& u, double tol) {
  require_unitary(u, tol);
  const int r = schmidt_rank(u, tol);
  if (r != 3) throw Error("Schmidt rank is " + std::to_string(r) + ", expected 3");
  auto cf = detect_controlled(u, Side::A, false, tol);
  if (!cf) throw Error("not controlled from A in the computational basis");
  const int dA = u.dA, dB = u.dB;
  // Blocks per input level k: U = (Pi (x) I) sum_k |k><k| (x) T_k.
  std::vector<Mat> t(dA);
  for (const auto& term : cf->terms)
    for (int k : term.support) t[k] = term.op;
  const Mat t1 = t[0];
  std::vector<Mat> tt(dA);
  for (int k = 0; k < dA; ++k) tt[k] = t1.adjoint() * t[k];
  const Mat id = Mat::Identity(dB, dB);
  int j2 = -1, j3 = -1;
  for (int k = 0; k < dA && j3 < 0; ++k) {
    if (j2 < 0) {
      if (span_rank({id, tt[k]}, tol) == 2) j2 = k;
    } else if (span_rank({id, tt[j2], tt[k]}, tol) == 3) {
      j3 = k;
    }
  }
  if (j2 < 0 || j3 < 0) throw NumericError("could not find three independent blocks");
  Rank3StandardForm f;
  std::vector<std::array<cplx, 3>> h(dA);
  for (int k = 0; k < dA; ++k) {
    auto [c, res] = expand({id, tt[j2], tt[j3]}, tt[k]);
    if (res > scaled(tol, tt[k]) * 10) throw NumericError("block outside the rank-3 span");
    h[k] = {c(0), c(1), c(2)};
    const double ztol = 1e-8;
    if (std::abs(c(2)) <= ztol) {
      f.s1.push_back(k);
    } else if (std::abs(c(1)) <= ztol) {
      f.s2.push_back(k);
    } else {
      f.s3.push_back(k);
    }
  }
  std::vector<Mat> w3;
  for (int k : f.s3) w3.push_back(tt[k]);
  f.w3_rank = span_rank(w3, tol);
  f.branch = f.w3_rank == 3 ? "b_direct_sum" : "a_direct_sum";

  Lm2Result lm = lm2_structure(tt[j2], tt[j3], tol);
  Mat z = Mat::Identity(dB, dB);
  if (lm.ok) {
    f.has_b_form = true;
    f.simultaneously_diagonal = lm.diagonal;
    f.block1_dim = lm.block1_dim;
    f.blocks = lm.blocks;
    f.t2 = lm.t2;
    f.t3 = lm.t3;
    f.gauge_residual = lm.residual;
    z = lm.z;
  } else {
    f.b_form_note = lm.note;
    f.gauge_residual = lm.residual;
    f.t2 = tt[j2];
    f.t3 = tt[j3];
    if (f.branch == "b_direct_sum")
      throw NumericError("B-direct-sum block invariants not met: " + lm.note +
                         " (residual " + std::to_string(lm.residual) + ")");
  }
  Mat phases = Mat::Identity(dA, dA);
  f.coefficients.resize(dA);
  for (int k = 0; k < dA; ++k) {
    Mat s = z.adjoint() * tt[k] * z;
    auto [c, res] = expand({id, f.t2, f.t3}, s);
    if (res > scaled(tol, s) * 10) throw NumericError("coefficient fit failed");
    cplx g = 1.0;
    if (std::abs(c(0)) > tol) g = c(0) / std::abs(c(0));
    phases(k, k) = g;
    f.coefficients[k] = {c(0) / g, c(1) / g, c(2) / g};
    f.coefficients[k][0] = f.coefficients[k][0].real();
  }
  f.a_post = cf->post_A * phases;
  f.b_post = t1 * z;
  f.b_pre = z.adjoint();
  f.reconstruction_error = fro(f.reconstruct() - u.m);
  if (f.reconstruction_error > 1e-9 * std::max(1.0, fro(u.m)) * 10)
    throw NumericError("standard form does not reconstruct U (error " +
                       std::to_string(f.reconstruction_error) + ")");
  return f;
}

// ---------------------------------------------------------------------------
// Type partitions for permutation unitaries.

std::vector<int> TypePartition::labels(int n) const {
  std::vector<int> l(n, -1);
  for (size_t c = 0; c < classes.size(); ++c)
    for (int i : classes[c]) l[i] = static_cast<int>(c);
  return l;
}

namespace {

void require_permutation(const BipartiteOp& u, double tol) {
  if (!is_permutation_matrix(u.m, tol)) throw Error("non-permutation input");
}

bool same_block_set(const std::vector<Mat>& x, const std::vector<Mat>& y, double tol) {
  if (x.size() != y.size()) return false;
  for (const Mat& a : x) {
    bool found = false;
    for (const Mat& b : y)
      if (fro(a - b) <= tol) {
        found = true;
        break;
      }
    if (!found) return false;
  }
  return true;
}

}  // namespace

PermutationTypes permutation_type_partitions(const BipartiteOp& u, double tol) {
  require_permutation(u, tol);
  const int dA = u.dA, dB = u.dB;
  PermutationTypes pt;
  pt.input_A.kind = "input_A";
  std::vector<std::vector<Mat>> reps;
  for (int x = 0; x < dA; ++x) {
    std::vector<Mat> blocks;
    for (int j = 0; j < dA; ++j)
      if (nonzero(u.block(j, x), tol)) blocks.push_back(u.block(j, x));
    bool placed = false;
    for (size_t c = 0; c < reps.size(); ++c)
      if (same_block_set(reps[c], blocks, tol)) {
        pt.input_A.classes[c].push_back(x);
        placed = true;
        break;
      }
    if (!placed) {
      reps.push_back(blocks);
      pt.input_A.classes.push_back({x});
      pt.relative_output_per_class.push_back(static_cast<int>(blocks.size()));
    }
  }
  pt.relative_output =
      *std::max_element(pt.relative_output_per_class.begin(), pt.relative_output_per_class.end());

  const int r = schmidt_rank(u, tol);
  std::vector<Mat> basis;
  std::vector<Vec> ortho;  // Gram-Schmidt copy of the basis, vectorized
  for (int j = 0; j < dA && static_cast<int>(basis.size()) < r; ++j)
    for (int k = 0; k < dA && static_cast<int>(basis.size()) < r; ++k) {
      Mat b = u.block(j, k);
      if (!nonzero(b, tol)) continue;
      Vec v = Eigen::Map<const Vec>(b.data(), b.size());
      const double n0 = v.norm();
      for (int pass = 0; pass < 2; ++pass)
        for (const Vec& q : ortho) v -= q.dot(v) * q;
      if (v.norm() > tol * n0) {
        ortho.push_back(v / v.norm());
        basis.push_back(b);
        pt.basis_blocks.emplace_back(j, k);
      }
    }
  pt.output_B.kind = "output_B";
  std::vector<std::vector<bool>> patterns;
  for (int y = 0; y < dB; ++y) {
    std::vector<bool> pat;
    for (const Mat& b : basis) pat.push_back(b.row(y).norm() > tol);
    auto it = std::find(patterns.begin(), patterns.end(), pat);
    if (it == patterns.end()) {
      patterns.push_back(pat);
      pt.output_B.classes.push_back({y});
    } else {
      pt.output_B.classes[it - patterns.begin()].push_back(y);
    }
  }
  return pt;
}

TypePartition loose_type_partition(const BipartiteOp& u, Side side, double tol) {
  require_permutation(u, tol);
  if (side == Side::B) {
    auto p = loose_type_partition(u.swapped(), Side::A, tol);
    p.kind = "loose_B";
    return p;
  }
  TypePartition p;
  p.kind = "loose_A";
  std::vector<Mat> reps;
  for (int x = 0; x < u.dA; ++x) {
    Mat s = Mat::Zero(u.dB, u.dB);
    for (int j = 0; j < u.dA; ++j) s += u.block(j, x);
    bool placed = false;
    for (size_t c = 0; c < reps.size(); ++c)
      if (fro(reps[c] - s) <= tol) {
        p.classes[c].push_back(x);
        placed = true;
        break;
      }
    if (!placed) {
      reps.push_back(s);
      p.classes.push_back({x});
    }
  }
  return p;
}

namespace {

bool is_partial_permutation(const Mat& m, double tol) {
  const Eigen::Index n = m.rows();
  std::vector<int> rc(n, 0), cc(m.cols(), 0);
  bool any = false;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const cplx v = m(i, j);
      if (std::abs(v) <= tol) continue;
      if (std::abs(v - cplx(1.0)) > tol) return false;
      if (++rc[i] > 1 || ++cc[j] > 1) return false;
      any = true;
    }
  return any;
}

}  // namespace

std::vector<std::vector<int>> covering_subsets(const std::vector<Mat>& s, std::size_t cap,
                                               double tol) {
  if (s.empty()) throw Error("empty set");
  if (s.size() > cap)
    throw Error("set size " + std::to_string(s.size()) + " exceeds cap " + std::to_string(cap));
  const Eigen::Index n = s[0].rows();
  std::vector<std::vector<int>> cols(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i].rows() != n || s[i].cols() != n) throw Error("matrices have different orders");
    if (!is_partial_permutation(s[i], tol))
      throw Error("member " + std::to_string(i) + " is not a nonzero partial permutation matrix");
    for (size_t j = 0; j < i; ++j)
      if (fro(s[i] - s[j]) <= tol) throw Error("duplicate member " + std::to_string(i));
    for (Eigen::Index c = 0; c < n; ++c)
      if (s[i].col(c).norm() > tol) cols[i].push_back(static_cast<int>(c));
  }
  std::vector<int> owners_count(n, 0);
  for (const auto& c : cols)
    for (int x : c) ++owners_count[x];
  for (Eigen::Index c = 0; c < n; ++c)
    if (owners_count[c] == 0) throw Error("column " + std::to_string(c) + " is not occupied");

  std::vector<std::vector<int>> out;
  std::vector<bool> covered(n, false);
  std::vector<int> chosen;
  std::function<void()> dfs = [&]() {
    int first = -1;
    for (Eigen::Index c = 0; c < n; ++c)
      if (!covered[c]) {
        first = static_cast<int>(c);
        break;
      }
    if (first < 0) {
      auto sub = chosen;
      std::sort(sub.begin(), sub.end());
      out.push_back(sub);
      return;
    }
    for (size_t i = 0; i < s.size(); ++i) {
      if (std::find(cols[i].begin(), cols[i].end(), first) == cols[i].end()) continue;
      bool ok = true;
      for (int x : cols[i])
        if (covered[x]) {
          ok = false;
          break;
        }
      if (!ok) continue;
      for (int x : cols[i]) covered[x] = true;
      chosen.push_back(static_cast<int>(i));
      dfs();
      chosen.pop_back();
      for (int x : cols[i]) covered[x] = false;
    }
  };
  dfs();
  std::sort(out.begin(), out.end());
  const int r = span_rank(s, tol);
  if (BigInt(static_cast<long>(out.size())) > bell(r + 1))
    throw NumericError("covering subset count exceeds the Bell bound");
  return out;
}

std::vector<Mat> span_partial_permutations(const std::vector<Mat>& basis, double tol) {
  const int r = static_cast<int>(basis.size());
  if (r == 0) return {};
  if (r > 20) throw Error("basis too large for exhaustive enumeration");
  if (span_rank(basis, tol) != r) throw Error("basis is not linearly independent");
  const Eigen::Index rows = basis[0].rows(), cols = basis[0].cols();
  Mat m(r, basis[0].size());
  for (int i = 0; i < r; ++i) m.row(i) = vec_of(basis[i]).transpose();
  Eigen::ColPivHouseholderQR<Mat> qr(m);
  const auto& perm = qr.colsPermutation().indices();
  Mat sub(r, r);
  for (int j = 0; j < r; ++j) sub.col(j) = m.col(perm(j));
  // Rows of gm take the value delta_ij at the key entries.
  Mat gm = sub.inverse() * m;
  std::vector<Mat> out;
  for (long mask = 1; mask < (1L << r); ++mask) {
    Eigen::RowVectorXcd v = Eigen::RowVectorXcd::Zero(m.cols());
    for (int i = 0; i < r; ++i)
      if (mask & (1L << i)) v += gm.row(i);
    Mat cand = Eigen::Map<Mat>(v.data(), rows, cols);
    if (is_partial_permutation(cand, 1e-7)) {
      Mat clean = cand.real().array().round().cast<cplx>();
      out.push_back(clean);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Classification for Schmidt ranks two and three.

ControlledForm rank2_standard_form(const BipartiteOp& u, bool complex, double tol) {
  const int r = schmidt_rank(u, tol);
  if (r != 2) throw Error("Schmidt rank is " + std::to_string(r) + ", expected 2");
  if (complex ? !is_complex_permutation_matrix(u.m, tol) : !is_permutation_matrix(u.m, tol))
    throw Error(complex ? "not a complex permutation unitary" : "not a permutation unitary");
  for (Side s : {Side::A, Side::B}) {
    auto f = detect_controlled(u, s, complex, tol);
    if (f && f->terms.size() == 2) return *f;
  }
  throw NumericError("no two-term controlled form found under local permutations");
}

Rank3Classification classify_rank3_permutation(const BipartiteOp& u, double tol) {
  if (!is_permutation_matrix(u.m, tol)) throw Error("not a permutation unitary");
  const int r = schmidt_rank(u, tol);
  if (r != 3) throw Error("Schmidt rank is " + std::to_string(r) + ", expected 3");
  Rank3Classification out;
  auto finish_controlled = [&](const ControlledForm& f) {
    out.controlled = f;
    const size_t n = f.terms.size();
    if (n != 3 && n != 4)
      throw NumericError("controlled form with " + std::to_string(n) + " terms");
    out.tag = n == 3 ? "controlled-3-term" : "controlled-4-term";
    out.reconstruction_error = fro(f.reconstruct() - u.m);
    return out;
  };
  for (Side side : {Side::A, Side::B}) {
    auto f = detect_controlled(u, side, false, tol);
    if (f && (f->terms.size() == 3 || f->terms.size() == 4)) return finish_controlled(*f);
  }
  // Otherwise look for a product part and a two-term part, after relabelling
  // outputs on the sum side so that each piece keeps its index set.
  for (Side side : {Side::A, Side::B}) {
    const Mat p = output_alignment(u, side, tol);
    const Mat lift = side == Side::A ? tensor(p, Mat::Identity(u.dB, u.dB))
                                     : tensor(Mat::Identity(u.dA, u.dA), p);
    const BipartiteOp w(u.dA, u.dB, lift * u.m);
    auto comps = direct_sum_decompose(w, side, tol);
    const int nc = static_cast<int>(comps.size());
    if (nc < 2 || nc > 20) continue;
    for (long mask = 1; mask < (1L << nc) - 1; ++mask) {
      Component prod, two;
      for (int i = 0; i < nc; ++i) {
        auto& dst = (mask & (1L << i)) ? prod : two;
        dst.support.insert(dst.support.end(), comps[i].support.begin(), comps[i].support.end());
      }
      std::sort(prod.support.begin(), prod.support.end());
      std::sort(two.support.begin(), two.support.end());
      BipartiteOp base = side == Side::A ? w : w.swapped();
      BipartiteOp po = restrict_A(base, prod.support);
      BipartiteOp to = restrict_A(base, two.support);
      if (side == Side::B) {
        po = po.swapped();
        to = to.swapped();
      }
      if (schmidt_rank(po, tol) != 1 || schmidt_rank(to, tol) != 2) continue;
      ControlledForm f;
      try {
        f = rank2_standard_form(to, false, tol);
      } catch (const Error&) {
        continue;
      }
      prod.op = po;
      two.op = to;
      out.tag = "product+two-term";
      out.sum_side = side;
      out.alignment = p;
      out.product_part = {prod};
      out.two_term_part = {two};
      out.two_term_form = f;
      Component twof{two.support, BipartiteOp(to.dA, to.dB, f.reconstruct())};
      const Mat rec = lift.adjoint() * (embed_component(prod, w, side) + embed_component(twof, w, side));
      out.reconstruction_error = fro(rec - u.m);
      return out;
    }
  }
  throw NumericError("rank-3 permutation matched no class");
}

Mat partial_transpose_B(const BipartiteOp& u) {
  Mat t(u.dim(), u.dim());
  for (int a = 0; a < u.dA; ++a)
    for (int b = 0; b < u.dB; ++b)
      for (int a2 = 0; a2 < u.dA; ++a2)
        for (int b2 = 0; b2 < u.dB; ++b2)
          t(a * u.dB + b, a2 * u.dB + b2) = u.m(a * u.dB + b2, a2 * u.dB + b);
  return t;
}

PartialTransposeCheck partial_transpose_check(const BipartiteOp& u, int k, double tol) {
  PartialTransposeCheck c;
  c.k = k > 0 ? k : schmidt_rank(u, tol);
  c.lhs_rank = matrix_rank(u.m, tol);
  c.rhs_rank = matrix_rank(partial_transpose_B(u), tol);
  c.holds = c.lhs_rank <= c.k * c.rhs_rank;
  return c;
}

}  // namespace bforge
