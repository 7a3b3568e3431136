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

#include "bforge/entpower.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>

#include "bforge/fixtures.hpp"
#include "bforge/parallel.hpp"

namespace bforge::entpower {

namespace {

constexpr double kClip = 1e-12;

struct Dims {
  int dA, dB, dRA, dRB;
};

Dims check_dims(const BipartiteOp& u, const ProductInput& in) {
  if (in.dRA < 1 || in.dRB < 1) throw Error("ancilla dimensions must be positive");
  if (in.alpha.size() != static_cast<long>(u.dA) * in.dRA)
    throw Error("alpha has length " + std::to_string(in.alpha.size()) + ", expected dA*dRA = " +
                std::to_string(u.dA * in.dRA));
  if (in.beta.size() != static_cast<long>(u.dB) * in.dRB)
    throw Error("beta has length " + std::to_string(in.beta.size()) + ", expected dB*dRB = " +
                std::to_string(u.dB * in.dRB));
  return {u.dA, u.dB, in.dRA, in.dRB};
}

/** Output as a matrix with rows (a', ra) and columns (b', rb). */
Mat output_matrix(const BipartiteOp& u, const Dims& d, const Vec& alpha, const Vec& beta) {
  Mat x(d.dA * d.dB, d.dRA * d.dRB);
  for (int a = 0; a < d.dA; ++a)
    for (int b = 0; b < d.dB; ++b)
      for (int ra = 0; ra < d.dRA; ++ra)
        for (int rb = 0; rb < d.dRB; ++rb)
          x(a * d.dB + b, ra * d.dRB + rb) = alpha(a * d.dRA + ra) * beta(b * d.dRB + rb);
  const Mat y = u.m * x;
  Mat z(d.dA * d.dRA, d.dB * d.dRB);
  for (int a = 0; a < d.dA; ++a)
    for (int b = 0; b < d.dB; ++b)
      for (int ra = 0; ra < d.dRA; ++ra)
        for (int rb = 0; rb < d.dRB; ++rb)
          z(a * d.dRA + ra, b * d.dRB + rb) = y(a * d.dB + b, ra * d.dRB + rb);
  return z;
}

double entropy_bits(const Eigen::VectorXd& lam) {
  double e = 0;
  for (long i = 0; i < lam.size(); ++i)
    if (lam(i) > kClip) e -= lam(i) * std::log2(lam(i));
  return e;
}

struct Eval {
  double value;
  Vec g_alpha, g_beta;
};

/** Entropy and its gradient with respect to conj(alpha), conj(beta). */
Eval evaluate(const BipartiteOp& u, const Dims& d, const Vec& alpha, const Vec& beta, bool grad) {
  const Mat z = output_matrix(u, d, alpha, beta);
  const Mat rho = z * z.adjoint();
  Eigen::SelfAdjointEigenSolver<Mat> es(rho);
  const Eigen::VectorXd lam = es.eigenvalues();
  Eval ev{entropy_bits(lam), {}, {}};
  if (!grad) return ev;
  Eigen::VectorXd l(lam.size());
  for (long i = 0; i < lam.size(); ++i) l(i) = -(std::log2(std::max(lam(i), kClip)) + 1 / std::log(2.0));
  const Mat gz = es.eigenvectors() * l.asDiagonal() * es.eigenvectors().adjoint() * z;
  Mat gy(d.dA * d.dB, d.dRA * d.dRB);
  for (int a = 0; a < d.dA; ++a)
    for (int b = 0; b < d.dB; ++b)
      for (int ra = 0; ra < d.dRA; ++ra)
        for (int rb = 0; rb < d.dRB; ++rb)
          gy(a * d.dB + b, ra * d.dRB + rb) = gz(a * d.dRA + ra, b * d.dRB + rb);
  const Mat gx = u.m.adjoint() * gy;
  ev.g_alpha = Vec::Zero(alpha.size());
  ev.g_beta = Vec::Zero(beta.size());
  for (int a = 0; a < d.dA; ++a)
    for (int b = 0; b < d.dB; ++b)
      for (int ra = 0; ra < d.dRA; ++ra)
        for (int rb = 0; rb < d.dRB; ++rb) {
          const cplx g = gx(a * d.dB + b, ra * d.dRB + rb);
          ev.g_alpha(a * d.dRA + ra) += g * std::conj(beta(b * d.dRB + rb));
          ev.g_beta(b * d.dRB + rb) += g * std::conj(alpha(a * d.dRA + ra));
        }
  return ev;
}

Vec random_state(long n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Vec v(n);
  for (long i = 0; i < n; ++i) v(i) = cplx(nd(rng), nd(rng));
  return v / v.norm();
}

struct Ascent {
  double value;
  Vec alpha, beta;
};

Ascent ascend(const BipartiteOp& u, const Dims& d, Vec alpha, Vec beta, const Config& cfg) {
  Eval cur = evaluate(u, d, alpha, beta, true);
  double step = 0.5;
  for (int it = 0; it < cfg.max_iter; ++it) {
    Vec ga = cur.g_alpha - alpha.dot(cur.g_alpha) * alpha;
    Vec gb = cur.g_beta - beta.dot(cur.g_beta) * beta;
    if (ga.norm() + gb.norm() < 1e-13) break;
    bool accepted = false;
    while (step > 1e-14) {
      Vec na = alpha + step * ga, nb = beta + step * gb;
      na /= na.norm();
      nb /= nb.norm();
      Eval next = evaluate(u, d, na, nb, true);
      if (next.value > cur.value) {
        const double gain = next.value - cur.value;
        alpha = std::move(na);
        beta = std::move(nb);
        cur = std::move(next);
        step *= 1.5;
        accepted = true;
        if (gain < cfg.tol) it = cfg.max_iter;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  return {cur.value, alpha, beta};
}

/** (e, f) with alternating length-t vector of norm^2 1/2 and e - f = 2 / sqrt(6 floor(t/2)). */
std::pair<double, double> alternating_pair(int t) {
  const double delta = 2 / std::sqrt(6.0 * (t / 2));
  const double ne = (t + 1) / 2, nf = t / 2;
  // ne e^2 + nf (e - delta)^2 = 1/2
  const double a = ne + nf, b = -2 * nf * delta, c = nf * delta * delta - 0.5;
  const double e = (-b + std::sqrt(b * b - 4 * a * c)) / (2 * a);
  return {e, e - delta};
}

Vec alternating(int len, double x, double y) {
  Vec v(len);
  for (int i = 0; i < len; ++i) v(i) = i % 2 == 0 ? x : y;
  return v;
}

Vec uniform(int n) { return Vec::Constant(n, 1 / std::sqrt(static_cast<double>(n))); }

Vec max_entangled(int d) {
  Vec v = Vec::Zero(static_cast<long>(d) * d);
  for (int i = 0; i < d; ++i) v(static_cast<long>(i) * d + i) = 1 / std::sqrt(static_cast<double>(d));
  return v;
}

int param(const nlohmann::json& p, const char* key, int def) {
  return p.contains(key) ? p.at(key).get<int>() : def;
}

}  // namespace

double output_entanglement(const BipartiteOp& u, const ProductInput& in) {
  const Dims d = check_dims(u, in);
  if (std::abs(in.alpha.norm() - 1) > 1e-12 || std::abs(in.beta.norm() - 1) > 1e-12)
    throw Error("input states must have unit norm");
  return evaluate(u, d, in.alpha, in.beta, false).value;
}

Result maximize(const BipartiteOp& u, const Config& cfg) {
  if (!is_unitary(u.m, 1e-8)) throw Error("operator is not unitary");
  if (cfg.restarts < 1) throw Error("restarts must be positive");
  const Dims d{u.dA, u.dB, cfg.dRA.value_or(u.dA), cfg.dRB.value_or(u.dB)};
  if (d.dRA < 1 || d.dRB < 1) throw Error("ancilla dimensions must be positive");
  std::vector<Ascent> runs(cfg.restarts);
  parallel_for(cfg.restarts, [&](int i) {
    std::mt19937_64 rng(cfg.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(i));
    Vec a = random_state(static_cast<long>(d.dA) * d.dRA, rng);
    Vec b = random_state(static_cast<long>(d.dB) * d.dRB, rng);
    runs[i] = ascend(u, d, std::move(a), std::move(b), cfg);
  });
  Result r;
  r.restarts = cfg.restarts;
  r.upper_bound = std::log2(static_cast<double>(schmidt_rank(u)));
  std::vector<double> sorted;
  int best = 0;
  for (int i = 0; i < cfg.restarts; ++i) {
    r.history.push_back(runs[i].value);
    sorted.push_back(runs[i].value);
    if (runs[i].value > runs[best].value) best = i;
  }
  std::sort(sorted.rbegin(), sorted.rend());
  r.converged = sorted.size() < 2 || sorted[0] - sorted[1] <= 1e-6;
  r.best_value = std::min(runs[best].value, r.upper_bound);
  r.best_input = {runs[best].alpha, runs[best].beta, d.dRA, d.dRB};
  return r;
}

std::vector<std::string> fixture_tags() { return {"I.1", "I.3", "II", "III"}; }

ProductInput fixture_inputs(const std::string& tag, const nlohmann::json& params) {
  if (tag == "I.1") {
    const int m = param(params, "m", 0), n = param(params, "n", 2), q = param(params, "q", 2);
    if (m < 0 || n < 2 || q < 2) throw Error("case I.1 requires m >= 0 and n, q >= 2");
    const auto [e, f] = alternating_pair(n);
    const auto [g, h] = alternating_pair(q);
    Vec beta = Vec::Zero(m + n + q);
    beta.segment(m, n) = alternating(n, e, f);
    beta.segment(m + n, q) = alternating(q, g, h);
    return {uniform(3), beta, 1, 1};
  }
  if (tag == "I.3") {
    const double g = (1 + std::sqrt(3.0)) / (2 * std::sqrt(6.0));
    const double h = (1 - std::sqrt(3.0)) / (2 * std::sqrt(6.0));
    return {uniform(3), alternating(6, g, h), 1, 1};
  }
  if (tag == "II") {
    const auto [g, h] = alternating_pair(2);
    return {uniform(4), alternating(4, g, h), 1, 1};
  }
  if (tag == "III") return {max_entangled(3), max_entangled(2), 3, 2};
  throw Error("unknown entangling-power case '" + tag + "'; known: I.1, I.3, II, III");
}

BipartiteOp fixture_operator(const std::string& tag, const nlohmann::json& params) {
  if (tag == "I.1") return fixtures::case_i(param(params, "m", 0), param(params, "n", 2), param(params, "q", 2), 0);
  if (tag == "I.3") return fixtures::case_i3();
  if (tag == "II") return fixtures::perm_u_4terms();
  if (tag == "III") return fixtures::uketbra11();
  throw Error("unknown entangling-power case '" + tag + "'; known: I.1, I.3, II, III");
}

double fixture_value(const std::string& tag) {
  if (tag == "I.1") return std::log2(9.0) - 16.0 / 9.0;
  if (tag == "I.3" || tag == "II" || tag == "III") return std::log2(3.0);
  throw Error("unknown entangling-power case '" + tag + "'; known: I.1, I.3, II, III");
}

}  // namespace bforge::entpower
