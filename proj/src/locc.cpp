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

#include "bforge/locc.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "bforge/parallel.hpp"

namespace bforge::locc {

namespace {

constexpr double kProbFloor = 1e-12;
constexpr double kHygieneTol = 1e-9;
constexpr Party Alice = Party::Alice;
constexpr Party Bob = Party::Bob;

cplx omega(int n, long e) {
  e = ((e % n) + n) % n;
  return std::polar(1.0, 2 * M_PI * static_cast<double>(e) / n);
}

Mat zpow(int n, long s) {
  Mat z = Mat::Zero(n, n);
  for (int k = 0; k < n; ++k) z(k, k) = omega(n, s * k);
  return z;
}

Mat proj(int n, const std::vector<int>& support) {
  Mat p = Mat::Zero(n, n);
  for (int i : support) p(i, i) = 1;
  return p;
}

Mat eye(int n) { return Mat::Identity(n, n); }

/** sum_k |k><k| (x) ops[k] */
Mat ctrl_sum(const std::vector<Mat>& ops) {
  const int n = static_cast<int>(ops.size());
  const int d = static_cast<int>(ops.front().rows());
  Mat m = Mat::Zero(n * d, n * d);
  for (int k = 0; k < n; ++k) m.block(k * d, k * d, d, d) = ops[k];
  return m;
}

/** Transposition |0> <-> |j> on C^n. */
Mat swap0(int n, int j) {
  std::vector<int> img(n);
  std::iota(img.begin(), img.end(), 0);
  std::swap(img[0], img[j]);
  Mat m = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) m(img[i], i) = 1;
  return m;
}

/** Completes a partial injective map on [0, n) to a permutation matrix. */
Mat complete_permutation(int n, const std::map<int, int>& partial) {
  std::vector<int> img(n, -1);
  std::vector<bool> used(n, false);
  for (auto [from, to] : partial) {
    if (used[to]) throw NumericError("partial map is not injective");
    img[from] = to;
    used[to] = true;
  }
  int next = 0;
  for (int i = 0; i < n; ++i) {
    if (img[i] >= 0) continue;
    while (used[next]) ++next;
    img[i] = next;
    used[next] = true;
  }
  Mat m = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) m(img[i], i) = 1;
  return m;
}

using Columns = std::vector<std::vector<std::pair<long, cplx>>>;

Columns sparse_columns(const Mat& g) {
  Columns cols(g.cols());
  for (long c = 0; c < g.cols(); ++c)
    for (long r = 0; r < g.rows(); ++r)
      if (std::abs(g(r, c)) > 1e-15) cols[c].emplace_back(r, g(r, c));
  return cols;
}

std::uint64_t splitmix(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double lg(double x) { return std::log2(x); }

bool near(const Mat& a, const Mat& b, double tol) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a - b).cwiseAbs().maxCoeff() <= tol;
}

void require_unitary(const BipartiteOp& u, double tol) {
  if (!is_unitary(u.m, std::max(tol, 1e-10))) throw Error("target operator is not unitary");
}

/** Image of each column of a permutation matrix. */
std::vector<int> column_images(const Mat& m) {
  std::vector<int> img(m.cols(), -1);
  for (long c = 0; c < m.cols(); ++c)
    for (long r = 0; r < m.rows(); ++r)
      if (std::abs(m(r, c)) > 0.5) img[c] = static_cast<int>(r);
  return img;
}

}  // namespace

// ---------------------------------------------------------------------------
// Machine

Machine::Machine(int dA, int dB, std::vector<int> prefix, bool sample, std::uint64_t seed,
                 bool record)
    : prefix_(std::move(prefix)),
      sample_(sample),
      rng_state_(seed ^ 0x5DEECE66DULL),
      record_(record) {
  regs_ = {{"A", Alice, dA, "data"}, {"B", Bob, dB, "data"}};
  live_ = {true, true};
  order_ = {0, 1};
  const int D = dA * dB;
  dims_ = {D, dA, dB};
  psi_ = Vec::Zero(static_cast<long>(D) * D);
  const double amp = 1 / std::sqrt(static_cast<double>(D));
  for (int i = 0; i < D; ++i) psi_(static_cast<long>(i) * D + i) = amp;
}

int Machine::position(int reg) const {
  if (reg < 0 || reg >= static_cast<int>(regs_.size()) || !live_[reg])
    throw Error("register " + std::to_string(reg) + " is not live");
  auto it = std::find(order_.begin(), order_.end(), reg);
  return 1 + static_cast<int>(it - order_.begin());
}

long Machine::stride(int pos) const {
  long s = 1;
  for (size_t p = pos + 1; p < dims_.size(); ++p) s *= dims_[p];
  return s;
}

void Machine::record(Event e) {
  if (record_) events_.push_back(std::move(e));
}

int Machine::alloc(const std::string& name, Party party, int dim, const std::string& role) {
  if (dim < 1) throw Error("register dimension must be positive");
  regs_.push_back({name, party, dim, role});
  live_.push_back(true);
  const int id = static_cast<int>(regs_.size()) - 1;
  order_.push_back(id);
  dims_.push_back(dim);
  Vec next = Vec::Zero(psi_.size() * dim);
  for (long i = 0; i < psi_.size(); ++i) next(i * dim) = psi_(i);
  psi_.swap(next);
  return id;
}

std::pair<int, int> Machine::share(const std::string& alice_name, const std::string& bob_name,
                                   int dim) {
  const int ra = alloc(alice_name, Alice, dim, "resource-half");
  const int rb = alloc(bob_name, Bob, dim, "resource-half");
  if (dim > 1) {
    const long blk = static_cast<long>(dim) * dim;
    const double amp = 1 / std::sqrt(static_cast<double>(dim));
    Vec next = Vec::Zero(psi_.size());
    for (long hi = 0; hi < psi_.size() / blk; ++hi) {
      const cplx v = psi_(hi * blk);
      if (v == cplx(0)) continue;
      for (int k = 0; k < dim; ++k) next(hi * blk + static_cast<long>(k) * dim + k) = v * amp;
    }
    psi_.swap(next);
  }
  ledger_.ebits += lg(dim);
  record({"resource", "maximally entangled pair", Alice, {alice_name, bob_name}, dim, -1});
  return {ra, rb};
}

void Machine::gate(const std::vector<int>& regs, const Mat& g, const std::string& label) {
  if (regs.empty()) throw Error("gate on no registers");
  const Party p = regs_.at(regs.front()).party;
  std::vector<std::string> names;
  for (int r : regs) {
    if (regs_.at(r).party != p)
      throw Error("nonlocal gate '" + label + "' spans both parties");
    names.push_back(regs_[r].name);
  }
  for (size_t i = 0; i < regs.size(); ++i)
    for (size_t j = i + 1; j < regs.size(); ++j)
      if (regs[i] == regs[j]) throw Error("gate '" + label + "' repeats a register");

  const int k = static_cast<int>(regs.size());
  std::vector<long> st(k);
  std::vector<int> dd(k);
  long gd = 1;
  for (int i = 0; i < k; ++i) {
    const int pos = position(regs[i]);
    st[i] = stride(pos);
    dd[i] = dims_[pos];
    gd *= dd[i];
  }
  if (g.rows() != gd || g.cols() != gd)
    throw Error("gate '" + label + "' has dimension " + std::to_string(g.rows()) + ", expected " +
                std::to_string(gd));
  std::vector<long> off(gd);
  for (long c = 0; c < gd; ++c) {
    long rem = c, o = 0;
    for (int i = k - 1; i >= 0; --i) {
      o += (rem % dd[i]) * st[i];
      rem /= dd[i];
    }
    off[c] = o;
  }
  const Columns cols = sparse_columns(g);
  Vec out = Vec::Zero(psi_.size());
  const long n = psi_.size();
  for (long idx = 0; idx < n; ++idx) {
    bool base = true;
    for (int i = 0; i < k && base; ++i) base = (idx / st[i]) % dd[i] == 0;
    if (!base) continue;
    for (long c = 0; c < gd; ++c) {
      const cplx v = psi_(idx + off[c]);
      if (v == cplx(0)) continue;
      for (const auto& [r, x] : cols[c]) out(idx + off[r]) += x * v;
    }
  }
  psi_.swap(out);
  record({"gate", label, p, names, 0, -1});
}

int Machine::measure(int reg, const std::string& label) {
  const int pos = position(reg);
  const long st = stride(pos);
  const int d = dims_[pos];
  const long n = psi_.size();
  std::vector<double> p(d, 0.0);
  for (long idx = 0; idx < n; ++idx) p[(idx / st) % d] += std::norm(psi_(idx));
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  const size_t depth = outcomes_.size();
  int o = -1;
  if (depth < prefix_.size()) {
    o = prefix_[depth];
  } else if (sample_) {
    const double u = static_cast<double>(splitmix(rng_state_) >> 11) * 0x1.0p-53 * total;
    double acc = 0;
    for (int j = 0; j < d; ++j) {
      if (p[j] / total <= kProbFloor) continue;
      o = j;
      acc += p[j];
      if (u < acc) break;
    }
  } else {
    for (int j = 0; j < d; ++j) {
      if (p[j] / total <= kProbFloor) continue;
      if (o < 0) {
        o = j;
      } else {
        auto pre = outcomes_;
        pre.push_back(j);
        pending_.push_back(std::move(pre));
      }
    }
  }
  if (o < 0 || o >= d || p[o] / total <= kProbFloor)
    throw NumericError("measurement branch has zero probability");
  Vec next = Vec::Zero(n);
  const double scale = 1 / std::sqrt(p[o]);
  for (long idx = 0; idx < n; ++idx)
    if ((idx / st) % d == o) next(idx - o * st) = psi_(idx) * scale;
  psi_.swap(next);
  probability_ *= p[o] / total;
  outcomes_.push_back(o);
  ledger_.cbits += lg(d);
  const Party owner = regs_[reg].party;
  record({"measure", label, owner, {regs_[reg].name}, d, o});
  record({"message", label, owner, {std::string(party_name(other(owner)))}, d, o});
  return o;
}

void Machine::free(int reg) {
  const int pos = position(reg);
  const long st = stride(pos);
  const int d = dims_[pos];
  const long n = psi_.size();
  double zero = 0;
  for (long idx = 0; idx < n; ++idx)
    if ((idx / st) % d == 0) zero += std::norm(psi_(idx));
  if (zero < 1 - kHygieneTol) hygiene_ = false;
  // Drop the digit; any residue outside |0> is discarded with it.
  Vec next(n / d);
  const long hi_stride = st * d;
  for (long hi = 0; hi < n / hi_stride; ++hi)
    for (long lo = 0; lo < st; ++lo) next(hi * st + lo) = psi_(hi * hi_stride + lo);
  if (zero > 0) next /= std::sqrt(zero);
  psi_.swap(next);
  order_.erase(order_.begin() + (pos - 1));
  dims_.erase(dims_.begin() + pos);
  live_[reg] = false;
  record({"free", regs_[reg].name, regs_[reg].party, {regs_[reg].name}, d, -1});
}

int Machine::teleport(int reg, const std::string& new_name) {
  const int d = dim(reg);
  const Party p = party(reg);
  const bool was_recording = record_;
  record_ = false;
  const int nr = alloc(new_name, other(p), d, regs_.at(reg).role);
  // Teleportation is a primitive: the resource and messages are charged, not simulated.
  regs_[nr].party = p;
  gate({reg, nr}, swap_gate(d, d), "teleport");
  regs_[nr].party = other(p);
  free(reg);
  record_ = was_recording;
  ledger_.ebits += lg(d);
  ledger_.cbits += 2 * lg(d);
  record({"teleport", regs_[reg].name + " -> " + new_name, p, {regs_[reg].name, new_name}, d, -1});
  return nr;
}

Vec Machine::finish(int out_a, int out_b) {
  const std::vector<int> live = order_;
  for (int r : live)
    if (r != out_a && r != out_b) free(r);
  if (order_.size() != 2) throw Error("protocol outputs are not distinct live registers");
  if (order_[0] == out_a) return psi_;
  const int da = dims_[2], db = dims_[1], D = dims_[0];
  Vec v(psi_.size());
  for (int i = 0; i < D; ++i)
    for (int a = 0; a < da; ++a)
      for (int b = 0; b < db; ++b)
        v((static_cast<long>(i) * da + a) * db + b) = psi_((static_cast<long>(i) * db + b) * da + a);
  return v;
}

// ---------------------------------------------------------------------------
// Executor

ProtocolTrace execute(const std::string& name, const BipartiteOp& target, const Program& program,
                      const Ledger& expected, const std::string& formula, const RunOptions& opts) {
  require_unitary(target, opts.tol);
  ProtocolTrace tr;
  tr.protocol = name;
  tr.mode = opts.sample ? "sample" : "enumerate";
  tr.expected = expected;
  tr.expected_formula = formula;
  const int dA = target.dA, dB = target.dB;
  const long D = static_cast<long>(dA) * dB;
  Vec w(D * D);
  for (long i = 0; i < D; ++i)
    for (long j = 0; j < D; ++j) w(i * D + j) = target.m(j, i);
  const double wn = w.squaredNorm();

  struct Run {
    BranchResult br;
    std::vector<std::vector<int>> pending;
    std::vector<Event> events;
    std::vector<Register> regs;
    Mat channel;
  };
  auto run_one = [&](const std::vector<int>& prefix, bool record) {
    Machine m(dA, dB, prefix, opts.sample, opts.seed, record);
    const auto [oa, ob] = program(m);
    if (m.dim(oa) != dA || m.dim(ob) != dB || m.party(oa) != Alice || m.party(ob) != Bob)
      throw Error("protocol outputs do not match the target systems");
    Run r;
    const Vec v = m.finish(oa, ob);
    // Choi distance || D v v^+ - w w^+ ||_F, computed without cancellation.
    const Vec a = std::sqrt(static_cast<double>(D)) * v;
    const double an = a.squaredNorm();
    const cplx ov = w.dot(a);
    const Vec rest = a - (ov / wn) * w;
    const double d2 = (an - wn) * (an - wn) + 2 * wn * rest.squaredNorm();
    r.br.outcomes = m.outcomes();
    r.br.probability = m.probability();
    r.br.distance = std::sqrt(std::max(0.0, d2));
    r.br.ancillas_restored = m.hygiene();
    r.br.ledger = m.ledger();
    r.pending = m.pending();
    if (record) {
      r.events = m.events();
      r.regs = m.registers();
      r.channel = a * a.adjoint();
    }
    return r;
  };

  std::vector<Run> done;
  if (opts.sample) {
    done.push_back(run_one({}, true));
  } else {
    std::vector<std::vector<int>> frontier{{}};
    bool first = true;
    while (!frontier.empty()) {
      std::vector<Run> level(frontier.size());
      parallel_for(static_cast<int>(frontier.size()),
                   [&](int i) { level[i] = run_one(frontier[i], first && i == 0); });
      if (first) {
        tr.events = std::move(level[0].events);
        tr.registers = std::move(level[0].regs);
        tr.channel = std::move(level[0].channel);
        tr.ledger = level[0].br.ledger;
      }
      first = false;
      frontier.clear();
      for (auto& r : level) {
        for (auto& p : r.pending) frontier.push_back(std::move(p));
        r.pending.clear();
        done.push_back(std::move(r));
      }
    }
  }
  if (opts.sample) {
    tr.events = std::move(done[0].events);
    tr.registers = std::move(done[0].regs);
    tr.channel = std::move(done[0].channel);
    tr.ledger = done[0].br.ledger;
  }
  std::sort(done.begin(), done.end(),
            [](const Run& a, const Run& b) { return a.br.outcomes < b.br.outcomes; });

  bool uniform_ledger = true;
  double psum = 0;
  for (auto& r : done) {
    if (std::abs(r.br.ledger.ebits - tr.ledger.ebits) > 1e-9 ||
        std::abs(r.br.ledger.cbits - tr.ledger.cbits) > 1e-9)
      uniform_ledger = false;
    psum += r.br.probability;
    tr.branches.push_back(std::move(r.br));
  }
  if (!uniform_ledger) tr.notes.push_back("ledger differs between branches");
  if (!opts.sample && std::abs(psum - 1) > 1e-9) {
    std::ostringstream os;
    os << "branch probabilities sum to " << psum;
    tr.notes.push_back(os.str());
  }
  tr.ledger_matches = uniform_ledger && std::abs(tr.ledger.ebits - expected.ebits) <= 1e-9 &&
                      std::abs(tr.ledger.cbits - expected.cbits) <= 1e-9;
  auto [maxd, ok] = verify_channel(tr, opts.tol);
  tr.max_distance = maxd;
  tr.ancillas_restored = std::all_of(tr.branches.begin(), tr.branches.end(),
                                     [](const BranchResult& b) { return b.ancillas_restored; });
  tr.pass = ok;
  return tr;
}

std::pair<double, bool> verify_channel(const ProtocolTrace& trace, double tol) {
  double maxd = 0;
  bool restored = true;
  for (const auto& b : trace.branches) {
    maxd = std::max(maxd, b.distance);
    restored = restored && b.ancillas_restored;
  }
  return {maxd, !trace.branches.empty() && maxd <= tol && restored};
}

// ---------------------------------------------------------------------------
// Basic controlled protocol

ControlledForm pad_terms(const ControlledForm& form, int n_terms) {
  if (n_terms < static_cast<int>(form.terms.size()))
    throw Error("cannot pad to fewer terms than the form has");
  ControlledForm f = form;
  while (static_cast<int>(f.terms.size()) < n_terms)
    f.terms.push_back({{}, eye(form.target_dim())});
  return f;
}

ProtocolTrace run_basic_controlled(const BipartiteOp& u, const ControlledForm& form,
                                   const RunOptions& opts) {
  if (form.dA != u.dA || form.dB != u.dB) throw Error("controlled form dimensions differ from target");
  if (form.terms.empty()) throw Error("controlled form has no terms");
  if (!near(form.reconstruct(), u.m, std::max(opts.tol, 1e-9)))
    throw Error("controlled form does not reconstruct the target");
  bool padded = false;
  for (const auto& t : form.terms) {
    if (!is_unitary(t.op, 1e-9)) throw Error("controlled term operator is not unitary");
    if (t.support.empty()) padded = true;
  }
  const int N = static_cast<int>(form.terms.size());
  const ControlledForm f = form;
  const bool skip = opts.skip_final_correction;
  Program prog = [f, N, skip](Machine& m) -> std::pair<int, int> {
    const bool sideA = f.side == Side::A;
    const int A = m.data_A(), B = m.data_B();
    const int ctl = sideA ? A : B, tgt = sideA ? B : A;
    const int dc = m.dim(ctl);
    if (f.pre_A.size()) m.gate({A}, f.pre_A, "pre A");
    if (f.pre_B.size()) m.gate({B}, f.pre_B, "pre B");
    const auto [ha, hb] = m.share(sideA ? "a" : "b", sideA ? "b" : "a", N);
    const int a = sideA ? ha : hb, b = sideA ? hb : ha;
    Mat cx = Mat::Zero(dc * N, dc * N);
    for (int j = 0; j < N; ++j) cx += tensor(proj(dc, f.terms[j].support), shift(N, -j));
    m.gate({ctl, a}, cx, "controlled shift");
    const int l = m.measure(a, "l");
    m.free(a);
    m.gate({b}, shift(N, -l), "shift correction");
    std::vector<Mat> vs;
    for (const auto& t : f.terms) vs.push_back(t.op);
    m.gate({b, tgt}, ctrl_sum(vs), "controlled V");
    m.gate({b}, fourier(N), "Fourier");
    const int mm = m.measure(b, "m");
    m.free(b);
    if (!skip) {
      Mat z = Mat::Zero(dc, dc);
      for (int j = 0; j < N; ++j) z += omega(N, -static_cast<long>(j) * mm) * proj(dc, f.terms[j].support);
      m.gate({ctl}, z, "phase correction");
    }
    if (f.post_A.size()) m.gate({A}, f.post_A, "post A");
    if (f.post_B.size()) m.gate({B}, f.post_B, "post B");
    return {A, B};
  };
  const double e = lg(N);
  return execute(padded ? "ct-ext" : "ct", u, prog, {e, 2 * e},
                 padded ? "log2 N' ebits, 2 log2 N' cbits" : "log2 N ebits, 2 log2 N cbits", opts);
}

// ---------------------------------------------------------------------------
// Two levels of control

int TwoLevelDecomposition::N() const {
  int n = 1;
  for (const auto& c : components) n = std::max(n, static_cast<int>(c.lower.terms.size()));
  return n;
}

Mat TwoLevelDecomposition::reconstruct(int dA, int dB) const {
  Mat m = Mat::Zero(dA * dB, dA * dB);
  for (const auto& c : components) {
    const Mat r = c.lower.reconstruct();
    const int s = static_cast<int>(c.support.size());
    for (int x1 = 0; x1 < s; ++x1)
      for (int x0 = 0; x0 < s; ++x0)
        m.block(c.support[x1] * dB, c.support[x0] * dB, dB, dB) = r.block(x1 * dB, x0 * dB, dB, dB);
  }
  return m;
}

namespace {

BipartiteOp restrict_to(const BipartiteOp& u, const std::vector<int>& support) {
  const int s = static_cast<int>(support.size()), dB = u.dB;
  Mat m(s * dB, s * dB);
  for (int x1 = 0; x1 < s; ++x1)
    for (int x0 = 0; x0 < s; ++x0)
      m.block(x1 * dB, x0 * dB, dB, dB) = u.m.block(support[x1] * dB, support[x0] * dB, dB, dB);
  return BipartiteOp(s, dB, m);
}

struct SideOptions {
  std::optional<ControlledForm> a, b;
  int n(Side s) const {
    const auto& f = s == Side::A ? a : b;
    return f ? static_cast<int>(f->terms.size()) : INT_MAX;
  }
  int best() const { return std::min(n(Side::A), n(Side::B)); }
};

SideOptions side_options(const BipartiteOp& op, double tol) {
  SideOptions o;
  if (is_unitary(op.m, tol)) {
    o.a = detect_controlled(op, Side::A, true, tol);
    o.b = detect_controlled(op, Side::B, true, tol);
  }
  return o;
}

}  // namespace

TwoLevelDecomposition two_level_decompose(const BipartiteOp& u, bool force_mixed, double tol) {
  require_unitary(u, tol);
  struct Piece {
    std::vector<int> support;
    SideOptions opt;
  };
  std::vector<Piece> pieces;
  for (const auto& c : direct_sum_decompose(u, Side::A, tol)) {
    std::vector<int> s = c.support;
    std::sort(s.begin(), s.end());
    pieces.push_back({s, side_options(restrict_to(u, s), tol)});
  }
  for (const auto& p : pieces)
    if (p.opt.best() == INT_MAX) throw Error("a direct-sum component is not controlled from either side");
  auto current_n = [&] {
    int n = 1;
    for (const auto& p : pieces) n = std::max(n, p.opt.best());
    return n;
  };
  // Greedy merging while the number of lower-level terms does not grow.
  for (bool merged = true; merged;) {
    merged = false;
    const int ncur = current_n();
    for (size_t i = 0; i < pieces.size() && !merged; ++i)
      for (size_t j = i + 1; j < pieces.size() && !merged; ++j) {
        std::vector<int> s = pieces[i].support;
        s.insert(s.end(), pieces[j].support.begin(), pieces[j].support.end());
        std::sort(s.begin(), s.end());
        SideOptions o = side_options(restrict_to(u, s), tol);
        if (o.best() <= ncur) {
          pieces[i] = {s, o};
          pieces.erase(pieces.begin() + j);
          merged = true;
        }
      }
  }
  std::sort(pieces.begin(), pieces.end(),
            [](const Piece& a, const Piece& b) { return a.support.front() < b.support.front(); });

  int n_mixed = 1, n_a = 1, n_b = 1;
  for (const auto& p : pieces) {
    n_mixed = std::max(n_mixed, p.opt.best());
    n_a = std::max(n_a, p.opt.n(Side::A));
    n_b = std::max(n_b, p.opt.n(Side::B));
  }
  TwoLevelDecomposition dec;
  std::optional<Side> common;
  if (n_b == n_mixed) common = Side::B;
  else if (n_a == n_mixed) common = Side::A;
  dec.mixed_sides = force_mixed || !common;
  for (const auto& p : pieces) {
    Side s;
    if (common) s = *common;
    else s = p.opt.n(Side::B) <= p.opt.n(Side::A) ? Side::B : Side::A;
    dec.components.push_back({p.support, s == Side::A ? *p.opt.a : *p.opt.b});
  }
  return dec;
}

ProtocolTrace run_two_level(const BipartiteOp& u, const TwoLevelDecomposition& dec,
                            const RunOptions& opts) {
  const int dA = u.dA, dB = u.dB;
  if (dec.components.empty()) throw Error("empty two-level decomposition");
  if (!near(dec.reconstruct(dA, dB), u.m, std::max(opts.tol, 1e-9)))
    throw Error("two-level decomposition does not reconstruct the target");
  const int M = dec.M(), N = dec.N();
  std::vector<bool> sa(M);
  bool any_a = false, any_b = false;
  std::vector<int> covered(dA, 0);
  for (int k = 0; k < M; ++k) {
    const auto& c = dec.components[k];
    sa[k] = c.lower.side == Side::A;
    (sa[k] ? any_a : any_b) = true;
    if (c.lower.dA != static_cast<int>(c.support.size()) || c.lower.dB != dB)
      throw Error("component form dimensions do not match its support");
    for (const auto& t : c.lower.terms)
      if (!is_unitary(t.op, 1e-9)) throw Error("controlled term operator is not unitary");
    for (int x : c.support) covered[x]++;
  }
  for (int x = 0; x < dA; ++x)
    if (covered[x] != 1) throw Error("component supports do not partition A");
  if (!dec.mixed_sides && any_a && any_b)
    throw Error("components use different control sides; mixed_sides is required");

  // Embedding of a component-local A operator into C^dA.
  auto embedA = [&](int k, const Mat& o) {
    const auto& s = dec.components[k].support;
    Mat e = Mat::Zero(dA, dA);
    for (size_t i = 0; i < s.size(); ++i)
      for (size_t j = 0; j < s.size(); ++j) e(s[i], s[j]) = o(i, j);
    return e;
  };
  std::vector<Mat> P(M);
  for (int k = 0; k < M; ++k) P[k] = proj(dA, dec.components[k].support);
  auto lower_term = [&](int k, int j) -> const ControlTerm* {
    const auto& t = dec.components[k].lower.terms;
    return j < static_cast<int>(t.size()) ? &t[j] : nullptr;
  };
  auto csize = [&](int k) { return static_cast<int>(dec.components[k].support.size()); };

  // Local gates, built once.
  Mat g_step1 = Mat::Zero(dA * M, dA * M);
  for (int k = 0; k < M; ++k) g_step1 += tensor(P[k], shift(M, -k));
  Mat g_preA = Mat::Zero(dA, dA), g_postA = Mat::Zero(dA, dA);
  std::vector<Mat> preB, postB;
  for (int k = 0; k < M; ++k) {
    g_preA += embedA(k, dec.components[k].lower.pre_A);
    g_postA += embedA(k, dec.components[k].lower.post_A);
    preB.push_back(dec.components[k].lower.pre_B);
    postB.push_back(dec.components[k].lower.post_B);
  }
  const Mat g_preB = ctrl_sum(preB), g_postB = ctrl_sum(postB);

  // Stage 1 controllers.
  Mat g_ctlA = Mat::Zero(dA * N, dA * N);
  std::vector<Mat> ctlB;
  for (int k = 0; k < M; ++k) {
    if (sa[k]) {
      for (int j = 0; j < N; ++j)
        if (auto t = lower_term(k, j)) g_ctlA += tensor(embedA(k, proj(csize(k), t->support)), shift(N, -j));
    } else {
      g_ctlA += tensor(P[k], eye(N));
    }
    Mat b = Mat::Zero(dB * N, dB * N);
    if (!sa[k]) {
      for (int j = 0; j < N; ++j)
        if (auto t = lower_term(k, j)) b += tensor(proj(dB, t->support), shift(N, -j));
    } else {
      b = eye(dB * N);
    }
    ctlB.push_back(b);
  }
  const Mat g_ctlB = ctrl_sum(ctlB);
  // Receivers' shift corrections, per message value.
  auto recvB = [&](int l) {  // on (b, r), for SA components
    std::vector<Mat> ops;
    for (int k = 0; k < M; ++k) ops.push_back(sa[k] ? shift(N, -l) : eye(N));
    return ctrl_sum(ops);
  };
  auto recvA = [&](int l) {  // on (A, q), for SB components
    Mat g = Mat::Zero(dA * N, dA * N);
    for (int k = 0; k < M; ++k) g += tensor(P[k], sa[k] ? eye(N) : shift(N, -l));
    return g;
  };
  // Stage 2 controlled-V.
  std::vector<Mat> vB, fB;
  Mat g_vA = Mat::Zero(dA * N, dA * N), g_fA = Mat::Zero(dA * N, dA * N);
  for (int k = 0; k < M; ++k) {
    if (sa[k]) {
      std::vector<Mat> ops;
      for (int j = 0; j < N; ++j) {
        auto t = lower_term(k, j);
        ops.push_back(t ? t->op : eye(dB));
      }
      vB.push_back(ctrl_sum(ops));
      fB.push_back(fourier(N));
      g_vA += tensor(P[k], eye(N));
      g_fA += tensor(P[k], eye(N));
    } else {
      vB.push_back(eye(N * dB));
      fB.push_back(eye(N));
      for (int j = 0; j < N; ++j) {
        auto t = lower_term(k, j);
        const Mat op = t ? embedA(k, t->op) : P[k];
        g_vA += tensor(op, ketbra(N, j, j));
      }
      g_fA += tensor(P[k], fourier(N));
    }
  }
  const Mat g_vB = ctrl_sum(vB), g_fB = ctrl_sum(fB);
  auto corrA = [&](int mb) {  // SA components, on A
    Mat g = Mat::Zero(dA, dA);
    for (int k = 0; k < M; ++k) {
      if (!sa[k]) {
        g += P[k];
        continue;
      }
      for (int j = 0; j < N; ++j)
        if (auto t = lower_term(k, j))
          g += omega(N, -static_cast<long>(j) * mb) * embedA(k, proj(csize(k), t->support));
    }
    return g;
  };
  auto corrB = [&](int ma) {  // SB components, on (b, B)
    std::vector<Mat> ops;
    for (int k = 0; k < M; ++k) {
      if (sa[k]) {
        ops.push_back(eye(dB));
        continue;
      }
      Mat g = Mat::Zero(dB, dB);
      for (int j = 0; j < N; ++j)
        if (auto t = lower_term(k, j)) g += omega(N, -static_cast<long>(j) * ma) * proj(dB, t->support);
      ops.push_back(g);
    }
    return ctrl_sum(ops);
  };

  const bool mixed = dec.mixed_sides;
  const bool skip = opts.skip_final_correction;
  std::vector<bool> sb(M);
  for (int k = 0; k < M; ++k) sb[k] = !sa[k];
  Program prog = [&](Machine& m) -> std::pair<int, int> {
    const int A = m.data_A(), B = m.data_B();
    const auto [a, b] = m.share("a", "b", M);
    const auto [q, r] = m.share("q", "r", N);

    // Dummy-masked measurement: the real register is measured only for components in K.
    auto masked = [&](Party p, int reg, const std::vector<bool>& in_k, const std::string& label) {
      const int d = m.alloc(p == Alice ? "dummy_a" : "dummy_b", p, N);
      m.gate({d}, fourier(N), "prepare dummy");
      const int ctl = p == Alice ? A : b;
      Mat cs, cf;
      if (p == Alice) {
        cs = Mat::Zero(dA * N * N, dA * N * N);
        cf = Mat::Zero(dA * N, dA * N);
        for (int k = 0; k < M; ++k) {
          cs += tensor(P[k], in_k[k] ? swap_gate(N, N) : eye(N * N));
          cf += tensor(P[k], in_k[k] ? Mat(fourier(N).adjoint()) : eye(N));
        }
      } else {
        std::vector<Mat> vs, vf;
        for (int k = 0; k < M; ++k) {
          vs.push_back(in_k[k] ? swap_gate(N, N) : eye(N * N));
          vf.push_back(in_k[k] ? Mat(fourier(N).adjoint()) : eye(N));
        }
        cs = ctrl_sum(vs);
        cf = ctrl_sum(vf);
      }
      m.gate({ctl, reg, d}, cs, "controlled swap");
      const int o = m.measure(d, label);
      m.gate({ctl, reg, d}, cs, "controlled swap");
      m.gate({ctl, d}, cf, "restore dummy");
      m.free(d);
      return o;
    };

    // Upper level: share the component index.
    m.gate({A, a}, g_step1, "controlled shift");
    const int l = m.measure(a, "l");
    m.free(a);
    m.gate({b}, shift(M, -l), "shift correction");
    m.gate({A}, g_preA, "pre A");
    m.gate({b, B}, g_preB, "pre B");

    // Lower level, stage 1.
    if (any_a) m.gate({A, q}, g_ctlA, "controlled shift");
    if (any_b) m.gate({b, B, r}, g_ctlB, "controlled shift");
    int la = 0, lb = 0;
    if (mixed) {
      la = masked(Alice, q, sa, "lower l (A)");
      lb = masked(Bob, r, sb, "lower l (B)");
    } else if (any_a) {
      la = m.measure(q, "lower l");
    } else {
      lb = m.measure(r, "lower l");
    }
    if (any_a) m.gate({b, r}, recvB(la), "shift correction");
    if (any_b) m.gate({A, q}, recvA(lb), "shift correction");

    // Stage 2.
    if (any_a) {
      m.gate({b, r, B}, g_vB, "controlled V");
      m.gate({b, r}, g_fB, "Fourier");
    }
    if (any_b) {
      m.gate({A, q}, g_vA, "controlled V");
      m.gate({A, q}, g_fA, "Fourier");
    }
    int mb = 0, ma = 0;
    if (mixed) {
      mb = masked(Bob, r, sa, "lower m (B)");
      ma = masked(Alice, q, sb, "lower m (A)");
    } else if (any_a) {
      mb = m.measure(r, "lower m");
    } else {
      ma = m.measure(q, "lower m");
    }
    if (any_a) m.gate({A}, corrA(mb), "phase correction");
    if (any_b) m.gate({b, B}, corrB(ma), "phase correction");
    m.free(q);
    m.free(r);
    m.gate({A}, g_postA, "post A");
    m.gate({b, B}, g_postB, "post B");

    // Upper level phase.
    m.gate({b}, fourier(M), "Fourier");
    const int mm = m.measure(b, "m");
    m.free(b);
    if (!skip) {
      Mat z = Mat::Zero(dA, dA);
      for (int k = 0; k < M; ++k) z += omega(M, -static_cast<long>(k) * mm) * P[k];
      m.gate({A}, z, "phase correction");
    }
    return {A, B};
  };
  const double e = lg(M) + lg(N);
  const double c = mixed ? 2 * (lg(M) + 2 * lg(N)) : 2 * e;
  return execute(mixed ? "ptl1b" : "ptl1", u, prog, {e, c},
                 mixed ? "log2(MN) ebits, 2 log2(M N^2) cbits" : "log2(MN) ebits, 2 log2(MN) cbits",
                 opts);
}

// ---------------------------------------------------------------------------
// Group-type expansion

int GroupSpec::identity() const {
  for (int e = 0; e < order; ++e) {
    bool ok = true;
    for (int g = 0; g < order && ok; ++g) ok = table[e][g] == g && table[g][e] == g;
    if (ok) return e;
  }
  throw Error("group table has no identity");
}

int GroupSpec::inverse(int g) const {
  const int e = identity();
  for (int h = 0; h < order; ++h)
    if (table[g][h] == e) return h;
  throw Error("group element has no inverse");
}

namespace {

void fill_cocycle(GroupSpec& g) {
  const int d = g.rep_dim();
  g.cocycle.assign(g.order, std::vector<cplx>(g.order));
  for (int h = 0; h < g.order; ++h)
    for (int f = 0; f < g.order; ++f)
      g.cocycle[h][f] = (g.rep[g.table[h][f]].adjoint() * g.rep[h] * g.rep[f]).trace() / cplx(d);
}

}  // namespace

GroupSpec pauli_group(int d, Side side) {
  if (d < 1) throw Error("pauli group dimension must be positive");
  GroupSpec g;
  g.name = "pauli(" + std::to_string(d) + ")";
  g.side = side;
  g.order = d * d;
  g.table.assign(g.order, std::vector<int>(g.order));
  for (int a = 0; a < g.order; ++a)
    for (int b = 0; b < g.order; ++b)
      g.table[a][b] = ((a / d + b / d) % d) * d + (a % d + b % d) % d;
  Mat z = clock(d);
  for (int j = 0; j < d; ++j) {
    Mat zk = eye(d);
    for (int k = 0; k < d; ++k) {
      g.rep.push_back(shift(d, j) * zk);
      zk = zk * z;
    }
  }
  g.embed = eye(d);
  fill_cocycle(g);
  return g;
}

GroupSpec klein_group(const std::vector<double>& t, Side side) {
  if (t.empty()) throw Error("klein group needs at least one block");
  GroupSpec g = pauli_group(2, side);
  g.name = "klein";
  const int nb = static_cast<int>(t.size());
  for (auto& r : g.rep) r = tensor(eye(nb), Mat(r));
  std::vector<Mat> frames;
  for (double tj : t) {
    Mat f = Mat::Zero(2, 2);
    f(0, 0) = 1;
    f(1, 1) = std::polar(1.0, tj);
    frames.push_back(f);
  }
  g.embed = direct_sum(frames).adjoint();
  fill_cocycle(g);
  return g;
}

GroupSpec dihedral_group(int d, Side side) {
  if (d < 2) throw Error("dihedral group needs d >= 2");
  const int n = 2 * (d / 2) + 1, m = (n - 1) / 2;
  GroupSpec g;
  g.name = "dihedral(" + std::to_string(2 * n) + ")";
  g.side = side;
  g.order = 2 * n;
  g.table.assign(g.order, std::vector<int>(g.order));
  for (int a = 0; a < g.order; ++a)
    for (int b = 0; b < g.order; ++b) {
      const int k1 = a % n, e1 = a / n, k2 = b % n, e2 = b / n;
      const int k = (((k1 + (e1 ? -k2 : k2)) % n) + n) % n;
      g.table[a][b] = k + n * ((e1 + e2) % 2);
    }
  for (int a = 0; a < g.order; ++a) {
    const int k = a % n, e = a / n;
    std::vector<Mat> parts;
    for (int h = 1; h <= m; ++h) {
      Mat r = Mat::Zero(2, 2);
      r(0, 0) = omega(n, static_cast<long>(h) * k);
      r(1, 1) = omega(n, -static_cast<long>(h) * k);
      parts.push_back(e ? Mat(r * pauli_x()) : r);
    }
    parts.push_back(eye(1));
    parts.push_back(Mat::Constant(1, 1, e ? -1.0 : 1.0));
    g.rep.push_back(direct_sum(parts));
  }
  g.embed = Mat::Identity(g.rep_dim(), d);
  fill_cocycle(g);
  return g;
}

void validate_group(const GroupSpec& g, double tol) {
  if (g.order < 1 || static_cast<int>(g.table.size()) != g.order ||
      static_cast<int>(g.rep.size()) != g.order)
    throw Error("group table or representation has the wrong size");
  for (const auto& row : g.table) {
    if (static_cast<int>(row.size()) != g.order) throw Error("group table is not square");
    for (int v : row)
      if (v < 0 || v >= g.order) throw Error("group table is not closed");
  }
  for (int a = 0; a < g.order; ++a)
    for (int b = 0; b < g.order; ++b)
      for (int c = 0; c < g.order; ++c)
        if (g.table[g.table[a][b]][c] != g.table[a][g.table[b][c]])
          throw Error("group table is not associative");
  for (int a = 0; a < g.order; ++a) g.inverse(a);
  const int d = g.rep_dim();
  for (int a = 0; a < g.order; ++a) {
    if (g.rep[a].rows() != d || !is_unitary(g.rep[a], tol))
      throw Error("representation matrix is not unitary");
    for (int b = 0; b < g.order; ++b) {
      const Mat lhs = g.rep[a] * g.rep[b];
      const Mat& rhs = g.rep[g.table[a][b]];
      const cplx c = (rhs.adjoint() * lhs).trace() / cplx(d);
      if (std::abs(std::abs(c) - 1) > tol || fro(lhs - c * rhs) > tol * d)
        throw Error("representation is not projective for the table");
    }
  }
}

GroupSpec solve_group_expansion(const BipartiteOp& u, GroupSpec spec, double tol) {
  require_unitary(u, tol);
  validate_group(spec, tol);
  if (spec.cocycle.empty()) fill_cocycle(spec);
  const BipartiteOp w = spec.side == Side::A ? u : u.swapped();
  const int ds = w.dA, dother = w.dB, dr = spec.rep_dim(), n = spec.order;
  const Mat& J = spec.embed;
  if (J.rows() != dr || J.cols() != ds) throw Error("embedding has the wrong shape for the rep side");
  if (!near(J.adjoint() * J, eye(ds), 1e-10)) throw Error("embedding is not an isometry");
  const Mat Jf = tensor(J, eye(dother));
  const Mat ut = Jf * w.m * Jf.adjoint() + tensor(Mat(eye(dr) - J * J.adjoint()), eye(dother));
  Mat vm(static_cast<long>(dr) * dr, n), rm(static_cast<long>(dr) * dr, static_cast<long>(dother) * dother);
  for (int f = 0; f < n; ++f)
    for (int x1 = 0; x1 < dr; ++x1)
      for (int x0 = 0; x0 < dr; ++x0) vm(x1 * dr + x0, f) = spec.rep[f](x1, x0);
  for (int x1 = 0; x1 < dr; ++x1)
    for (int x0 = 0; x0 < dr; ++x0)
      for (int y1 = 0; y1 < dother; ++y1)
        for (int y0 = 0; y0 < dother; ++y0)
          rm(x1 * dr + x0, y1 * dother + y0) = ut(x1 * dother + y1, x0 * dother + y0);
  const Mat wt = vm.completeOrthogonalDecomposition().solve(rm);
  spec.W.assign(n, Mat::Zero(dother, dother));
  Mat rec = Mat::Zero(ut.rows(), ut.cols());
  for (int f = 0; f < n; ++f) {
    for (int y1 = 0; y1 < dother; ++y1)
      for (int y0 = 0; y0 < dother; ++y0) spec.W[f](y1, y0) = wt(f, y1 * dother + y0);
    rec += tensor(spec.rep[f], spec.W[f]);
  }
  spec.residual = fro(rec - ut);
  if (spec.residual > tol * std::max(1.0, fro(ut))) {
    std::ostringstream os;
    os << "operator is not in the span of the group representation (residual " << spec.residual << ")";
    throw NumericError(os.str());
  }
  return spec;
}

ProtocolTrace run_group_type(const BipartiteOp& u, const GroupSpec& given, const RunOptions& opts) {
  const GroupSpec spec = given.W.empty() ? solve_group_expansion(u, given, opts.tol) : given;
  const int n = spec.order, dr = spec.rep_dim();
  const bool repA = spec.side == Side::A;
  const int ds = repA ? u.dA : u.dB, dother = repA ? u.dB : u.dA;
  const Mat& J = spec.embed;
  Mat q = Mat::Zero(static_cast<long>(n) * dother, static_cast<long>(n) * dother);
  for (int h = 0; h < n; ++h)
    for (int g = 0; g < n; ++g) {
      const int f = spec.table[spec.inverse(h)][g];
      q.block(h * dother, g * dother, dother, dother) = spec.cocycle[h][f] * spec.W[f];
    }
  if (!is_unitary(q, 1e-8)) throw NumericError("group correction operator is not unitary");
  const bool square = dr == ds;
  Mat transfer;
  if (!square) {
    // |x>|0> -> |0>|Jx>
    Mat cols = Mat::Zero(static_cast<long>(ds) * dr, ds);
    for (int x = 0; x < ds; ++x)
      for (int r = 0; r < dr; ++r) cols(r, x) = J(r, x);
    const Mat full = complete_unitary(cols);
    transfer = Mat::Zero(full.rows(), full.cols());
    std::vector<bool> used(full.cols(), false);
    for (int x = 0; x < ds; ++x) {
      transfer.col(static_cast<long>(x) * dr) = full.col(x);
      used[static_cast<long>(x) * dr] = true;
    }
    long next = ds;
    for (long c = 0; c < transfer.cols(); ++c)
      if (!used[c]) transfer.col(c) = full.col(next++);
  }
  const bool skip = opts.skip_final_correction;
  Program prog = [&](Machine& m) -> std::pair<int, int> {
    const int A = m.data_A(), B = m.data_B();
    const int sys = repA ? A : B, oth = repA ? B : A;
    const Party p = repA ? Alice : Bob;
    int R = sys;
    if (square) {
      m.gate({sys}, J, "embed");
    } else {
      R = m.alloc("rep", p, dr);
      m.gate({sys, R}, transfer, "embed");
    }
    const auto [ha, hb] = m.share("g_a", "g_b", n);
    const int a = repA ? ha : hb, b = repA ? hb : ha;
    m.gate({a, R}, ctrl_sum(spec.rep), "controlled representation");
    m.gate({a}, fourier(n), "Fourier");
    const int x = m.measure(a, "x");
    m.free(a);
    m.gate({b}, zpow(n, -x), "phase correction");
    m.gate({b, oth}, q, "group correction");
    const int h = m.measure(b, "h");
    m.free(b);
    if (!skip) m.gate({R}, spec.rep[h].adjoint(), "representation correction");
    if (square) {
      m.gate({sys}, J.adjoint(), "unembed");
    } else {
      m.gate({sys, R}, transfer.adjoint(), "unembed");
      m.free(R);
    }
    return {A, B};
  };
  const double e = lg(n);
  ProtocolTrace tr = execute("gp", u, prog, {e, 2 * e}, "log2|G| ebits, 2 log2|G| cbits", opts);
  tr.notes.push_back("group " + spec.name + " on side " + side_name(spec.side));
  return tr;
}

Mat complete_unitary(const Mat& cols) {
  const long n = cols.rows(), k = cols.cols();
  if (k > n) throw Error("too many columns to complete");
  Mat u(n, n);
  long filled = 0;
  auto push = [&](Vec v) {
    for (long j = 0; j < filled; ++j) v -= u.col(j).dot(v) * u.col(j);
    for (long j = 0; j < filled; ++j) v -= u.col(j).dot(v) * u.col(j);
    const double nv = v.norm();
    if (nv < 1e-8) return false;
    u.col(filled++) = v / nv;
    return true;
  };
  for (long j = 0; j < k; ++j) {
    if (std::abs(cols.col(j).norm() - 1) > 1e-8 || !push(cols.col(j)))
      throw Error("columns are not orthonormal");
    if ((u.col(filled - 1) - cols.col(j)).norm() > 1e-8) throw Error("columns are not orthonormal");
  }
  for (long e = 0; e < n && filled < n; ++e) push(Vec::Unit(n, e));
  return u;
}

// ---------------------------------------------------------------------------
// Permutation protocols

namespace {

struct PermutationTable {
  int dA = 0, dB = 0;
  std::vector<int> img;  // column (x dB + y) -> row

  int outA(int x, int y) const { return img[x * dB + y] / dB; }
  int outB(int x, int y) const { return img[x * dB + y] % dB; }
};

PermutationTable permutation_table(const BipartiteOp& u) {
  if (!is_permutation_matrix(u.m)) throw Error("operator is not a permutation matrix");
  return {u.dA, u.dB, column_images(u.m)};
}

}  // namespace

ProtocolTrace run_permutation_ptl2(const BipartiteOp& u, const RunOptions& opts) {
  const PermutationTable pt = permutation_table(u);
  const int dA = u.dA, dB = u.dB;
  const PermutationTypes types = permutation_type_partitions(u, opts.tol);
  const int d = types.input_A.size();
  const std::vector<int> t_of = types.input_A.labels(dA);
  const int dH = types.output_B.size();
  const std::vector<int> tau = types.output_B.labels(dB);

  // Canonical block list of each type, read off its first member.
  std::vector<std::vector<Mat>> L(d);
  for (int t = 0; t < d; ++t) {
    const int x0 = types.input_A.classes[t].front();
    for (int j = 0; j < dA; ++j) {
      const Mat blk = u.block(j, x0);
      if (blk.cwiseAbs().maxCoeff() > 0.5) L[t].push_back(blk);
    }
  }
  int dF = 1;
  for (const auto& l : L) dF = std::max(dF, static_cast<int>(l.size()));
  auto beta_of = [&](int x, int j) {
    const Mat blk = u.block(j, x);
    const auto& l = L[t_of[x]];
    for (size_t b = 0; b < l.size(); ++b)
      if (near(l[b], blk, 1e-9)) return static_cast<int>(b);
    throw NumericError("block is missing from its type's block list");
  };

  // W_t on (f, B): |0, y> -> |beta, M_beta y>.
  std::vector<Mat> Wt;
  for (int t = 0; t < d; ++t) {
    const int x0 = types.input_A.classes[t].front();
    std::map<int, int> part;
    for (int y = 0; y < dB; ++y) {
      const int b = beta_of(x0, pt.outA(x0, y));
      part[y] = b * dB + pt.outB(x0, y);
    }
    Wt.push_back(complete_permutation(dF * dB, part));
  }
  // Pi_{t, beta} on A: x -> j with U_{jx} = L_t[beta].
  std::vector<Mat> Vops;
  for (int t = 0; t < d; ++t)
    for (int b = 0; b < dF; ++b) {
      std::map<int, int> part;
      if (b < static_cast<int>(L[t].size()))
        for (int x : types.input_A.classes[t])
          for (int j = 0; j < dA; ++j)
            if (near(u.block(j, x), L[t][b], 1e-9)) part[x] = j;
      Vops.push_back(complete_permutation(dA, part));
    }
  // (j, tau(y')) determines (t, beta).
  std::map<std::pair<int, int>, std::pair<int, int>> back;
  for (int x = 0; x < dA; ++x)
    for (int y = 0; y < dB; ++y) {
      const int j = pt.outA(x, y);
      const std::pair<int, int> key{j, tau[pt.outB(x, y)]};
      const std::pair<int, int> val{t_of[x], beta_of(x, j)};
      auto [it, fresh] = back.emplace(key, val);
      if (!fresh && it->second != val)
        throw NumericError("output and output type do not determine the input type");
    }
  std::vector<Mat> Tops;  // on (a, f'), indexed by j * dH + h
  for (int j = 0; j < dA; ++j)
    for (int h = 0; h < dH; ++h) {
      auto it = back.find({j, h});
      const int idx = it == back.end() ? 0 : it->second.first * dF + it->second.second;
      Tops.push_back(swap0(d * dF, idx));
    }

  Mat g_type = Mat::Zero(dA * d, dA * d);
  for (int x = 0; x < dA; ++x) g_type += tensor(ketbra(dA, x, x), shift(d, t_of[x]));
  std::vector<Mat> minus_t;
  for (int t = 0; t < d; ++t) minus_t.push_back(shift(d, -t));
  Mat g_tau = Mat::Zero(dB * dH, dB * dH);
  Mat zt = Mat::Zero(dB, dB);
  for (int y = 0; y < dB; ++y) g_tau += tensor(ketbra(dB, y, y), shift(dH, -tau[y]));
  const bool skip = opts.skip_final_correction;

  Program prog = [&](Machine& m) -> std::pair<int, int> {
    const int A = m.data_A(), B = m.data_B();
    const int a = m.alloc("a", Alice, d);
    m.gate({A, a}, g_type, "compute type");
    const auto [e, e2] = m.share("e", "e'", d);
    m.gate({a, e}, ctrl_sum(minus_t), "controlled shift");
    const int o = m.measure(e, "o");
    m.free(e);
    m.gate({e2}, shift(d, -o), "shift correction");
    const int f = m.alloc("f", Bob, dF);
    std::vector<Mat> wt = Wt;
    m.gate({e2, f, B}, ctrl_sum(wt), "type-controlled W");
    m.gate({e2}, fourier(d), "Fourier");
    const int mm = m.measure(e2, "m");
    m.free(e2);
    m.gate({a}, zpow(d, -mm), "phase correction");
    const int f2 = m.teleport(f, "f'");
    m.gate({a, f2, A}, ctrl_sum(Vops), "controlled V");
    const auto [g2, g] = m.share("g'", "g", dH);
    m.gate({B, g}, g_tau, "controlled shift");
    const int o2 = m.measure(g, "o2");
    m.free(g);
    m.gate({g2}, shift(dH, -o2), "shift correction");
    m.gate({A, g2, a, f2}, ctrl_sum(Tops), "uncompute type");
    m.gate({g2}, fourier(dH), "Fourier");
    const int nn = m.measure(g2, "n");
    m.free(g2);
    if (!skip) {
      Mat z = Mat::Zero(dB, dB);
      for (int y = 0; y < dB; ++y) z(y, y) = omega(dH, -static_cast<long>(nn) * tau[y]);
      m.gate({B}, z, "phase correction");
    }
    m.free(a);
    m.free(f2);
    return {A, B};
  };
  (void)zt;
  const double eb = lg(d) + lg(dF) + lg(dH);
  ProtocolTrace tr = execute("ptl2", u, prog, {eb, 2 * eb},
                             "log2 d_types + log2 d_rel + log2 d_out ebits, twice that in cbits", opts);
  std::ostringstream os;
  os << "types " << d << ", relative outputs " << dF << ", output types " << dH;
  tr.notes.push_back(os.str());
  return tr;
}

ProtocolTrace run_permutation_ptl3(const BipartiteOp& u, const RunOptions& opts) {
  const PermutationTable pt = permutation_table(u);
  const int dA = u.dA, dB = u.dB;
  const BipartiteOp ud(dA, dB, u.m.adjoint());
  const PermutationTable pti = permutation_table(ud);
  const TypePartition la = loose_type_partition(u, Side::A, opts.tol);
  const TypePartition lb = loose_type_partition(u, Side::B, opts.tol);
  const TypePartition la2 = loose_type_partition(ud, Side::A, opts.tol);
  const TypePartition lb2 = loose_type_partition(ud, Side::B, opts.tol);
  const int da = la.size(), db = lb.size(), da2 = la2.size(), db2 = lb2.size();
  const auto ta = la.labels(dA), sb = lb.labels(dB), ta2 = la2.labels(dA), sb2 = lb2.labels(dB);

  // out_A(x, s), out_B(y, t) for u; in_A(j, s'), in_B(y', t') for u^dagger.
  auto tabulate = [](const PermutationTable& p, const std::vector<int>& tA, const std::vector<int>& sB,
                     int nt, int ns) {
    std::vector<std::vector<int>> fa(p.dA, std::vector<int>(ns, -1)), fb(p.dB, std::vector<int>(nt, -1));
    for (int x = 0; x < p.dA; ++x)
      for (int y = 0; y < p.dB; ++y) {
        int& ja = fa[x][sB[y]];
        if (ja >= 0 && ja != p.outA(x, y)) throw NumericError("loose type does not determine the A output");
        ja = p.outA(x, y);
        int& jb = fb[y][tA[x]];
        if (jb >= 0 && jb != p.outB(x, y)) throw NumericError("loose type does not determine the B output");
        jb = p.outB(x, y);
      }
    return std::make_pair(fa, fb);
  };
  const auto [outA, outB] = tabulate(pt, ta, sb, da, db);
  const auto [inA, inB] = tabulate(pti, ta2, sb2, da2, db2);

  auto type_shift = [](int n, const std::vector<int>& lab, int sign) {
    const int dl = static_cast<int>(lab.size());
    Mat g = Mat::Zero(dl * n, dl * n);
    for (int x = 0; x < dl; ++x) g += tensor(ketbra(dl, x, x), shift(n, sign * lab[x]));
    return g;
  };
  // sum |x><x| (x) |s><s| (x) swap0(table[x][s]) on (sys, type, out)
  auto write = [](int dsys, int ntype, int dout, const std::vector<std::vector<int>>& table) {
    std::vector<Mat> ops;
    for (int x = 0; x < dsys; ++x)
      for (int s = 0; s < ntype; ++s) ops.push_back(swap0(dout, table[x][s] < 0 ? 0 : table[x][s]));
    return ctrl_sum(ops);
  };
  const Mat wA = write(dA, db, dA, outA), wB = write(dB, da, dB, outB);
  const Mat eA = write(dA, db2, dA, inA), eB = write(dB, da2, dB, inB);

  Program prog = [&](Machine& m) -> std::pair<int, int> {
    const int A = m.data_A(), B = m.data_B();
    // Loose types of u, exchanged.
    int a = m.alloc("a", Alice, da);
    m.gate({A, a}, type_shift(da, ta, 1), "compute loose type");
    int b = m.alloc("b", Bob, db);
    m.gate({B, b}, type_shift(db, sb, 1), "compute loose type");
    a = m.teleport(a, "a@B");
    b = m.teleport(b, "b@A");
    const int A2 = m.alloc("A'", Alice, dA, "data");
    const int B2 = m.alloc("B'", Bob, dB, "data");
    m.gate({A, b, A2}, wA, "write output");
    m.gate({B, a, B2}, wB, "write output");
    a = m.teleport(a, "a");
    b = m.teleport(b, "b");
    m.gate({A, a}, type_shift(da, ta, -1), "uncompute loose type");
    m.gate({B, b}, type_shift(db, sb, -1), "uncompute loose type");
    m.free(a);
    m.free(b);
    // Loose types of the inverse, used to erase the inputs.
    int a2 = m.alloc("a2", Alice, da2);
    m.gate({A2, a2}, type_shift(da2, ta2, 1), "compute loose type");
    int b2 = m.alloc("b2", Bob, db2);
    m.gate({B2, b2}, type_shift(db2, sb2, 1), "compute loose type");
    a2 = m.teleport(a2, "a2@B");
    b2 = m.teleport(b2, "b2@A");
    m.gate({A2, b2, A}, eA, "erase input");
    m.gate({B2, a2, B}, eB, "erase input");
    a2 = m.teleport(a2, "a2");
    b2 = m.teleport(b2, "b2");
    m.gate({A2, a2}, type_shift(da2, ta2, -1), "uncompute loose type");
    m.gate({B2, b2}, type_shift(db2, sb2, -1), "uncompute loose type");
    m.free(a2);
    m.free(b2);
    m.free(A);
    m.free(B);
    return {A2, B2};
  };
  const double eb = 2 * (lg(da) + lg(db)) + 2 * (lg(da2) + lg(db2));
  ProtocolTrace tr = execute("ptl3", u, prog, {eb, 2 * eb},
                             "2 log2(d_a d_b) + 2 log2(d_a' d_b') ebits, twice that in cbits", opts);
  const int r = schmidt_rank(u, opts.tol);
  std::ostringstream os;
  os << "loose types " << da << "x" << db << ", inverse " << da2 << "x" << db2;
  tr.notes.push_back(os.str());
  if (r >= 2 && eb > 8.0 * r - 8 + 1e-9) tr.notes.push_back("ebits exceed 8r-8");
  return tr;
}

}  // namespace bforge::locc
