// Copyright 2026 The cvcluster Authors
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

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace cvc {

using Complex = std::complex<double>;

// Truncation defaults: 40 levels per mode for two-mode circuits with a guard
// band of 8; displacements up to r ~ 3 and squeezing up to ~6 dB then keep
// the tail leak below 1e-4.
constexpr int kDefaultFockDim = 40;
constexpr int kFockGuardBand = 8;

// --- Operator building blocks -------------------------------------------

/// Truncated q and p matrices from a = (q + i p) / sqrt(2).
inline std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> quadrature_ops(int dim) {
  if (dim < 2) throw std::invalid_argument("quadrature_ops: dim must be >= 2");
  Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 0; n + 1 < dim; ++n) {
    double r = std::sqrt((n + 1) / 2.0);
    q(n, n + 1) = r;
    q(n + 1, n) = r;
    p(n, n + 1) = Complex(0.0, -r);  // p = (a - a^dag)/(i sqrt 2)
    p(n + 1, n) = Complex(0.0, r);
  }
  return {q, p};
}

namespace fockdet {

inline Eigen::MatrixXd q_matrix(int dim) {
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(dim, dim);
  for (int n = 0; n + 1 < dim; ++n) {
    double r = std::sqrt((n + 1) / 2.0);
    q(n, n + 1) = r;
    q(n + 1, n) = r;
  }
  return q;
}

struct QEigen {
  Eigen::MatrixXd vectors;
  Eigen::VectorXd values;
};

inline const QEigen& q_eigensystem(int dim) {
  static thread_local std::vector<std::pair<int, QEigen>> cache;
  for (auto& [d, e] : cache)
    if (d == dim) return e;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q_matrix(dim));
  cache.push_back({dim, {es.eigenvectors(), es.eigenvalues()}});
  return cache.back().second;
}

}  // namespace fockdet

/// Single-mode unitaries on the truncated space.  All are exact exponentials
/// of the truncated Hermitian generator, hence exactly unitary; truncation
/// shows up as model error near the cutoff, not as norm loss.
inline Eigen::MatrixXcd rotation_unitary(int dim, double theta) {
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 0; n < dim; ++n)
    u(n, n) = std::exp(Complex(0.0, theta * (n + 0.5)));
  return u;  // R(theta) = exp(i theta (n + 1/2))
}

inline Eigen::MatrixXcd fourier_unitary(int dim) {
  return rotation_unitary(dim, std::numbers::pi / 2);
}

inline Eigen::MatrixXcd squeeze_unitary(int dim, double s) {
  if (s <= 0.0) throw std::invalid_argument("squeeze_unitary: s must be > 0");
  auto [q, p] = quadrature_ops(dim);
  // S(s) scales <q> by s and <p> by 1/s: S = exp(-i ln s (qp+pq)/2).
  Eigen::MatrixXcd gen = q * p + p * q;
  return (Complex(0.0, -std::log(s) / 2.0) * gen).exp();
}

inline Eigen::MatrixXcd displace_x_unitary(int dim, double r) {
  auto [q, p] = quadrature_ops(dim);
  return (Complex(0.0, -r) * p).exp();  // X(r) = exp(-i r p)
}

inline Eigen::MatrixXcd displace_z_unitary(int dim, double r) {
  const auto& es = fockdet::q_eigensystem(dim);  // Z(r) = exp(i r q)
  Eigen::VectorXcd phases(dim);
  for (int k = 0; k < dim; ++k)
    phases(k) = std::exp(Complex(0.0, r * es.values(k)));
  return es.vectors.cast<Complex>() * phases.asDiagonal() *
         es.vectors.transpose().cast<Complex>();
}

inline Eigen::MatrixXcd cubic_unitary(int dim, double gamma) {
  const auto& es = fockdet::q_eigensystem(dim);  // exp(i gamma q^3)
  Eigen::VectorXcd phases(dim);
  for (int k = 0; k < dim; ++k)
    phases(k) = std::exp(Complex(0.0, gamma * std::pow(es.values(k), 3)));
  return es.vectors.cast<Complex>() * phases.asDiagonal() *
         es.vectors.transpose().cast<Complex>();
}

// --- Multimode state -----------------------------------------------------

/// Truncated number-basis amplitude tensor, flattened row-major (mode 1 is
/// the slowest index).  Mode indices are 1-based like everywhere else.
struct FockState {
  std::vector<int> dims;
  Eigen::VectorXcd amp;
  double norm_leak = 0.0;  // accumulated tail/truncation mass estimate

  int modes() const { return static_cast<int>(dims.size()); }

  std::size_t stride(int mode) const {  // 1-based
    std::size_t s = 1;
    for (int m = mode; m < modes(); ++m) s *= dims[m];
    return s;
  }

  double norm2() const { return amp.squaredNorm(); }

  void renormalize() { amp /= std::sqrt(norm2()); }

  /// Tail mass in the top guard-band levels of one mode.
  double guard_band_mass(int mode, int guard = kFockGuardBand) const {
    std::size_t st = stride(mode);
    int d = dims[mode - 1];
    std::size_t outer = amp.size() / (st * d);
    double mass = 0.0;
    for (std::size_t o = 0; o < outer; ++o)
      for (int n = std::max(0, d - guard); n < d; ++n)
        for (std::size_t i = 0; i < st; ++i)
          mass += std::norm(amp(o * st * d + n * st + i));
    return mass;
  }
};

inline FockState fock_vacuum(const std::vector<int>& dims) {
  FockState st;
  st.dims = dims;
  std::size_t total = 1;
  for (int d : dims) {
    if (d < 2) throw std::invalid_argument("fock_vacuum: dim must be >= 2");
    total *= d;
  }
  st.amp = Eigen::VectorXcd::Zero(total);
  st.amp(0) = 1.0;
  return st;
}

inline void apply_single_mode(FockState& st, int mode,
                              const Eigen::MatrixXcd& u) {
  int d = st.dims[mode - 1];
  if (u.rows() != d || u.cols() != d)
    throw std::invalid_argument("apply_single_mode: dimension mismatch");
  std::size_t strd = st.stride(mode);
  std::size_t outer = st.amp.size() / (strd * d);
  Eigen::VectorXcd col(d), res(d);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t i = 0; i < strd; ++i) {
      std::size_t base = o * strd * d + i;
      for (int n = 0; n < d; ++n) col(n) = st.amp(base + n * strd);
      res = u * col;
      for (int n = 0; n < d; ++n) st.amp(base + n * strd) = res(n);
    }
}

/// Momentum-squeezed vacuum S(s)|0> on one mode (even levels only), built by
/// exponentiating the truncated generator; the tail mass in the guard band is
/// recorded as leak.
inline FockState squeezed_vacuum(double s, int dim,
                                 double leak_threshold = 1e-3) {
  if (s <= 0.0) throw std::invalid_argument("squeezed_vacuum: s must be > 0");
  FockState st = fock_vacuum({dim});
  apply_single_mode(st, 1, squeeze_unitary(dim, s));
  st.norm_leak = st.guard_band_mass(1);
  if (st.norm_leak > leak_threshold)
    throw std::runtime_error("squeezed_vacuum: truncation leak " +
                             std::to_string(st.norm_leak) +
                             " above threshold; raise dim");
  return st;
}

inline FockState tensor(const FockState& a, const FockState& b) {
  FockState out;
  out.dims = a.dims;
  out.dims.insert(out.dims.end(), b.dims.begin(), b.dims.end());
  out.amp.resize(a.amp.size() * b.amp.size());
  for (Eigen::Index i = 0; i < a.amp.size(); ++i)
    out.amp.segment(i * b.amp.size(), b.amp.size()) = a.amp(i) * b.amp;
  out.norm_leak = a.norm_leak + b.norm_leak;
  return out;
}

/// CZ = exp(i q_i q_j), applied through the joint position eigenbasis of the
/// two truncated q operators (no dense two-mode exponential needed).
inline void apply_cz_fock(FockState& st, int i, int j) {
  if (i == j) throw std::invalid_argument("apply_cz_fock: i == j");
  int di = st.dims[i - 1], dj = st.dims[j - 1];
  const auto& ei = fockdet::q_eigensystem(di);
  const auto& ej = fockdet::q_eigensystem(dj);
  apply_single_mode(st, i, ei.vectors.transpose().cast<Complex>());
  apply_single_mode(st, j, ej.vectors.transpose().cast<Complex>());
  // Diagonal phases exp(i x_a x_b); generic strides.
  std::size_t si = st.stride(i), sj = st.stride(j);
  for (Eigen::Index idx = 0; idx < st.amp.size(); ++idx) {
    int a = static_cast<int>((idx / si) % di);
    int b = static_cast<int>((idx / sj) % dj);
    st.amp(idx) *= std::exp(Complex(0.0, ei.values(a) * ej.values(b)));
  }
  apply_single_mode(st, i, ei.vectors.cast<Complex>());
  apply_single_mode(st, j, ej.vectors.cast<Complex>());
}

/// Beamsplitter exp(theta (a_i^dag a_j - a_i a_j^dag)), block-diagonal in the
/// total photon number; each block is exponentiated separately.
inline void apply_beamsplitter_fock(FockState& st, int i, int j, double theta) {
  if (i == j) throw std::invalid_argument("apply_beamsplitter_fock: i == j");
  if (st.modes() != 2 || i != 1 || j != 2)
    throw std::invalid_argument(
        "apply_beamsplitter_fock: implemented for modes (1,2) of a two-mode "
        "state");
  int d1 = st.dims[0], d2 = st.dims[1];
  for (int total = 1; total <= d1 + d2 - 2; ++total) {
    int lo = std::max(0, total - (d2 - 1));
    int hi = std::min(d1 - 1, total);
    int size = hi - lo + 1;
    if (size <= 1) continue;
    Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(size, size);
    for (int n1 = lo; n1 < hi; ++n1) {
      // <n1+1, n2-1| a1^dag a2 |n1, n2>, n2 = total - n1
      double amp = std::sqrt((n1 + 1.0) * (total - n1));
      gen(n1 + 1 - lo, n1 - lo) += theta * amp;
      gen(n1 - lo, n1 + 1 - lo) -= theta * amp;
    }
    Eigen::MatrixXd u = gen.exp();
    Eigen::VectorXcd block(size), res(size);
    for (int k = 0; k < size; ++k)
      block(k) = st.amp((lo + k) * d2 + (total - lo - k));
    res = u.cast<Complex>() * block;
    for (int k = 0; k < size; ++k)
      st.amp((lo + k) * d2 + (total - lo - k)) = res(k);
  }
}

// Generator tags for the circuit-level interface.
struct FockOp {
  enum Kind { Beamsplitter, CZ, DisplaceX, DisplaceZ, Squeeze, Cubic } kind;
  int i = 1, j = 2;
  double param = 0.0;
};

inline FockState apply_generator(const FockState& st, const FockOp& op) {
  FockState out = st;
  switch (op.kind) {
    case FockOp::Beamsplitter:
      apply_beamsplitter_fock(out, op.i, op.j, op.param);
      break;
    case FockOp::CZ:
      apply_cz_fock(out, op.i, op.j);
      break;
    case FockOp::DisplaceX:
      apply_single_mode(out, op.i, displace_x_unitary(out.dims[op.i - 1], op.param));
      break;
    case FockOp::DisplaceZ:
      apply_single_mode(out, op.i, displace_z_unitary(out.dims[op.i - 1], op.param));
      break;
    case FockOp::Squeeze:
      apply_single_mode(out, op.i, squeeze_unitary(out.dims[op.i - 1], op.param));
      break;
    case FockOp::Cubic:
      apply_single_mode(out, op.i, cubic_unitary(out.dims[op.i - 1], op.param));
      break;
  }
  out.norm_leak = st.norm_leak + std::abs(out.norm2() - st.norm2());
  return out;
}

// --- Photon counting -----------------------------------------------------

struct PhotonCountResult {
  int outcome = 0;
  FockState state;      // measured mode projected out
  double probability = 0.0;
};

inline std::vector<double> photon_distribution(const FockState& st, int mode) {
  int d = st.dims[mode - 1];
  std::size_t strd = st.stride(mode);
  std::size_t outer = st.amp.size() / (strd * d);
  std::vector<double> probs(d, 0.0);
  for (std::size_t o = 0; o < outer; ++o)
    for (int n = 0; n < d; ++n)
      for (std::size_t k = 0; k < strd; ++k)
        probs[n] += std::norm(st.amp(o * strd * d + n * strd + k));
  return probs;
}

inline PhotonCountResult photon_count(const FockState& st, int mode,
                                      std::optional<int> forced,
                                      std::mt19937_64& rng) {
  auto probs = photon_distribution(st, mode);
  PhotonCountResult res;
  if (forced) {
    if (*forced < 0 || *forced >= st.dims[mode - 1])
      throw std::invalid_argument("photon_count: outcome outside truncation");
    res.outcome = *forced;
    res.probability = probs[res.outcome];
    if (res.probability <= 0.0)
      throw std::invalid_argument("photon_count: zero-probability outcome");
  } else {
    std::discrete_distribution<int> dist(probs.begin(), probs.end());
    res.outcome = dist(rng);
    res.probability = probs[res.outcome];
  }
  // Project onto |n><n| and drop the mode.
  int d = st.dims[mode - 1];
  std::size_t strd = st.stride(mode);
  std::size_t outer = st.amp.size() / (strd * d);
  FockState out;
  out.dims = st.dims;
  out.dims.erase(out.dims.begin() + (mode - 1));
  out.amp.resize(st.amp.size() / d);
  for (std::size_t o = 0; o < outer; ++o)
    out.amp.segment(o * strd, strd) =
        st.amp.segment(o * strd * d + res.outcome * strd, strd);
  out.amp /= std::sqrt(res.probability);
  out.norm_leak = st.norm_leak;
  res.state = std::move(out);
  return res;
}

// --- Cubic phase state machinery ----------------------------------------

/// gamma(n) = 1 / (6 sqrt(2n + 1)).
inline double gamma_of_n(int n) {
  if (n < 0) throw std::invalid_argument("gamma_of_n: n must be >= 0");
  return 1.0 / (6.0 * std::sqrt(2.0 * n + 1.0));
}

/// t(n) = (a / gamma(n))^(1/3), so S^dag(t) e^{i gamma q^3} S(t) = e^{i a q^3}.
inline double cubic_correction(double a, int n) {
  if (a <= 0.0)
    throw std::invalid_argument(
        "cubic_correction: a must be positive (negative strengths are handled "
        "by conjugating with a reflection)");
  return std::cbrt(a / gamma_of_n(n));
}

struct CircuitResult {
  int n = 0;                // photon count outcome
  FockState state;          // conditional single-mode state
  double probability = 0.0;
  double leak = 0.0;
};

/// Photon counting on one arm of a displaced two-mode squeezed state
/// (beamsplitter form): B on S(1/s)|0> x S(s)|0>, then Z(r) on the measured
/// arm.  Collapses the other arm to ~ e^{i gamma(n) q^3}|0>_p.
inline CircuitResult run_circuit_gkp(double s, double r, int dim,
                                     std::optional<int> forced_n,
                                     std::mt19937_64& rng) {
  FockState st = tensor(squeezed_vacuum(1.0 / s, dim), squeezed_vacuum(s, dim));
  apply_beamsplitter_fock(st, 1, 2, std::numbers::pi / 4);
  apply_single_mode(st, 1, displace_z_unitary(dim, r));
  auto pc = photon_count(st, 1, forced_n, rng);
  return {pc.outcome, pc.state, pc.probability, pc.state.norm_leak};
}

/// Same preparation in cluster form: CZ on S(s)|0> x S(s)|0>, then X(r) on
/// the measured arm.  Functionally equivalent to the beamsplitter circuit up
/// to a local Fourier on the surviving mode.
inline CircuitResult run_circuit_cluster(double s, double r, int dim,
                                         std::optional<int> forced_n,
                                         std::mt19937_64& rng) {
  FockState st = tensor(squeezed_vacuum(s, dim), squeezed_vacuum(s, dim));
  apply_cz_fock(st, 1, 2);
  apply_single_mode(st, 1, displace_x_unitary(dim, r));
  auto pc = photon_count(st, 1, forced_n, rng);
  return {pc.outcome, pc.state, pc.probability, pc.state.norm_leak};
}

// --- Moments (for cross-backend checks) ----------------------------------

/// <psi| O_mode |psi> for a single-mode operator.
inline Complex single_mode_expectation(const FockState& st, int mode,
                                       const Eigen::MatrixXcd& op) {
  FockState tmp = st;
  apply_single_mode(tmp, mode, op);
  return st.amp.dot(tmp.amp);  // Eigen dot conjugates the left argument
}

/// Symmetrised two-operator moment <AB + BA>/2 on (possibly equal) modes.
inline double symmetric_moment(const FockState& st, int mode_a,
                               const Eigen::MatrixXcd& a, int mode_b,
                               const Eigen::MatrixXcd& b) {
  FockState ab = st, ba = st;
  apply_single_mode(ab, mode_b, b);
  apply_single_mode(ab, mode_a, a);
  apply_single_mode(ba, mode_a, a);
  apply_single_mode(ba, mode_b, b);
  Complex v = 0.5 * (st.amp.dot(ab.amp) + st.amp.dot(ba.amp));
  return v.real();
}

}  // namespace cvc
