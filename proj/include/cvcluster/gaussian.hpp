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
#include <sstream>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cvcluster/graph.hpp"
#include "cvcluster/nullifier.hpp"

namespace cvc {

// Phase-space conventions: hbar = 1, vacuum variance 1/2 per quadrature,
// quadrature ordering (q_1..q_n, p_1..p_n).  dB of squeezing = 10 log10(s^2).

constexpr double kSymplecticTol = 1e-10;

inline double squeeze_db(double s) { return 10.0 * std::log10(s * s); }

/// Canonical symplectic form Omega in (q, p) block ordering.
inline Eigen::MatrixXd symplectic_form(int n) {
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  omega.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  omega.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  return omega;
}

/// Gaussian state: first moments plus symmetric covariance matrix.
struct GaussianState {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  int modes() const { return static_cast<int>(mean.size()) / 2; }

  // det(2 cov) = 1 for pure states.
  double purity_det() const { return (2.0 * cov).determinant(); }

  /// Smallest eigenvalue of cov + (i/2) Omega; >= -tol for a physical state.
  double uncertainty_eig() const {
    int n = modes();
    Eigen::MatrixXcd m = cov.cast<std::complex<double>>();
    m += std::complex<double>(0.0, 0.5) * symplectic_form(n).cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    return es.eigenvalues().minCoeff();
  }
};

inline GaussianState vacuum(int n) {
  if (n < 1) throw std::invalid_argument("vacuum: mode count must be >= 1");
  GaussianState st;
  st.mean = Eigen::VectorXd::Zero(2 * n);
  st.cov = 0.5 * Eigen::MatrixXd::Identity(2 * n, 2 * n);
  return st;
}

/// Linear symplectic map plus displacement: v -> L v + c.
struct SymplecticOp {
  Eigen::MatrixXd L;
  Eigen::VectorXd c;

  int modes() const { return static_cast<int>(c.size()) / 2; }

  double symplectic_defect() const {
    int n = modes();
    Eigen::MatrixXd omega = symplectic_form(n);
    return (L * omega * L.transpose() - omega).cwiseAbs().maxCoeff();
  }

  SymplecticOp then(const SymplecticOp& next) const {
    return {next.L * L, next.L * c + next.c};
  }
};

inline SymplecticOp identity_op(int n) {
  return {Eigen::MatrixXd::Identity(2 * n, 2 * n), Eigen::VectorXd::Zero(2 * n)};
}

namespace detail {
inline void check_mode(int mode, int n, const char* who) {
  if (mode < 1 || mode > n)
    throw std::invalid_argument(std::string(who) + ": mode out of range");
}
}  // namespace detail

// --- Gate constructors (2n x 2n embeddings, 1-based targets) ---

inline SymplecticOp rotation_gate(int n, int mode, double theta) {
  detail::check_mode(mode, n, "rotation_gate");
  SymplecticOp op = identity_op(n);
  int q = mode - 1, p = n + mode - 1;
  double c = std::cos(theta), s = std::sin(theta);
  op.L(q, q) = c;
  op.L(q, p) = -s;
  op.L(p, q) = s;
  op.L(p, p) = c;
  return op;
}

inline SymplecticOp fourier_gate_op(int n, int mode) {
  return rotation_gate(n, mode, std::numbers::pi / 2);  // R(pi/2) = F
}

inline SymplecticOp displace_x_op(int n, int mode, double s) {
  detail::check_mode(mode, n, "displace_x_op");
  SymplecticOp op = identity_op(n);
  op.c(mode - 1) = s;
  return op;
}

inline SymplecticOp displace_z_op(int n, int mode, double s) {
  detail::check_mode(mode, n, "displace_z_op");
  SymplecticOp op = identity_op(n);
  op.c(n + mode - 1) = s;
  return op;
}

inline SymplecticOp squeeze_op(int n, int mode, double s) {
  detail::check_mode(mode, n, "squeeze_op");
  if (s <= 0.0) throw std::invalid_argument("squeeze_op: s must be positive");
  SymplecticOp op = identity_op(n);
  op.L(mode - 1, mode - 1) = s;            // q -> s q
  op.L(n + mode - 1, n + mode - 1) = 1.0 / s;  // p -> p / s
  return op;
}

inline SymplecticOp shear_op(int n, int mode, double s) {
  detail::check_mode(mode, n, "shear_op");
  SymplecticOp op = identity_op(n);
  op.L(n + mode - 1, mode - 1) = s;  // p -> p + s q
  return op;
}

inline SymplecticOp cz_op(int n, int i, int j) {
  detail::check_mode(i, n, "cz_op");
  detail::check_mode(j, n, "cz_op");
  if (i == j) throw std::invalid_argument("cz_op: overlapping target modes");
  SymplecticOp op = identity_op(n);
  op.L(n + i - 1, j - 1) = 1.0;  // p_i += q_j
  op.L(n + j - 1, i - 1) = 1.0;  // p_j += q_i
  return op;
}

inline SymplecticOp beamsplitter_op(int n, int i, int j, double theta) {
  detail::check_mode(i, n, "beamsplitter_op");
  detail::check_mode(j, n, "beamsplitter_op");
  if (i == j)
    throw std::invalid_argument("beamsplitter_op: overlapping target modes");
  SymplecticOp op = identity_op(n);
  double c = std::cos(theta), s = std::sin(theta);
  for (int off : {0, n}) {  // same orthogonal mixing on q and p blocks
    int a = off + i - 1, b = off + j - 1;
    op.L(a, a) = c;
    op.L(a, b) = s;
    op.L(b, a) = -s;
    op.L(b, b) = c;
  }
  return op;
}

inline GaussianState apply(const SymplecticOp& op, const GaussianState& st) {
  if (op.c.size() != st.mean.size())
    throw std::invalid_argument("apply: dimension mismatch");
  GaussianState out;
  out.mean = op.L * st.mean + op.c;
  out.cov = op.L * st.cov * op.L.transpose();
  return out;
}

/// M(s) = C . S(s): squeeze every mode, then CZ along every edge; c = 0.
inline SymplecticOp generation_matrix(const Graph& g, double s) {
  if (s <= 0.0)
    throw std::invalid_argument("generation_matrix: s must be positive");
  int n = g.mode_count();
  SymplecticOp op = identity_op(n);
  for (int i = 0; i < n; ++i) {
    op.L(i, i) = s;
    op.L(n + i, n + i) = 1.0 / s;
  }
  for (auto [i, j] : g.edges()) {
    op.L(n + i - 1, j - 1) = s;  // p_i += q_j, picked up post-squeeze
    op.L(n + j - 1, i - 1) = s;
  }
  return op;
}

inline GaussianState canonical_cluster(const Graph& g, double s) {
  return apply(generation_matrix(g, s), vacuum(g.mode_count()));
}

// --- Homodyne detection ---

struct HomodyneResult {
  double outcome = 0.0;
  GaussianState state;  // measured mode removed
  double density = 0.0;  // marginal probability density at the outcome
};

namespace detail {
inline GaussianState drop_mode(const GaussianState& st, int mode) {
  int n = st.modes();
  std::vector<int> keep;
  for (int i = 0; i < 2 * n; ++i)
    if (i != mode - 1 && i != n + mode - 1) keep.push_back(i);
  GaussianState out;
  out.mean.resize(keep.size());
  out.cov.resize(keep.size(), keep.size());
  for (std::size_t a = 0; a < keep.size(); ++a) {
    out.mean(a) = st.mean(keep[a]);
    for (std::size_t b = 0; b < keep.size(); ++b)
      out.cov(a, b) = st.cov(keep[a], keep[b]);
  }
  return out;
}
}  // namespace detail

/// Measure p_theta = sin(theta) q + cos(theta) p on one mode.  The outcome is
/// drawn from the Gaussian marginal unless forced; the conditional update is
/// the rank-1 (pseudo-inverse) Gaussian conditioning rule, after which the
/// measured mode is traced out.
inline HomodyneResult homodyne(const GaussianState& st, int mode, double theta,
                               std::optional<double> forced,
                               std::mt19937_64& rng) {
  int n = st.modes();
  detail::check_mode(mode, n, "homodyne");
  Eigen::VectorXd f = Eigen::VectorXd::Zero(2 * n);
  f(mode - 1) = std::sin(theta);
  f(n + mode - 1) = std::cos(theta);

  double mu = f.dot(st.mean);
  double var = f.dot(st.cov * f);
  HomodyneResult res;
  if (forced) {
    res.outcome = *forced;
  } else {
    std::normal_distribution<double> dist(mu, std::sqrt(std::max(var, 0.0)));
    res.outcome = dist(rng);
  }
  res.density = std::exp(-0.5 * (res.outcome - mu) * (res.outcome - mu) /
                         std::max(var, 1e-300)) /
                std::sqrt(2.0 * std::numbers::pi * std::max(var, 1e-300));

  GaussianState cond = st;
  if (var > 1e-14) {
    Eigen::VectorXd sf = st.cov * f;
    cond.mean += sf * ((res.outcome - mu) / var);
    cond.cov -= sf * sf.transpose() / var;
  }
  // var ~ 0: the quadrature is sharp; conditioning is the identity
  // (pseudo-inverse of a vanishing rank-1 block).
  res.state = detail::drop_mode(cond, mode);
  return res;
}

/// Per-form (mean, variance) of nullifier observables in a Gaussian state.
inline std::vector<std::pair<double, double>> nullifier_stats(
    const GaussianState& st, const NullifierSet& ns) {
  int n = st.modes();
  if (ns.modes() != n)
    throw std::invalid_argument("nullifier_stats: dimension mismatch");
  std::vector<std::pair<double, double>> out;
  for (const auto& form : ns.forms) {
    Eigen::VectorXd f(2 * n);
    for (int i = 0; i < n; ++i) {
      f(i) = to_double(form.coeff_q[i]);
      f(n + i) = to_double(form.coeff_p[i]);
    }
    out.emplace_back(f.dot(st.mean) + to_double(form.constant),
                     f.dot(st.cov * f));
  }
  return out;
}

/// Multivariate normal density at the phase-space point (q, p).
inline double wigner_eval(const GaussianState& st, const Eigen::VectorXd& q,
                          const Eigen::VectorXd& p) {
  int n = st.modes();
  if (q.size() != n || p.size() != n)
    throw std::invalid_argument("wigner_eval: point dimension mismatch");
  Eigen::VectorXd x(2 * n);
  x.head(n) = q;
  x.tail(n) = p;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(st.cov);
  double det = st.cov.determinant();
  if (det <= 1e-300) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(st.cov);
    int idx = 0;
    es.eigenvalues().minCoeff(&idx);
    std::ostringstream msg;
    msg << "wigner_eval: singular covariance, null direction ["
        << es.eigenvectors().col(idx).transpose() << "]";
    throw std::invalid_argument(msg.str());
  }
  Eigen::VectorXd d = x - st.mean;
  double quad = d.dot(ldlt.solve(d));
  return std::exp(-0.5 * quad) /
         (std::pow(2.0 * std::numbers::pi, n) * std::sqrt(det));
}

// --- Teleportation hops ---

/// One wire hop, computed in closed form with no catastrophic cancellation.
///
/// The input mode is CZ-coupled to a momentum-squeezed ancilla S(s)|0>
/// (q-variance S = s^2/2, p-variance eps = 1/(2 s^2)) and measured in p with
/// outcome m.  The raw conditional output (byproduct X(m) F included) is
///   mean' = ( S (m - mu_p) / (C + S),  mu_q + B (m - mu_p) / (C + S) )
///   cov'  = [ S C / (C+S),  -S B / (C+S);  ., A + eps - B^2 / (C+S) ]
/// with input cov [[A, B], [B, C]].  accuracy = infinity gives the ideal
/// wire limit X(m) F exactly.
inline GaussianState teleport_hop(const GaussianState& st, double outcome,
                                  double accuracy) {
  if (st.modes() != 1)
    throw std::invalid_argument("teleport_hop: single-mode input required");
  double a = st.cov(0, 0), b = st.cov(0, 1), c = st.cov(1, 1);
  double mq = st.mean(0), mp = st.mean(1);
  GaussianState out;
  out.mean.resize(2);
  out.cov.resize(2, 2);
  if (std::isinf(accuracy)) {
    out.mean << outcome - mp, mq;
    out.cov << c, -b, -b, a;
    return out;
  }
  double S = 0.5 * accuracy * accuracy;
  double eps = 0.5 / (accuracy * accuracy);
  double denom = c + S;
  out.mean << S * (outcome - mp) / denom, mq + b * (outcome - mp) / denom;
  out.cov << S * c / denom, -S * b / denom, -S * b / denom,
      a + eps - b * b / denom;
  return out;
}

/// Outcome-averaged propagation of a single-mode state down a wire of the
/// given accuracy, in the corrected frame: each hop convolves one quadrature
/// with variance 1/(2 s^2), alternating q, p, q, ...  The mean is unchanged;
/// the result is mixed in general.
inline GaussianState average_teleport_chain(const GaussianState& input,
                                            double s, int hops) {
  if (input.modes() != 1)
    throw std::invalid_argument("average_teleport_chain: single-mode input");
  if (hops < 0)
    throw std::invalid_argument("average_teleport_chain: hops must be >= 0");
  GaussianState st = input;
  double noise = 0.5 / (s * s);
  for (int h = 0; h < hops; ++h) st.cov(h % 2, h % 2) += noise;
  return st;
}

}  // namespace cvc
