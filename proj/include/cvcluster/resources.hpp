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

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "cvcluster/gaussian.hpp"
#include "cvcluster/graph.hpp"

namespace cvc {

// Online squeezing cost of one CZ gate: two squeezers of 4.18 dB each.
// Overridable default.
constexpr double kCzOnlineSqueezerDb = 4.18;

/// Singular values of the adjacency matrix, sorted descending.
inline std::vector<double> adjacency_singular_values(const Graph& g) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(g.adjacency_matrix());
  std::vector<double> out(svd.singularValues().data(),
                          svd.singularValues().data() + g.mode_count());
  return out;
}

/// Large-squeezing per-mode requirement s_i = s sqrt(1 + k_i^2), descending.
inline std::vector<double> theorem2_squeezing(const Graph& g, double s) {
  if (s <= 0.0)
    throw std::invalid_argument("theorem2_squeezing: s must be positive");
  std::vector<double> out;
  for (double k : adjacency_singular_values(g))
    out.push_back(s * std::sqrt(1.0 + k * k));
  std::sort(out.rbegin(), out.rend());
  return out;
}

/// Degree bound on the squeezing overhead: sqrt(1 + maxdeg^2).
inline double overhead_bound(const Graph& g) {
  double d = g.max_degree();
  return std::sqrt(1.0 + d * d);
}

/// Closed-form offline squeezing for the two-mode graph state.
inline std::pair<double, double> two_mode_lambda(double s) {
  if (s <= 0.0)
    throw std::invalid_argument("two_mode_lambda: s must be positive");
  double s4 = std::pow(s, 4.0);
  double root = std::sqrt(1.0 + 4.0 * s4 * s4);
  double lp = std::sqrt(1.0 + 2.0 * s4 + root) / (std::sqrt(2.0) * s);
  double lm = std::sqrt(1.0 + 2.0 * s4 - root) / (std::sqrt(2.0) * s);
  return {lp, lm};
}

/// Full singular spectrum of the generation matrix M(s), descending.
inline std::vector<double> exact_singular_values(const Graph& g, double s) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(generation_matrix(g, s).L);
  std::vector<double> out(svd.singularValues().data(),
                          svd.singularValues().data() + 2 * g.mode_count());
  std::sort(out.rbegin(), out.rend());
  return out;
}

enum class OverheadMode { Exact, Bound };

struct ResourceReport {
  int n = 0;
  double accuracy = 1.0;  // target cluster accuracy s
  int edge_count = 0;
  int max_degree = 0;
  std::vector<double> adjacency_singulars;   // k_i, descending
  std::vector<double> per_mode_squeeze;      // s_i = s sqrt(1+k_i^2)
  std::vector<double> exact_singulars;       // spectrum of M(s), optional
  double overhead_bound = 0.0;               // K = sqrt(1 + maxdeg^2)
  std::vector<double> db_per_mode;           // 10 log10(s_i^2)
  double canonical_cost_db = 0.0;
  double decompositional_cost_db = 0.0;
  double savings_db = 0.0;
  OverheadMode mode = OverheadMode::Exact;
  double cz_squeezer_db = kCzOnlineSqueezerDb;
};

/// Canonical (online CZ) vs decompositional (offline only) squeezing budget.
///   canonical   = n * 10 log10(s^2) + |E| * 2 * cz_db
///   decomp      = sum_i 10 log10(s_i^2), with s_i from Theorem 2 (Exact) or
///                 K s for every mode (Bound).
inline ResourceReport cost_comparison(const Graph& g, double s,
                                      OverheadMode mode = OverheadMode::Exact,
                                      double cz_db = kCzOnlineSqueezerDb,
                                      bool with_exact_svd = false) {
  if (s <= 0.0)
    throw std::invalid_argument("cost_comparison: s must be positive");
  ResourceReport r;
  r.n = g.mode_count();
  r.accuracy = s;
  r.edge_count = static_cast<int>(g.edge_count());
  r.max_degree = g.max_degree();
  r.overhead_bound = cvc::overhead_bound(g);
  r.mode = mode;
  r.cz_squeezer_db = cz_db;

  r.canonical_cost_db = r.n * squeeze_db(s) + r.edge_count * 2.0 * cz_db;
  if (mode == OverheadMode::Exact) {
    r.adjacency_singulars = adjacency_singular_values(g);
    r.per_mode_squeeze = theorem2_squeezing(g, s);
  } else {
    r.per_mode_squeeze.assign(r.n, r.overhead_bound * s);
  }
  r.decompositional_cost_db = 0.0;
  for (double si : r.per_mode_squeeze) {
    r.db_per_mode.push_back(squeeze_db(si));
    r.decompositional_cost_db += squeeze_db(si);
  }
  r.savings_db = r.canonical_cost_db - r.decompositional_cost_db;
  if (with_exact_svd) r.exact_singulars = exact_singular_values(g, s);
  return r;
}

}  // namespace cvc
