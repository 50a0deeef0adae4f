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
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace cvc {

/// Unweighted simple graph over qumode indices.  Vertices are 1-based
/// (matching the v_1..v_n labelling used everywhere in this repo); edges are
/// stored as ordered pairs (i, j) with i < j, sorted.  Immutable after
/// construction.
class Graph {
 public:
  Graph(int n, const std::vector<std::pair<int, int>>& edges) : n_(n) {
    if (n < 1) throw std::invalid_argument("Graph: mode count must be >= 1");
    std::set<std::pair<int, int>> seen;
    for (auto [i, j] : edges) {
      if (i < 1 || i > n || j < 1 || j > n)
        throw std::invalid_argument("Graph: edge (" + std::to_string(i) + "," +
                                    std::to_string(j) + ") out of range [1.." +
                                    std::to_string(n) + "]");
      if (i == j)
        throw std::invalid_argument("Graph: self-loop (" + std::to_string(i) +
                                    "," + std::to_string(j) + ") not allowed");
      auto e = std::minmax(i, j);
      if (!seen.insert(e).second)
        throw std::invalid_argument("Graph: duplicate edge (" +
                                    std::to_string(i) + "," +
                                    std::to_string(j) + ")");
    }
    edges_.assign(seen.begin(), seen.end());
  }

  /// rows x cols grid with nearest-neighbour edges, vertices numbered
  /// row-major starting at 1.
  static Graph square_lattice(int rows, int cols) {
    if (rows < 1 || cols < 1)
      throw std::invalid_argument("square_lattice: dimensions must be >= 1");
    std::vector<std::pair<int, int>> edges;
    auto id = [cols](int r, int c) { return r * cols + c + 1; };
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) {
        if (c + 1 < cols) edges.emplace_back(id(r, c), id(r, c + 1));
        if (r + 1 < rows) edges.emplace_back(id(r, c), id(r + 1, c));
      }
    return Graph(rows * cols, edges);
  }

  static Graph linear(int n) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 1; i < n; ++i) edges.emplace_back(i, i + 1);
    return Graph(n, edges);
  }

  int mode_count() const { return n_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }

  bool has_edge(int i, int j) const {
    std::pair<int, int> e{std::min(i, j), std::max(i, j)};
    return std::binary_search(edges_.begin(), edges_.end(), e);
  }

  std::vector<int> neighbors(int i) const {
    std::vector<int> out;
    for (auto [a, b] : edges_) {
      if (a == i) out.push_back(b);
      if (b == i) out.push_back(a);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  int degree(int i) const { return static_cast<int>(neighbors(i).size()); }

  int max_degree() const {
    std::vector<int> deg(n_ + 1, 0);
    for (auto [a, b] : edges_) {
      ++deg[a];
      ++deg[b];
    }
    return *std::max_element(deg.begin() + 1, deg.end());
  }

  Eigen::MatrixXd adjacency_matrix() const {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_, n_);
    for (auto [i, j] : edges_) {
      a(i - 1, j - 1) = 1.0;
      a(j - 1, i - 1) = 1.0;
    }
    return a;
  }

  /// Graph with vertex v deleted; surviving vertices are compacted, i.e.
  /// labels above v shift down by one.  This matches the relabelling done
  /// when a measured qumode is projected out of a NullifierSet.
  Graph remove_vertex(int v) const {
    if (v < 1 || v > n_)
      throw std::invalid_argument("remove_vertex: index out of range");
    if (n_ == 1)
      throw std::invalid_argument("remove_vertex: cannot empty the graph");
    std::vector<std::pair<int, int>> edges;
    auto relabel = [v](int i) { return i > v ? i - 1 : i; };
    for (auto [a, b] : edges_)
      if (a != v && b != v) edges.emplace_back(relabel(a), relabel(b));
    return Graph(n_ - 1, edges);
  }

  // Label-sensitive equality; no isomorphism checks.
  bool operator==(const Graph& o) const {
    return n_ == o.n_ && edges_ == o.edges_;
  }
  bool operator!=(const Graph& o) const { return !(*this == o); }

 private:
  int n_;
  std::vector<std::pair<int, int>> edges_;  // sorted, i < j
};

}  // namespace cvc
