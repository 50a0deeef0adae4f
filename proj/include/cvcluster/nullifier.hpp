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

#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvcluster/graph.hpp"
#include "cvcluster/rational.hpp"

namespace cvc {

// Sign conventions used by this module (fixed once, documented here):
//   X(s) = e^{-is p},  Z(s) = e^{is q},  F = R(pi/2),
//   F p F^dag = -q,    F q F^dag = p,
//   X(s) q X(-s) = q - s,   Z(s) p Z(-s) = p - s,
//   CZ p_i CZ^dag = p_i - q_j  (and symmetrically for j).
// These are the Schroedinger-push substitutions H -> U H U^dag used when a
// gate U is applied to a state nullified by H.  Note they are the inverses of
// the Heisenberg in-out relations U^dag v U.

/// Hermitian operator  sum_i a_i q_i + sum_i b_i p_i + c  over the live modes
/// of a NullifierSet, with exact rational coefficients.
struct QuadratureForm {
  std::vector<Rational> coeff_q;
  std::vector<Rational> coeff_p;
  Rational constant{0};

  explicit QuadratureForm(int n) : coeff_q(n), coeff_p(n) {}
  QuadratureForm() = default;

  int modes() const { return static_cast<int>(coeff_q.size()); }

  bool is_zero() const {
    for (const auto& a : coeff_q)
      if (a != 0) return false;
    for (const auto& b : coeff_p)
      if (b != 0) return false;
    return constant == 0;
  }

  QuadratureForm& operator+=(const QuadratureForm& o) {
    for (int i = 0; i < modes(); ++i) {
      coeff_q[i] += o.coeff_q[i];
      coeff_p[i] += o.coeff_p[i];
    }
    constant += o.constant;
    return *this;
  }

  QuadratureForm scaled(const Rational& k) const {
    QuadratureForm r = *this;
    for (auto& a : r.coeff_q) a *= k;
    for (auto& b : r.coeff_p) b *= k;
    r.constant *= k;
    return r;
  }

  bool operator==(const QuadratureForm& o) const {
    return coeff_q == o.coeff_q && coeff_p == o.coeff_p &&
           constant == o.constant;
  }
};

// 1-indexed single-operator constructors over n modes.
inline QuadratureForm q_op(int mode, int n) {
  QuadratureForm f(n);
  f.coeff_q[mode - 1] = 1;
  return f;
}
inline QuadratureForm p_op(int mode, int n) {
  QuadratureForm f(n);
  f.coeff_p[mode - 1] = 1;
  return f;
}

/// beta where [f, g] = i beta:  beta = a^T b' - b^T a'.
inline Rational symplectic_bracket(const QuadratureForm& f,
                                   const QuadratureForm& g) {
  if (f.modes() != g.modes())
    throw std::invalid_argument("symplectic_bracket: mode count mismatch");
  Rational beta = 0;
  for (int i = 0; i < f.modes(); ++i)
    beta += f.coeff_q[i] * g.coeff_p[i] - f.coeff_p[i] * g.coeff_q[i];
  return beta;
}

/// A basis of the nullifier space of an n-mode state.  mode_labels keeps the
/// original 1-based indices of the still-live modes so that measurement
/// histories stay auditable after modes are projected out.
struct NullifierSet {
  std::vector<QuadratureForm> forms;
  std::vector<int> mode_labels;

  int modes() const { return static_cast<int>(mode_labels.size()); }

  // Position of original label in the live-mode ordering, or -1.
  int slot_of(int label) const {
    for (int i = 0; i < modes(); ++i)
      if (mode_labels[i] == label) return i;
    return -1;
  }
};

inline NullifierSet standard_nullifiers(const Graph& g) {
  const int n = g.mode_count();
  NullifierSet ns;
  ns.mode_labels.resize(n);
  for (int i = 0; i < n; ++i) ns.mode_labels[i] = i + 1;
  for (int i = 1; i <= n; ++i) {
    QuadratureForm f(n);
    f.coeff_p[i - 1] = 1;
    for (int j : g.neighbors(i)) f.coeff_q[j - 1] = -1;
    ns.forms.push_back(std::move(f));
  }
  return ns;
}

// ---------------------------------------------------------------------------
// Gate conjugation

struct GateTag {
  enum Kind { CZ, Fourier, DisplaceX, DisplaceZ, Squeeze, Shear } kind;
  int i = 0;       // first target (original mode label)
  int j = 0;       // second target for CZ
  Rational s = 0;  // parameter
};

inline GateTag cz_gate(int i, int j) { return {GateTag::CZ, i, j, 0}; }
inline GateTag fourier_gate(int i) { return {GateTag::Fourier, i, 0, 0}; }
inline GateTag displace_x_gate(int i, Rational s) {
  return {GateTag::DisplaceX, i, 0, std::move(s)};
}
inline GateTag displace_z_gate(int i, Rational s) {
  return {GateTag::DisplaceZ, i, 0, std::move(s)};
}
inline GateTag squeeze_gate(int i, Rational s) {
  return {GateTag::Squeeze, i, 0, std::move(s)};
}
inline GateTag shear_gate(int i, Rational s) {
  return {GateTag::Shear, i, 0, std::move(s)};
}

/// Nullifiers of U|phi> given nullifiers of |phi>: each form is rewritten by
/// the substitution v -> U v U^dag listed at the top of this header.
inline NullifierSet conjugate(const NullifierSet& ns, const GateTag& g) {
  NullifierSet out = ns;
  const int i = out.slot_of(g.i);
  if (i < 0) throw std::invalid_argument("conjugate: mode not live");
  int j = -1;
  if (g.kind == GateTag::CZ) {
    j = out.slot_of(g.j);
    if (j < 0 || j == i) throw std::invalid_argument("conjugate: bad CZ pair");
  }
  for (auto& f : out.forms) {
    switch (g.kind) {
      case GateTag::CZ:
        // p_i -> p_i - q_j, p_j -> p_j - q_i
        f.coeff_q[j] -= f.coeff_p[i];
        f.coeff_q[i] -= f.coeff_p[j];
        break;
      case GateTag::Fourier: {
        // q_i -> p_i, p_i -> -q_i
        Rational a = f.coeff_q[i], b = f.coeff_p[i];
        f.coeff_q[i] = -b;
        f.coeff_p[i] = a;
        break;
      }
      case GateTag::DisplaceX:
        f.constant -= f.coeff_q[i] * g.s;  // q_i -> q_i - s
        break;
      case GateTag::DisplaceZ:
        f.constant -= f.coeff_p[i] * g.s;  // p_i -> p_i - s
        break;
      case GateTag::Squeeze:
        if (g.s == 0) throw std::invalid_argument("conjugate: squeeze s = 0");
        f.coeff_q[i] /= g.s;  // q_i -> q_i / s
        f.coeff_p[i] *= g.s;  // p_i -> s p_i
        break;
      case GateTag::Shear:
        f.coeff_q[i] -= g.s * f.coeff_p[i];  // p_i -> p_i - s q_i
        break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Measurement update (the exact quadrature-measurement rewrite rules)

enum class Observable { Q, P, PPlusSQ };

struct MeasureResult {
  NullifierSet set;
  bool eigenstate = false;    // observable commuted with every form
  Rational forced_value = 0;  // the eigenvalue, when eigenstate
};

namespace detail {

// Solve sum_k c_k linear(forms_k) = linear(target) by Gaussian elimination;
// returns the matching combination's constant offset if solvable.
inline std::optional<Rational> forced_eigenvalue(const NullifierSet& ns,
                                                 const QuadratureForm& obs) {
  const int n = ns.modes();
  const int k = static_cast<int>(ns.forms.size());
  // Columns: one per form, RHS = obs; rows: 2n linear coefficients.
  std::vector<std::vector<Rational>> m(2 * n, std::vector<Rational>(k + 1));
  for (int c = 0; c < k; ++c)
    for (int r = 0; r < n; ++r) {
      m[r][c] = ns.forms[c].coeff_q[r];
      m[n + r][c] = ns.forms[c].coeff_p[r];
    }
  for (int r = 0; r < n; ++r) {
    m[r][k] = obs.coeff_q[r];
    m[n + r][k] = obs.coeff_p[r];
  }
  std::vector<int> pivot_col(2 * n, -1);
  int rank = 0;
  for (int c = 0; c < k; ++c) {
    int pr = -1;
    for (int r = rank; r < 2 * n; ++r)
      if (m[r][c] != 0) {
        pr = r;
        break;
      }
    if (pr < 0) continue;
    std::swap(m[rank], m[pr]);
    Rational inv = 1 / m[rank][c];
    for (auto& x : m[rank]) x *= inv;
    for (int r = 0; r < 2 * n; ++r)
      if (r != rank && m[r][c] != 0) {
        Rational f = m[r][c];
        for (int cc = 0; cc <= k; ++cc) m[r][cc] -= f * m[rank][cc];
      }
    pivot_col[rank] = c;
    ++rank;
  }
  for (int r = rank; r < 2 * n; ++r)
    if (m[r][k] != 0) return std::nullopt;  // obs not in span
  // Back out the combination's constant.
  Rational constant = 0;
  for (int r = 0; r < rank; ++r)
    constant += m[r][k] * ns.forms[pivot_col[r]].constant;
  // (obs_linear + constant)|phi> = 0  =>  obs|phi> = -constant |phi>.
  return -constant + obs.constant;
}

}  // namespace detail

/// Measure a linear observable on a live mode and update the set exactly.
///
/// Pivot rule: the lowest-index noncommuting form is rescaled so its bracket
/// with the observable is -1 (matching the [p_i, H_i] = -i normalisation),
/// every other noncommuting form is eliminated against it, the pivot is
/// replaced by (observable - outcome), the measured operator is substituted
/// by the outcome in the surviving forms, and the measured mode is projected
/// out.  If the observable already commutes with everything, the state is an
/// eigenstate: the set is returned unchanged with the forced eigenvalue.
inline MeasureResult measure(const NullifierSet& ns, int mode_label,
                             Observable obs, const Rational& outcome,
                             const Rational& shear_s = 0) {
  const int slot = ns.slot_of(mode_label);
  if (slot < 0)
    throw std::invalid_argument("measure: mode " + std::to_string(mode_label) +
                                " already measured or unknown");
  // p + s q is handled by shear conjugation followed by a p-measurement.
  if (obs == Observable::PPlusSQ) {
    NullifierSet sheared = conjugate(ns, shear_gate(mode_label, shear_s));
    return measure(sheared, mode_label, Observable::P, outcome);
  }

  const int n = ns.modes();
  QuadratureForm observable =
      (obs == Observable::Q) ? q_op(slot + 1, n) : p_op(slot + 1, n);

  std::vector<Rational> brackets(ns.forms.size());
  int pivot = -1;
  for (std::size_t f = 0; f < ns.forms.size(); ++f) {
    brackets[f] = symplectic_bracket(observable, ns.forms[f]);
    if (pivot < 0 && brackets[f] != 0) pivot = static_cast<int>(f);
  }

  if (pivot < 0) {
    // Appendix case 1: eigenstate.  The eigenvalue is forced by the algebra.
    auto forced = detail::forced_eigenvalue(ns, observable);
    if (!forced)
      throw std::logic_error("measure: commuting observable outside span");
    MeasureResult r;
    r.set = ns;
    r.eigenstate = true;
    r.forced_value = *forced;
    return r;
  }

  NullifierSet work = ns;
  // Normalise the pivot to bracket -1 with the observable.
  work.forms[pivot] = work.forms[pivot].scaled(-1 / brackets[pivot]);
  // Eliminate the observable's bracket from every other form.
  for (std::size_t f = 0; f < work.forms.size(); ++f) {
    if (static_cast<int>(f) == pivot || brackets[f] == 0) continue;
    work.forms[f] += work.forms[pivot].scaled(brackets[f]);
  }
  // Pivot becomes (observable - outcome); it leaves with the measured mode.
  // Substitute the measured operator by the outcome everywhere else, then
  // drop the mode.  Surviving forms commute with the observable, so their
  // conjugate-quadrature coefficient on this mode is already zero.
  NullifierSet out;
  out.mode_labels = work.mode_labels;
  out.mode_labels.erase(out.mode_labels.begin() + slot);
  for (std::size_t f = 0; f < work.forms.size(); ++f) {
    if (static_cast<int>(f) == pivot) continue;
    QuadratureForm& src = work.forms[f];
    if (obs == Observable::Q)
      src.constant += src.coeff_q[slot] * outcome;
    else
      src.constant += src.coeff_p[slot] * outcome;
    QuadratureForm dst(n - 1);
    for (int i = 0, k = 0; i < n; ++i) {
      if (i == slot) continue;
      dst.coeff_q[k] = src.coeff_q[i];
      dst.coeff_p[k] = src.coeff_p[i];
      ++k;
    }
    dst.constant = src.constant;
    out.forms.push_back(std::move(dst));
  }
  MeasureResult r;
  r.set = std::move(out);
  return r;
}

// ---------------------------------------------------------------------------
// Graph recovery

/// Per-mode local operation V_i = Z(z) X(x) R^reflect F^fourier (rightmost
/// applied first) such that (tensor of V_i)|state> is a standard graph state.
struct LocalCorrection {
  int fourier_power = 0;  // 0..3
  bool reflect = false;   // phase-space reflection, i.e. F^2
  Rational x_shift = 0;
  Rational z_shift = 0;

  bool is_identity() const {
    return fourier_power == 0 && !reflect && x_shift == 0 && z_shift == 0;
  }
};

struct GraphRecovery {
  bool is_graph_state = false;
  std::optional<Graph> graph;  // over live modes, compacted labels
  std::vector<LocalCorrection> corrections;
  NullifierSet reduced;  // row-reduced form, reported when not a graph state
  std::string note;
};

namespace detail {

// RREF of the combined coefficient matrix [A|B|c]; two sets describe the
// same state iff their RREFs coincide.
inline std::vector<std::vector<Rational>> rref_of(const NullifierSet& ns) {
  const int n = ns.modes();
  std::vector<std::vector<Rational>> m;
  for (const auto& f : ns.forms) {
    std::vector<Rational> row(2 * n + 1);
    for (int i = 0; i < n; ++i) {
      row[i] = f.coeff_q[i];
      row[n + i] = f.coeff_p[i];
    }
    row[2 * n] = f.constant;
    m.push_back(std::move(row));
  }
  int rank = 0;
  const int cols = 2 * n + 1;
  for (int c = 0; c < cols && rank < static_cast<int>(m.size()); ++c) {
    int pr = -1;
    for (int r = rank; r < static_cast<int>(m.size()); ++r)
      if (m[r][c] != 0) {
        pr = r;
        break;
      }
    if (pr < 0) continue;
    std::swap(m[rank], m[pr]);
    Rational inv = 1 / m[rank][c];
    for (auto& x : m[rank]) x *= inv;
    for (int r = 0; r < static_cast<int>(m.size()); ++r)
      if (r != rank && m[r][c] != 0) {
        Rational f = m[r][c];
        for (int cc = c; cc < cols; ++cc) m[r][cc] -= f * m[rank][cc];
      }
    ++rank;
  }
  return m;
}

}  // namespace detail

/// Same state (nullifier spans identical, constants included)?
inline bool same_state(const NullifierSet& a, const NullifierSet& b) {
  if (a.mode_labels != b.mode_labels || a.forms.size() != b.forms.size())
    return false;
  return detail::rref_of(a) == detail::rref_of(b);
}

/// Decide whether the set is, modulo per-mode Fourier/reflection/displacement,
/// the standard nullifier set of some graph; if so return the graph and the
/// corrections, otherwise report the reduced form.
inline GraphRecovery graph_from_nullifiers(const NullifierSet& ns_in) {
  GraphRecovery rec;
  const int n = ns_in.modes();
  rec.corrections.assign(n, LocalCorrection{});

  auto fail = [&](const NullifierSet& reduced, std::string note) {
    rec.is_graph_state = false;
    rec.reduced = reduced;
    rec.note = std::move(note);
    return rec;
  };

  if (static_cast<int>(ns_in.forms.size()) != n)
    return fail(ns_in, "form count != live mode count");

  // Work matrix: rows = forms, columns (a_0..a_{n-1} | b_0..b_{n-1} | c).
  NullifierSet work = ns_in;
  std::vector<int> fourier(n, 0);

  // Phase 1: choose per-mode Fourier powers so the p-coefficient block is
  // invertible, by row-by-row pivot selection.
  std::vector<int> pivot_mode(n, -1);  // row -> mode
  std::vector<bool> mode_used(n, false);
  for (int r = 0; r < n; ++r) {
    // Reduce row r against already-pivoted rows.
    for (int pr = 0; pr < r; ++pr) {
      int m = pivot_mode[pr];
      Rational f = work.forms[r].coeff_p[m] / work.forms[pr].coeff_p[m];
      if (f != 0) work.forms[r] += work.forms[pr].scaled(-f);
    }
    int chosen = -1;
    for (int m = 0; m < n && chosen < 0; ++m)
      if (!mode_used[m] && work.forms[r].coeff_p[m] != 0) chosen = m;
    if (chosen < 0) {
      for (int m = 0; m < n && chosen < 0; ++m)
        if (!mode_used[m] && work.forms[r].coeff_q[m] != 0) {
          // Fourier the whole column pair: q_m -> p_m, p_m -> -q_m.
          for (auto& f : work.forms) {
            Rational a = f.coeff_q[m], b = f.coeff_p[m];
            f.coeff_q[m] = -b;
            f.coeff_p[m] = a;
          }
          fourier[m] = 1;
          chosen = m;
        }
    }
    if (chosen < 0) return fail(ns_in, "forms not independent across modes");
    pivot_mode[r] = chosen;
    mode_used[chosen] = true;
  }

  // Phase 2: Gauss-Jordan the p-block to the identity (rows reordered so row
  // i carries p_i).
  for (int r = 0; r < n; ++r) {
    int m = pivot_mode[r];
    work.forms[r] = work.forms[r].scaled(1 / work.forms[r].coeff_p[m]);
    for (int rr = 0; rr < n; ++rr)
      if (rr != r && work.forms[rr].coeff_p[m] != 0)
        work.forms[rr] += work.forms[r].scaled(-work.forms[rr].coeff_p[m]);
  }
  std::vector<QuadratureForm> ordered(n, QuadratureForm(n));
  for (int r = 0; r < n; ++r) ordered[pivot_mode[r]] = work.forms[r];
  work.forms = ordered;

  // Now form i = p_i + sum_j A_ij q_j + c_i with A symmetric (guaranteed by
  // vanishing brackets when the input is a valid nullifier set).
  for (int i = 0; i < n; ++i) {
    if (work.forms[i].coeff_q[i] != 0)
      return fail(work, "diagonal q-coefficient: shear residue, not in the "
                        "Fourier/reflection/displacement vocabulary");
    for (int j = 0; j < n; ++j) {
      const Rational& a = work.forms[i].coeff_q[j];
      if (a != 0 && a != 1 && a != -1)
        return fail(work, "non-unit edge coefficient (weighted-graph residue)");
      if (a != work.forms[j].coeff_q[i])
        return fail(work, "asymmetric coupling: brackets do not vanish");
    }
  }

  // Phase 3: reflections to push every edge coefficient to -1.  Edge sign
  // s_ij = -A_ij; we need eps_i eps_j = s_ij, solved componentwise by BFS.
  std::vector<int> eps(n, 0);
  for (int start = 0; start < n; ++start) {
    if (eps[start] != 0) continue;
    eps[start] = 1;
    std::vector<int> stack{start};
    while (!stack.empty()) {
      int i = stack.back();
      stack.pop_back();
      for (int j = 0; j < n; ++j) {
        const Rational& a = work.forms[i].coeff_q[j];
        if (a == 0) continue;
        int want = (a == -1 ? 1 : -1) * eps[i];
        if (eps[j] == 0) {
          eps[j] = want;
          stack.push_back(j);
        } else if (eps[j] != want) {
          return fail(work, "inconsistent edge signs: not reachable by "
                            "per-mode reflections");
        }
      }
    }
  }
  for (int i = 0; i < n; ++i)
    if (eps[i] < 0) {
      // Reflect mode i (q_i, p_i -> -q_i, -p_i) and renormalise row i.
      for (int r = 0; r < n; ++r) {
        work.forms[r].coeff_q[i] = -work.forms[r].coeff_q[i];
        work.forms[r].coeff_p[i] = -work.forms[r].coeff_p[i];
      }
      work.forms[i] = work.forms[i].scaled(-1);
      rec.corrections[i].reflect = true;
    }

  // Phase 4: displacements Z(c_i) kill the constants.
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    rec.corrections[i].fourier_power = fourier[i];
    rec.corrections[i].z_shift = work.forms[i].constant;
    for (int j = i + 1; j < n; ++j)
      if (work.forms[i].coeff_q[j] != 0) edges.emplace_back(i + 1, j + 1);
  }

  Graph g(n, edges);

  // Verify: conjugating the input by the reported corrections must give the
  // standard nullifiers of g exactly (as a span).
  NullifierSet check = ns_in;
  check.mode_labels.clear();
  for (int i = 0; i < n; ++i) check.mode_labels.push_back(i + 1);
  for (int i = 0; i < n; ++i) {
    const LocalCorrection& c = rec.corrections[i];
    for (int k = 0; k < c.fourier_power; ++k)
      check = conjugate(check, fourier_gate(i + 1));
    if (c.reflect) {
      check = conjugate(check, fourier_gate(i + 1));
      check = conjugate(check, fourier_gate(i + 1));
    }
    if (c.x_shift != 0)
      check = conjugate(check, displace_x_gate(i + 1, c.x_shift));
    if (c.z_shift != 0)
      check = conjugate(check, displace_z_gate(i + 1, c.z_shift));
  }
  if (!same_state(check, standard_nullifiers(g)))
    return fail(work, "internal verification failed");

  rec.is_graph_state = true;
  rec.graph = g;
  rec.reduced = work;
  return rec;
}

}  // namespace cvc
