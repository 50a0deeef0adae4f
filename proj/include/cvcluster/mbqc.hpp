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

// Measurement-based execution: compile circuits to wire/CZ graphs, run
// adaptive quadrature-measurement programs on the exact-nullifier or the
// Gaussian backend, track byproduct corrections, and drive the non-Gaussian
// cubic-gate pipeline on the position grid.
//
// Byproduct normal form (repo convention): corrections are recorded in
// application order and never applied; displacements sit innermost, Fourier
// powers outermost when composed.  Reflections are reported explicitly.

#include <array>
#include <cmath>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvcluster/gaussian.hpp"
#include "cvcluster/graph.hpp"
#include "cvcluster/grid.hpp"
#include "cvcluster/nullifier.hpp"

namespace cvc {

// --- Measurement programs -------------------------------------------------

/// How a step's result depends on an earlier outcome.  Displacement gates
/// need none; shear gates only add a multiple of the previous result; cubic
/// gates change the physical basis and are delegated to the grid pipeline.
enum class AdaptRule { None, AddPrevious, Physical };

/// One measurement of p_hat + f'(q_hat) on `mode`, where f(q) = sum f[k] q^k
/// (degree <= 3).  Coefficients are exact rationals so the nullifier backend
/// stays exact; the Gaussian backend converts to double.
struct MeasurementStep {
  int mode = 0;
  std::array<Rational, 4> f{};  // f[0] is an irrelevant global phase
  AdaptRule adapt = AdaptRule::None;
  Rational adapt_factor = 0;

  int degree() const {
    for (int k = 3; k >= 1; --k)
      if (f[k] != 0) return k;
    return 0;
  }
  bool gaussian() const { return degree() <= 2; }
  Rational shear_strength() const { return 2 * f[2]; }  // f'(q) slope
  Rational offset() const { return f[1]; }              // f'(q) constant

  std::string basis_label() const {
    std::ostringstream os;
    os << "p";
    if (f[2] != 0) os << " + " << to_string(shear_strength()) << " q";
    if (f[3] != 0) os << " + " << to_string(3 * f[3]) << " q^2";
    if (f[1] != 0) os << " + " << to_string(f[1]);
    return os.str();
  }
};

inline MeasurementStep p_step(int mode) { return {mode, {0, 0, 0, 0}}; }

inline MeasurementStep shear_step(int mode, const Rational& s) {
  return {mode, {0, 0, s / 2, 0}};  // f(q) = s q^2 / 2
}

inline MeasurementStep displace_step(int mode, const Rational& c) {
  return {mode, {0, c, 0, 0}};  // f(q) = c q
}

inline MeasurementStep cubic_step(int mode, const Rational& a) {
  return {mode, {0, 0, 0, a / 3}, AdaptRule::Physical};  // f(q) = a q^3 / 3
}

struct MeasurementProgram {
  std::vector<MeasurementStep> steps;

  void validate() const {
    for (std::size_t i = 0; i < steps.size(); ++i)
      for (std::size_t j = i + 1; j < steps.size(); ++j)
        if (steps[i].mode == steps[j].mode)
          throw std::invalid_argument(
              "MeasurementProgram: mode " + std::to_string(steps[i].mode) +
              " measured more than once");
  }
};

// --- Byproducts -----------------------------------------------------------

struct ByproductTag {
  enum Kind { X, Z, F, FInverse, Reflect } kind;
  int mode = 1;          // 1-based index in the surviving output modes
  double value = 0.0;    // displacement amount for X/Z
  Rational exact = 0;    // exact displacement when produced by the exact backend
};

/// Ordered list of corrections, first-recorded applied first.  Tracked, never
/// applied; compose to a SymplecticOp for oracle comparisons.
struct ByproductRecord {
  std::vector<ByproductTag> tags;

  void push(ByproductTag t) { tags.push_back(std::move(t)); }

  SymplecticOp to_symplectic(int n_modes) const {
    SymplecticOp acc = identity_op(n_modes);
    for (const auto& t : tags) {
      SymplecticOp op = identity_op(n_modes);
      switch (t.kind) {
        case ByproductTag::X: op = displace_x_op(n_modes, t.mode, t.value); break;
        case ByproductTag::Z: op = displace_z_op(n_modes, t.mode, t.value); break;
        case ByproductTag::F: op = fourier_gate_op(n_modes, t.mode); break;
        case ByproductTag::FInverse:
          op = rotation_gate(n_modes, t.mode, -std::numbers::pi / 2);
          break;
        case ByproductTag::Reflect:
          op = rotation_gate(n_modes, t.mode, std::numbers::pi);
          break;
      }
      acc = acc.then(op);
    }
    return acc;
  }
};

namespace mbqcdet {

inline SymplecticOp inverse_of(const SymplecticOp& op) {
  SymplecticOp inv;
  inv.L = op.L.inverse();
  inv.c = -(inv.L * op.c);
  return inv;
}

inline GaussianState tensor_gaussian(const GaussianState& a,
                                     const GaussianState& b) {
  int na = a.modes(), nb = b.modes(), n = na + nb;
  GaussianState out;
  out.mean = Eigen::VectorXd::Zero(2 * n);
  out.cov = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  // (q..q, p..p) ordering: interleave the q and p blocks of both states.
  out.mean.segment(0, na) = a.mean.segment(0, na);
  out.mean.segment(na, nb) = b.mean.segment(0, nb);
  out.mean.segment(n, na) = a.mean.segment(na, na);
  out.mean.segment(n + na, nb) = b.mean.segment(nb, nb);
  auto place = [&](int br, int bc, const Eigen::MatrixXd& src, int sr, int sc,
                   int rows, int cols) {
    out.cov.block(br, bc, rows, cols) = src.block(sr, sc, rows, cols);
  };
  place(0, 0, a.cov, 0, 0, na, na);
  place(0, n, a.cov, 0, na, na, na);
  place(n, 0, a.cov, na, 0, na, na);
  place(n, n, a.cov, na, na, na, na);
  place(na, na, b.cov, 0, 0, nb, nb);
  place(na, n + na, b.cov, 0, nb, nb, nb);
  place(n + na, na, b.cov, nb, 0, nb, nb);
  place(n + na, n + na, b.cov, nb, nb, nb, nb);
  return out;
}

}  // namespace mbqcdet

// --- Outcome logging ------------------------------------------------------

struct OutcomeLogEntry {
  int step = 0;
  int mode = 0;
  std::string basis;
  double outcome = 0.0;   // raw homodyne value (rotated quadrature)
  double result = 0.0;    // rescaled result, the eigenvalue of p + f'(q)
  bool eigenstate_forced = false;
};

// --- Gaussian backend -----------------------------------------------------

/// theta = atan(s), r = sqrt(1+s^2): p + s q realized as homodyne at theta
/// with the result multiplied by r.
inline std::pair<double, double> homodyne_basis_of_shear(double s) {
  return {std::atan(s), std::sqrt(1.0 + s * s)};
}

struct GaussianRun {
  GaussianState state;
  ByproductRecord record;
  std::vector<OutcomeLogEntry> log;
  std::vector<int> output_labels;  // original vertex labels of survivors
  // Exact accumulated correction in the output frame (raw = correction o
  // ideal).  The tag list stores per-hop byproducts verbatim; once byproducts
  // are pushed through later non-commuting gates they leave the X/Z/F
  // alphabet, so the composed operator is tracked separately where available.
  std::optional<SymplecticOp> correction;
};

/// Sequential adaptive execution on a Gaussian state over the graph's modes.
/// `forced` (if nonempty) gives per-step eigenvalues of p + f'(q); otherwise
/// outcomes are sampled from the marginal with `rng`.
inline GaussianRun run_program_gaussian(const Graph& g,
                                        const MeasurementProgram& prog,
                                        double accuracy,
                                        const std::vector<double>& forced,
                                        std::mt19937_64& rng,
                                        std::optional<GaussianState> initial =
                                            std::nullopt) {
  prog.validate();
  if (!forced.empty() && forced.size() != prog.steps.size())
    throw std::invalid_argument(
        "run_program_gaussian: forced-outcome count does not match program "
        "length");
  GaussianRun run;
  run.state = initial ? *initial : canonical_cluster(g, accuracy);
  if (run.state.modes() != g.mode_count())
    throw std::invalid_argument(
        "run_program_gaussian: initial state mode count mismatch");
  run.output_labels.resize(g.mode_count());
  for (int i = 0; i < g.mode_count(); ++i) run.output_labels[i] = i + 1;

  double previous_result = 0.0;
  for (std::size_t k = 0; k < prog.steps.size(); ++k) {
    const auto& st = prog.steps[k];
    if (!st.gaussian())
      throw std::invalid_argument(
          "run_program_gaussian: degree-3 measurement on mode " +
          std::to_string(st.mode) +
          " cannot be represented in the Gaussian formalism; route this step "
          "through the photon-number pipeline (run_cubic_gate)");
    auto it = std::find(run.output_labels.begin(), run.output_labels.end(),
                        st.mode);
    if (it == run.output_labels.end())
      throw std::invalid_argument("run_program_gaussian: mode " +
                                  std::to_string(st.mode) +
                                  " not present (already measured?)");
    int idx = static_cast<int>(it - run.output_labels.begin()) + 1;

    double shear = to_double(st.shear_strength());
    double offset = to_double(st.offset());
    auto [theta, rescale] = homodyne_basis_of_shear(shear);
    std::optional<double> forced_raw;
    if (!forced.empty()) forced_raw = (forced[k] - offset) / rescale;
    auto res = homodyne(run.state, idx, theta, forced_raw, rng);
    double result = rescale * res.outcome + offset;
    if (st.adapt == AdaptRule::AddPrevious)
      result += to_double(st.adapt_factor) * previous_result;
    previous_result = result;

    run.state = res.state;
    run.output_labels.erase(it);
    run.record.push({ByproductTag::F, st.mode, 0.0, 0});
    run.record.push({ByproductTag::X, st.mode, result, 0});
    run.log.push_back({static_cast<int>(k), st.mode, st.basis_label(),
                       res.outcome, result, false});
  }
  return run;
}

// --- Exact (nullifier) backend -------------------------------------------

struct NullifierRun {
  NullifierSet set;
  ByproductRecord record;
  std::vector<OutcomeLogEntry> log;
  std::vector<Rational> results;  // exact eigenvalues of p + f'(q)
};

inline NullifierRun run_program_nullifier(const Graph& g,
                                          const MeasurementProgram& prog,
                                          const std::vector<Rational>& forced,
                                          std::mt19937_64& rng) {
  prog.validate();
  if (!forced.empty() && forced.size() != prog.steps.size())
    throw std::invalid_argument(
        "run_program_nullifier: forced-outcome count does not match program "
        "length");
  NullifierRun run;
  run.set = standard_nullifiers(g);
  for (std::size_t k = 0; k < prog.steps.size(); ++k) {
    const auto& st = prog.steps[k];
    if (!st.gaussian())
      throw std::invalid_argument(
          "run_program_nullifier: degree-3 measurement is non-Gaussian; use "
          "the photon-number pipeline (run_cubic_gate)");
    Rational result;
    if (!forced.empty()) {
      result = forced[k];
    } else {
      std::normal_distribution<double> dist(0.0, 1.0);
      result = Rational(static_cast<long long>(std::lround(1000.0 * dist(rng))),
                        1000);
    }
    Rational shear = st.shear_strength();
    Observable obs = (shear == 0) ? Observable::P : Observable::PPlusSQ;
    auto mres = measure(run.set, st.mode, obs, result - st.offset(), shear);
    if (mres.eigenstate) result = mres.forced_value + st.offset();
    run.set = mres.set;
    run.record.push({ByproductTag::F, st.mode, 0.0, 0});
    run.record.push({ByproductTag::X, st.mode, to_double(result), result});
    run.results.push_back(result);
    run.log.push_back({static_cast<int>(k), st.mode, st.basis_label(),
                       to_double(result), to_double(result), mres.eigenstate});
  }
  return run;
}

// --- Input attachment -----------------------------------------------------

/// CZ each input mode to its cluster vertex, then measure p on the input
/// mode; the input is teleported onto the cluster with X(m) F recorded per
/// pair.  `pairing[i]` is the cluster vertex for input mode i+1.
inline GaussianRun attach_input_gaussian(const GaussianState& cluster,
                                         const GaussianState& input,
                                         const std::vector<int>& pairing,
                                         const std::vector<double>& forced,
                                         std::mt19937_64& rng) {
  int n = cluster.modes(), k = input.modes();
  if (static_cast<int>(pairing.size()) != k)
    throw std::invalid_argument("attach_input_gaussian: pairing size mismatch");
  std::vector<int> seen;
  for (int v : pairing) {
    if (v < 1 || v > n)
      throw std::invalid_argument("attach_input_gaussian: vertex out of range");
    if (std::find(seen.begin(), seen.end(), v) != seen.end())
      throw std::invalid_argument("attach_input_gaussian: pairing not injective");
    seen.push_back(v);
  }
  if (!forced.empty() && static_cast<int>(forced.size()) != k)
    throw std::invalid_argument("attach_input_gaussian: forced size mismatch");
  GaussianRun run;
  run.state = mbqcdet::tensor_gaussian(cluster, input);
  for (int i = 0; i < k; ++i)
    run.state = apply(cz_op(n + k, n + i + 1, pairing[i]), run.state);
  // Measure the appended input modes from the back so earlier indices and the
  // cluster labels stay stable.
  for (int i = k - 1; i >= 0; --i) {
    std::optional<double> f;
    if (!forced.empty()) f = forced[i];
    auto res = homodyne(run.state, n + i + 1, 0.0, f, rng);
    run.state = res.state;
    run.record.push({ByproductTag::F, pairing[i], 0.0, 0});
    run.record.push({ByproductTag::X, pairing[i], res.outcome, 0});
    run.log.push_back({i, pairing[i], "p", res.outcome, res.outcome, false});
  }
  run.output_labels.resize(n);
  for (int i = 0; i < n; ++i) run.output_labels[i] = i + 1;
  return run;
}

// --- Ideal single-wire teleportation -------------------------------------

/// Run a chain of diagonal gates e^{if(q)} (degree <= 2) down a wire by
/// repeated teleportation: each step applies the gate to the current mode and
/// performs one hop with the given outcome.  accuracy = infinity gives the
/// ideal map; the raw (uncorrected) conditional state is returned.
inline GaussianRun run_wire(const GaussianState& input,
                            const std::vector<MeasurementStep>& gates,
                            double accuracy,
                            const std::vector<double>& outcomes) {
  if (input.modes() != 1)
    throw std::invalid_argument("run_wire: single-mode input required");
  if (outcomes.size() != gates.size())
    throw std::invalid_argument("run_wire: one outcome per gate required");
  GaussianRun run;
  run.state = input;
  run.output_labels = {1};
  SymplecticOp raw_chain = identity_op(1), ideal_chain = identity_op(1);
  for (std::size_t k = 0; k < gates.size(); ++k) {
    const auto& g = gates[k];
    if (!g.gaussian())
      throw std::invalid_argument(
          "run_wire: degree-3 gates go through run_cubic_gate");
    double shear = to_double(g.shear_strength());
    double offset = to_double(g.offset());
    SymplecticOp gate = identity_op(1);
    if (shear != 0.0) gate = gate.then(shear_op(1, 1, shear));
    if (offset != 0.0) gate = gate.then(displace_z_op(1, 1, offset));
    run.state = apply(gate, run.state);
    run.state = teleport_hop(run.state, outcomes[k], accuracy);
    run.record.push({ByproductTag::F, 1, 0.0, 0});
    run.record.push({ByproductTag::X, 1, outcomes[k], 0});
    raw_chain = raw_chain.then(gate)
                    .then(fourier_gate_op(1, 1))
                    .then(displace_x_op(1, 1, outcomes[k]));
    ideal_chain = ideal_chain.then(gate);
    run.log.push_back({static_cast<int>(k), 1, g.basis_label(), outcomes[k],
                       outcomes[k], false});
  }
  run.correction = mbqcdet::inverse_of(ideal_chain).then(raw_chain);
  return run;
}

/// Undo the recorded byproducts (oracle-comparison helper; physically the
/// corrections stay virtual).
inline GaussianState finalize(const GaussianState& raw,
                              const ByproductRecord& record) {
  return apply(mbqcdet::inverse_of(record.to_symplectic(raw.modes())), raw);
}

inline GaussianState finalize(const GaussianState& raw,
                              const SymplecticOp& correction) {
  return apply(mbqcdet::inverse_of(correction), raw);
}

// --- Circuit compilation --------------------------------------------------

struct GateSpec {
  enum Kind { DiagonalQ, Fourier, CZ } kind = DiagonalQ;
  int wire = 1, wire2 = 2;           // CZ uses both
  std::array<Rational, 4> f{};       // DiagonalQ: e^{if(q)}
};

inline GateSpec diagonal_gate(int wire, std::array<Rational, 4> f) {
  return {GateSpec::DiagonalQ, wire, 0, f};
}
inline GateSpec fourier_spec(int wire) { return {GateSpec::Fourier, wire, 0, {}}; }
inline GateSpec cz_spec(int i, int j) { return {GateSpec::CZ, i, j, {}}; }

struct BrickworkLayout {
  Graph graph{1, {}};  // placeholder, replaced by compile_brickwork
  std::vector<int> v_in, v_out;
  MeasurementProgram program;
  // Intrinsic Fouriers from wire hops not consumed by requested Fourier
  // gates; they surface in the run-time byproduct record.
  std::vector<int> residual_fourier;
};

/// Translate a circuit over q-diagonal gates, Fourier and CZ into a graph
/// plus measurement program: one new vertex per diagonal gate, CZ as a direct
/// edge between the current wire ends, Fourier absorbed into the intrinsic
/// per-hop Fourier whenever one is pending.
inline BrickworkLayout compile_brickwork(int wires,
                                         const std::vector<GateSpec>& circuit) {
  if (wires < 1) throw std::invalid_argument("compile_brickwork: no wires");
  std::vector<int> tail(wires);
  int next = 1;
  for (int w = 0; w < wires; ++w) tail[w] = next++;
  BrickworkLayout out;
  out.v_in = tail;
  out.residual_fourier.assign(wires, 0);
  std::vector<std::pair<int, int>> edges;
  for (const auto& gsp : circuit) {
    auto check_wire = [&](int w) {
      if (w < 1 || w > wires)
        throw std::invalid_argument("compile_brickwork: wire out of range");
    };
    switch (gsp.kind) {
      case GateSpec::DiagonalQ: {
        check_wire(gsp.wire);
        int v = next++;
        edges.push_back({tail[gsp.wire - 1], v});
        MeasurementStep st;
        st.mode = tail[gsp.wire - 1];
        st.f = gsp.f;
        if (st.degree() == 3) st.adapt = AdaptRule::Physical;
        out.program.steps.push_back(st);
        tail[gsp.wire - 1] = v;
        out.residual_fourier[gsp.wire - 1] += 1;
        break;
      }
      case GateSpec::Fourier: {
        check_wire(gsp.wire);
        if (out.residual_fourier[gsp.wire - 1] > 0) {
          out.residual_fourier[gsp.wire - 1] -= 1;  // obtained for free
        } else {
          int v = next++;
          edges.push_back({tail[gsp.wire - 1], v});
          out.program.steps.push_back(p_step(tail[gsp.wire - 1]));
          tail[gsp.wire - 1] = v;
        }
        break;
      }
      case GateSpec::CZ: {
        check_wire(gsp.wire);
        check_wire(gsp.wire2);
        if (gsp.wire == gsp.wire2)
          throw std::invalid_argument("compile_brickwork: CZ needs two wires");
        edges.push_back({tail[gsp.wire - 1], tail[gsp.wire2 - 1]});
        break;
      }
    }
  }
  out.v_out = tail;
  out.graph = Graph(next - 1, edges);
  return out;
}

// --- Cubic phase gate pipeline -------------------------------------------

/// Shear strengths realizing S(t) (up to a Fourier) as three quadrature
/// measurements: D(-t) F D(-1/t) F D(-t) = F diag(t, 1/t) with D(s) the
/// shear e^{isq^2/2}.  The intrinsic F of each hop supplies the two interior
/// Fouriers.
inline std::array<double, 3> shear_triple_for_squeeze(double t) {
  if (t <= 0.0)
    throw std::invalid_argument("shear_triple_for_squeeze: t must be > 0");
  return {-t, -1.0 / t, -t};
}

struct CubicGateParams {
  double s = 2.0;      // squeezing of the two resource modes
  double r = 3.0;      // displacement driving the photon count
  int dim = kDefaultFockDim;
  bool squeezers_after_count = true;
};

struct CubicGateRun {
  GridWavefunction state;  // raw conditional output (byproducts not undone)
  int n = 0;
  double gamma = 0.0;
  double t = 1.0;
  double leak = 0.0;
  double count_probability = 0.0;
  ByproductRecord record;
};

/// e^{iaq^3} on a grid wavefunction via photon counting: prepare the cubic
/// resource state (cluster-form circuit), read n, then run the corrected
/// teleportation S(1/t) o [hop onto the cubic resource] o S(t) with
/// t = (a / gamma(n))^(1/3), using S(1/t) chi(q) S(t) = e^{i gamma t^3 q^3}.
/// The single resource hop applies the cubic phase on top of its X(m) F
/// byproduct; conjugating that hop by the squeezers additionally leaves the
/// known Gaussian correction X(m/t) S(1/t^2) F, recorded per-hop as the raw
/// F / X(m) tags (record convention: tags are per-hop, never composed).
/// The squeezers depend on n, so they are only legal after the count
/// (`squeezers_after_count = false` is rejected).
inline CubicGateRun run_cubic_gate(const GridWavefunction& input, double a,
                                   const CubicGateParams& params,
                                   std::optional<int> forced_n,
                                   std::mt19937_64& rng,
                                   double hop_outcome = 0.0) {
  if (!params.squeezers_after_count)
    throw std::invalid_argument(
        "run_cubic_gate: squeezing corrections depend on the photon count and "
        "must be scheduled after it");
  CubicGateRun run;
  auto circuit = run_circuit_cluster(params.s, params.r, params.dim, forced_n,
                                     rng);
  run.n = circuit.n;
  run.leak = circuit.leak;
  run.count_probability = circuit.probability;
  run.gamma = gamma_of_n(run.n);
  run.t = cubic_correction(a, run.n);

  double half_width = -input.q(0);
  GridWavefunction chi = to_grid(circuit.state, half_width, input.size());
  // Under the CZ = e^{+i q q} sign convention the counting circuit imprints
  // e^{-i gamma q^3}; reflecting the resource arm (equivalently driving the
  // count with X(-r)) flips it to +gamma.
  chi = grid_reflect(chi);
  chi.renormalize();

  // S(t) scales <q> by t, i.e. psi(q) -> psi(q/t)/sqrt(t); grid_squeeze(g, u)
  // computes sqrt(u) psi(u q) = S(1/u) psi, so the pre-squeeze S(t) is
  // grid_squeeze(-, 1/t) and the post-squeeze S(1/t) is grid_squeeze(-, t).
  GridWavefunction st = grid_squeeze(input, 1.0 / run.t);
  st = grid_teleport_hop(st, hop_outcome, chi.psi);
  run.record.push({ByproductTag::F, 1, 0.0, 0});
  run.record.push({ByproductTag::X, 1, hop_outcome, 0});
  run.state = grid_squeeze(st, run.t);
  return run;
}

}  // namespace cvc
