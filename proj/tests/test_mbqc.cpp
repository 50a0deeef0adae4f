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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cvcluster/mbqc.hpp"

using namespace cvc;

namespace {

// Weighted least-squares fit of the unwrapped phase of psi to
// c0 + c1 q + c3 q^3 over |q| <= window; returns c3.
double fitted_cubic_coefficient(const GridWavefunction& g, double window) {
  int n = g.size();
  int i0 = 0;
  while (i0 < n && std::abs(g.q(i0)) > window) ++i0;
  std::vector<double> qs, ph, w;
  double prev = std::arg(g.psi(i0)), acc = prev;
  for (int i = i0; i < n && std::abs(g.q(i)) <= window; ++i) {
    double a = std::arg(g.psi(i));
    double d = a - prev;
    while (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
    while (d < -std::numbers::pi) d += 2.0 * std::numbers::pi;
    acc += d;
    prev = a;
    qs.push_back(g.q(i));
    ph.push_back(acc);
    w.push_back(std::norm(g.psi(i)));
  }
  Eigen::MatrixXd A(qs.size(), 3);
  Eigen::VectorXd b(qs.size());
  for (std::size_t k = 0; k < qs.size(); ++k) {
    double sw = std::sqrt(w[k]);
    A(k, 0) = sw;
    A(k, 1) = sw * qs[k];
    A(k, 2) = sw * qs[k] * qs[k] * qs[k];
    b(k) = sw * ph[k];
  }
  return A.colPivHouseholderQr().solve(b)(2);
}

}  // namespace

TEST_CASE("measurement step vocabulary") {
  MeasurementStep st = shear_step(2, Rational(3));
  CHECK(st.degree() == 2);
  CHECK(st.gaussian());
  CHECK(st.shear_strength() == 3);
  CHECK(st.basis_label() == "p + 3 q");
  CHECK(displace_step(1, Rational(1, 2)).basis_label() == "p + 1/2");
  CHECK(cubic_step(1, Rational(1, 10)).degree() == 3);
  CHECK(!cubic_step(1, Rational(1, 10)).gaussian());

  MeasurementProgram prog;
  prog.steps = {p_step(1), p_step(1)};
  CHECK_THROWS_AS(prog.validate(), std::invalid_argument);
}

TEST_CASE("homodyne basis of a sheared measurement") {
  auto [theta, r] = homodyne_basis_of_shear(0.0);
  CHECK(theta == doctest::Approx(0.0));
  CHECK(r == doctest::Approx(1.0));
  auto [t2, r2] = homodyne_basis_of_shear(1.0);
  CHECK(t2 == doctest::Approx(std::numbers::pi / 4));
  CHECK(r2 == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("byproduct record composes to the expected symplectic map") {
  ByproductRecord rec;
  rec.push({ByproductTag::F, 1, 0.0, 0});
  rec.push({ByproductTag::X, 1, 1.5, 0});
  SymplecticOp want = fourier_gate_op(1, 1).then(displace_x_op(1, 1, 1.5));
  SymplecticOp got = rec.to_symplectic(1);
  CHECK((got.L - want.L).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((got.c - want.c).cwiseAbs().maxCoeff() <= 1e-12);
  // F^-1 after F cancels; Reflect is F^2.
  ByproductRecord rec2;
  rec2.push({ByproductTag::F, 1, 0.0, 0});
  rec2.push({ByproductTag::FInverse, 1, 0.0, 0});
  CHECK((rec2.to_symplectic(1).L - Eigen::MatrixXd::Identity(2, 2))
            .cwiseAbs()
            .maxCoeff() <= 1e-12);
  ByproductRecord rec3;
  rec3.push({ByproductTag::Reflect, 1, 0.0, 0});
  CHECK((rec3.to_symplectic(1).L + Eigen::MatrixXd::Identity(2, 2))
            .cwiseAbs()
            .maxCoeff() <= 1e-12);
}

TEST_CASE("nullifier program matches manual measurement calls") {
  Graph g = Graph::linear(3);
  MeasurementProgram prog;
  prog.steps = {p_step(1), shear_step(2, Rational(3, 2))};
  std::vector<Rational> forced{Rational(1, 3), Rational(-2, 5)};
  std::mt19937_64 rng(1);
  auto run = run_program_nullifier(g, prog, forced, rng);

  NullifierSet manual = standard_nullifiers(g);
  manual = measure(manual, 1, Observable::P, forced[0]).set;
  manual =
      measure(manual, 2, Observable::PPlusSQ, forced[1], Rational(3, 2)).set;
  CHECK(same_state(run.set, manual));
  CHECK(run.results == forced);
  REQUIRE(run.record.tags.size() == 4);
  CHECK(run.record.tags[0].kind == ByproductTag::F);
  CHECK(run.record.tags[1].kind == ByproductTag::X);
  CHECK(run.record.tags[1].exact == forced[0]);
  CHECK(run.log[1].basis == "p + 3/2 q");
}

TEST_CASE("nullifier program: eigenstate branch reports the forced value") {
  // After p on mode 1 of a 2-wire, q on mode 2 is sharp at the outcome.
  Graph g = Graph::linear(2);
  auto m = measure(standard_nullifiers(g), 1, Observable::P, Rational(4, 7));
  auto e = measure(m.set, 2, Observable::Q, Rational(0));
  CHECK(e.eigenstate);
  CHECK(e.forced_value == Rational(4, 7));
}

TEST_CASE("gaussian program: forced outcomes land in the log") {
  Graph g = Graph::linear(3);
  MeasurementProgram prog;
  prog.steps = {p_step(1), shear_step(2, Rational(1))};
  std::vector<double> forced{0.25, -1.0};
  std::mt19937_64 rng(2);
  auto run = run_program_gaussian(g, prog, 5.0, forced, rng);
  CHECK(run.state.modes() == 1);
  CHECK(run.output_labels == std::vector<int>{3});
  REQUIRE(run.log.size() == 2);
  CHECK(run.log[0].result == doctest::Approx(0.25));
  CHECK(run.log[1].result == doctest::Approx(-1.0));
  // Raw homodyne value for the sheared basis is rescaled by sqrt(1+s^2).
  CHECK(run.log[1].outcome ==
        doctest::Approx((-1.0 - 0.0) / std::sqrt(2.0)));
  CHECK_THROWS_AS(run_program_gaussian(g, prog, 5.0, {1.0}, rng),
                  std::invalid_argument);
  MeasurementProgram bad;
  bad.steps = {cubic_step(1, Rational(1, 10))};
  CHECK_THROWS_AS(run_program_gaussian(g, bad, 5.0, {}, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_program_nullifier(g, bad, {}, rng),
                  std::invalid_argument);
}

TEST_CASE("gaussian program: commuting steps can be reordered") {
  Graph g = Graph::square_lattice(2, 3);
  std::mt19937_64 rng(3);
  MeasurementProgram ab, ba;
  ab.steps = {shear_step(1, Rational(1, 2)), p_step(5)};
  ba.steps = {p_step(5), shear_step(1, Rational(1, 2))};
  auto r1 = run_program_gaussian(g, ab, 4.0, {0.3, -0.7}, rng);
  auto r2 = run_program_gaussian(g, ba, 4.0, {-0.7, 0.3}, rng);
  CHECK((r1.state.mean - r2.state.mean).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK((r1.state.cov - r2.state.cov).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("input attachment onto a single vertex is one teleport hop") {
  double s = 3.0;
  GaussianState cluster = canonical_cluster(Graph(1, {}), s);
  GaussianState in = vacuum(1);
  in = apply(displace_x_op(1, 1, 0.6), in);
  in = apply(shear_op(1, 1, -0.8), in);
  double m = 0.9;
  std::mt19937_64 rng(4);
  auto run = attach_input_gaussian(cluster, in, {1}, {m}, rng);
  GaussianState want = teleport_hop(in, m, s);
  CHECK((run.state.mean - want.mean).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((run.state.cov - want.cov).cwiseAbs().maxCoeff() <= 1e-12);
  REQUIRE(run.record.tags.size() == 2);
  CHECK(run.record.tags[0].kind == ByproductTag::F);
  CHECK(run.record.tags[1].value == doctest::Approx(m));

  CHECK_THROWS_AS(attach_input_gaussian(cluster, in, {2}, {m}, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(attach_input_gaussian(cluster, in, {1, 1}, {m}, rng),
                  std::invalid_argument);
}

TEST_CASE("wire execution equals the byproduct chain applied directly") {
  GaussianState in = vacuum(1);
  in = apply(displace_x_op(1, 1, 0.3), in);
  double inf = std::numeric_limits<double>::infinity();
  std::vector<MeasurementStep> gates = {shear_step(1, Rational(2)),
                                        displace_step(1, Rational(-1, 2))};
  std::vector<double> m{0.7, -1.1};
  auto run = run_wire(in, gates, inf, m);

  SymplecticOp d1 = shear_op(1, 1, 2.0);
  SymplecticOp d2 = displace_z_op(1, 1, -0.5);
  SymplecticOp chain = d1.then(fourier_gate_op(1, 1))
                           .then(displace_x_op(1, 1, m[0]))
                           .then(d2)
                           .then(fourier_gate_op(1, 1))
                           .then(displace_x_op(1, 1, m[1]));
  GaussianState want = apply(chain, in);
  CHECK((run.state.mean - want.mean).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK((run.state.cov - want.cov).cwiseAbs().maxCoeff() <= 1e-9);

  // Undoing the exact accumulated correction recovers the ideal gate chain.
  REQUIRE(run.correction.has_value());
  GaussianState ideal = apply(d1.then(d2), in);
  GaussianState fixed = finalize(run.state, *run.correction);
  CHECK((fixed.mean - ideal.mean).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK((fixed.cov - ideal.cov).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("finalize undoes a plain X/F record") {
  GaussianState in = vacuum(1);
  in = apply(displace_z_op(1, 1, 0.4), in);
  auto run = run_wire(in, {p_step(1)}, std::numeric_limits<double>::infinity(),
                      {1.2});
  GaussianState fixed = finalize(run.state, run.record);
  CHECK((fixed.mean - in.mean).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK((fixed.cov - in.cov).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("brickwork compilation") {
  std::vector<GateSpec> circuit = {
      diagonal_gate(1, {Rational(0), Rational(0), Rational(1, 2), Rational(0)}),
      fourier_spec(1),
      cz_spec(1, 2),
      diagonal_gate(2, {Rational(0), Rational(1), Rational(0), Rational(0)}),
  };
  BrickworkLayout bw = compile_brickwork(2, circuit);
  CHECK(bw.graph.mode_count() == 4);
  CHECK(bw.v_in == std::vector<int>{1, 2});
  CHECK(bw.v_out == std::vector<int>{3, 4});
  // Wire-1 gate hop, the CZ bridge, wire-2 gate hop.
  CHECK(bw.graph.has_edge(1, 3));
  CHECK(bw.graph.has_edge(2, 3));
  CHECK(bw.graph.has_edge(2, 4));
  CHECK(bw.graph.edge_count() == 3);
  REQUIRE(bw.program.steps.size() == 2);
  CHECK(bw.program.steps[0].mode == 1);
  CHECK(bw.program.steps[1].mode == 2);
  // The requested Fourier was consumed by the hop's intrinsic one.
  CHECK(bw.residual_fourier == std::vector<int>{0, 1});

  // A Fourier with no pending hop becomes an explicit p-measurement vertex.
  BrickworkLayout lone = compile_brickwork(1, {fourier_spec(1)});
  CHECK(lone.graph.mode_count() == 2);
  REQUIRE(lone.program.steps.size() == 1);
  CHECK(lone.program.steps[0].degree() == 0);

  CHECK_THROWS_AS(compile_brickwork(0, {}), std::invalid_argument);
  CHECK_THROWS_AS(compile_brickwork(1, {cz_spec(1, 1)}), std::invalid_argument);
}

TEST_CASE("grid: vacuum round trips and Fourier invariance") {
  GridWavefunction v = to_grid(fock_vacuum({10}));
  CHECK(v.norm2() == doctest::Approx(1.0).epsilon(1e-9));
  // Vacuum is Fourier-invariant.
  GridWavefunction fv = grid_fourier(v);
  CHECK((fv.psi - v.psi).cwiseAbs().maxCoeff() <= 1e-9);
  // Moment check: <q^2> = 1/2.
  double q2 = 0.0;
  for (int i = 0; i < v.size(); ++i)
    q2 += v.q(i) * v.q(i) * std::norm(v.psi(i)) * v.spacing;
  CHECK(q2 == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("grid teleport hop reproduces X(m) F on a displaced state") {
  // Input e^{ip0 q} vacuum (momentum kick); after X(m) F its <q> = -p0 + m.
  GridWavefunction in = to_grid(fock_vacuum({10}));
  double p0 = 0.8, m = 1.1;
  for (int i = 0; i < in.size(); ++i)
    in.psi(i) *= std::exp(Complex(0.0, p0 * in.q(i)));
  GridWavefunction out = grid_teleport_hop(in, m);
  double qbar = 0.0;
  for (int i = 0; i < out.size(); ++i)
    qbar += out.q(i) * std::norm(out.psi(i)) * out.spacing;
  CHECK(qbar == doctest::Approx(-p0 + m).epsilon(1e-6));
}

TEST_CASE("grid reflection and scaling") {
  GridWavefunction g = to_grid(fock_vacuum({10}));
  for (int i = 0; i < g.size(); ++i)
    g.psi(i) *= std::exp(Complex(0.0, 0.2 * std::pow(g.q(i), 3)));
  GridWavefunction r = grid_reflect(g);
  // Reflection conjugates an even-envelope cubic-phase state.
  double c3 = fitted_cubic_coefficient(g, 2.0);
  double c3r = fitted_cubic_coefficient(r, 2.0);
  CHECK(c3 == doctest::Approx(0.2).epsilon(1e-3));
  CHECK(c3r == doctest::Approx(-0.2).epsilon(1e-3));

  GridWavefunction s = grid_scale(g, 2.0);
  CHECK(s.norm2() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(s.q(0) == doctest::Approx(2.0 * g.q(0)));
  CHECK_THROWS_AS(grid_scale(g, 0.0), std::invalid_argument);
}

TEST_CASE("squeezer sandwich realizes the cubic rescaling identity") {
  // S(1/t) e^{i gamma q^3} S(t) = e^{i gamma t^3 q^3} acting on a broad
  // envelope, verified pointwise on the exact-scaled grid.
  double gamma = 0.04, t = 1.4;
  GridWavefunction in = cubic_target(0.0, 3.0);
  GridWavefunction lhs = grid_scale(in, t);
  grid_cubic_phase(lhs, gamma);
  lhs = grid_scale(lhs, 1.0 / t);
  GridWavefunction rhs = in;
  grid_cubic_phase(rhs, gamma * t * t * t);
  double err = 0.0;
  for (int i = 0; i < in.size(); ++i)
    if (std::abs(in.q(i)) <= 5.0)
      err = std::max(err, std::abs(lhs.psi(i) - rhs.psi(i)));
  CHECK(err <= 1e-10);
}

TEST_CASE("shear triple composes to squeeze-then-Fourier") {
  for (double t : {0.7, 1.8}) {
    auto d = shear_triple_for_squeeze(t);
    SymplecticOp got = shear_op(1, 1, d[0])
                           .then(fourier_gate_op(1, 1))
                           .then(shear_op(1, 1, d[1]))
                           .then(fourier_gate_op(1, 1))
                           .then(shear_op(1, 1, d[2]));
    SymplecticOp want = squeeze_op(1, 1, t).then(fourier_gate_op(1, 1));
    CHECK((got.L - want.L).cwiseAbs().maxCoeff() <= 1e-12);
  }
  CHECK_THROWS_AS(shear_triple_for_squeeze(0.0), std::invalid_argument);
}

TEST_CASE("cubic gate pipeline: structure and bookkeeping") {
  std::mt19937_64 rng(6);
  GridWavefunction in = to_grid(fock_vacuum({10}));
  CubicGateParams params;  // s = 2, r = 3, dim = 40
  auto run = run_cubic_gate(in, 0.05, params, 2, rng);
  CHECK(run.n == 2);
  CHECK(run.gamma == doctest::Approx(gamma_of_n(2)));
  CHECK(run.gamma * std::pow(run.t, 3) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(run.state.norm2() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(run.count_probability > 0.0);
  REQUIRE(run.record.tags.size() == 2);
  CHECK(run.record.tags[0].kind == ByproductTag::F);
  CHECK(run.record.tags[1].kind == ByproductTag::X);

  CubicGateParams early = params;
  early.squeezers_after_count = false;
  CHECK_THROWS_AS(run_cubic_gate(in, 0.05, early, 2, rng),
                  std::invalid_argument);
}

TEST_CASE("conditional resource state carries the predicted cubic phase") {
  // Convergent regime (displacement >> squeezing): the fitted coefficient
  // approaches gamma(n) from above; at s=3, r=9, n=12 the measured ratio is
  // 1.0486 (frozen bring-up value), inside the 5% band.  n = 0 would be
  // exactly Gaussian (vacuum projection of a Gaussian state) and carries no
  // cubic phase at all, so small counts are excluded by construction here.
  std::mt19937_64 rng(7);
  auto res = run_circuit_cluster(3.0, 9.0, 100, 12, rng);
  GridWavefunction g = grid_reflect(to_grid(res.state));
  g.renormalize();
  double ratio = fitted_cubic_coefficient(g, 3.5) / gamma_of_n(12);
  CHECK(ratio == doctest::Approx(1.0486).epsilon(2e-3));
  CHECK(std::abs(ratio - 1.0) <= 0.05);
}
