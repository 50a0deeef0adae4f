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

// Position-space wavefunctions on a uniform grid.  Used for the non-Gaussian
// teleportation pipeline: the integral transforms are evaluated directly
// (O(N^2)) rather than through an FFT so that the transform can land on
// arbitrary shifted output points without interpolation.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "cvcluster/fock.hpp"

namespace cvc {

constexpr double kDefaultGridHalfWidth = 10.0;
constexpr int kDefaultGridPoints = 2048;

struct GridWavefunction {
  Eigen::VectorXd q;    // uniform sample points
  Eigen::VectorXcd psi; // amplitudes, L2-normalised w.r.t. the spacing
  double spacing = 0.0;

  int size() const { return static_cast<int>(q.size()); }
  double norm2() const { return psi.squaredNorm() * spacing; }
  void renormalize() { psi /= std::sqrt(norm2()); }
};

inline GridWavefunction make_grid(double half_width = kDefaultGridHalfWidth,
                                  int points = kDefaultGridPoints) {
  if (points < 16 || half_width <= 0.0)
    throw std::invalid_argument("make_grid: bad grid parameters");
  GridWavefunction g;
  g.spacing = 2.0 * half_width / points;
  g.q.resize(points);
  for (int i = 0; i < points; ++i) g.q(i) = -half_width + i * g.spacing;
  g.psi = Eigen::VectorXcd::Zero(points);
  return g;
}

/// Sampling of a truncated number-basis state via the harmonic oscillator
/// eigenfunctions phi_n(q) (stable two-term recurrence).
inline GridWavefunction to_grid(const FockState& st,
                                double half_width = kDefaultGridHalfWidth,
                                int points = kDefaultGridPoints) {
  if (st.modes() != 1)
    throw std::invalid_argument("to_grid: single-mode states only");
  GridWavefunction g = make_grid(half_width, points);
  int dim = st.dims[0];
  Eigen::VectorXd prev(points), cur(points), next(points);
  const double pi_quarter = std::pow(std::numbers::pi, -0.25);
  for (int i = 0; i < points; ++i)
    cur(i) = pi_quarter * std::exp(-0.5 * g.q(i) * g.q(i));
  prev.setZero();
  for (int n = 0; n < dim; ++n) {
    g.psi += st.amp(n) * cur;
    next = std::sqrt(2.0 / (n + 1.0)) * g.q.cwiseProduct(cur) -
           std::sqrt(n / (n + 1.0)) * prev;
    prev = cur;
    cur = next;
  }
  return g;
}

/// Target cubic phase wavefunction e^{i a q^3} |0>_p approximated with a
/// broad momentum-squeezed Gaussian envelope exp(-q^2 / (2 w^2)).
inline GridWavefunction cubic_target(double a, double envelope_width,
                                     double half_width = kDefaultGridHalfWidth,
                                     int points = kDefaultGridPoints) {
  GridWavefunction g = make_grid(half_width, points);
  for (int i = 0; i < points; ++i) {
    double q = g.q(i);
    g.psi(i) = std::exp(Complex(-0.5 * q * q / (envelope_width * envelope_width),
                                a * q * q * q));
  }
  g.renormalize();
  return g;
}

/// Largest phase advance per grid cell of e^{i a q^3}; keep below pi/4 to
/// stay clear of aliasing.
inline double cubic_phase_per_cell(double a, double half_width, int points) {
  double spacing = 2.0 * half_width / points;
  return 3.0 * std::abs(a) * half_width * half_width * spacing;
}

namespace griddet {

/// phi_hat(k) = (1/sqrt(2 pi)) Integral phi(q) e^{i q k} dq evaluated at
/// arbitrary points k_j.  Direct O(N M) sum.
inline Eigen::VectorXcd fourier_at(const GridWavefunction& phi,
                                   const Eigen::VectorXd& k) {
  Eigen::VectorXcd out(k.size());
  const double scale = phi.spacing / std::sqrt(2.0 * std::numbers::pi);
  for (Eigen::Index j = 0; j < k.size(); ++j) {
    Complex acc = 0.0;
    for (int m = 0; m < phi.size(); ++m)
      acc += phi.psi(m) * std::exp(Complex(0.0, phi.q(m) * k(j)));
    out(j) = acc * scale;
  }
  return out;
}

}  // namespace griddet

/// Continuous Fourier transform sampled back on the same grid, i.e. the
/// action of F on the wavefunction.
inline GridWavefunction grid_fourier(const GridWavefunction& phi) {
  GridWavefunction out = phi;
  out.psi = griddet::fourier_at(phi, phi.q);
  out.renormalize();  // absorbs the window truncation
  return out;
}

/// One teleportation hop with an ideal |0>_p ancilla carrying an optional
/// diagonal resource phase chi(q): measuring p on the input wire of
/// CZ (phi x chi|0>_p) with outcome m yields (byproduct X(m) F included)
///   psi_out(q) = chi(q) * phi_hat(q - m).
/// Pass chi empty for a plain wire hop.
inline GridWavefunction grid_teleport_hop(const GridWavefunction& phi,
                                          double outcome,
                                          const Eigen::VectorXcd& chi =
                                              Eigen::VectorXcd()) {
  GridWavefunction out = phi;
  Eigen::VectorXd shifted = phi.q.array() - outcome;
  out.psi = griddet::fourier_at(phi, shifted);
  if (chi.size() != 0) {
    if (chi.size() != out.psi.size())
      throw std::invalid_argument("grid_teleport_hop: resource size mismatch");
    out.psi = out.psi.cwiseProduct(chi);
  }
  out.renormalize();
  return out;
}

/// Reflection psi(q) -> psi(-q) by index reversal (the grid is periodic in
/// the FFT sense, so -q(0) aliases onto q(0)).
inline GridWavefunction grid_reflect(const GridWavefunction& g) {
  GridWavefunction out = g;
  int n = g.size();
  for (int i = 0; i < n; ++i) out.psi(i) = g.psi((n - i) % n);
  return out;
}

/// Exact squeeze S(t): psi(q) -> psi(q/t)/sqrt(t), represented by scaling
/// the grid coordinates along with the samples (no interpolation).
inline GridWavefunction grid_scale(const GridWavefunction& g, double t) {
  if (t <= 0.0) throw std::invalid_argument("grid_scale: t must be > 0");
  GridWavefunction out = g;
  out.q = t * g.q;
  out.spacing = t * g.spacing;
  out.psi = g.psi / std::sqrt(t);
  return out;
}

/// exp(i gamma q^3) pointwise at the grid coordinates.
inline void grid_cubic_phase(GridWavefunction& g, double gamma) {
  for (int i = 0; i < g.size(); ++i)
    g.psi(i) *= std::exp(Complex(0.0, gamma * std::pow(g.q(i), 3)));
}

/// exp(i s q^2 / 2) pointwise (shear gate in position space).
inline void grid_shear(GridWavefunction& g, double s) {
  for (int i = 0; i < g.size(); ++i)
    g.psi(i) *= std::exp(Complex(0.0, 0.5 * s * g.q(i) * g.q(i)));
}

/// X(r): psi(q) -> psi(q - r), via cubic interpolation (the states used here
/// satisfy the phase-per-cell bound, so local interpolation is accurate).
inline Eigen::VectorXcd grid_shift_samples(const GridWavefunction& g,
                                           double shift) {
  int n = g.size();
  Eigen::VectorXcd out(n);
  for (int i = 0; i < n; ++i) {
    double src = (g.q(i) - shift - g.q(0)) / g.spacing;
    int k = static_cast<int>(std::floor(src));
    double t = src - k;
    if (k < 1 || k + 2 >= n) {
      out(i) = 0.0;
      continue;
    }
    // Catmull-Rom through the four surrounding samples.
    Complex p0 = g.psi(k - 1), p1 = g.psi(k), p2 = g.psi(k + 1),
            p3 = g.psi(k + 2);
    out(i) = p1 + 0.5 * t * (p2 - p0 +
             t * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
             t * (3.0 * (p1 - p2) + p3 - p0)));
  }
  return out;
}

/// S(t): psi(q) -> sqrt(t) psi(t q) (momentum squeezing for t > 1), again by
/// interpolation onto the same grid.
inline GridWavefunction grid_squeeze(const GridWavefunction& g, double t) {
  if (t <= 0.0) throw std::invalid_argument("grid_squeeze: t must be > 0");
  GridWavefunction out = g;
  GridWavefunction scaled = g;
  for (int i = 0; i < g.size(); ++i) scaled.q(i) = g.q(i) / t;
  // Sample psi at t*q via the shift helper's interpolation machinery.
  int n = g.size();
  for (int i = 0; i < n; ++i) {
    double src = (t * g.q(i) - g.q(0)) / g.spacing;
    int k = static_cast<int>(std::floor(src));
    double u = src - k;
    if (k < 1 || k + 2 >= n) {
      out.psi(i) = 0.0;
      continue;
    }
    Complex p0 = g.psi(k - 1), p1 = g.psi(k), p2 = g.psi(k + 1),
            p3 = g.psi(k + 2);
    out.psi(i) = p1 + 0.5 * u * (p2 - p0 +
                 u * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
                 u * (3.0 * (p1 - p2) + p3 - p0)));
  }
  out.psi *= std::sqrt(t);
  out.renormalize();
  return out;
}

/// |<target | e^{i z q} X(x) psi>| for given displacements.
inline double displaced_overlap(const GridWavefunction& target,
                                const GridWavefunction& psi, double x,
                                double z) {
  Eigen::VectorXcd shifted = grid_shift_samples(psi, x);
  Complex acc = 0.0;
  for (int i = 0; i < psi.size(); ++i)
    acc += std::conj(target.psi(i)) * shifted(i) *
           std::exp(Complex(0.0, z * psi.q(i)));
  return std::abs(acc) * psi.spacing;
}

struct OverlapResult {
  double overlap = 0.0;
  double x = 0.0, z = 0.0;
};

/// Overlap maximised over phase-space displacements: coarse scan followed by
/// coordinate-wise golden-section refinement.
inline OverlapResult optimized_overlap(const GridWavefunction& target,
                                       const GridWavefunction& psi,
                                       double window = 4.0, int coarse = 33) {
  OverlapResult best;
  for (int a = 0; a < coarse; ++a)
    for (int b = 0; b < coarse; ++b) {
      double x = -window + 2.0 * window * a / (coarse - 1);
      double z = -window + 2.0 * window * b / (coarse - 1);
      double v = displaced_overlap(target, psi, x, z);
      if (v > best.overlap) best = {v, x, z};
    }
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double span = 2.0 * window / (coarse - 1);
  for (int round = 0; round < 3; ++round) {
    for (int axis = 0; axis < 2; ++axis) {
      double lo = (axis == 0 ? best.x : best.z) - span;
      double hi = (axis == 0 ? best.x : best.z) + span;
      auto eval = [&](double v) {
        return axis == 0 ? displaced_overlap(target, psi, v, best.z)
                         : displaced_overlap(target, psi, best.x, v);
      };
      double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
      double fc = eval(c), fd = eval(d);
      for (int it = 0; it < 40; ++it) {
        if (fc > fd) {
          hi = d; d = c; fd = fc;
          c = hi - gr * (hi - lo); fc = eval(c);
        } else {
          lo = c; c = d; fc = fd;
          d = lo + gr * (hi - lo); fd = eval(d);
        }
      }
      double arg = 0.5 * (lo + hi), val = eval(arg);
      if (val > best.overlap) {
        best.overlap = val;
        (axis == 0 ? best.x : best.z) = arg;
      }
    }
    span *= 0.25;
  }
  return best;
}

}  // namespace cvc
