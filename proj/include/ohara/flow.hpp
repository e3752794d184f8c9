#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "curve.hpp"
#include "kernels.hpp"
#include "quadrature.hpp"
#include "variations.hpp"

namespace ohara {

// L^2-orthonormal trigonometric fields on [0, L): mode 0 is constant, then
// cos and sin pairs for modes 1..K, one set per coordinate.
inline std::vector<Field> trig_basis(const ClosedCurve& curve, std::size_t modes) {
  const std::size_t M = curve.size();
  const int n = curve.dimension();
  require(modes <= M / 2 - 1, "basis size K must be below M/2");
  const double L = curve.length();
  std::vector<Field> basis;
  for (int c = 0; c < n; ++c)
    for (std::size_t k = 0; k <= modes; ++k)
      for (int part = 0; part < (k == 0 ? 1 : 2); ++part) {
        Samples v = Samples::Zero(static_cast<Eigen::Index>(M), n);
        for (std::size_t i = 0; i < M; ++i) {
          const double t = 2.0 * std::numbers::pi * static_cast<double>(k * i) / static_cast<double>(M);
          v(static_cast<Eigen::Index>(i), c) =
              k == 0 ? 1.0 / std::sqrt(L) : std::sqrt(2.0 / L) * (part == 0 ? std::cos(t) : std::sin(t));
        }
        basis.emplace_back(L, std::move(v));
      }
  return basis;
}

struct Gradient {
  Field field;                        // sum_k dE[b_k] b_k
  std::vector<double> coefficients;   // dE[b_k], basis order of trig_basis
  double norm = 0.0;                  // L^2 norm of field
};

inline double l2_inner(const Field& a, const Field& b) {
  return a.spacing() * (a.samples().array() * b.samples().array()).sum();
}

inline Gradient l2_gradient(const ClosedCurve& curve, const EnergyParams& e, std::size_t modes,
                            const QuadratureOptions& opt = {}) {
  const auto basis = trig_basis(curve, modes);
  std::vector<Perturbation> perts;
  perts.reserve(basis.size());
  for (const auto& b : basis) perts.emplace_back(curve, b);
  std::vector<const Perturbation*> ptrs;
  for (const auto& p : perts) ptrs.push_back(&p);
  const auto res = first_variations(curve, ptrs, e, opt);
  Samples g = Samples::Zero(static_cast<Eigen::Index>(curve.size()), curve.dimension());
  Gradient out;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    out.coefficients.push_back(res[k].value);
    g += res[k].value * basis[k].samples();
  }
  out.field = Field(curve.length(), std::move(g));
  out.norm = std::sqrt(l2_inner(out.field, out.field));
  return out;
}

struct FlowOptions {
  std::size_t modes = 8;
  bool fix_length = true;
  double initial_dt = -1.0;  // < 0: first trial moves at most 1% of L
  double dt_min = 1e-14;
  double growth = 1.5;
  QuadratureOptions quadrature;
};

struct FlowState {
  ClosedCurve curve;
  std::size_t step = 0;  // accepted steps
  double dt = 0.0;
  double target_length = 0.0;
  std::vector<double> energy;
  std::vector<double> grad_norm;
  std::vector<double> dts;  // dt of each accepted step
  bool halted = false;
  std::string diagnostic;
};

inline FlowState start_flow(const ClosedCurve& curve, const EnergyParams& e, const FlowOptions& opt = {}) {
  FlowState s{curve};
  s.target_length = curve.length();
  s.dt = opt.initial_dt;  // dt = 0 makes every step the identity
  s.energy.push_back(energy(curve, e, opt.quadrature).value);
  return s;
}

inline ClosedCurve rescaled(const ClosedCurve& curve, double length) {
  const Samples& x = curve.positions().samples();
  const Eigen::RowVectorXd centre = x.colwise().mean();
  Samples y = (x.rowwise() - centre) * (length / curve.length());
  y.rowwise() += centre;
  return ClosedCurve::from_samples(y, true, curve.size());
}

// One accepted descent step f <- f - dt g, halving dt until the energy does
// not increase. With fix_length the dilation component of g is removed and
// the result is rescaled to the initial length.
inline FlowState flow_step(FlowState state, const EnergyParams& e, const FlowOptions& opt = {}) {
  if (state.halted || state.dt == 0.0) return state;
  const ClosedCurve& f = state.curve;
  Gradient g = l2_gradient(f, e, opt.modes, opt.quadrature);
  Samples dir = g.field.samples();
  if (opt.fix_length) {
    const Samples& x = f.positions().samples();
    const Eigen::RowVectorXd centre = x.colwise().mean();
    const Field d(f.length(), Samples(x.rowwise() - centre));
    const Field gf(f.length(), dir);
    dir -= (l2_inner(gf, d) / l2_inner(d, d)) * d.samples();
  }
  const double e0 = state.energy.back();
  double sup = 0.0;
  for (Eigen::Index i = 0; i < dir.rows(); ++i) sup = std::max(sup, dir.row(i).norm());
  if (state.dt < 0.0) state.dt = 0.01 * f.length() / std::max(sup, 1e-300);
  for (double dt = state.dt; dt >= opt.dt_min; dt *= 0.5) {
    double e1 = std::numeric_limits<double>::infinity();
    std::optional<ClosedCurve> trial;
    try {
      trial = ClosedCurve::from_samples(f.positions().samples() - dt * dir, true, f.size());
      if (opt.fix_length) trial = rescaled(*trial, state.target_length);
      e1 = energy(*trial, e, opt.quadrature).value;
    } catch (const std::exception&) {
      continue;  // not an embedding at this resolution: reject
    }
    if (e1 <= e0) {
      state.curve = std::move(*trial);
      state.energy.push_back(e1);
      state.grad_norm.push_back(g.norm);
      state.dts.push_back(dt);
      ++state.step;
      state.dt = dt * opt.growth;
      return state;
    }
  }
  state.halted = true;
  char buf[160];
  std::snprintf(buf, sizeof buf, "flow halted: dt fell below %.3g at step %zu without decreasing the energy",
                opt.dt_min, state.step);
  state.diagnostic = buf;
  return state;
}

// L^2 distance of positions after the best rotation and translation of a onto
// b, minimized also over cyclic index shifts. Both curves need the same M.
inline double rigid_distance(const ClosedCurve& a, const ClosedCurve& b) {
  require(a.size() == b.size() && a.dimension() == b.dimension(), "rigid_distance: curves must share M and dimension");
  const Samples& x = a.positions().samples();
  const Samples& y0 = b.positions().samples();
  const Eigen::Index M = x.rows();
  const Eigen::RowVectorXd cx = x.colwise().mean();
  const Eigen::MatrixXd X = x.rowwise() - cx;
  const double h = a.spacing();
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index shift = 0; shift < M; ++shift) {
    Eigen::MatrixXd Y(M, y0.cols());
    for (Eigen::Index i = 0; i < M; ++i) Y.row(i) = y0.row((i + shift) % M);
    Y = Y.rowwise() - Y.colwise().mean();
    const Eigen::MatrixXd C = X.transpose() * Y;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::MatrixXd D = Eigen::MatrixXd::Identity(C.rows(), C.cols());
    if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0) D(C.rows() - 1, C.rows() - 1) = -1.0;
    const Eigen::MatrixXd R = svd.matrixV() * D * svd.matrixU().transpose();
    const double d2 = ((X * R.transpose()) - Y).squaredNorm();
    best = std::min(best, d2);
  }
  return std::sqrt(h * best);
}

}  // namespace ohara
