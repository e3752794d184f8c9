#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "curve.hpp"
#include "errors.hpp"

namespace ohara {

struct EnergyParams {
  double alpha = 2.0;
  double p = 1.0;
  double beta = 1.0;  // Hoelder weight exponent

  double sigma() const { return (alpha * p - 1.0) / (2.0 * p); }
  // Exponent of the leading |ds| power of the density near the diagonal.
  double diagonal_exponent() const { return (2.0 - alpha) * p; }

  static EnergyParams make(double alpha, double p, std::optional<double> beta = std::nullopt) {
    require(std::isfinite(alpha) && std::isfinite(p), "alpha and p must be finite");
    const double ap = alpha * p;
    require(ap >= 2.0 && ap < 2.0 * p + 1.0, "constraint 2 <= alpha*p < 2p+1 violated");
    require(p >= 1.0, "p >= 1 required");
    require(alpha > 0.0, "alpha > 0 required");
    EnergyParams e{alpha, p, beta.value_or(std::min(alpha / 2.0, 1.0))};
    require(e.beta > 0.0 && e.beta <= 1.0, "beta must lie in (0, 1]");
    return e;
  }
};

struct PhiAlpha {
  double value, first, second;
};

// phi_a(t) = 1 - (1+t)^(-a/2), evaluated without cancellation at small t.
inline PhiAlpha phi_alpha(double t, double alpha) {
  if (!(t >= 0.0)) throw ValidationError("phi_alpha: argument must be >= 0");
  const double h = 0.5 * alpha;
  const double l = std::log1p(t);
  return {-std::expm1(-h * l), h * std::exp(-(h + 1.0) * l), -h * (h + 1.0) * std::exp(-(h + 2.0) * l)};
}

inline Vec endpoint_difference(const Field& u, const PairFrame& pair) {
  return u.value(pair.first) - u.value(pair.second);
}

// K(u,v) = du.dv / |df|^2 from endpoint differences.
inline double k_bilinear(const Vec& du, const Vec& dv, const PairFrame& pair) {
  return du.dot(dv) / (pair.chord * pair.chord);
}

inline double k_bilinear(const Field& u, const Field& v, const PairFrame& pair) {
  return k_bilinear(endpoint_difference(u, pair), endpoint_difference(v, pair), pair);
}

// N(u,v) from the arc integrals of u, v and of the pointwise product u.v.
inline double n_from_integrals(double int_uv, const Vec& int_u, const Vec& int_v, const PairFrame& pair) {
  return (pair.ds * int_uv - int_u.dot(int_v)) / (pair.chord * pair.chord);
}

// uv must be inner_product(u, v).
inline double n_bilinear(const Field& u, const Field& v, const Field& uv, const PairFrame& pair) {
  return n_from_integrals(uv.scalar_integral(pair), u.integral(pair), v.integral(pair), pair);
}

inline double n_bilinear(const Field& u, const Field& v, const PairFrame& pair) {
  return n_bilinear(u, v, inner_product(u, v), pair);
}

// N(tau) = D^2/|df|^2 - 1: the tangent integrates to df exactly and |tau|^2
// integrates to ds on an arclength grid.
inline double n_tau(const PairFrame& pair) {
  const double c = pair.chord;
  return (pair.distance - c) * (pair.distance + c) / (c * c);
}

inline double clamp_n_tau(double t) {
  if (t < -1e-12) throw NumericalError("N(tau) negative beyond roundoff: " + std::to_string(t));
  return std::max(t, 0.0);
}

inline double m_alpha(const PairFrame& pair, const EnergyParams& e) {
  return phi_alpha(clamp_n_tau(n_tau(pair)), e.alpha).value / std::pow(pair.chord, e.alpha);
}

inline double density(const PairFrame& pair, const EnergyParams& e) {
  return std::pow(m_alpha(pair, e), e.p);
}

inline double weighted_density(const PairFrame& pair, const EnergyParams& e, double beta) {
  return std::pow(pair.distance, (e.alpha - 2.0 * beta) * e.p) * density(pair, e);
}

// A closed curve sampled on a fixed material grid, not necessarily at unit
// speed. Used to differentiate the energy in material coordinates.
class MaterialCurve {
 public:
  // Positions are base + displacement; the two are kept apart so that chords
  // of close pairs are differenced before they are summed.
  MaterialCurve(double period, Samples base, Samples displacement)
      : base_(std::move(base)), displacement_(std::move(displacement)),
        positions_(period, base_ + displacement_), tangents_(positions_.derivative()) {
    require(base_.rows() == displacement_.rows() && base_.cols() == displacement_.cols(),
            "material curve shape mismatch");
    const std::size_t M = positions_.size();
    Samples speed(static_cast<Eigen::Index>(M), 1);
    for (std::size_t i = 0; i < M; ++i) speed(static_cast<Eigen::Index>(i), 0) = tangents_.row(i).norm();
    speed_ = Field(period, std::move(speed));
    length_ = speed_.mean()(0) * period;
    require(length_ > 0.0, "material curve has zero length");
  }

  std::size_t size() const { return positions_.size(); }
  double length() const { return length_; }
  double speed(std::size_t i) const { return speed_.samples()(static_cast<Eigen::Index>(i), 0); }
  const Field& positions() const { return positions_; }

  double chord(std::size_t i, std::size_t j) const {
    const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
    return ((base_.row(a) - base_.row(b)) + (displacement_.row(a) - displacement_.row(b))).norm();
  }

  // Shorter arclength between material nodes i and j. The index offset is
  // reduced first so that close pairs never subtract two large primitives.
  double distance(std::size_t i, std::size_t j) const {
    const long M = static_cast<long>(size());
    long k = ((static_cast<long>(i) - static_cast<long>(j)) % M + M) % M;
    if (k > M / 2) k -= M;
    const auto& q = speed_.primitive_samples();
    const double arc = speed_.mean()(0) * positions_.spacing() * static_cast<double>(k) +
                       q(static_cast<Eigen::Index>(i), 0) - q(static_cast<Eigen::Index>(j), 0);
    const double d = std::abs(arc);
    return d > 0.5 * length_ ? length_ - d : d;
  }

  double n_tau(std::size_t i, std::size_t j) const {
    const double c = chord(i, j), d = distance(i, j);
    if (c < 1e-9 * length_) throw NumericalError("perturbed curve is not bi-Lipschitz at this resolution");
    return (d - c) * (d + c) / (c * c);
  }

  double m_alpha(std::size_t i, std::size_t j, const EnergyParams& e) const {
    return phi_alpha(clamp_n_tau(n_tau(i, j)), e.alpha).value / std::pow(chord(i, j), e.alpha);
  }

 private:
  Samples base_, displacement_;
  Field positions_;
  Field tangents_;
  Field speed_;
  double length_ = 0.0;
};

// Density pulled back to material coordinates, including the area Jacobian.
inline double density_general_param(const MaterialCurve& g, std::size_t i, std::size_t j, const EnergyParams& e) {
  return std::pow(g.m_alpha(i, j, e), e.p) * g.speed(i) * g.speed(j);
}

inline MaterialCurve perturbed(const ClosedCurve& curve, const Field& phi, double eps) {
  require(phi.size() == curve.size() && phi.dim() == curve.dimension(), "perturbation shape mismatch");
  return MaterialCurve(curve.length(), curve.positions().samples(), eps * phi.samples());
}

}  // namespace ohara
