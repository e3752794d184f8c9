#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "curve.hpp"
#include "kernels.hpp"
#include "quadrature.hpp"
#include "variations.hpp"

namespace ohara {

// Richardson extrapolation of values at h, h/2, h/4, ... assuming an error
// expansion in powers of h^step.
inline double richardson(const std::vector<double>& values, double step = 2.0) {
  std::vector<double> t = values;
  for (std::size_t j = 1; j < t.size(); ++j) {
    const double f = std::pow(2.0, step * static_cast<double>(j));
    for (std::size_t k = t.size() - 1; k >= j; --k) t[k] = t[k] + (t[k] - t[k - 1]) / (f - 1.0);
  }
  return t.back();
}

inline double default_fd_step(const ClosedCurve& curve, const Field& phi) {
  const double s = phi.sup_norm();
  return s > 0.0 ? 1e-5 * curve.length() / s : 1e-5 * curve.length();
}

inline double energy_of_displaced(const ClosedCurve& curve, const Samples& displacement, const EnergyParams& e,
                                  const QuadratureOptions& opt, double eps) {
  try {
    const auto moved = ClosedCurve::from_samples(curve.positions().samples() + displacement, true, curve.size());
    return energy(moved, e, opt).value;
  } catch (const std::exception& ex) {
    throw NumericalError("perturbed curve rejected at eps = " + std::to_string(eps) + ": " + ex.what());
  }
}

struct FdResult {
  double eps = 0.0;
  double fd = 0.0;       // central difference at eps
  double fd_half = 0.0;  // central difference at eps/2
  double richardson = 0.0;
};

// d/de E(f + e phi) at 0 from energies of the resampled perturbed curves.
inline FdResult fd_energy_gradient(const ClosedCurve& curve, const Field& phi, const EnergyParams& e, double eps = 0.0,
                                   const QuadratureOptions& opt = {}) {
  if (eps <= 0.0) eps = default_fd_step(curve, phi);
  auto central = [&](double h) {
    return (energy_of_displaced(curve, h * phi.samples(), e, opt, h) -
            energy_of_displaced(curve, -h * phi.samples(), e, opt, -h)) / (2.0 * h);
  };
  FdResult r;
  r.eps = eps;
  r.fd = central(eps);
  r.fd_half = central(0.5 * eps);
  r.richardson = (4.0 * r.fd_half - r.fd) / 3.0;
  return r;
}

// d^2/de1 de2 E(f + e1 phi + e2 psi) at 0 from the four corner points of the
// 3x3 stencil (the others carry zero weight for the mixed derivative).
inline FdResult fd_energy_hessian(const ClosedCurve& curve, const Field& phi, const Field& psi, const EnergyParams& e,
                                  double eps = 0.0, const QuadratureOptions& opt = {}) {
  // Roundoff in E is amplified by 1/eps^2 here, so the step is 100x the
  // first-order default.
  if (eps <= 0.0) eps = 100.0 * std::max(default_fd_step(curve, phi), default_fd_step(curve, psi));
  auto mixed = [&](double h) {
    auto E = [&](double a, double b) {
      return energy_of_displaced(curve, a * phi.samples() + b * psi.samples(), e, opt, h);
    };
    return (E(h, h) - E(h, -h) - E(-h, h) + E(-h, -h)) / (4.0 * h * h);
  };
  FdResult r;
  r.eps = eps;
  r.fd = mixed(eps);
  r.fd_half = mixed(0.5 * eps);
  r.richardson = (4.0 * r.fd_half - r.fd) / 3.0;
  return r;
}

// Pointwise oracle for G at a grid pair: central differences of the
// Jacobian-weighted material density.
inline FdResult fd_first_variation_density(const ClosedCurve& curve, const Field& phi, std::size_t i, std::size_t j,
                                           const EnergyParams& e, double eps = 0.0) {
  if (eps <= 0.0) eps = default_fd_step(curve, phi);
  auto central = [&](double h) {
    return (density_general_param(perturbed(curve, phi, h), i, j, e) -
            density_general_param(perturbed(curve, phi, -h), i, j, e)) / (2.0 * h);
  };
  FdResult r;
  r.eps = eps;
  r.fd = central(eps);
  r.fd_half = central(0.5 * eps);
  r.richardson = (4.0 * r.fd_half - r.fd) / 3.0;
  return r;
}

inline FdResult fd_second_variation_density(const ClosedCurve& curve, const Field& phi, const Field& psi,
                                            std::size_t i, std::size_t j, const EnergyParams& e, double eps) {
  auto mixed = [&](double h) {
    auto g = [&](double a, double b) {
      return density_general_param(
          MaterialCurve(curve.length(), curve.positions().samples(), a * phi.samples() + b * psi.samples()), i, j, e);
    };
    return (g(h, h) - g(h, -h) - g(-h, h) + g(-h, -h)) / (4.0 * h * h);
  };
  FdResult r;
  r.eps = eps;
  r.fd = mixed(eps);
  r.fd_half = mixed(0.5 * eps);
  r.richardson = (4.0 * r.fd_half - r.fd) / 3.0;
  return r;
}

enum class LimitKind { m_alpha, r1, r2, s1, s2, s3, s4, s5, n_tangent, n_derivative, k_tangent, chord_ratio, chord_ratio2 };

inline std::string limit_name(LimitKind k) {
  switch (k) {
    case LimitKind::m_alpha: return "M_alpha";
    case LimitKind::r1: return "R1";
    case LimitKind::r2: return "R2";
    case LimitKind::s1: return "S1";
    case LimitKind::s2: return "S2";
    case LimitKind::s3: return "S3";
    case LimitKind::s4: return "S4";
    case LimitKind::s5: return "S5";
    case LimitKind::n_tangent: return "N_tau";
    case LimitKind::n_derivative: return "N_dphi_dpsi";
    case LimitKind::k_tangent: return "K_f_phi";
    case LimitKind::chord_ratio: return "chord_ratio";
    case LimitKind::chord_ratio2: return "chord_ratio2";
  }
  return "?";
}

inline LimitKind parse_limit(const std::string& s) {
  for (int k = 0; k <= static_cast<int>(LimitKind::chord_ratio2); ++k)
    if (limit_name(static_cast<LimitKind>(k)) == s) return static_cast<LimitKind>(k);
  throw ValidationError("unknown limit kind: " + s);
}

struct LimitReport {
  std::string which;
  double s = 0.0;
  std::vector<std::pair<double, double>> samples;  // (|ds|, weighted value)
  double extrapolated = 0.0;
  double reference = 0.0;
  double scale = 0.0;  // magnitude of the closed form with every dot product replaced by norms
  double gap = 0.0;
  double relative_gap = 0.0;  // gap / max(|reference|, scale)
};

struct DiagonalPoint {
  Vec tau, kappa, d1a, d2a, d1b, d2b;  // tau, kappa, phi', phi'', psi', psi'' at s
};

// Closed forms of the weighted diagonal limits and their magnitude scales.
inline std::pair<double, double> diagonal_reference(LimitKind which, const DiagonalPoint& q, const EnergyParams& e) {
  const double k2 = q.kappa.squaredNorm(), k = std::sqrt(k2);
  const double ta = q.tau.dot(q.d1a), tb = q.tau.dot(q.d1b);
  const double na = q.d1a.norm(), nb = q.d1b.norm(), n2a = q.d2a.norm(), n2b = q.d2b.norm();
  const double sixth = 1.0 / 6.0;
  switch (which) {
    case LimitKind::m_alpha: return {e.alpha / 24.0 * k2, e.alpha / 24.0 * k2};
    case LimitKind::r1: return {-sixth * ta * k2, sixth * na * k2};
    case LimitKind::r2: return {sixth * q.kappa.dot(q.d2a), sixth * k * n2a};
    case LimitKind::s1:
      return {-sixth * (q.d1a.dot(q.d1b) - 2.0 * ta * tb) * k2, 3.0 * sixth * na * nb * k2};
    case LimitKind::s2:
      return {-sixth * ta * (q.kappa.dot(q.d2b) - tb * k2) - sixth * tb * (q.kappa.dot(q.d2a) - ta * k2),
              sixth * (na * (k * n2b + nb * k2) + nb * (k * n2a + na * k2))};
    case LimitKind::s3:
      return {-sixth * (tb * q.kappa.dot(q.d2a) + ta * q.kappa.dot(q.d2b)), sixth * (nb * k * n2a + na * k * n2b)};
    case LimitKind::s4: return {sixth * q.d2a.dot(q.d2b), sixth * n2a * n2b};
    case LimitKind::s5:
      return {-sixth * (q.tau.dot(q.d2a) + q.d1a.dot(q.kappa)) * (q.tau.dot(q.d2b) + q.d1b.dot(q.kappa)),
              sixth * (n2a + na * k) * (n2b + nb * k)};
    case LimitKind::n_tangent: return {k2 / 12.0, k2 / 12.0};
    case LimitKind::n_derivative: return {q.d2a.dot(q.d2b) / 12.0, n2a * n2b / 12.0};
    case LimitKind::k_tangent: return {ta, na};
    case LimitKind::chord_ratio: return {2.0 * ta, 2.0 * na};
    case LimitKind::chord_ratio2: return {2.0 * q.d1a.dot(q.d1b), 2.0 * na * nb};
  }
  return {0.0, 0.0};
}

// The quantity whose diagonal limit is tabulated, at an arbitrary pair, with
// weight |ds|^(alpha - 2 beta) (times |df|^-alpha for the N-type terms).
inline double weighted_pair_quantity(LimitKind which, const PerturbationPair& pp, const PairFrame& pair,
                                     const EnergyParams& e, double beta) {
  const double wd = std::pow(pair.distance, e.alpha - 2.0 * beta);
  const double wn = wd / std::pow(pair.chord, e.alpha);
  const double n = clamp_n_tau(n_tau(pair));
  switch (which) {
    case LimitKind::m_alpha: return wd * m_alpha(pair, e);
    case LimitKind::r1:
    case LimitKind::r2: {
      const RTerms r = delta_n_tau(pair_slice(pp.phi(), pair), n);
      return wn * r[which == LimitKind::r1 ? 0 : 1];
    }
    case LimitKind::s1:
    case LimitKind::s2:
    case LimitKind::s3:
    case LimitKind::s4:
    case LimitKind::s5: {
      const STerms s = delta2_n_tau(pp, pair);
      return wn * s[static_cast<std::size_t>(static_cast<int>(which) - static_cast<int>(LimitKind::s1))];
    }
    case LimitKind::n_tangent: return wn * n;
    case LimitKind::n_derivative:
      return wn * n_bilinear(pp.phi().derivative(), pp.psi().derivative(), pp.derivative_product(), pair);
    case LimitKind::k_tangent: return k_bilinear(pair.df, endpoint_difference(pp.phi().values(), pair), pair);
    case LimitKind::chord_ratio: return delta_chord_ratio(pp.phi(), pair);
    case LimitKind::chord_ratio2: return delta2_chord_ratio(pp.phi(), pp.psi(), pair);
  }
  return 0.0;
}

// Approaches (s, s) along (s + h/2, s - h/2), h = h0 / 2^k for k = 0..levels-1.
// For beta = 1 the samples are Richardson-extrapolated in h^2; for beta < 1 the
// limit is 0 and the finest sample is reported as the estimate.
inline LimitReport diagonal_limit(const PerturbationPair& pp, const EnergyParams& e, std::size_t index,
                                  LimitKind which, double beta = 1.0, double h0 = 0.0, int levels = 6) {
  const ClosedCurve& curve = pp.phi().curve();
  require(levels >= 4, "diagonal_limit needs at least four levels");
  if (h0 <= 0.0) h0 = curve.length() / 8.0;
  const double s = curve.parameter(index);
  LimitReport rep;
  rep.which = limit_name(which);
  rep.s = s;
  std::vector<double> vals;
  for (int k = 0; k < levels; ++k) {
    const double h = h0 / std::pow(2.0, k);
    const PairFrame pair = pair_at(curve, s + 0.5 * h, s - 0.5 * h);
    const double v = weighted_pair_quantity(which, pp, pair, e, beta);
    rep.samples.emplace_back(h, v);
    vals.push_back(v);
  }
  const Station st = curve.station(index);
  DiagonalPoint q;
  q.tau = curve.tangents().value(st);
  q.kappa = curve.curvatures().value(st);
  q.d1a = pp.phi().derivative().value(st);
  q.d2a = pp.phi().derivative().derivative().value(st);
  q.d1b = pp.psi().derivative().value(st);
  q.d2b = pp.psi().derivative().derivative().value(st);
  if (beta < 1.0) {
    rep.extrapolated = vals.back();
    rep.reference = 0.0;
    rep.scale = std::abs(vals.front());
  } else {
    rep.extrapolated = richardson(vals);
    std::tie(rep.reference, rep.scale) = diagonal_reference(which, q, e);
  }
  rep.gap = std::abs(rep.extrapolated - rep.reference);
  const double denom = std::max(std::abs(rep.reference), rep.scale);
  rep.relative_gap = denom > 0.0 ? rep.gap / denom : rep.gap;
  return rep;
}

struct CircleRow {
  double ds = 0.0;
  double chord = 0.0;
  double density = 0.0;
  double weighted = 0.0;  // ds^((alpha - 2) p) * density
};

struct CircleTable {
  double alpha = 0.0, p = 0.0;
  std::vector<CircleRow> rows;
  double limit = 0.0;  // (alpha / 24)^p
};

// 1 - sin(y)/y without cancellation.
inline double one_minus_sinc(double y) {
  if (std::abs(y) > 0.5) return 1.0 - std::sin(y) / y;
  const double y2 = y * y;
  double term = y2 / 6.0, sum = 0.0;
  for (int n = 1; n < 12; ++n) {
    sum += term;
    term *= -y2 / ((2.0 * n + 2.0) * (2.0 * n + 3.0));
  }
  return sum;
}

// Unit-circle density from the chord/arc closed form; no curve object.
inline double circle_density(double alpha, double p, double ds) {
  // Leading term; the relative correction is O(ds^2).
  if (std::abs(ds) < 1e-7) return std::pow(alpha / 24.0, p) * std::pow(std::abs(ds), (2.0 - alpha) * p);
  const double y = 0.5 * std::abs(ds);
  const double chord = 2.0 * std::sin(y);
  const double bracket = -std::expm1(alpha * std::log1p(-one_minus_sinc(y)));
  return std::pow(chord, -alpha * p) * std::pow(bracket, p);
}

inline CircleTable circle_reference(double alpha, double p, const std::vector<double>& ds_list) {
  require(alpha > 0.0 && p >= 1.0, "circle_reference: alpha > 0 and p >= 1 required");
  CircleTable t;
  t.alpha = alpha;
  t.p = p;
  t.limit = std::pow(alpha / 24.0, p);
  for (double ds : ds_list) {
    require(ds > 0.0 && ds <= std::numbers::pi, "circle_reference: ds must lie in (0, pi]");
    CircleRow r;
    r.ds = ds;
    r.chord = 2.0 * std::sin(0.5 * ds);
    r.density = circle_density(alpha, p, ds);
    r.weighted = std::pow(ds, (alpha - 2.0) * p) * r.density;
    t.rows.push_back(r);
  }
  return t;
}

// E of the unit circle as the 1D integral 2 pi * 2 int_0^pi M(x) dx of the
// closed-form density; tanh-sinh copes with the x^((2-alpha)p) endpoint.
inline double circle_energy_reference(double alpha, double p) {
  require(alpha > 0.0 && p >= 1.0 && (2.0 - alpha) * p > -1.0, "circle energy diverges for these parameters");
  boost::math::quadrature::tanh_sinh<double> ts;
  const double half = ts.integrate([&](double x) { return x > 0.0 ? circle_density(alpha, p, x) : 0.0; }, 0.0,
                                   std::numbers::pi);
  return 4.0 * std::numbers::pi * half;
}

}  // namespace ohara
