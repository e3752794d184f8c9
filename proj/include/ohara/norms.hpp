#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "curve.hpp"
#include "errors.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"

namespace ohara {

enum class SeminormKind { gagliardo, holder, local_holder, lipschitz_sup };

inline std::string seminorm_name(SeminormKind k) {
  switch (k) {
    case SeminormKind::gagliardo: return "gagliardo";
    case SeminormKind::holder: return "holder";
    case SeminormKind::local_holder: return "local-holder";
    case SeminormKind::lipschitz_sup: return "lipschitz-sup";
  }
  return "?";
}

struct SeminormReport {
  double value = 0.0;
  SeminormKind kind = SeminormKind::gagliardo;
  double sigma = 0.0, q = 0.0;  // gagliardo
  double beta = 0.0, radius = 0.0;  // hoelder
  std::size_t resolution = 0;
  double error_estimate = 0.0;  // of the q-th power, gagliardo only
};

namespace detail {
inline double sample_distance(const Field& u, std::size_t i, std::size_t j) {
  return (u.row(i) - u.row(j)).norm();
}
}  // namespace detail

// (double integral of |du|^q / |ds|^(1 + sigma q))^(1/q) over the torus with
// short-arc |ds|. Near the diagonal the integrand is |u'|^q |ds|^(q-1-sigma q)
// times a smooth factor, so the same corrected row rule as the energy applies.
inline SeminormReport gagliardo_seminorm(const Field& u, double sigma, double q, const QuadratureOptions& opt = {}) {
  require(sigma > 0.0 && sigma < 1.0, "sigma must lie in (0, 1)");
  require(q >= 1.0, "q >= 1 required");
  const std::size_t M = u.size();
  require(M >= 16 && M % 2 == 0, "field needs an even sample count >= 16");
  const double h = u.spacing();
  const double gamma = q - 1.0 - sigma * q;
  const RowRule rule = make_row_rule(M, h, gamma, opt.band);
  const long N = rule.half;
  std::vector<double> acc(M, 0.0), low(M, 0.0);
  parallel_rows(M, opt.threads, [&](std::size_t j) {
    for (long k = -N; k <= N; ++k) {
      if (k == 0) continue;
      const std::size_t i = static_cast<std::size_t>((static_cast<long>(j) + k + static_cast<long>(M)) % static_cast<long>(M));
      const double ds = h * static_cast<double>(std::abs(k));
      const double v = std::pow(detail::sample_distance(u, i, j), q) / std::pow(ds, 1.0 + sigma * q);
      acc[j] += rule.at(k) * v;
      low[j] += rule.lower_at(k) * v;
    }
  });
  double total = 0.0, total_low = 0.0;
  for (std::size_t j = 0; j < M; ++j) {
    total += h * acc[j];
    total_low += h * low[j];
  }
  SeminormReport r;
  r.kind = SeminormKind::gagliardo;
  r.sigma = sigma;
  r.q = q;
  r.resolution = M;
  r.error_estimate = std::abs(total - total_low);
  // The corrected weights are not all positive; a vanishing seminorm can come
  // out as -roundoff.
  r.value = std::pow(std::max(total, 0.0), 1.0 / q);
  return r;
}

// sup of |du| / |ds|^beta over grid pairs with 0 < |ds| < R; R >= L/2 takes
// every pair. For beta = 1 the diagonal limit |u'| is included.
inline SeminormReport local_modulus(const Field& u, double beta, double radius, const QuadratureOptions& opt = {}) {
  require(beta > 0.0 && beta <= 1.0, "beta must lie in (0, 1]");
  require(radius > 0.0, "R must be positive");
  const std::size_t M = u.size();
  const double h = u.spacing();
  const long N = static_cast<long>(M / 2);
  const bool all = radius >= 0.5 * u.period();
  std::vector<double> best(M, 0.0);
  parallel_rows(M, opt.threads, [&](std::size_t j) {
    for (long k = 1; k <= N; ++k) {
      const double ds = h * static_cast<double>(k);
      if (!all && ds >= radius) break;
      const std::size_t i = (j + static_cast<std::size_t>(k)) % M;
      best[j] = std::max(best[j], detail::sample_distance(u, i, j) / std::pow(ds, beta));
    }
  });
  SeminormReport r;
  r.kind = all ? SeminormKind::holder : SeminormKind::local_holder;
  r.beta = beta;
  r.radius = radius;
  r.resolution = M;
  r.value = *std::max_element(best.begin(), best.end());
  if (beta == 1.0) r.value = std::max(r.value, u.derivative().sup_norm());
  return r;
}

inline SeminormReport holder_seminorm(const Field& u, double beta, const QuadratureOptions& opt = {}) {
  return local_modulus(u, beta, 0.5 * u.period(), opt);
}

// sup |u'| on the grid.
inline SeminormReport lipschitz_sup(const Field& u) {
  SeminormReport r;
  r.kind = SeminormKind::lipschitz_sup;
  r.beta = 1.0;
  r.resolution = u.size();
  r.value = u.derivative().sup_norm();
  return r;
}

// Flags u as little-Hoelder at this resolution when the modulus over the
// smallest scales, R = 8L/M, falls below tol times the full seminorm. For
// beta = 1 the target space is C^1, which every grid interpolant belongs to.
inline bool is_little_holder(const Field& u, double beta, double tol = 0.5) {
  if (beta == 1.0) return true;
  const double full = holder_seminorm(u, beta).value;
  if (full == 0.0) return true;
  const double near = local_modulus(u, beta, 8.0 * u.period() / static_cast<double>(u.size())).value;
  return near < tol * full;
}

struct ProductCheck {
  double beta = 0.0;
  double lhs = 0.0;  // [tau.phi']_beta
  double rhs = 0.0;  // |tau|_inf [phi']_beta + [tau]_beta |phi'|_inf
  double sigma = 0.0, q = 0.0;
  double gagliardo_lhs = 0.0;  // [tau.phi']_{sigma,q}
  double gagliardo_rhs = 0.0;  // |tau|_inf [phi']_{sigma,q} + [tau]_{sigma,q} |phi'|_inf
  double fitted_constant() const { return gagliardo_rhs > 0.0 ? gagliardo_lhs / gagliardo_rhs : 0.0; }
  bool holds(double slack = 1e-10) const { return lhs <= rhs * (1.0 + slack) + slack; }
};

// Both sides of the Hoelder product estimate with constant 1, plus the
// Sobolev-Slobodeckij analogue whose constant is only fitted.
inline ProductCheck product_seminorm_check(const ClosedCurve& curve, const Field& phi, double beta, double sigma,
                                           double q, const QuadratureOptions& opt = {}) {
  require(phi.size() == curve.size() && phi.dim() == curve.dimension(), "perturbation shape mismatch");
  const Field dphi = phi.derivative();
  const Field& tau = curve.tangents();
  const Field prod = inner_product(tau, dphi);
  ProductCheck c;
  c.beta = beta;
  c.sigma = sigma;
  c.q = q;
  c.lhs = holder_seminorm(prod, beta, opt).value;
  c.rhs = tau.sup_norm() * holder_seminorm(dphi, beta, opt).value + holder_seminorm(tau, beta, opt).value * dphi.sup_norm();
  c.gagliardo_lhs = gagliardo_seminorm(prod, sigma, q, opt).value;
  c.gagliardo_rhs = tau.sup_norm() * gagliardo_seminorm(dphi, sigma, q, opt).value +
                    gagliardo_seminorm(tau, sigma, q, opt).value * dphi.sup_norm();
  return c;
}

// max([u]_{sigma,q} + (L^-1 int |u|^q)^(1/q), sup |u|).
inline double sobolev_linf_norm(const Field& u, double sigma, double q, const QuadratureOptions& opt = {}) {
  double lq = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) lq += std::pow(u.row(i).norm(), q);
  lq = std::pow(lq / static_cast<double>(u.size()), 1.0 / q);
  return std::max(gagliardo_seminorm(u, sigma, q, opt).value + lq, u.sup_norm());
}

}  // namespace ohara
