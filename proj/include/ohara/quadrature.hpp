#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "curve.hpp"
#include "kernels.hpp"
#include "parallel.hpp"
#include "variations.hpp"

namespace ohara {

// Fornberg's recursion: c[d][m] approximates the d-th derivative at z from
// values at nodes x[m].
inline std::vector<std::vector<double>> fd_weights(double z, const std::vector<double>& x, int order) {
  const int n = static_cast<int>(x.size());
  std::vector<std::vector<double>> c(order + 1, std::vector<double>(n, 0.0));
  double c1 = 1.0, c4 = x[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

// Weights for the inner integral over ds in [-L/2, L/2] of a row g(ds) that
// behaves like |ds|^gamma * (smooth in signed ds) at 0 and has one-sided
// smooth branches at +-L/2 (the short arc flips there).
//
//  * trapezoid on the punctured grid, with both antipodal branches at h/2;
//  * at 0, the generalized Euler-Maclaurin (zeta) correction, with the needed
//    derivatives of the smooth factor taken from an even fit on nodes 1..band;
//  * at +-L/2, Gregory-type end corrections from one-sided stencils.
struct RowRule {
  long half = 0;
  std::size_t band = 0;
  std::vector<double> weight;  // index k + half, k in [-half, half]
  std::vector<double> lower;   // lower-order companion, for the error estimate

  double at(long k) const { return weight[static_cast<std::size_t>(k + half)]; }
  double lower_at(long k) const { return lower[static_cast<std::size_t>(k + half)]; }
};

inline std::vector<double> row_weights(long N, double h, double gamma, std::size_t band, int end_terms, int stencil) {
  std::vector<double> w(static_cast<std::size_t>(2 * N + 1), h);
  w[static_cast<std::size_t>(N)] = 0.0;
  w.front() = w.back() = 0.5 * h;

  const auto b = static_cast<int>(band);
  Eigen::MatrixXd V(b, b);
  for (int k = 1; k <= b; ++k)
    for (int r = 0; r < b; ++r) V(k - 1, r) = std::pow(static_cast<double>(k), 2.0 * r);
  const Eigen::MatrixXd Vinv = V.inverse();
  for (int k = 1; k <= b; ++k) {
    double c = 0.0;
    for (int r = 0; r < b; ++r) c += std::riemann_zeta(-gamma - 2.0 * r) * Vinv(r, k - 1);
    c *= -h / std::pow(static_cast<double>(k), gamma);
    w[static_cast<std::size_t>(N + k)] += c;
    w[static_cast<std::size_t>(N - k)] += c;
  }

  static constexpr double bernoulli[] = {1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0};
  std::vector<double> nodes(static_cast<std::size_t>(stencil + 1));
  for (int m = 0; m <= stencil; ++m) nodes[static_cast<std::size_t>(m)] = -m;
  const auto D = fd_weights(0.0, nodes, 2 * end_terms - 1);
  double factorial = 1.0;
  for (int j = 1; j <= end_terms; ++j) {
    factorial *= (2.0 * j - 1.0) * (2.0 * j);
    const double cj = bernoulli[j - 1] / factorial;
    for (int m = 0; m <= stencil; ++m) {
      const double d = cj * h * D[static_cast<std::size_t>(2 * j - 1)][static_cast<std::size_t>(m)];
      w[static_cast<std::size_t>(2 * N - m)] -= d;
      w[static_cast<std::size_t>(m)] -= d;
    }
  }
  return w;
}

inline RowRule make_row_rule(std::size_t M, double h, double gamma, std::size_t band) {
  const long N = static_cast<long>(M / 2);
  require(gamma > -1.0, "row rule: integrand exponent must exceed -1");
  require(band >= 1 && static_cast<long>(band) <= N / 4, "band must lie in [1, M/8]");
  const int stencil = static_cast<int>(std::min<long>(8, N / 4));
  RowRule r;
  r.half = N;
  r.band = band;
  r.weight = row_weights(N, h, gamma, band, 3, stencil);
  r.lower = row_weights(N, h, gamma, std::max<std::size_t>(1, band / 2), 2, std::max(3, stencil - 2));
  return r;
}

struct QuadratureOptions {
  std::size_t band = 2;
  unsigned threads = 0;
  double bilipschitz_cap = 1e6;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;  // |rule - lower-order rule|
  double offband = 0.0;         // plain trapezoid over cells with |ds| > band h
  double band_part = 0.0;       // value - offband
  std::vector<std::pair<std::size_t, std::size_t>> flagged;
};

// Integrates `outputs` pair functions over the torus. eval(pair, k, out)
// writes one value per output; NaN marks a flagged pair, which is excluded.
template <class Eval>
std::vector<QuadratureResult> integrate_pairs(const ClosedCurve& curve, double gamma, std::size_t outputs,
                                              Eval&& eval, const QuadratureOptions& opt) {
  const std::size_t M = curve.size();
  const double h = curve.spacing();
  const RowRule rule = make_row_rule(M, h, gamma, opt.band);
  const long N = rule.half;
  const long b = static_cast<long>(opt.band);

  struct RowSums {
    std::vector<double> acc, low, off;
    std::vector<std::pair<std::size_t, std::size_t>> flagged;
    std::vector<std::size_t> flagged_output;
    double worst = 1.0;
  };
  std::vector<RowSums> rows(M);
  parallel_rows(M, opt.threads, [&](std::size_t j) {
    RowSums& r = rows[j];
    r.acc.assign(outputs, 0.0);
    r.low.assign(outputs, 0.0);
    r.off.assign(outputs, 0.0);
    std::vector<double> out(outputs);
    for (long k = -N; k <= N; ++k) {
      if (k == 0) continue;
      const PairFrame pair = pair_at_offset(curve, j, k);
      r.worst = std::max(r.worst, pair.distance / pair.chord);
      eval(pair, k, out.data());
      const double w = rule.at(k), wl = rule.lower_at(k);
      const double wo = std::abs(k) > b ? (std::abs(k) == N ? 0.5 * h : h) : 0.0;
      for (std::size_t o = 0; o < outputs; ++o) {
        if (std::isnan(out[o])) {
          r.flagged.emplace_back(static_cast<std::size_t>(pair.first.index), j);
          r.flagged_output.push_back(o);
          continue;
        }
        r.acc[o] += w * out[o];
        r.low[o] += wl * out[o];
        r.off[o] += wo * out[o];
      }
    }
  });

  std::vector<QuadratureResult> res(outputs);
  std::vector<double> low(outputs, 0.0);
  double worst = 1.0;
  for (std::size_t j = 0; j < M; ++j) {
    const RowSums& r = rows[j];
    worst = std::max(worst, r.worst);
    for (std::size_t o = 0; o < outputs; ++o) {
      res[o].value += h * r.acc[o];
      low[o] += h * r.low[o];
      res[o].offband += h * r.off[o];
    }
    for (std::size_t f = 0; f < r.flagged.size(); ++f) res[r.flagged_output[f]].flagged.push_back(r.flagged[f]);
  }
  if (worst > opt.bilipschitz_cap)
    throw NumericalError("curve is not bi-Lipschitz at this resolution: D/|df| reaches " + std::to_string(worst));
  for (std::size_t o = 0; o < outputs; ++o) {
    res[o].error_estimate = std::abs(res[o].value - low[o]);
    res[o].band_part = res[o].value - res[o].offband;
  }
  return res;
}

inline QuadratureResult energy(const ClosedCurve& curve, const EnergyParams& e, const QuadratureOptions& opt = {}) {
  return integrate_pairs(
      curve, e.diagonal_exponent(), 1,
      [&](const PairFrame& pair, long, double* out) { out[0] = density(pair, e); }, opt)[0];
}

// delta E for several perturbations in one sweep over the pairs.
inline std::vector<QuadratureResult> first_variations(const ClosedCurve& curve,
                                                      const std::vector<const Perturbation*>& phis,
                                                      const EnergyParams& e, const QuadratureOptions& opt = {}) {
  return integrate_pairs(
      curve, e.diagonal_exponent(), phis.size(),
      [&](const PairFrame& pair, long, double* out) {
        const PairBase base = pair_base(pair, e);
        for (std::size_t o = 0; o < phis.size(); ++o)
          out[o] = first_variation_density(pair_slice(*phis[o], pair), base, e).sum();
      },
      opt);
}

inline QuadratureResult first_variation(const ClosedCurve& curve, const Perturbation& phi, const EnergyParams& e,
                                        const QuadratureOptions& opt = {}) {
  return first_variations(curve, {&phi}, e, opt)[0];
}

inline QuadratureResult second_variation(const ClosedCurve& curve, const PerturbationPair& pp,
                                         const EnergyParams& e, const QuadratureOptions& opt = {}) {
  return integrate_pairs(
      curve, e.diagonal_exponent(), 1,
      [&](const PairFrame& pair, long, double* out) {
        const HTerms h = second_variation_density(pp, pair_slice(pp.phi(), pair), pair_slice(pp.psi(), pair), pair,
                                                  pair_base(pair, e), e);
        out[0] = h.singular ? std::numeric_limits<double>::quiet_NaN() : h.sum();
      },
      opt)[0];
}

// The shortest-arc distance has a kink on the antipodal pairs |ds| = L/2.
// Perturbations move the kink, which adds a line term to the second variation
// that no pointwise density carries:
//   -1/2 int_0^L d(M^p)/dD * dw[phi] * dw[psi] du,  w = 2 d_fwd(u, u + L/2) - L,
// where dw[phi] is the forward minus the backward arc integral of tau.phi'.
// The integrand is smooth and periodic in u, so the plain trapezoid sum is used.
inline double cut_locus_term(const ClosedCurve& curve, const PerturbationPair& pp, const EnergyParams& e) {
  const std::size_t M = curve.size();
  const double L = curve.length();
  auto dw = [&](const Field& t, std::size_t i, std::size_t j) {
    const auto& q = t.primitive_samples();
    const double total = t.mean()(0) * L;
    const double fwd = 0.5 * total + q(static_cast<Eigen::Index>(j), 0) - q(static_cast<Eigen::Index>(i), 0);
    return 2.0 * fwd - total;
  };
  double sum = 0.0;
  for (std::size_t i = 0; i < M; ++i) {
    const std::size_t j = (i + M / 2) % M;
    const PairFrame pair = pair_frame(curve, j, i);
    const double c = pair.chord;
    const double n = clamp_n_tau(n_tau(pair));
    const double dm_dd = phi_alpha(n, e.alpha).first * (2.0 * pair.distance / (c * c)) / std::pow(c, e.alpha);
    const double dens_dd = e.p * std::pow(m_alpha(pair, e), e.p - 1.0) * dm_dd;
    sum += dens_dd * dw(pp.phi().tangential(), i, j) * dw(pp.psi().tangential(), i, j);
  }
  return -0.5 * sum * curve.spacing();
}

struct SecondVariation {
  QuadratureResult pointwise;  // integral of H
  double cut_locus = 0.0;
  double total() const { return pointwise.value + cut_locus; }
};

// delta^2 E[phi, psi] of the energy itself.
inline SecondVariation full_second_variation(const ClosedCurve& curve, const PerturbationPair& pp,
                                             const EnergyParams& e, const QuadratureOptions& opt = {}) {
  return {second_variation(curve, pp, e, opt), cut_locus_term(curve, pp, e)};
}

enum class GridKind { density, first_variation, second_variation };

inline std::string grid_label(GridKind kind, std::optional<double> beta) {
  std::string s = kind == GridKind::density ? "M" : kind == GridKind::first_variation ? "G" : "H";
  if (beta) s = "weighted " + s;
  return s;
}

struct PairGrid {
  std::string label;
  EnergyParams params;
  std::optional<double> beta;  // weight D^((alpha - 2 beta) p) when set
  std::size_t band = 0;
  double length = 0.0;
  Samples values;  // (i, j): pair (s_i, s_j); NaN on the diagonal and at flagged pairs
  std::vector<std::pair<std::size_t, std::size_t>> flagged;
  double sup_offband = 0.0;
  double sup_band = 0.0;
  double l1_offband = 0.0;  // cell sum times cell area, off the band
  double l1_band = 0.0;     // band contribution from the corrected rule
  double l1_error = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(values.rows()); }
  long offset(std::size_t i, std::size_t j) const {
    const long M = static_cast<long>(size());
    long k = ((static_cast<long>(i) - static_cast<long>(j)) % M + M) % M;
    return k > M / 2 ? k - M : k;
  }
  bool in_band(std::size_t i, std::size_t j) const { return std::abs(offset(i, j)) <= static_cast<long>(band); }
  double sup() const { return std::max(sup_offband, sup_band); }
  double l1() const { return l1_offband + l1_band; }
};

inline PairGrid density_grid(const ClosedCurve& curve, const EnergyParams& e, GridKind kind,
                             std::optional<double> beta = std::nullopt, const Perturbation* phi = nullptr,
                             const PerturbationPair* pp = nullptr, const QuadratureOptions& opt = {}) {
  require(kind != GridKind::first_variation || phi, "G grid needs a perturbation");
  require(kind != GridKind::second_variation || pp, "H grid needs a pair of perturbations");
  const std::size_t M = curve.size();
  PairGrid g;
  g.label = grid_label(kind, beta);
  g.params = e;
  g.beta = beta;
  g.band = opt.band;
  g.length = curve.length();
  g.values = Samples::Constant(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(M),
                               std::numeric_limits<double>::quiet_NaN());
  const double weight_exponent = beta ? (e.alpha - 2.0 * *beta) * e.p : 0.0;
  const long N = static_cast<long>(M / 2);
  const auto l1 = integrate_pairs(
      curve, e.diagonal_exponent() + weight_exponent, 1,
      [&](const PairFrame& pair, long k, double* out) {
        double v = 0.0;
        if (kind == GridKind::density) {
          v = density(pair, e);
        } else if (kind == GridKind::first_variation) {
          v = first_variation_density(*phi, pair, e).sum();
        } else {
          const HTerms h = second_variation_density(*pp, pair, e);
          v = h.singular ? std::numeric_limits<double>::quiet_NaN() : h.sum();
        }
        if (beta) v *= std::pow(pair.distance, weight_exponent);
        if (k != -N) g.values(pair.first.index, pair.second.index) = v;
        out[0] = std::abs(v);
      },
      opt)[0];
  g.flagged = l1.flagged;
  g.l1_offband = l1.offband;
  g.l1_band = l1.band_part;
  g.l1_error = l1.error_estimate;
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t j = 0; j < M; ++j) {
      if (i == j) continue;
      const double v = std::abs(g.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      if (std::isnan(v)) continue;
      double& s = g.in_band(i, j) ? g.sup_band : g.sup_offband;
      s = std::max(s, v);
    }
  return g;
}

struct ChainEntry {
  std::string label;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin() const { return rhs - lhs; }
  double relative_margin() const { return rhs > 0.0 ? (rhs - lhs) / rhs : (lhs == 0.0 ? 0.0 : -1.0); }
};

struct ChainReport {
  std::vector<ChainEntry> entries;
  bool holds(double slack = 1e-10) const {
    return std::all_of(entries.begin(), entries.end(),
                       [&](const ChainEntry& c) { return c.relative_margin() >= -slack; });
  }
};

// Both sides of the eight L^1 bounds behind the boundedness of G and H,
// evaluated with positive trapezoid weights so the discrete Hoelder
// inequalities apply exactly.
inline ChainReport holder_chain_check(const ClosedCurve& curve, const PerturbationPair& pp, const EnergyParams& e,
                                      const QuadratureOptions& opt = {}) {
  const std::size_t M = curve.size();
  const double h = curve.spacing();
  const long N = static_cast<long>(M / 2);
  const double p = e.p;
  enum { kMp, kDa, kDb, kD2, kG1a, kG1b, kG2a, kH1, kH2, kH3, kH4, kH5, kH6, kCount };
  std::vector<std::array<double, kCount>> rows(M);
  parallel_rows(M, opt.threads, [&](std::size_t j) {
    auto& s = rows[j];
    s.fill(0.0);
    for (long k = -N; k <= N; ++k) {
      if (k == 0) continue;
      const double w = (std::abs(k) == N ? 0.5 : 1.0) * h * h;
      const PairFrame pair = pair_at_offset(curve, j, k);
      const PairBase base = pair_base(pair, e);
      const PairSlice a = pair_slice(pp.phi(), pair), b = pair_slice(pp.psi(), pair);
      const double dma = delta_m_alpha(a, base, e).sum();
      const double dmb = delta_m_alpha(b, base, e).sum();
      const double d2m = delta2_m_alpha(pp, a, b, pair, base, e).sum();
      const GTerms g = first_variation_density(a, base, e);
      const double g1b = p * std::pow(base.m, p - 1.0) * dmb;
      const HTerms hh = second_variation_density(pp, a, b, pair, base, e);
      s[kMp] += w * std::pow(base.m, p);
      s[kDa] += w * std::pow(std::abs(dma), p);
      s[kDb] += w * std::pow(std::abs(dmb), p);
      s[kD2] += w * std::pow(std::abs(d2m), p);
      s[kG1a] += w * std::abs(g[0]);
      s[kG1b] += w * std::abs(g1b);
      s[kG2a] += w * std::abs(g[1]);
      for (int t = 0; t < 6; ++t) s[kH1 + t] += w * std::abs(hh[static_cast<std::size_t>(t)]);
    }
  });
  std::array<double, kCount> t{};
  for (const auto& r : rows)
    for (int c = 0; c < kCount; ++c) t[c] += r[c];

  const double m_norm = std::pow(t[kMp], 1.0 / p);
  const double da = std::pow(t[kDa], 1.0 / p), db = std::pow(t[kDb], 1.0 / p), d2 = std::pow(t[kD2], 1.0 / p);
  const double fa = pp.phi().derivative().sup_norm(), fb = pp.psi().derivative().sup_norm();
  ChainReport rep;
  rep.entries = {
      {"G1", t[kG1a], p * std::pow(m_norm, p - 1.0) * da},
      {"G2", t[kG2a], 2.0 * t[kMp] * fa},
      {"H1", t[kH1], p * std::pow(m_norm, p - 1.0) * d2},
      {"H2", t[kH2], p * (p - 1.0) * std::pow(m_norm, p - 2.0) * da * db},
      {"H3", t[kH3], 2.0 * t[kG1a] * fb},
      {"H4", t[kH4], 2.0 * t[kG1b] * fa},
      {"H5", t[kH5], 6.0 * t[kMp] * fa * fb},
      {"H6", t[kH6], 4.0 * t[kMp] * fa * fb},
  };
  return rep;
}

}  // namespace ohara
