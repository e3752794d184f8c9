#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string_view>

#include "curve.hpp"
#include "kernels.hpp"

namespace ohara {

template <std::size_t N>
struct VariationTerms {
  std::array<std::string_view, N> labels{};
  std::array<double, N> values{};
  bool singular = false;

  double operator[](std::size_t k) const { return values[k]; }
  double sum() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
};

using RTerms = VariationTerms<2>;
using STerms = VariationTerms<5>;
using PTerms = VariationTerms<2>;
using QTerms = VariationTerms<6>;
using GTerms = VariationTerms<2>;
using HTerms = VariationTerms<6>;

// A displacement field phi on a curve with the derived fields the variation
// formulas integrate: phi' (whose primitive is phi) and tau.phi'.
// Holds a pointer to the curve; the curve must outlive it.
class Perturbation {
 public:
  Perturbation(const ClosedCurve& curve, Field phi) : curve_(&curve), phi_(std::move(phi)) {
    require(phi_.size() == curve.size(), "perturbation sample count differs from the curve's");
    require(phi_.dim() == curve.dimension(), "perturbation must be R^n-valued");
    dphi_ = phi_.derivative();
    tangential_ = inner_product(curve.tangents(), dphi_);
  }

  const ClosedCurve& curve() const { return *curve_; }
  const Field& values() const { return phi_; }
  const Field& derivative() const { return dphi_; }
  const Field& tangential() const { return tangential_; }

 private:
  const ClosedCurve* curve_;
  Field phi_, dphi_, tangential_;
};

// Cross products needed by second variations: phi'.psi' and (tau.phi')(tau.psi').
class PerturbationPair {
 public:
  PerturbationPair(const Perturbation& phi, const Perturbation& psi)
      : phi_(&phi), psi_(&psi),
        derivative_product_(inner_product(phi.derivative(), psi.derivative())),
        tangential_product_(inner_product(phi.tangential(), psi.tangential())) {}

  const Perturbation& phi() const { return *phi_; }
  const Perturbation& psi() const { return *psi_; }
  const Field& derivative_product() const { return derivative_product_; }
  const Field& tangential_product() const { return tangential_product_; }

 private:
  const Perturbation* phi_;
  const Perturbation* psi_;
  Field derivative_product_, tangential_product_;
};

// Pair quantities shared by every variation of M_alpha.
struct PairBase {
  double n = 0.0;            // N(tau)
  PhiAlpha phi{};            // phi_alpha and derivatives at N(tau)
  double chord_alpha = 0.0;  // |df|^alpha
  double m = 0.0;            // M_alpha
};

inline PairBase pair_base(const PairFrame& pair, const EnergyParams& e) {
  PairBase b;
  b.n = clamp_n_tau(n_tau(pair));
  b.phi = phi_alpha(b.n, e.alpha);
  b.chord_alpha = std::pow(pair.chord, e.alpha);
  b.m = b.phi.value / b.chord_alpha;
  return b;
}

// Per-pair data of one perturbation.
struct PairSlice {
  Vec dphi;           // phi(s1) - phi(s2)
  double k_f = 0.0;   // K(f, phi)
  double n_td = 0.0;  // N(tau, phi')
  double t1 = 0.0;    // tau.phi' at s1
  double t2 = 0.0;    // tau.phi' at s2
  double int_t = 0.0; // arc integral of tau.phi'
};

inline PairSlice pair_slice(const Perturbation& phi, const PairFrame& pair) {
  PairSlice s;
  s.dphi = endpoint_difference(phi.values(), pair);
  s.k_f = k_bilinear(pair.df, s.dphi, pair);
  s.int_t = phi.tangential().scalar_integral(pair);
  s.n_td = (pair.ds * s.int_t - pair.df.dot(s.dphi)) / (pair.chord * pair.chord);
  s.t1 = phi.tangential().scalar(pair.first);
  s.t2 = phi.tangential().scalar(pair.second);
  return s;
}

// delta |df|^2 [phi] / |df|^2
inline double delta_chord_ratio(const Perturbation& phi, const PairFrame& pair) {
  return 2.0 * k_bilinear(pair.df, endpoint_difference(phi.values(), pair), pair);
}

// delta^2 |df|^2 [phi, psi] / |df|^2
inline double delta2_chord_ratio(const Perturbation& phi, const Perturbation& psi, const PairFrame& pair) {
  return 2.0 * k_bilinear(endpoint_difference(phi.values(), pair), endpoint_difference(psi.values(), pair), pair);
}

// delta K(f, phi) [psi]
inline double delta_k(const Perturbation& phi, const Perturbation& psi, const PairFrame& pair) {
  const Vec a = endpoint_difference(phi.values(), pair);
  const Vec b = endpoint_difference(psi.values(), pair);
  return k_bilinear(a, b, pair) - 2.0 * k_bilinear(pair.df, a, pair) * k_bilinear(pair.df, b, pair);
}

inline RTerms delta_n_tau(const PairSlice& s, double n) {
  return {{"R1", "R2"}, {-2.0 * s.k_f * n, 2.0 * s.n_td}};
}

inline RTerms delta_n_tau(const Perturbation& phi, const PairFrame& pair) {
  return delta_n_tau(pair_slice(phi, pair), clamp_n_tau(n_tau(pair)));
}

inline STerms delta2_n_tau(const PerturbationPair& pp, const PairSlice& a, const PairSlice& b,
                           const PairFrame& pair, double n) {
  const double c2 = pair.chord * pair.chord;
  const double k_ab = a.dphi.dot(b.dphi) / c2;
  const double n_dd = (pair.ds * pp.derivative_product().scalar_integral(pair) - a.dphi.dot(b.dphi)) / c2;
  const double n_tt = (pair.ds * pp.tangential_product().scalar_integral(pair) - a.int_t * b.int_t) / c2;
  const double dn_a = delta_n_tau(a, n).sum();
  const double dn_b = delta_n_tau(b, n).sum();
  return {{"S1", "S2", "S3", "S4", "S5"},
          {-2.0 * (k_ab - 2.0 * a.k_f * b.k_f) * n,
           -a.k_f * dn_b - b.k_f * dn_a,
           -2.0 * b.k_f * a.n_td - 2.0 * a.k_f * b.n_td,
           2.0 * n_dd,
           -2.0 * n_tt}};
}

inline STerms delta2_n_tau(const PerturbationPair& pp, const PairFrame& pair) {
  return delta2_n_tau(pp, pair_slice(pp.phi(), pair), pair_slice(pp.psi(), pair), pair,
                      clamp_n_tau(n_tau(pair)));
}

inline PTerms delta_m_alpha(const PairSlice& s, const PairBase& b, const EnergyParams& e) {
  const double dn = delta_n_tau(s, b.n).sum();
  return {{"P1", "P2"}, {b.phi.first * dn / b.chord_alpha, -0.5 * e.alpha * b.m * 2.0 * s.k_f}};
}

inline PTerms delta_m_alpha(const Perturbation& phi, const PairFrame& pair, const EnergyParams& e) {
  return delta_m_alpha(pair_slice(phi, pair), pair_base(pair, e), e);
}

inline QTerms delta2_m_alpha(const PerturbationPair& pp, const PairSlice& a, const PairSlice& b,
                             const PairFrame& pair, const PairBase& base, const EnergyParams& e) {
  const double h = 0.5 * e.alpha;
  const double c2 = pair.chord * pair.chord;
  const double dn_a = delta_n_tau(a, base.n).sum();
  const double dn_b = delta_n_tau(b, base.n).sum();
  const double d2n = delta2_n_tau(pp, a, b, pair, base.n).sum();
  const double ratio_a = 2.0 * a.k_f;                  // delta |df|^2 [phi] / |df|^2
  const double ratio_b = 2.0 * b.k_f;                  // delta |df|^2 [psi] / |df|^2
  const double ratio_ab = 2.0 * a.dphi.dot(b.dphi) / c2;  // delta^2 |df|^2 / |df|^2
  const double dm_b = delta_m_alpha(b, base, e).sum();
  return {{"Q1", "Q2", "Q3", "Q4", "Q5", "Q6"},
          {base.phi.first * d2n / base.chord_alpha,
           -h * base.phi.first * (dn_a / base.chord_alpha) * ratio_b,
           base.phi.second * dn_a * dn_b / base.chord_alpha,
           -h * dm_b * ratio_a,
           -h * base.m * ratio_ab,
           h * base.m * ratio_a * ratio_b}};
}

inline QTerms delta2_m_alpha(const PerturbationPair& pp, const PairFrame& pair, const EnergyParams& e) {
  return delta2_m_alpha(pp, pair_slice(pp.phi(), pair), pair_slice(pp.psi(), pair), pair, pair_base(pair, e), e);
}

inline GTerms first_variation_density(const PairSlice& s, const PairBase& b, const EnergyParams& e) {
  const double dm = delta_m_alpha(s, b, e).sum();
  return {{"G1", "G2"}, {e.p * std::pow(b.m, e.p - 1.0) * dm, std::pow(b.m, e.p) * (s.t1 + s.t2)}};
}

inline GTerms first_variation_density(const Perturbation& phi, const PairFrame& pair, const EnergyParams& e) {
  return first_variation_density(pair_slice(phi, pair), pair_base(pair, e), e);
}

inline HTerms second_variation_density(const PerturbationPair& pp, const PairSlice& a, const PairSlice& b,
                                       const PairFrame& pair, const PairBase& base, const EnergyParams& e) {
  const double p = e.p;
  const double mp = std::pow(base.m, p);
  const double mp1 = std::pow(base.m, p - 1.0);
  const double dm_a = delta_m_alpha(a, base, e).sum();
  const double dm_b = delta_m_alpha(b, base, e).sum();
  const double d2m = delta2_m_alpha(pp, a, b, pair, base, e).sum();
  const double g1_a = p * mp1 * dm_a;
  const double g1_b = p * mp1 * dm_b;
  HTerms h{{"H1", "H2", "H3", "H4", "H5", "H6"}, {}};
  h.values[0] = p * mp1 * d2m;
  if (p != 1.0) {
    if (p < 2.0 && base.m < 1e-300) {
      // M_alpha^(p-2) is unbounded here; only a vanishing first variation makes the term 0.
      if (std::abs(dm_a) <= 1e-14 && std::abs(dm_b) <= 1e-14) h.values[1] = 0.0;
      else h.singular = true;
    } else {
      h.values[1] = p * (p - 1.0) * std::pow(base.m, p - 2.0) * dm_a * dm_b;
    }
  }
  h.values[2] = g1_a * (b.t1 + b.t2);
  h.values[3] = g1_b * (a.t1 + a.t2);
  const auto& dd = pp.derivative_product();
  h.values[4] = mp * (dd.scalar(pair.first) + dd.scalar(pair.second) - 2.0 * a.t1 * b.t1 - 2.0 * a.t2 * b.t2);
  h.values[5] = mp * (a.t1 + a.t2) * (b.t1 + b.t2);
  return h;
}

inline HTerms second_variation_density(const PerturbationPair& pp, const PairFrame& pair, const EnergyParams& e) {
  return second_variation_density(pp, pair_slice(pp.phi(), pair), pair_slice(pp.psi(), pair), pair,
                                  pair_base(pair, e), e);
}

}  // namespace ohara
