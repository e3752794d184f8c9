#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "spectral.hpp"

namespace ohara {

inline constexpr int kMaxDimension = 8;

// Small vectors live on the stack; pair loops never allocate.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDimension, 1>;
using Samples = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// A point of the parameter circle. index >= 0 marks a grid node, which lets
// fields answer from their samples instead of interpolating.
struct Station {
  double s = 0.0;
  long index = -1;
};

struct PairFrame {
  Station first;   // s1
  Station second;  // s2
  double ds = 0.0;        // signed short-arc separation s1 - s2 in (-L/2, L/2]
  double distance = 0.0;  // D = |ds|
  double chord = 0.0;     // |f(s1) - f(s2)|
  Vec df;                 // f(s1) - f(s2)
};

// Representative of ds in (-L/2, L/2].
inline double short_arc(double ds, double length) {
  double r = std::remainder(ds, length);
  if (r <= -0.5 * length) r += length;
  return r;
}

// Periodic samples on the uniform grid s_i = i L / M, together with a
// primitive so that integrals over any arc cost O(1).
class Field {
 public:
  Field() = default;

  Field(double period, Samples values) : period_(period), values_(std::move(values)) {
    const auto m = values_.rows();
    require(m >= 2, "field needs at least two samples");
    require(values_.cols() >= 1 && values_.cols() <= kMaxDimension, "field dimension out of range");
    mean_ = Vec::Zero(values_.cols());
    primitive_.resize(m, values_.cols());
    for (Eigen::Index c = 0; c < values_.cols(); ++c) {
      const auto col = column(values_, c);
      auto spec = spectral::analyze(col);
      mean_(c) = spec[0].real();
      const auto q = spectral::synthesize(spectral::integrate_periodic(spec, period_));
      for (Eigen::Index i = 0; i < m; ++i) primitive_(i, c) = q[static_cast<std::size_t>(i)];
      value_spec_.push_back(std::move(spec));
    }
    build_primitive_spectra();
  }

  // The caller supplies an exact periodic primitive (e.g. positions for the
  // tangent field), so arc integrals reduce to endpoint differences.
  static Field with_primitive(double period, Samples values, Samples primitive) {
    require(values.rows() == primitive.rows() && values.cols() == primitive.cols(),
            "primitive shape mismatch");
    Field f;
    f.period_ = period;
    f.values_ = std::move(values);
    f.primitive_ = std::move(primitive);
    f.mean_ = Vec::Zero(f.values_.cols());
    for (Eigen::Index c = 0; c < f.values_.cols(); ++c)
      f.value_spec_.push_back(spectral::analyze(column(f.values_, c)));
    f.build_primitive_spectra();
    return f;
  }

  std::size_t size() const { return static_cast<std::size_t>(values_.rows()); }
  int dim() const { return static_cast<int>(values_.cols()); }
  double period() const { return period_; }
  double spacing() const { return period_ / static_cast<double>(size()); }
  const Samples& samples() const { return values_; }
  const Samples& primitive_samples() const { return primitive_; }
  const Vec& mean() const { return mean_; }

  auto row(std::size_t i) const { return values_.row(static_cast<Eigen::Index>(i)); }

  Vec value(const Station& st) const {
    if (st.index >= 0) return values_.row(st.index).transpose();
    Vec v(dim());
    for (int c = 0; c < dim(); ++c) v(c) = spectral::evaluate(value_spec_[c], st.s, period_);
    return v;
  }
  double scalar(const Station& st) const {
    if (st.index >= 0) return values_(st.index, 0);
    return spectral::evaluate(value_spec_[0], st.s, period_);
  }

  // Integral from s2 to s1 along the short arc (sign follows ds).
  Vec integral(const PairFrame& pair) const {
    return mean_ * pair.ds + primitive(pair.first) - primitive(pair.second);
  }
  double scalar_integral(const PairFrame& pair) const {
    return mean_(0) * pair.ds + primitive_scalar(pair.first) - primitive_scalar(pair.second);
  }

  // Spectral derivative; its primitive is this field, exactly.
  Field derivative() const {
    Samples d(values_.rows(), values_.cols());
    for (int c = 0; c < dim(); ++c) {
      const auto col = spectral::synthesize(spectral::differentiate(value_spec_[c], period_));
      for (Eigen::Index i = 0; i < values_.rows(); ++i) d(i, c) = col[static_cast<std::size_t>(i)];
    }
    return with_primitive(period_, std::move(d), values_);
  }

  double sup_norm() const {
    double m = 0.0;
    for (Eigen::Index i = 0; i < values_.rows(); ++i) m = std::max(m, values_.row(i).norm());
    return m;
  }

 private:
  static std::vector<double> column(const Samples& s, Eigen::Index c) {
    std::vector<double> out(static_cast<std::size_t>(s.rows()));
    for (Eigen::Index i = 0; i < s.rows(); ++i) out[static_cast<std::size_t>(i)] = s(i, c);
    return out;
  }

  void build_primitive_spectra() {
    primitive_spec_.clear();
    for (Eigen::Index c = 0; c < primitive_.cols(); ++c)
      primitive_spec_.push_back(spectral::analyze(column(primitive_, c)));
  }

  Vec primitive(const Station& st) const {
    if (st.index >= 0) return primitive_.row(st.index).transpose();
    Vec v(dim());
    for (int c = 0; c < dim(); ++c) v(c) = spectral::evaluate(primitive_spec_[c], st.s, period_);
    return v;
  }
  double primitive_scalar(const Station& st) const {
    if (st.index >= 0) return primitive_(st.index, 0);
    return spectral::evaluate(primitive_spec_[0], st.s, period_);
  }

  double period_ = 0.0;
  Samples values_;
  Samples primitive_;
  Vec mean_;
  std::vector<spectral::Spectrum> value_spec_;
  std::vector<spectral::Spectrum> primitive_spec_;
};

// Pointwise inner product u.v as a scalar field.
inline Field inner_product(const Field& u, const Field& v) {
  require(u.size() == v.size() && u.dim() == v.dim(), "inner_product: shape mismatch");
  Samples w(static_cast<Eigen::Index>(u.size()), 1);
  for (std::size_t i = 0; i < u.size(); ++i) w(static_cast<Eigen::Index>(i), 0) = u.row(i).dot(v.row(i));
  return Field(u.period(), std::move(w));
}

inline Vec arc_integral(const Field& u, const PairFrame& pair) { return u.integral(pair); }

struct CurveTolerances {
  double tangent = 1e-8;        // | |tau| - 1 |
  double orthogonality = 1e-6;  // |kappa . tau|
  double contact = 1e-9;        // minimal chord, relative to L
};

class ClosedCurve {
 public:
  // Resamples a closed polygon of points (rows) to M nodes at uniform arclength
  // of its trigonometric interpolant. M = 0 keeps the input count.
  static ClosedCurve from_samples(const Samples& points, bool closed = true, std::size_t resolution = 0,
                                  const CurveTolerances& tol = {}) {
    require(closed, "open curves are not supported");
    const auto m = static_cast<std::size_t>(points.rows());
    const int n = static_cast<int>(points.cols());
    require(n >= 2 && n <= kMaxDimension, "curve dimension must be in [2, 8]");
    require(m >= 8, "need at least 8 input points");
    const std::size_t M = resolution == 0 ? m : resolution;
    require(M >= 16 && M % 2 == 0, "sample count M must be even and >= 16");
    require(points.allFinite(), "non-finite coordinates");
    double scale = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double d = (points.row(static_cast<Eigen::Index>((i + 1) % m)) - points.row(static_cast<Eigen::Index>(i))).norm();
      scale = std::max(scale, d);
    }
    require(scale > 0.0, "degenerate curve: all points coincide");
    for (std::size_t i = 0; i < m; ++i) {
      const double d = (points.row(static_cast<Eigen::Index>((i + 1) % m)) - points.row(static_cast<Eigen::Index>(i))).norm();
      require(d > 1e-14 * scale, "degenerate curve: repeated consecutive points");
    }

    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::vector<spectral::Spectrum> coef(n), dcoef(n);
    for (int c = 0; c < n; ++c) {
      std::vector<double> col(m);
      for (std::size_t i = 0; i < m; ++i) col[i] = points(static_cast<Eigen::Index>(i), c);
      coef[c] = spectral::analyze(col);
      dcoef[c] = spectral::differentiate(coef[c], two_pi);
    }

    std::size_t Q = 1;
    while (Q < 8 * std::max(m, M)) Q *= 2;
    std::vector<double> speed(Q, 0.0);
    for (int c = 0; c < n; ++c) {
      const auto d = spectral::synthesize(spectral::pad(dcoef[c], Q));
      for (std::size_t q = 0; q < Q; ++q) speed[q] += d[q] * d[q];
    }
    for (auto& v : speed) v = std::sqrt(v);
    const auto [lo, hi] = std::minmax_element(speed.begin(), speed.end());
    require(*lo > 1e-10 * *hi, "degenerate curve: interpolant has a stationary point");

    const auto S = spectral::analyze(speed);
    const double S0 = S[0].real();
    const double L = two_pi * S0;
    require(L > 0.0 && std::isfinite(L), "degenerate curve: zero length");

    const auto P = spectral::integrate_periodic(S, two_pi);
    const auto Pq = spectral::synthesize(P);
    std::vector<double> table(Q + 1);
    for (std::size_t q = 0; q < Q; ++q) table[q] = S0 * two_pi * static_cast<double>(q) / Q + Pq[q] - Pq[0];
    table[Q] = L;

    // Truncated primitive series for Newton; tail below roundoff is dropped.
    std::size_t kmax = 1;
    for (std::size_t k = 1; k < Q / 2; ++k)
      if (std::abs(S[k]) > 1e-18 * S0) kmax = k;
    spectral::Spectrum Pt(2 * kmax + 2);
    for (std::size_t k = 1; k <= kmax; ++k) {
      Pt[k] = P[k];
      Pt[Pt.size() - k] = P[Q - k];
    }

    auto speed_at = [&](double t) {
      double s2 = 0.0;
      for (int c = 0; c < n; ++c) {
        const double d = spectral::evaluate(dcoef[c], t, two_pi);
        s2 += d * d;
      }
      return std::sqrt(s2);
    };

    Samples F(static_cast<Eigen::Index>(M), n);
    for (std::size_t i = 0; i < M; ++i) {
      const double target = L * static_cast<double>(i) / static_cast<double>(M);
      auto it = std::upper_bound(table.begin(), table.end(), target);
      std::size_t q = static_cast<std::size_t>(std::distance(table.begin(), it));
      q = std::clamp<std::size_t>(q, 1, Q) - 1;
      const double t0 = two_pi * static_cast<double>(q) / Q;
      const double t1 = two_pi * static_cast<double>(q + 1) / Q;
      double t = t0 + (target - table[q]) / (table[q + 1] - table[q]) * (t1 - t0);
      for (int iter = 0; iter < 40; ++iter) {
        const double r = S0 * t + spectral::evaluate(Pt, t, two_pi) - Pq[0] - target;
        const double step = -r / speed_at(t);
        t = std::clamp(t + step, t0, t1);
        if (std::abs(step) < 1e-16 * two_pi) break;
      }
      for (int c = 0; c < n; ++c) F(static_cast<Eigen::Index>(i), c) = spectral::evaluate(coef[c], t, two_pi);
    }
    return ClosedCurve(std::move(F), L, tol);
  }

  std::size_t size() const { return positions_.size(); }
  int dimension() const { return positions_.dim(); }
  double length() const { return length_; }
  double spacing() const { return length_ / static_cast<double>(size()); }
  double parameter(std::size_t i) const { return spacing() * static_cast<double>(i); }
  Station station(std::size_t i) const { return {parameter(i), static_cast<long>(i)}; }

  const Field& positions() const { return positions_; }
  const Field& tangents() const { return tangents_; }
  const Field& curvatures() const { return curvatures_; }

  // x -> R x + t applied to the arclength samples; no resampling.
  ClosedCurve transformed(const Eigen::MatrixXd& R, const Vec& t, const CurveTolerances& tol = {}) const {
    require(R.rows() == dimension() && R.cols() == dimension() && t.size() == dimension(),
            "rigid motion dimension mismatch");
    Samples y = positions_.samples() * R.transpose();
    y.rowwise() += t.transpose();
    return ClosedCurve(std::move(y), length_, tol);
  }

  // Same curve with node k as the new first node (exact reparametrization
  // s -> s + k h).
  ClosedCurve shifted(long k, const CurveTolerances& tol = {}) const {
    const long M = static_cast<long>(size());
    Samples y(positions_.samples().rows(), positions_.samples().cols());
    for (long i = 0; i < M; ++i) y.row(i) = positions_.samples().row(((i + k) % M + M) % M);
    return ClosedCurve(std::move(y), length_, tol);
  }

  // Offsets |k| up to this count have accurately differenced chords.
  std::size_t near_offsets() const { return near_count_; }
  // f(s_{j+k}) - f(s_j), |k| <= near_offsets().
  Vec offset_difference(std::size_t j, long k) const {
    const long M = static_cast<long>(size());
    if (k > 0) return near_[static_cast<std::size_t>(k - 1)].row(static_cast<Eigen::Index>(j)).transpose();
    const auto i = static_cast<Eigen::Index>(((static_cast<long>(j) + k) % M + M) % M);
    return -near_[static_cast<std::size_t>(-k - 1)].row(i).transpose();
  }

 private:
  ClosedCurve(Samples arclength_positions, double length, const CurveTolerances& tol)
      : length_(length), positions_(length, std::move(arclength_positions)) {
    tangents_ = positions_.derivative();
    curvatures_ = tangents_.derivative();
    const std::size_t M = size();
    double worst_speed = 0.0, worst_orth = 0.0;
    Vec sum = Vec::Zero(dimension());
    for (std::size_t i = 0; i < M; ++i) {
      worst_speed = std::max(worst_speed, std::abs(tangents_.row(i).norm() - 1.0));
      worst_orth = std::max(worst_orth, std::abs(tangents_.row(i).dot(curvatures_.row(i))));
      sum += tangents_.row(i).transpose();
    }
    if (worst_speed > tol.tangent)
      throw NumericalError("under-resolved curve: max | |tau| - 1 | = " + std::to_string(worst_speed));
    if (worst_orth > tol.orthogonality)
      throw NumericalError("under-resolved curve: max |kappa . tau| = " + std::to_string(worst_orth));
    if (sum.norm() * spacing() > 1e-8 * length_) throw NumericalError("curve does not close up");
    build_near_differences();
    const double contact = tol.contact * length_;
    for (std::size_t i = 0; i < M; ++i)
      for (std::size_t j = i + 1; j < M; ++j)
        if ((positions_.row(i) - positions_.row(j)).norm() < contact)
          throw ValidationError("self-intersecting curve: chord below 1e-9 L between samples " +
                                std::to_string(i) + " and " + std::to_string(j));
  }

  // f(s_j + k h) - f(s_j) for 1 <= k <= K as the inverse transform of
  // c_m (exp(i w_m k h) - 1). Subtracting two O(1) samples loses the leading
  // digits of a short chord; this keeps its relative precision.
  void build_near_differences() {
    const std::size_t M = size();
    near_count_ = std::min<std::size_t>(16, M / 4);
    near_.assign(near_count_, Samples(static_cast<Eigen::Index>(M), dimension()));
    std::vector<spectral::Spectrum> coef(static_cast<std::size_t>(dimension()));
    for (int c = 0; c < dimension(); ++c) {
      std::vector<double> col(M);
      for (std::size_t i = 0; i < M; ++i) col[i] = positions_.samples()(static_cast<Eigen::Index>(i), c);
      coef[static_cast<std::size_t>(c)] = spectral::analyze(col);
    }
    for (std::size_t k = 1; k <= near_count_; ++k) {
      spectral::Spectrum factor(M);
      for (std::size_t m = 0; m < M; ++m) {
        const double half = std::numbers::pi * static_cast<double>(spectral::frequency(m, M) * static_cast<long>(k)) /
                            static_cast<double>(M);
        factor[m] = spectral::Complex(0.0, 2.0 * std::sin(half)) * std::polar(1.0, half);
      }
      for (int c = 0; c < dimension(); ++c) {
        spectral::Spectrum d = coef[static_cast<std::size_t>(c)];
        for (std::size_t m = 0; m < M; ++m) d[m] *= factor[m];
        const auto v = spectral::synthesize(d);
        for (std::size_t i = 0; i < M; ++i) near_[k - 1](static_cast<Eigen::Index>(i), c) = v[i];
      }
    }
  }

  double length_ = 0.0;
  Field positions_;
  Field tangents_;
  Field curvatures_;
  std::size_t near_count_ = 0;
  std::vector<Samples> near_;
};

// Pair (j + k, j) with ds = k h exactly; k in [-M/2, M/2] \ {0}. Both signs of
// the antipodal offset are allowed so that quadrature can see either arc.
inline PairFrame pair_at_offset(const ClosedCurve& curve, std::size_t j, long k) {
  const long M = static_cast<long>(curve.size());
  const auto i = static_cast<std::size_t>(((static_cast<long>(j) + k) % M + M) % M);
  PairFrame p;
  p.first = curve.station(i);
  p.second = curve.station(j);
  p.ds = curve.spacing() * static_cast<double>(k);
  p.distance = std::abs(p.ds);
  if (static_cast<std::size_t>(std::abs(k)) <= curve.near_offsets())
    p.df = curve.offset_difference(j, k);
  else
    p.df = (curve.positions().row(i) - curve.positions().row(j)).transpose();
  p.chord = p.df.norm();
  return p;
}

inline PairFrame pair_frame(const ClosedCurve& curve, std::size_t i, std::size_t j) {
  require(i != j, "pair_frame: diagonal pair (use the diagonal limit operations)");
  const long M = static_cast<long>(curve.size());
  long k = ((static_cast<long>(i) - static_cast<long>(j)) % M + M) % M;
  if (k > M / 2) k -= M;
  return pair_at_offset(curve, j, k);
}

// Off-grid pair; positions come from the trigonometric interpolant.
inline PairFrame pair_at(const ClosedCurve& curve, double s1, double s2) {
  PairFrame p;
  p.first = {s1, -1};
  p.second = {s2, -1};
  p.ds = short_arc(s1 - s2, curve.length());
  require(p.ds != 0.0, "pair_at: diagonal pair");
  p.distance = std::abs(p.ds);
  p.df = curve.positions().value(p.first) - curve.positions().value(p.second);
  p.chord = p.df.norm();
  return p;
}

struct BiLipschitz {
  double constant = 1.0;
  bool within_cap = true;
  std::size_t i = 0, j = 0;  // worst pair
};

inline BiLipschitz bilipschitz_constant(const ClosedCurve& curve, double cap = 1e6) {
  BiLipschitz out;
  const std::size_t M = curve.size();
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t j = i + 1; j < M; ++j) {
      const auto p = pair_frame(curve, i, j);
      const double r = p.distance / p.chord;
      if (r > out.constant) out = {r, true, i, j};
    }
  out.within_cap = out.constant <= cap;
  return out;
}

}  // namespace ohara
