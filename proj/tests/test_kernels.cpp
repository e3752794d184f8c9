#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss.hpp>
#include <gtest/gtest.h>

#include <ohara/curve.hpp>
#include <ohara/kernels.hpp>
#include <ohara/synthetic.hpp>

using namespace ohara;
using std::numbers::pi;

namespace {
ClosedCurve circle(std::size_t m = 256) { return ClosedCurve::from_samples(synthetic::circle(m), true); }
ClosedCurve wiggly(std::uint64_t seed, std::size_t m = 128) {
  return ClosedCurve::from_samples(synthetic::random_curve(seed, m), true, m);
}

// N(u,v) straight from the double integral over the short arc, on the
// trigonometric interpolants.
double n_direct(const Field& u, const Field& v, const PairFrame& pair) {
  using G = boost::math::quadrature::gauss<double, 40>;
  const double a = pair.second.s, len = pair.ds;
  const auto& x = G::abscissa();
  const auto& w = G::weights();
  std::vector<double> t, wt;
  for (std::size_t k = 0; k < x.size(); ++k)
    for (int sgn : {1, -1}) {
      if (k == 0 && sgn < 0 && x[0] == 0.0) continue;
      t.push_back(a + 0.5 * len * (1.0 + sgn * x[k]));
      wt.push_back(0.5 * len * w[k]);
    }
  std::vector<Vec> U, V;
  for (double s : t) {
    U.push_back(u.value({s, -1}));
    V.push_back(v.value({s, -1}));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = 0; j < t.size(); ++j) sum += wt[i] * wt[j] * (U[i] - U[j]).dot(V[i] - V[j]);
  return sum / (2.0 * pair.chord * pair.chord);
}
}  // namespace

TEST(Kernels, PhiAlphaClosedForms) {
  for (double a : {1.0, 2.0, 3.5}) EXPECT_EQ(phi_alpha(0.0, a).value, 0.0);
  const auto f = phi_alpha(1.0, 2.0);
  EXPECT_NEAR(f.value, 0.5, 1e-15);
  EXPECT_NEAR(f.first, 0.25, 1e-15);
  EXPECT_NEAR(phi_alpha(0.0, 2.0).second, -2.0, 1e-15);
}

TEST(Kernels, PhiAlphaDerivativesAgainstCentralDifference) {
  const double t = 0.5, a = 2.5, h = 1e-5;
  const auto f = phi_alpha(t, a);
  EXPECT_NEAR(f.first, (phi_alpha(t + h, a).value - phi_alpha(t - h, a).value) / (2 * h), 1e-8);
  EXPECT_NEAR(f.second, (phi_alpha(t + h, a).first - phi_alpha(t - h, a).first) / (2 * h), 1e-8);
}

TEST(Kernels, PhiAlphaRangeAndMonotone) {
  for (double a : {0.8, 2.0, 2.9}) {
    double prev = -1.0;
    for (double t = 0.0; t < 50.0; t += 0.37) {
      const double v = phi_alpha(t, a).value;
      EXPECT_GE(v, 0.0);
      EXPECT_LT(v, 1.0);
      EXPECT_GT(v, prev);
      prev = v;
    }
  }
  EXPECT_THROW(phi_alpha(-1e-3, 2.0), ValidationError);
}

TEST(Kernels, PowerGapInequality) {
  for (double a = 0.5; a <= 3.0; a += 0.25)
    for (double x = 0.0; x <= 1.0; x += 0.01)
      EXPECT_LE(1.0 - std::pow(x, a), (a / 2 + 1.0) * (1.0 - x * x) + 1e-15);
}

TEST(Kernels, EnergyParamsDomain) {
  EXPECT_NO_THROW(EnergyParams::make(2.0, 1.0));
  EXPECT_NO_THROW(EnergyParams::make(1.2, 2.0));
  EXPECT_THROW(EnergyParams::make(3.0, 1.0), ValidationError);  // alpha p = 2p + 1
  EXPECT_THROW(EnergyParams::make(1.5, 1.0), ValidationError);  // alpha p < 2
  EXPECT_THROW(EnergyParams::make(3.0, 0.5), ValidationError);
  const auto e = EnergyParams::make(2.4, 1.0);
  EXPECT_NEAR(e.sigma(), 0.7, 1e-15);
  EXPECT_GT(e.sigma(), 0.0);
  EXPECT_LT(e.sigma(), 1.0);
  EXPECT_EQ(EnergyParams::make(1.2, 2.0).beta, 0.6);
  EXPECT_EQ(EnergyParams::make(2.4, 1.0).beta, 1.0);
}

TEST(Kernels, NVanishesForConstants) {
  const auto c = wiggly(1);
  const Field k(c.length(), Samples::Constant(128, c.dimension(), 0.4));
  EXPECT_NEAR(n_bilinear(k, k, pair_frame(c, 30, 2)), 0.0, 1e-13);
}

TEST(Kernels, NTauOnCircleQuarterTurn) {
  const auto c = circle();
  const auto p = pair_frame(c, 64, 0);
  EXPECT_NEAR(n_bilinear(c.tangents(), c.tangents(), p), pi * pi / 8 - 1.0, 1e-9);
  EXPECT_NEAR(n_tau(p), pi * pi / 8 - 1.0, 1e-12);
}

TEST(Kernels, NAgainstDoubleIntegral) {
  const auto c = wiggly(3);
  const Field u = synthetic::random_field(10, c), v = synthetic::random_field(11, c);
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<std::size_t> pick(0, 127);
  for (int t = 0; t < 10; ++t) {
    std::size_t i = pick(rng), j = pick(rng);
    if (i == j) j = (j + 5) % 128;
    const auto p = pair_frame(c, i, j);
    const double ref = n_direct(u, v, p);
    EXPECT_NEAR(n_bilinear(u, v, p), ref, 1e-9 * std::max(std::abs(ref), 1e-3));
  }
}

TEST(Kernels, NSymmetricBilinear) {
  const auto c = wiggly(4);
  const Field u = synthetic::random_field(1, c), v = synthetic::random_field(2, c), w = synthetic::random_field(3, c);
  const Field uw(c.length(), Samples(2.0 * u.samples() - 3.0 * w.samples()));
  for (std::size_t i : {7u, 40u, 90u}) {
    const auto p = pair_frame(c, i, 1);
    const double uv = n_bilinear(u, v, p), vu = n_bilinear(v, u, p);
    EXPECT_NEAR(uv, vu, 1e-12 * std::max(1.0, std::abs(uv)));
    const double lin = 2.0 * n_bilinear(u, v, p) - 3.0 * n_bilinear(w, v, p);
    EXPECT_NEAR(n_bilinear(uw, v, p), lin, 1e-12 * std::max(1.0, std::abs(lin)));
  }
}

TEST(Kernels, NTauIdentityAtAllPairs) {
  const auto c = wiggly(6);
  for (std::size_t i = 0; i < 128; ++i)
    for (std::size_t j = 0; j < 128; ++j) {
      if (i == j) continue;
      const auto p = pair_frame(c, i, j);
      const double rhs = p.distance * p.distance / (p.chord * p.chord);
      EXPECT_NEAR(1.0 + n_tau(p), rhs, 1e-11 * rhs);
      // and through the arc-integral form
      EXPECT_NEAR(1.0 + n_bilinear(c.tangents(), c.tangents(), p), rhs, 1e-8 * rhs);
    }
}

TEST(Kernels, KBilinearBasics) {
  const auto c = wiggly(8);
  const Field k(c.length(), Samples::Constant(128, c.dimension(), 1.0));
  for (std::size_t i : {3u, 50u, 64u}) {
    const auto p = pair_frame(c, i, 0);
    EXPECT_NEAR(k_bilinear(c.positions(), c.positions(), p), 1.0, 1e-14);
    EXPECT_EQ(k_bilinear(c.positions(), k, p), 0.0);
  }
}

TEST(Kernels, KBilinearBound) {
  const auto c = wiggly(8);
  double Cb = 1.0;
  for (std::size_t i = 0; i < 128; ++i)
    for (std::size_t j = i + 1; j < 128; ++j) {
      const auto p = pair_frame(c, i, j);
      Cb = std::max(Cb, p.distance / p.chord);
    }
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Field u = synthetic::random_field(s, c), v = synthetic::random_field(s + 100, c);
    const double bound = Cb * Cb * u.derivative().sup_norm() * v.derivative().sup_norm();
    for (std::size_t i = 1; i < 128; i += 7)
      EXPECT_LE(std::abs(k_bilinear(u, v, pair_frame(c, i, 0))), bound * (1 + 1e-12));
  }
}

TEST(Kernels, MAlphaOnCircle) {
  const auto c = circle();
  const auto p = pair_frame(c, 64, 0);
  const double m = m_alpha(p, EnergyParams::make(2.0, 1.0));
  EXPECT_NEAR(m, 0.5 - 4.0 / (pi * pi), 1e-12);
  EXPECT_NEAR(density(p, EnergyParams::make(2.0, 2.0)), m * m, 1e-12);
  EXPECT_EQ(density(p, EnergyParams::make(2.0, 1.0)), m);
}

TEST(Kernels, MAlphaStraightSegmentIsZero) {
  PairFrame p;
  p.ds = p.distance = p.chord = 0.3;
  p.df = Vec::Zero(2);
  p.df(0) = 0.3;
  EXPECT_EQ(m_alpha(p, EnergyParams::make(2.0, 1.0)), 0.0);
}

TEST(Kernels, MAlphaMatchesDifferenceOfReciprocals) {
  const auto c = wiggly(12);
  const auto e = EnergyParams::make(2.4, 1.0);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> pick(0, 127);
  int done = 0;
  while (done < 100) {
    const std::size_t i = pick(rng), j = pick(rng);
    const auto p = i == j ? PairFrame{} : pair_frame(c, i, j);
    if (i == j || p.distance < 8 * c.spacing()) continue;  // the oracle itself cancels near the diagonal
    const double m = m_alpha(p, e);
    EXPECT_NEAR(m, std::pow(p.chord, -e.alpha) - std::pow(p.distance, -e.alpha), 1e-11 * m);
    ++done;
  }
}

TEST(Kernels, DensityNonNegative) {
  const auto c = wiggly(13);
  const auto e = EnergyParams::make(1.2, 2.0);
  for (std::size_t i = 0; i < 128; ++i)
    for (std::size_t j = 0; j < 128; ++j)
      if (i != j) EXPECT_GE(density(pair_frame(c, i, j), e), 0.0);
}

TEST(Kernels, WeightedDensity) {
  const auto c = circle(1024);
  const auto e = EnergyParams::make(1.2, 2.0);
  const auto p = pair_frame(c, 100, 3);
  EXPECT_NEAR(weighted_density(p, e, 0.6), density(p, e), 1e-15 * density(p, e));
  for (auto [a, q] : {std::pair{2.0, 1.0}, {2.5, 1.0}, {1.5, 2.0}}) {
    const auto ep = EnergyParams::make(a, q);
    const double lim = std::pow(a / 24.0, q);
    const auto near = pair_frame(c, 1, 0);  // ds = 2 pi / 1024, correction O(ds^2)
    EXPECT_NEAR(weighted_density(near, ep, 1.0), lim, 1e-4 * lim);
  }
}

TEST(Kernels, GeneralParameterDensity) {
  const auto c = wiggly(14);
  const auto e = EnergyParams::make(2.0, 2.0);
  const auto g0 = perturbed(c, synthetic::random_field(1, c), 0.0);
  for (std::size_t i : {9u, 33u, 70u})
    EXPECT_NEAR(density_general_param(g0, i, 2, e), density(pair_frame(c, i, 2), e),
                1e-10 * density(pair_frame(c, i, 2), e));
  Vec t(3);
  t << 0.3, -0.8, 1.1;
  const Field shift = synthetic::constant_field(c, t);
  for (double eps : {0.01, 0.1})
    for (std::size_t i : {9u, 70u}) {
      const double a = density_general_param(perturbed(c, shift, eps), i, 2, e);
      EXPECT_NEAR(a, density_general_param(g0, i, 2, e), 1e-12 * a);
    }
}
