// Acceptance checks. `acceptance` runs every criterion; `acceptance ID` runs
// one (IDs 1 2 3 4a 4b 5 ... 11). Exit status is nonzero if any run fails.
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ohara/ohara.hpp"

using namespace ohara;

namespace {

const std::vector<std::pair<double, double>> kParams = {{2.0, 1.0}, {2.4, 1.0}, {2.0, 2.0}, {1.2, 2.0}};

bool report(const std::string& id, bool ok, const std::string& what) {
  std::printf("%s criterion %s: %s\n", ok ? "PASS" : "FAIL", id.c_str(), what.c_str());
  std::fflush(stdout);
  return ok;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

ClosedCurve random_curve(std::uint64_t seed, std::size_t M) {
  return ClosedCurve::from_samples(synthetic::random_curve(seed, 64), true, M);
}

// 1. phi_a(N(tau)) / |df|^a against |df|^-a - D^-a evaluated in long double.
bool criterion_1() {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const ClosedCurve c = random_curve(seed, 256);
    const long N = static_cast<long>(c.size() / 2);
    for (const auto& [alpha, p] : kParams) {
      const EnergyParams e = EnergyParams::make(alpha, p);
      for (std::size_t j = 0; j < c.size(); ++j)
        for (long k = 3; k <= N; ++k) {  // off-band for the default band of 2 cells
          const PairFrame pair = pair_at_offset(c, j, k);
          const double lhs = m_alpha(pair, e);
          const long double cl = pair.chord, dl = pair.distance;
          const long double rhs = std::pow(cl, -static_cast<long double>(alpha)) -
                                  std::pow(dl, -static_cast<long double>(alpha));
          worst = std::max(worst, static_cast<double>(std::abs((lhs - rhs) / rhs)));
        }
    }
  }
  return report("1", worst <= 1e-11,
                fmt("density identity, 5 curves x 4 (alpha,p), max relative gap %.2e (tol 1e-11)", worst));
}

// 2. Integrated and pointwise first variation against finite differences.
bool criterion_2() {
  const ClosedCurve c = random_curve(3, 512);
  const Field phi = synthetic::random_field(11, c, 3);
  const Perturbation a(c, phi);
  double worst_int = 0.0, worst_pt = 0.0;
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> pick(0, c.size() - 1);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  while (pairs.size() < 20) {
    const std::size_t i = pick(rng), j = pick(rng);
    const long k = std::abs(static_cast<long>(i) - static_cast<long>(j));
    // Off the band and off the antipodal cut locus, where D is not differentiable.
    if (std::min<long>(k, static_cast<long>(c.size()) - k) > 2 && 2 * k != static_cast<long>(c.size()))
      pairs.emplace_back(i, j);
  }
  for (const auto& [alpha, p] : kParams) {
    const EnergyParams e = EnergyParams::make(alpha, p);
    const double g = first_variation(c, a, e).value;
    const double fd = fd_energy_gradient(c, phi, e).richardson;
    worst_int = std::max(worst_int, rel(g, fd));
    for (const auto& [i, j] : pairs) {
      const double gv = first_variation_density(a, pair_frame(c, i, j), e).sum();
      const double fv = fd_first_variation_density(c, phi, i, j, e).richardson;
      worst_pt = std::max(worst_pt, rel(gv, fv));
    }
  }
  return report("2", worst_int <= 1e-6 && worst_pt <= 1e-6,
                fmt("first variation vs FD: integrated %.2e, pointwise (20 pairs) %.2e (tol 1e-6)", worst_int,
                    worst_pt));
}

// 3. Second variation against the mixed difference of E, and symmetry of H.
bool criterion_3() {
  const ClosedCurve c = random_curve(3, 512);
  const Field phi = synthetic::random_field(11, c, 3), psi = synthetic::random_field(12, c, 3);
  const Perturbation a(c, phi), b(c, psi);
  const PerturbationPair ab(a, b), ba(b, a);
  double worst = 0.0, worst_raw = 0.0, worst_sym = 0.0;
  for (const auto& [alpha, p] : kParams) {
    const EnergyParams e = EnergyParams::make(alpha, p);
    const SecondVariation h = full_second_variation(c, ab, e);
    const double fd = fd_energy_hessian(c, phi, psi, e).richardson;
    worst = std::max(worst, rel(h.total(), fd));
    worst_raw = std::max(worst_raw, rel(h.pointwise.value, fd));
    for (std::size_t j = 0; j < c.size(); j += 7)
      for (std::size_t i = 0; i < c.size(); i += 13) {
        if (i == j) continue;
        const PairFrame pair = pair_frame(c, i, j);
        const double x = second_variation_density(ab, pair, e).sum();
        const double y = second_variation_density(ba, pair, e).sum();
        worst_sym = std::max(worst_sym, std::abs(x - y) / std::max(std::abs(x), 1e-300));
      }
  }
  std::printf("INFO criterion 3: integral of H alone (no cut-locus term) vs FD, max relative gap %.2e\n", worst_raw);
  return report("3", worst <= 1e-4 && worst_sym <= 1e-10,
                fmt("second variation vs mixed FD %.2e (tol 1e-4); H symmetry %.2e (tol 1e-10)", worst, worst_sym));
}

// 4a. Weighted circle density extrapolates to (alpha/24)^p.
bool criterion_4a() {
  double worst = 0.0;
  for (double alpha : {2.0, 2.4, 3.0})
    for (double p : {1.0, 2.0}) {
      std::vector<double> ds;
      for (int k = 0; k < 6; ++k) ds.push_back(std::numbers::pi / 8.0 / std::pow(2.0, k));
      const CircleTable t = circle_reference(alpha, p, ds);
      std::vector<double> w;
      for (const auto& r : t.rows) w.push_back(r.weighted);
      worst = std::max(worst, rel(richardson(w), t.limit));
    }
  return report("4a", worst <= 1e-5,
                fmt("circle D^((a-2)p) M -> (a/24)^p for a in {2,2.4,3}, p in {1,2}: max relative gap %.2e "
                    "(tol 1e-5)",
                    worst));
}

// 4b. Weight necessity at a single small separation.
bool criterion_4b() {
  const double alpha = 3.0, p = 1.0, ds = 1e-3;
  const double gamma = (alpha - 2.0) * p - 0.1;
  const double v = std::pow(ds, gamma) * circle_density(alpha, p, ds);
  return report("4b", v > 1e3,
                fmt("weighted circle density with exponent (a-2)p-0.1 at ds=1e-3, a=3, p=1: %.4g (required > 1e3)",
                    v));
}

// 5. Diagonal limits on the unit circle and the (2,1) ellipse at 8 points.
bool criterion_5() {
  double worst = 0.0;
  std::string where;
  const ClosedCurve circle = ClosedCurve::from_samples(synthetic::circle(64), true, 256);
  const ClosedCurve ellipse = ClosedCurve::from_samples(synthetic::ellipse(256, 2.0, 1.0), true, 256);
  for (const ClosedCurve* c : {&circle, &ellipse}) {
    const Field fa = synthetic::random_field(21, *c, 3), fb = synthetic::random_field(22, *c, 3);
    const Perturbation a(*c, fa), b(*c, fb);
    const PerturbationPair pp(a, b);
    for (const auto& [alpha, p] : std::vector<std::pair<double, double>>{{2.0, 1.0}, {2.4, 1.0}, {2.0, 2.0}}) {
      const EnergyParams e = EnergyParams::make(alpha, p);
      for (LimitKind k : {LimitKind::m_alpha, LimitKind::r1, LimitKind::r2, LimitKind::s1, LimitKind::s2,
                          LimitKind::s3, LimitKind::s4, LimitKind::s5})
        for (std::size_t s = 0; s < 8; ++s) {
          const LimitReport r = diagonal_limit(pp, e, s * c->size() / 8, k);
          if (r.relative_gap > worst) {
            worst = r.relative_gap;
            where = r.which;
          }
        }
    }
  }
  return report("5", worst <= 1e-4,
                fmt("diagonal limits M_alpha, R1, R2, S1-S5 on circle and ellipse, 8 points, 3 (alpha,p): max "
                    "relative gap %.2e at %s (tol 1e-4)",
                    worst, where.c_str()));
}

// 6. The eight L^1 bounds for p = 2.
bool criterion_6() {
  double worst = 1.0;
  bool ok = true;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const ClosedCurve c = random_curve(seed + 10, 256);
    const Field fa = synthetic::random_field(seed * 31, c, 3), fb = synthetic::random_field(seed * 31 + 1, c, 3);
    const Perturbation a(c, fa), b(c, fb);
    const ChainReport r = holder_chain_check(c, PerturbationPair(a, b), EnergyParams::make(2.0, 2.0));
    ok = ok && r.holds(1e-10);
    for (const auto& x : r.entries) worst = std::min(worst, x.relative_margin());
  }
  return report("6", ok, fmt("L1 chain G1, G2, H1-H6 on 5 instances, p=2: min relative margin %.3e (>= -1e-10)", worst));
}

// 7. Hoelder product estimate with constant 1.
bool criterion_7() {
  double worst = 1e300;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> beta(0.1, 1.0);
  for (std::uint64_t t = 0; t < 20; ++t) {
    const ClosedCurve c = random_curve(100 + t, 256);
    const Field phi = synthetic::random_field(500 + t, c, 1 + static_cast<int>(t % 5));
    const ProductCheck pc = product_seminorm_check(c, phi, beta(rng), 0.3, 4.0);
    worst = std::min(worst, (pc.rhs - pc.lhs) / pc.rhs);
  }
  return report("7", worst >= -1e-10,
                fmt("product estimate on 20 instances: min relative margin %.3e (>= -1e-10)", worst));
}

Samples shift_rows(const Samples& x, std::size_t s) {
  Samples y(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) y.row(i) = x.row((i + static_cast<Eigen::Index>(s)) % x.rows());
  return y;
}

// 8. Rigid motions, parameter shift, scaling.
bool criterion_8() {
  const std::size_t M = 256;
  const ClosedCurve c = random_curve(5, M);
  const Field phi = synthetic::random_field(41, c, 3), psi = synthetic::random_field(42, c, 3);
  const Eigen::Matrix3d R = Eigen::AngleAxisd(0.9, Eigen::Vector3d(1, -2, 0.5).normalized()).toRotationMatrix();
  const Eigen::RowVector3d t(0.4, -1.1, 2.3);
  const ClosedCurve cr = c.transformed(R, t.transpose());
  const ClosedCurve cs = c.shifted(37);
  const Field phir(cr.length(), phi.samples() * R.transpose()), psir(cr.length(), psi.samples() * R.transpose());
  const Field phis(cs.length(), shift_rows(phi.samples(), 37)), psis(cs.length(), shift_rows(psi.samples(), 37));
  double inv = 0.0, scale = 0.0, dil = 0.0;
  for (const auto& [alpha, p] : kParams) {
    const EnergyParams e = EnergyParams::make(alpha, p);
    auto triple = [&](const ClosedCurve& cv, const Field& u, const Field& v) {
      const Perturbation a(cv, u), b(cv, v);
      return std::array<double, 3>{energy(cv, e).value, first_variation(cv, a, e).value,
                                   second_variation(cv, PerturbationPair(a, b), e).value};
    };
    const auto base = triple(c, phi, psi), rot = triple(cr, phir, psir), sh = triple(cs, phis, psis);
    for (int q = 0; q < 3; ++q) {
      if (std::getenv("OHARA_DEBUG"))
        std::printf("  a=%g p=%g q=%d rot %.2e shift %.2e\n", alpha, p, q, rel(rot[q], base[q]), rel(sh[q], base[q]));
      inv = std::max({inv, rel(rot[q], base[q]), rel(sh[q], base[q])});
    }
    const ClosedCurve c2 = ClosedCurve::from_samples(2.0 * c.positions().samples(), true, M);
    scale = std::max(scale, rel(energy(c2, e).value, std::pow(2.0, 2.0 - alpha * p) * base[0]));
  }
  {
    const EnergyParams e = EnergyParams::make(2.0, 1.0);
    const Perturbation f(c, synthetic::position_field(c));
    const double E = energy(c, e).value;
    dil = std::max(std::abs(first_variation(c, f, e).value),
                   std::abs(full_second_variation(c, PerturbationPair(f, f), e).total())) / E;
  }
  return report("8", inv <= 1e-12 && scale <= 1e-8 && dil <= 1e-6,
                fmt("rigid/shift invariance of E, dE, d2E %.2e (tol 1e-12); scaling %.2e (tol 1e-8); (2,1) dilation "
                    "variations / E %.2e (tol 1e-6)",
                    inv, scale, dil));
}

// 9. Circle Moebius energy against an independent 1D quadrature.
bool criterion_9() {
  const double half = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [](double x) {
        if (x < 1e-4) return 1.0 / 12.0 + x * x / 240.0;
        const double c = 2.0 * std::sin(0.5 * x);
        return 1.0 / (c * c) - 1.0 / (x * x);
      },
      0.0, std::numbers::pi, 15, 1e-15);
  const double ref = 4.0 * std::numbers::pi * half;
  const EnergyParams e = EnergyParams::make(2.0, 1.0);
  const double e512 = energy(ClosedCurve::from_samples(synthetic::circle(64), true, 512), e).value;
  const double e1024 = energy(ClosedCurve::from_samples(synthetic::circle(64), true, 1024), e).value;
  return report("9", rel(e512, ref) <= 1e-8 && rel(e1024, e512) <= 1e-6,
                fmt("circle (2,1) energy %.15g vs 1D oracle %.15g: %.2e (tol 1e-8); M 512->1024 %.2e (tol 1e-6)",
                    e512, ref, rel(e512, ref), rel(e1024, e512)));
}

// 10. Length-constrained descent from a 5% mode-3 wobble.
bool criterion_10() {
  const auto t0 = std::chrono::steady_clock::now();
  const EnergyParams e = EnergyParams::make(2.0, 1.0);
  const ClosedCurve start = ClosedCurve::from_samples(synthetic::wobbly_circle(256, 0.05, 3), true, 256);
  const ClosedCurve round =
      ClosedCurve::from_samples(synthetic::circle(256, start.length() / (2.0 * std::numbers::pi)), true, 256);
  FlowState st = start_flow(start, e);
  while (st.step < 50 && !st.halted) st = flow_step(std::move(st), e);
  bool strict = true;
  for (std::size_t k = 1; k < st.energy.size(); ++k) strict = strict && st.energy[k] < st.energy[k - 1];
  const double d0 = rigid_distance(start, round), d1 = rigid_distance(st.curve, round);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report("10", st.step >= 50 && strict && d1 < d0,
                fmt("flow: %zu accepted steps, strictly decreasing %s, E %.8g -> %.8g, distance to circle %.3e -> "
                    "%.3e, %.1f s",
                    st.step, strict ? "yes" : "no", st.energy.front(), st.energy.back(), d0, d1, secs));
}

// 11. ||G||_L1 / ||phi'||_{W^{sigma,2p} cap L^inf} over 20 random phi.
bool criterion_11() {
  const ClosedCurve c = random_curve(9, 256);
  double spread = 0.0;
  for (const auto& [alpha, p] : std::vector<std::pair<double, double>>{{2.0, 1.0}, {2.0, 2.0}}) {
    const EnergyParams e = EnergyParams::make(alpha, p);
    double lo = 1e300, hi = 0.0;
    for (int t = 0; t < 20; ++t) {
      const Field phi = synthetic::random_field(900 + t, c, 1 + t % 6);
      const Perturbation a(c, phi);
      const PairGrid g = density_grid(c, e, GridKind::first_variation, std::nullopt, &a);
      const double r = g.l1() / sobolev_linf_norm(phi.derivative(), e.sigma(), 2.0 * e.p);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    spread = std::max(spread, hi / lo);
  }
  return report("11", spread <= 10.0, fmt("max/min of ||G||_L1 / ||phi'|| over 20 fields: %.3f (<= 10)", spread));
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<bool()>>> all = {
      {"1", criterion_1},   {"2", criterion_2}, {"3", criterion_3}, {"4a", criterion_4a},
      {"4b", criterion_4b}, {"5", criterion_5}, {"6", criterion_6}, {"7", criterion_7},
      {"8", criterion_8},   {"9", criterion_9}, {"10", criterion_10}, {"11", criterion_11}};
  bool ok = true, ran = false;
  for (const auto& [id, fn] : all) {
    if (argc > 1 && id != argv[1]) continue;
    ran = true;
    try {
      ok = fn() && ok;
    } catch (const std::exception& ex) {
      ok = report(id, false, std::string("exception: ") + ex.what()) && ok;
    }
  }
  if (!ran) {
    std::fprintf(stderr, "unknown criterion %s\n", argv[1]);
    return 2;
  }
  return ok ? 0 : 1;
}
