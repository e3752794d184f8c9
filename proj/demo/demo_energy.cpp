// Energy of a curve file for a few (alpha, p), with the first variation along
// the dilation field as a scale-invariance check.
#include <cmath>
#include <cstdio>
#include <exception>

#include <ohara/io.hpp>
#include <ohara/ohara.hpp>

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: demo_energy CURVE.json [M]\n");
    return 1;
  }
  try {
    const std::size_t M = argc > 2 ? std::stoul(argv[2]) : 256;
    const auto file = ohara::io::read_curve(argv[1]);
    const auto curve = ohara::ClosedCurve::from_samples(file.points, file.closed, M);
    const ohara::Perturbation dilation(curve, ohara::synthetic::position_field(curve));
    std::printf("L = %.12f  M = %zu  C_b = %.6f\n", curve.length(), curve.size(),
                ohara::bilipschitz_constant(curve).constant);
    for (auto [a, p] : {std::pair{2.0, 1.0}, {2.4, 1.0}, {2.0, 2.0}, {1.2, 2.0}}) {
      const auto e = ohara::EnergyParams::make(a, p);
      const auto E = ohara::energy(curve, e);
      const double dE = ohara::first_variation(curve, dilation, e).value;
      // E((1+t) f) = (1+t)^(2 - alpha p) E(f)
      std::printf("alpha=%.1f p=%.0f  E=%.12f (+- %.1e)  dE[f]=%.6e  expected %.6e\n", a, p, E.value,
                  E.error_estimate, dE, (2.0 - a * p) * E.value);
      if (std::abs(dE - (2.0 - a * p) * E.value) > 1e-6 * E.value) return 2;
    }
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 1;
  }
  return 0;
}
