#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include <unsupported/Eigen/FFT>

// Trigonometric interpolation on a uniform periodic grid. Coefficients are
// normalised so that u_j = sum_k c_k exp(2 pi i j k / n).
namespace ohara::spectral {

using Complex = std::complex<double>;
using Spectrum = std::vector<Complex>;

inline long frequency(std::size_t k, std::size_t n) {
  return k <= n / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
}

inline Spectrum analyze(std::span<const double> u) {
  Eigen::FFT<double> fft;
  std::vector<double> in(u.begin(), u.end());
  Spectrum c;
  fft.fwd(c, in);
  const double scale = 1.0 / static_cast<double>(u.size());
  for (auto& x : c) x *= scale;
  return c;
}

inline std::vector<double> synthesize(const Spectrum& c) {
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  Spectrum out;
  fft.inv(out, c);
  std::vector<double> u(out.size());
  for (std::size_t j = 0; j < out.size(); ++j) u[j] = out[j].real();
  return u;
}

// d/ds of the interpolant for period P. The Nyquist mode is dropped (its
// derivative vanishes on the grid and is not real-representable).
inline Spectrum differentiate(const Spectrum& c, double period) {
  const std::size_t n = c.size();
  const double w = 2.0 * std::numbers::pi / period;
  Spectrum d(n);
  for (std::size_t k = 0; k < n; ++k) {
    const long f = frequency(k, n);
    if (n % 2 == 0 && k == n / 2) continue;
    d[k] = c[k] * Complex(0.0, w * static_cast<double>(f));
  }
  return d;
}

// Periodic part of an antiderivative; the mean c_0 is returned separately by
// the caller (the full primitive is c_0 * s + this).
inline Spectrum integrate_periodic(const Spectrum& c, double period) {
  const std::size_t n = c.size();
  const double w = 2.0 * std::numbers::pi / period;
  Spectrum q(n);
  for (std::size_t k = 1; k < n; ++k) {
    if (n % 2 == 0 && k == n / 2) continue;
    q[k] = c[k] / Complex(0.0, w * static_cast<double>(frequency(k, n)));
  }
  return q;
}

// Zero-pad (or keep) a spectrum to length m >= n, splitting the Nyquist mode.
inline Spectrum pad(const Spectrum& c, std::size_t m) {
  const std::size_t n = c.size();
  Spectrum out(m);
  for (std::size_t k = 0; k < n; ++k) {
    const long f = frequency(k, n);
    if (n % 2 == 0 && k == n / 2) {
      out[n / 2] += 0.5 * c[k];
      out[m - n / 2] += 0.5 * c[k];
      continue;
    }
    out[f >= 0 ? static_cast<std::size_t>(f) : m - static_cast<std::size_t>(-f)] = c[k];
  }
  return out;
}

// Value of the interpolant at s (period P). Nyquist mode enters as cos.
inline double evaluate(const Spectrum& c, double s, double period) {
  const std::size_t n = c.size();
  const double theta = 2.0 * std::numbers::pi * s / period;
  const std::size_t top = (n - 1) / 2;
  double sum = c[0].real();
  const Complex step = std::polar(1.0, theta);
  Complex e = step;
  for (std::size_t k = 1; k <= top; ++k) {
    if (k % 32 == 0) e = std::polar(1.0, theta * static_cast<double>(k));
    sum += 2.0 * (c[k] * e).real();
    e *= step;
  }
  if (n % 2 == 0) sum += c[n / 2].real() * std::cos(theta * static_cast<double>(n / 2));
  return sum;
}

}  // namespace ohara::spectral
