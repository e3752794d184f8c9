#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "curve.hpp"

// Test curves and displacement fields used by the CLI, the demos and the tests.
namespace ohara::synthetic {

inline Samples circle(std::size_t m, double radius = 1.0, int dimension = 2) {
  Samples P = Samples::Zero(static_cast<Eigen::Index>(m), dimension);
  for (std::size_t i = 0; i < m; ++i) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(m);
    P(static_cast<Eigen::Index>(i), 0) = radius * std::cos(t);
    P(static_cast<Eigen::Index>(i), 1) = radius * std::sin(t);
  }
  return P;
}

inline Samples ellipse(std::size_t m, double a, double b) {
  Samples P(static_cast<Eigen::Index>(m), 2);
  for (std::size_t i = 0; i < m; ++i) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(m);
    P(static_cast<Eigen::Index>(i), 0) = a * std::cos(t);
    P(static_cast<Eigen::Index>(i), 1) = b * std::sin(t);
  }
  return P;
}

// Planar circle with radial wobble r = R (1 + amplitude cos(mode t)).
inline Samples wobbly_circle(std::size_t m, double amplitude, int mode, double radius = 1.0) {
  Samples P(static_cast<Eigen::Index>(m), 2);
  for (std::size_t i = 0; i < m; ++i) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(m);
    const double r = radius * (1.0 + amplitude * std::cos(mode * t));
    P(static_cast<Eigen::Index>(i), 0) = r * std::cos(t);
    P(static_cast<Eigen::Index>(i), 1) = r * std::sin(t);
  }
  return P;
}

// Unit circle in the xy-plane plus a few random low modes in all three
// coordinates; amplitudes are small enough to stay embedded.
inline Samples random_curve(std::uint64_t seed, std::size_t m, int modes = 3, double amplitude = 0.12) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Samples P = circle(m, 1.0, 3);
  for (int c = 0; c < 3; ++c)
    for (int k = 1; k <= modes; ++k) {
      const double a = amplitude * u(rng) / k, b = amplitude * u(rng) / k;
      for (std::size_t i = 0; i < m; ++i) {
        const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(m);
        P(static_cast<Eigen::Index>(i), c) += a * std::cos(k * t) + b * std::sin(k * t);
      }
    }
  return P;
}

// Random trigonometric displacement with modes 0..K on a curve of length L.
inline Field random_field(std::uint64_t seed, std::size_t m, double length, int dimension, int modes = 3) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Samples S = Samples::Zero(static_cast<Eigen::Index>(m), dimension);
  for (int c = 0; c < dimension; ++c)
    for (int k = 0; k <= modes; ++k) {
      const double a = u(rng) / (1.0 + k), b = k == 0 ? 0.0 : u(rng) / (1.0 + k);
      for (std::size_t i = 0; i < m; ++i) {
        const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(m);
        S(static_cast<Eigen::Index>(i), c) += a * std::cos(k * t) + b * std::sin(k * t);
      }
    }
  return Field(length, std::move(S));
}

inline Field random_field(std::uint64_t seed, const ClosedCurve& curve, int modes = 3) {
  return random_field(seed, curve.size(), curve.length(), curve.dimension(), modes);
}

inline Field constant_field(const ClosedCurve& curve, const Vec& c) {
  Samples S(static_cast<Eigen::Index>(curve.size()), curve.dimension());
  for (Eigen::Index i = 0; i < S.rows(); ++i) S.row(i) = c.transpose();
  return Field(curve.length(), std::move(S));
}

// The curve itself as a displacement (dilation direction).
inline Field position_field(const ClosedCurve& curve) {
  return Field(curve.length(), curve.positions().samples());
}

}  // namespace ohara::synthetic
