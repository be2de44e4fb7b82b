#pragma once
// Smooth prescribed fields shared by the characteristic tests and the
// acceptance run.

#include <cmath>

#include "rvm/characteristics.hpp"

namespace fixture {

using rvm::EMField;
using rvm::Vec3;
using rvm::characteristics::AnalyticField;
using rvm::characteristics::FieldGradient;

/// Static trigonometric field with its analytic gradient.
inline AnalyticField trig_field() {
  return AnalyticField(
      [](double, const Vec3& x) {
        return EMField{0.5 * Vec3(std::sin(x.y()), std::cos(x.z()), std::sin(x.x())),
                       0.5 * Vec3(std::cos(x.z()), std::sin(x.x()), std::cos(x.y()))};
      },
      [](double, const Vec3& x) {
        FieldGradient g;
        g.dE(0, 1) = 0.5 * std::cos(x.y());
        g.dE(1, 2) = -0.5 * std::sin(x.z());
        g.dE(2, 0) = 0.5 * std::cos(x.x());
        g.dB(0, 2) = -0.5 * std::sin(x.z());
        g.dB(1, 0) = 0.5 * std::cos(x.x());
        g.dB(2, 1) = -0.5 * std::sin(x.y());
        return g;
      });
}

/// Time-dependent travelling field; gradient by finite differences.
inline AnalyticField wave_field() {
  return AnalyticField([](double t, const Vec3& x) {
    const double ph = 2.0 * x.x() - t;
    return EMField{Vec3(0.2 * std::cos(x.y()), 0.8 * std::sin(ph), 0.3 * std::cos(t + x.z())),
                   Vec3(0.4 * std::sin(t), 0.1, 0.8 * std::sin(ph) + 0.2 * std::cos(x.y() * x.z()))};
  });
}

/// Localized Gaussian bump with a rotating magnetic part.
inline AnalyticField bump_field() {
  return AnalyticField([](double t, const Vec3& x) {
    const double g = std::exp(-x.squaredNorm());
    return EMField{1.5 * g * Vec3(1.0, -x.z(), x.y()),
                   g * Vec3(std::cos(t), std::sin(t), 0.5 + x.x())};
  });
}

}  // namespace fixture
