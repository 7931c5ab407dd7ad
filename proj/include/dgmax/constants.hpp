// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

namespace dgmax
{

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Vacuum permittivity (F/m) in the rounded form 1e-9 / (36 pi).
inline constexpr double kEps0 = 1.0e-9 / (36.0 * std::numbers::pi);
/// Vacuum permeability (H/m).
inline constexpr double kMu0 = 4.0e-7 * std::numbers::pi;
/// Speed of light, 1/sqrt(eps0 mu0) = 3e8 m/s with the constants above.
inline const double kC0 = 1.0 / std::sqrt(kEps0 * kMu0);
/// Free-space impedance sqrt(mu0/eps0).
inline const double kZ0 = std::sqrt(kMu0 / kEps0);

/// Highest solver polynomial degree.
inline constexpr int kMaxSolverDegree = 4;
/// Highest nodal degree the reference machinery builds (postprocessing uses k+2).
inline constexpr int kMaxNodalDegree = 6;

}  // namespace dgmax
