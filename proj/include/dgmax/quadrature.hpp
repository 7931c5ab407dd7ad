// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>

#include <Eigen/Dense>

namespace dgmax
{

/// Points are stored row-wise in reference coordinates: (x, y, z) on the unit
/// tetrahedron {x, y, z >= 0, x + y + z <= 1}, (u, v) on the unit triangle
/// {u, v >= 0, u + v <= 1}. Weights sum to the reference measure (1/6, 1/2).
struct QuadratureRule
{
    Eigen::MatrixXd points;
    Eigen::VectorXd weights;
    int degree = 0;

    int size() const { return static_cast<int>(weights.size()); }
};

class QuadratureDegreeError : public std::out_of_range
{
  public:
    using std::out_of_range::out_of_range;
};

inline constexpr int kMaxQuadratureDegree = 30;

/// Gauss-Jacobi rule on [0, 1] for the weight (1 - x)^alpha, n points.
QuadratureRule gauss_jacobi_unit(int n, double alpha);

/// Collapsed (conical product) rule on the unit tetrahedron, exact for total degree <= d.
QuadratureRule volume_quadrature(int degree);

/// Rule on the unit triangle exact for total degree <= d.
QuadratureRule face_quadrature(int degree);

}  // namespace dgmax
