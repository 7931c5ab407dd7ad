// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <stdexcept>

#include <Eigen/Dense>

#include "dgmax/constants.hpp"
#include "dgmax/quadrature.hpp"

namespace dgmax
{

class UnsupportedDegreeError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

/// Number of scalar polynomials of total degree <= k in three variables.
constexpr int simplex_dimension(int k) { return (k + 1) * (k + 2) * (k + 3) / 6; }

/// Orthonormal (Dubiner) polynomials on the unit tetrahedron evaluated at points
/// (rows of `points`). Column j is the j-th mode; modes are L2(unit tet)
/// orthogonal with norm^2 = 1/8 (they are orthonormal on the bi-unit tetrahedron).
Eigen::MatrixXd orthonormal_basis(int degree, const Eigen::MatrixXd& points);
std::array<Eigen::MatrixXd, 3> orthonormal_basis_gradient(int degree,
                                                          const Eigen::MatrixXd& points);

/// Warp-and-blend interpolation nodes on the unit tetrahedron (rows).
Eigen::MatrixXd warp_blend_nodes(int degree);

/// Vertex indices (ascending) of local face f, the face opposite vertex f.
inline constexpr std::array<std::array<int, 3>, 4> kLocalFaceVertices{
    {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}}};

/// Unit-tetrahedron coordinates of the reference vertices.
Eigen::Vector3d reference_vertex(int v);

/// Maps triangle-rule points (u, v) to tetrahedron reference coordinates for a
/// face whose triangle vertices are the reference vertices (a, b, c):
/// x = (1 - u - v) X_a + u X_b + v X_c.
Eigen::MatrixXd face_points_on_tet(const std::array<int, 3>& vertex_triple,
                                   const Eigen::MatrixXd& triangle_points);

/// Degree-k Lagrange basis on the unit tetrahedron with its reference operators.
/// Operators act on nodal values; derivatives are with respect to the unit-tet
/// coordinates (x, y, z).
class ReferenceElement
{
  public:
    /// Builds any nodal degree in [1, kMaxNodalDegree].
    explicit ReferenceElement(int degree);

    int degree() const { return degree_; }
    int num_nodes() const { return num_nodes_; }

    const Eigen::MatrixXd& nodes() const { return nodes_; }
    const Eigen::MatrixXd& vandermonde() const { return vandermonde_; }
    const Eigen::MatrixXd& mass() const { return mass_; }
    const Eigen::MatrixXd& inverse_mass() const { return inverse_mass_; }
    const Eigen::MatrixXd& derivative(int direction) const { return derivative_[direction]; }

    /// Rows: points, columns: nodal basis functions.
    Eigen::MatrixXd evaluate(const Eigen::MatrixXd& points) const;
    std::array<Eigen::MatrixXd, 3> evaluate_gradient(const Eigen::MatrixXd& points) const;

    /// Interpolation from nodal values to the points of a triangle rule placed
    /// on local face `face` in its canonical vertex order.
    Eigen::MatrixXd face_interpolation(int face, const QuadratureRule& rule) const;

  private:
    int degree_;
    int num_nodes_;
    Eigen::MatrixXd nodes_;
    Eigen::MatrixXd vandermonde_;
    Eigen::MatrixXd inverse_vandermonde_;
    Eigen::MatrixXd mass_;
    Eigen::MatrixXd inverse_mass_;
    std::array<Eigen::MatrixXd, 3> derivative_;
};

/// Solver reference element; degree must lie in [1, kMaxSolverDegree].
ReferenceElement build_reference_element(int degree);

}  // namespace dgmax
