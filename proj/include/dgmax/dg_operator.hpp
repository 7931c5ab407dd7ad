// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dgmax/field_state.hpp"
#include "dgmax/mesh.hpp"
#include "dgmax/quadrature.hpp"
#include "dgmax/reference_element.hpp"

namespace dgmax
{

/// Volume current J(t, x) and absorbing-boundary data G(t, x, n_out, Z) where Z
/// is the impedance of the element adjacent to the boundary face.
/// Either may be empty, meaning zero.
struct SourceSpec
{
    std::function<Vec3(double t, const Vec3& x)> current;
    std::function<Vec3(double t, const Vec3& x, const Vec3& n, double impedance)> boundary_data;
};

/// Numerical fluxes per face at the points of `rule`; values[f] is Nq x 6
/// with columns (E_hat, H_hat). Faces that were not requested stay empty.
struct FluxTrace
{
    QuadratureRule rule;
    std::vector<Eigen::MatrixXd> values;
};

using FluxPair = std::pair<Vec3, Vec3>;

inline Vec3 tangential(const Vec3& v, const Vec3& n) { return v - v.dot(n) * n; }

/// Interior flux; n is n_F (outward of the minus side), jumps are minus - plus.
FluxPair interior_flux(const Vec3& n, const Vec3& e_minus, const Vec3& h_minus, double y_minus,
                       const Vec3& e_plus, const Vec3& h_plus, double y_plus);
FluxPair pec_flux(const Vec3& n, const Vec3& e, const Vec3& h, double y);
FluxPair abc_flux(const Vec3& n, const Vec3& e, const Vec3& h, double y, const Vec3& g);

/// Index of a (local face, vertex order) combination in [0, 24).
int face_combination(int local_face, const std::array<int, 3>& triple);

/// Trace interpolation matrices (Nq x Np) for all 24 face/orientation combinations.
class FaceInterpolation
{
  public:
    FaceInterpolation(const ReferenceElement& ref, const QuadratureRule& rule);

    const Eigen::MatrixXd& matrix(int combination) const { return matrices_[combination]; }
    /// Reference coordinates of the rule points for the combination.
    const Eigen::MatrixXd& points(int combination) const { return points_[combination]; }

  private:
    std::array<Eigen::MatrixXd, 24> matrices_;
    std::array<Eigen::MatrixXd, 24> points_;
};

/// Physical coordinates of the face rule points as seen from the minus element.
Eigen::MatrixXd face_physical_points(const Mesh& mesh, int face, const QuadratureRule& rule);

FluxTrace compute_numerical_fluxes(const FieldState& state, const Mesh& mesh,
                                   const ReferenceElement& ref, const SourceSpec& source,
                                   double t, const QuadratureRule& rule,
                                   const std::vector<int>* faces = nullptr);

/// Semi-discrete right-hand side f(t, U) = -M^{-1} K U + M^{-1} B(t).
/// Holds scratch buffers, so one instance must not be applied concurrently.
class MaxwellOperator
{
  public:
    MaxwellOperator(const Mesh& mesh, int degree, SourceSpec source = {});

    const Mesh& mesh() const { return *mesh_; }
    const ReferenceElement& reference() const { return ref_; }
    const SourceSpec& source() const { return source_; }
    const QuadratureRule& face_rule() const { return face_rule_; }
    int degree() const { return ref_.degree(); }

    FieldState zero_state(double t = 0.0) const
    {
        return FieldState(mesh_->num_elements(), ref_.degree(), t);
    }

    /// out = beta * out + alpha * f(t, u)
    void apply(double t, const FieldState& u, double alpha, double beta, FieldState& out) const;

  private:
    const Mesh* mesh_;
    ReferenceElement ref_;
    SourceSpec source_;
    QuadratureRule face_rule_;
    QuadratureRule volume_rule_;
    FaceInterpolation face_interp_;
    std::array<Eigen::MatrixXd, 24> lift_;
    Eigen::MatrixXd stacked_derivative_;
    Eigen::MatrixXd volume_basis_;
    std::vector<std::array<int, 4>> element_combination_;
    std::vector<Eigen::MatrixXd> boundary_points_;  // per face, ABC only

    mutable Eigen::MatrixXd derivatives_;
    mutable Eigen::MatrixXd face_terms_;
    mutable Eigen::MatrixXd element_rhs_;
};

FieldState apply_rhs(const MaxwellOperator& op, const FieldState& state, double t);

class NonFiniteValueError : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

/// Nodal interpolation of (E0, H0); throws NonFiniteValueError on non-finite samples.
FieldState project_initial_conditions(const std::function<Vec3(const Vec3&)>& e0,
                                      const std::function<Vec3(const Vec3&)>& h0,
                                      const Mesh& mesh, const ReferenceElement& ref);

/// Physical coordinates of the nodes of element e (rows).
Eigen::MatrixXd physical_nodes(const Mesh& mesh, int e, const ReferenceElement& ref);

/// Maps reference points (rows) of element e to physical coordinates.
Eigen::MatrixXd map_to_physical(const Mesh& mesh, int e, const Eigen::MatrixXd& ref_points);

}  // namespace dgmax
