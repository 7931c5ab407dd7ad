// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "dgmax/dg_operator.hpp"
#include "dgmax/field_state.hpp"
#include "dgmax/mesh.hpp"

namespace dgmax
{

class FactorizationError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Reference-element data shared by every local system of solver degree k:
/// P_{k+1} vector space for the reconstruction, P_{k+2} pressure space.
struct PostprocessReference
{
    explicit PostprocessReference(int solver_degree);

    int degree;  // solver degree k
    const ReferenceElement& solver;
    const ReferenceElement& field;     // degree k + 1
    const ReferenceElement& pressure;  // degree k + 2
    QuadratureRule volume_rule;
    QuadratureRule face_rule;
    /// S[p][q](i, j) = int dphi_i/dxi_p dphi_j/dxi_q over the reference tet.
    std::array<std::array<Eigen::MatrixXd, 3>, 3> stiffness;
    /// Q[p](i, m) = int phi_i dpsi_m/dxi_p.
    std::array<Eigen::MatrixXd, 3> coupling;
    /// int psi_m.
    Eigen::VectorXd pressure_mean;
    /// Nodal interpolation P_k -> P_{k+1} (exact embedding).
    Eigen::MatrixXd embed;
    /// Solver traces and P_{k+1} reference gradients at face points per combination.
    FaceInterpolation solver_faces;
    std::array<std::array<Eigen::MatrixXd, 3>, 24> field_face_gradients;
};

/// Element saddle-point matrix
///   [ A   B  0 ]
///   [ B^T 0  m ]
///   [ 0  m^T 0 ]
/// with A the curl-curl Gram matrix on P_{k+1}(K)^3, B the gradient coupling to
/// P_{k+2}(K) and m the mean constraint; factorized once (Bunch-Kaufman).
class LocalSaddleSystem
{
  public:
    LocalSaddleSystem(const ElementGeometry& geometry, const PostprocessReference& ref);

    int field_size() const { return field_size_; }
    int pressure_size() const { return pressure_size_; }
    int size() const { return field_size_ + pressure_size_ + 1; }

    const Eigen::MatrixXd& matrix() const { return matrix_; }
    auto curl_block() const { return matrix_.topLeftCorner(field_size_, field_size_); }
    auto gradient_block() const
    {
        return matrix_.block(0, field_size_, field_size_, pressure_size_);
    }

    /// Solves against the stored factorization; `rhs` may hold several columns.
    Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;

  private:
    int field_size_;
    int pressure_size_;
    Eigen::MatrixXd matrix_;
    Eigen::MatrixXd factor_;
    std::vector<int> pivots_;
};

/// E*, H* in P_{k+1}: same layout as FieldState with degree k + 1.
struct PostprocessedState : FieldState
{
    std::vector<char> computed;
    /// Largest relative gradient-moment residual over the processed elements.
    double max_moment_residual = 0.0;
};

struct ElementPostprocess
{
    Eigen::MatrixXd E;  // N_{k+1} x 3
    Eigen::MatrixXd H;
    double moment_residual = 0.0;
};

class Postprocessor
{
  public:
    Postprocessor(const Mesh& mesh, int solver_degree, SourceSpec source = {});

    const PostprocessReference& reference() const { return *ref_; }
    const QuadratureRule& face_rule() const { return ref_->face_rule; }

    /// Local system of element e; shared between elements with identical Jacobians.
    std::shared_ptr<const LocalSaddleSystem> local_system(int e) const;

    ElementPostprocess postprocess_element(int e, const FieldState& state,
                                           const FluxTrace& fluxes) const;

    /// Processes all elements or the listed subset at time state.time.
    PostprocessedState postprocess(const FieldState& state,
                                   const std::vector<int>* elements = nullptr) const;

    /// Number of factorizations performed so far.
    long factorizations() const { return factorizations_; }

  private:
    const Mesh* mesh_;
    SourceSpec source_;
    std::shared_ptr<const PostprocessReference> ref_;
    mutable std::mutex mutex_;
    mutable std::map<std::array<long long, 9>, std::shared_ptr<const LocalSaddleSystem>> cache_;
    mutable long factorizations_ = 0;
};

/// Faces of the listed elements, ascending and unique.
std::vector<int> faces_of(const Mesh& mesh, const std::vector<int>& elements);

}  // namespace dgmax
