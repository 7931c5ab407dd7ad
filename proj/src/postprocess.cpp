// SPDX-License-Identifier: Apache-2.0
#include "dgmax/postprocess.hpp"

#include <algorithm>
#include <cmath>

#include <lapacke.h>

#include "dgmax/analysis.hpp"

namespace dgmax
{

namespace
{

constexpr std::size_t kMaxCachedSystems = 8192;

}  // namespace

PostprocessReference::PostprocessReference(int solver_degree)
    : degree(solver_degree),
      solver(shared_reference_element(solver_degree)),
      field(shared_reference_element(solver_degree + 1)),
      pressure(shared_reference_element(solver_degree + 2)),
      volume_rule(volume_quadrature(2 * solver_degree + 4)),
      face_rule(face_quadrature(2 * solver_degree + 4)),
      solver_faces(solver, face_rule)
{
    const auto gw = field.evaluate_gradient(volume_rule.points);
    const Eigen::MatrixXd phi = field.evaluate(volume_rule.points);
    const auto gp = pressure.evaluate_gradient(volume_rule.points);
    const Eigen::MatrixXd psi = pressure.evaluate(volume_rule.points);
    const auto w = volume_rule.weights.asDiagonal();
    for (int p = 0; p < 3; ++p)
    {
        for (int q = 0; q < 3; ++q)
            stiffness[p][q] = gw[p].transpose() * w * gw[q];
        coupling[p] = phi.transpose() * w * gp[p];
    }
    pressure_mean = psi.transpose() * volume_rule.weights;
    embed = solver.evaluate(field.nodes());

    const FaceInterpolation field_faces(field, face_rule);
    for (int c = 0; c < 24; ++c)
        field_face_gradients[c] = field.evaluate_gradient(field_faces.points(c));
}

LocalSaddleSystem::LocalSaddleSystem(const ElementGeometry& g, const PostprocessReference& ref)
    : field_size_(3 * ref.field.num_nodes()), pressure_size_(ref.pressure.num_nodes())
{
    const int nw = ref.field.num_nodes();
    const int n = size();
    matrix_ = Eigen::MatrixXd::Zero(n, n);
    const Mat3& G = g.inverse_jacobian;  // G(p, a) = dxi_p / dx_a

    // Physical gradient Gram blocks: T[a][b] = int d_a phi_i d_b phi_j.
    std::array<std::array<Eigen::MatrixXd, 3>, 3> T;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
        {
            T[a][b] = Eigen::MatrixXd::Zero(nw, nw);
            for (int p = 0; p < 3; ++p)
                for (int q = 0; q < 3; ++q)
                    T[a][b] += (G(p, a) * G(q, b)) * ref.stiffness[p][q];
            T[a][b] *= g.det;
        }
    const Eigen::MatrixXd lap = T[0][0] + T[1][1] + T[2][2];
    // A_{(i,c),(j,d)} = delta_cd grad phi_i . grad phi_j - d_d phi_i d_c phi_j
    for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 3; ++d)
        {
            auto blk = matrix_.block(c * nw, d * nw, nw, nw);
            blk = -T[d][c];
            if (c == d)
                blk += lap;
        }
    // B_{(i,c), m} = int phi_i d_c psi_m
    for (int c = 0; c < 3; ++c)
    {
        Eigen::MatrixXd b = Eigen::MatrixXd::Zero(nw, pressure_size_);
        for (int p = 0; p < 3; ++p)
            b += G(p, c) * ref.coupling[p];
        b *= g.det;
        matrix_.block(c * nw, field_size_, nw, pressure_size_) = b;
        matrix_.block(field_size_, c * nw, pressure_size_, nw) = b.transpose();
    }
    const Eigen::VectorXd m = g.det * ref.pressure_mean;
    matrix_.block(field_size_, n - 1, pressure_size_, 1) = m;
    matrix_.block(n - 1, field_size_, 1, pressure_size_) = m.transpose();
    matrix_ = 0.5 * (matrix_ + matrix_.transpose()).eval();

    factor_ = matrix_;
    pivots_.resize(n);
    const lapack_int info = LAPACKE_dsytrf(LAPACK_COL_MAJOR, 'L', n, factor_.data(), n, pivots_.data());
    if (info != 0)
        throw FactorizationError("local saddle-point factorization failed (info " +
                                 std::to_string(info) + ")");
}

Eigen::MatrixXd LocalSaddleSystem::solve(const Eigen::MatrixXd& rhs) const
{
    Eigen::MatrixXd x = rhs;
    const int n = size();
    const lapack_int info = LAPACKE_dsytrs(LAPACK_COL_MAJOR, 'L', n, static_cast<lapack_int>(x.cols()),
                                           factor_.data(), n, pivots_.data(), x.data(), n);
    if (info != 0)
        throw FactorizationError("local saddle-point solve failed");
    return x;
}

Postprocessor::Postprocessor(const Mesh& mesh, int solver_degree, SourceSpec source)
    : mesh_(&mesh),
      source_(std::move(source)),
      ref_(std::make_shared<PostprocessReference>(solver_degree))
{
    if (solver_degree < 1 || solver_degree > kMaxSolverDegree)
        throw UnsupportedDegreeError("postprocessing needs a solver degree in [1, 4]");
}

std::shared_ptr<const LocalSaddleSystem> Postprocessor::local_system(int e) const
{
    const ElementGeometry& g = mesh_->geometry(e);
    // Jacobians equal to 1e-12 relative share one system (structured meshes
    // produce round-off differences between congruent elements).
    const double scale = g.jacobian.cwiseAbs().maxCoeff() * 1e-12;
    std::array<long long, 9> key;
    for (int i = 0; i < 9; ++i)
        key[i] = std::llround(g.jacobian.data()[i] / scale);
    {
        std::lock_guard lock(mutex_);
        const auto it = cache_.find(key);
        if (it != cache_.end())
            return it->second;
    }
    auto system = std::make_shared<const LocalSaddleSystem>(g, *ref_);
    std::lock_guard lock(mutex_);
    ++factorizations_;
    if (cache_.size() < kMaxCachedSystems)
        cache_.emplace(key, system);
    return system;
}

ElementPostprocess Postprocessor::postprocess_element(int e, const FieldState& state,
                                                      const FluxTrace& fluxes) const
{
    const PostprocessReference& ref = *ref_;
    const Mesh& mesh = *mesh_;
    const ElementGeometry& g = mesh.geometry(e);
    const int nw = ref.field.num_nodes();
    const int nq = ref.face_rule.size();
    const auto system = local_system(e);

    // Face term <V_K - V_hat, n x curl w> for w = phi_j e_c, i.e.
    // sum_q w_q [(a . grad phi_j) n_c - a_c (n . grad phi_j)] with a = V_K - V_hat.
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(system->size(), 2);
    for (int f = 0; f < 4; ++f)
    {
        const int id = mesh.element_face(e, f);
        const Eigen::MatrixXd& flux = fluxes.values[id];
        if (flux.rows() != nq)
            throw std::invalid_argument("flux trace missing for a face of the processed element");
        const int combo = face_combination(f, mesh.face_vertex_triple(e, f));
        const Eigen::MatrixXd trace = ref.solver_faces.matrix(combo) * state.element(e);
        const Eigen::MatrixXd jump = trace - flux;  // Nq x 6
        const Vec3& n = g.normals[f];
        const double scale = 2.0 * mesh.face(id).area;

        std::array<Eigen::MatrixXd, 3> grad;  // physical d_j phi at face points
        for (int j = 0; j < 3; ++j)
        {
            grad[j] = g.inverse_jacobian(0, j) * ref.field_face_gradients[combo][0] +
                      g.inverse_jacobian(1, j) * ref.field_face_gradients[combo][1] +
                      g.inverse_jacobian(2, j) * ref.field_face_gradients[combo][2];
        }
        const Eigen::MatrixXd n_grad = n(0) * grad[0] + n(1) * grad[1] + n(2) * grad[2];
        for (int s = 0; s < 2; ++s)
        {
            const auto a = jump.middleCols(3 * s, 3);
            Eigen::MatrixXd a_grad = Eigen::MatrixXd::Zero(nq, nw);
            for (int j = 0; j < 3; ++j)
                a_grad += a.col(j).asDiagonal() * grad[j];
            const Eigen::RowVectorXd wa = ref.face_rule.weights.transpose() * a_grad;
            for (int c = 0; c < 3; ++c)
            {
                const Eigen::VectorXd wc = ref.face_rule.weights.cwiseProduct(a.col(c));
                rhs.block(c * nw, s, nw, 1) +=
                    scale * (n(c) * wa.transpose() - n_grad.transpose() * wc);
            }
        }
    }

    const Eigen::MatrixXd delta = system->solve(rhs);
    const Eigen::MatrixXd base = ref.embed * state.element(e);  // N_{k+1} x 6
    ElementPostprocess out;
    out.E = base.leftCols(3);
    out.H = base.rightCols(3);
    for (int c = 0; c < 3; ++c)
    {
        out.E.col(c) += delta.block(c * nw, 0, nw, 1);
        out.H.col(c) += delta.block(c * nw, 1, nw, 1);
    }

    // Gradient moments: B^T (V* - I V_h) must vanish.
    const auto b = system->gradient_block();
    const Eigen::MatrixXd moments = b.transpose() * delta.topRows(3 * nw);
    const double bnorm = b.norm();
    for (int s = 0; s < 2; ++s)
    {
        Eigen::VectorXd full(3 * nw);
        for (int c = 0; c < 3; ++c)
            full.segment(c * nw, nw) = (s == 0 ? out.E : out.H).col(c);
        const double denom = bnorm * full.norm();
        if (denom > 0.0)
            out.moment_residual = std::max(out.moment_residual, moments.col(s).norm() / denom);
    }
    return out;
}

std::vector<int> faces_of(const Mesh& mesh, const std::vector<int>& elements)
{
    std::vector<int> faces;
    faces.reserve(4 * elements.size());
    for (int e : elements)
        for (int f = 0; f < 4; ++f)
            faces.push_back(mesh.element_face(e, f));
    std::sort(faces.begin(), faces.end());
    faces.erase(std::unique(faces.begin(), faces.end()), faces.end());
    return faces;
}

PostprocessedState Postprocessor::postprocess(const FieldState& state,
                                              const std::vector<int>* elements) const
{
    const Mesh& mesh = *mesh_;
    std::vector<int> all;
    if (!elements)
    {
        all.resize(mesh.num_elements());
        for (int e = 0; e < mesh.num_elements(); ++e)
            all[e] = e;
        elements = &all;
    }
    const std::vector<int> faces = faces_of(mesh, *elements);
    const FluxTrace fluxes = compute_numerical_fluxes(state, mesh, ref_->solver, source_,
                                                      state.time, ref_->face_rule, &faces);

    PostprocessedState out;
    static_cast<FieldState&>(out) = FieldState(mesh.num_elements(), ref_->degree + 1, state.time);
    out.computed.assign(mesh.num_elements(), 0);
    for (int e : *elements)
    {
        const ElementPostprocess r = postprocess_element(e, state, fluxes);
        out.E(e) = r.E;
        out.H(e) = r.H;
        out.computed[e] = 1;
        out.max_moment_residual = std::max(out.max_moment_residual, r.moment_residual);
    }
    return out;
}

}  // namespace dgmax
