// SPDX-License-Identifier: Apache-2.0
#include "dgmax/dg_operator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dgmax
{

FluxPair interior_flux(const Vec3& n, const Vec3& e_minus, const Vec3& h_minus, double y_minus,
                       const Vec3& e_plus, const Vec3& h_plus, double y_plus)
{
    const double z_minus = 1.0 / y_minus;
    const double z_plus = 1.0 / y_plus;
    const Vec3 ye_mean = 0.5 * (y_minus * e_minus + y_plus * e_plus);
    const Vec3 zh_mean = 0.5 * (z_minus * h_minus + z_plus * h_plus);
    const Vec3 e_jump = e_minus - e_plus;
    const Vec3 h_jump = h_minus - h_plus;
    const Vec3 e_hat = (tangential(ye_mean, n) + 0.5 * h_jump.cross(n)) / (0.5 * (y_minus + y_plus));
    const Vec3 h_hat = (tangential(zh_mean, n) - 0.5 * e_jump.cross(n)) / (0.5 * (z_minus + z_plus));
    return {e_hat, h_hat};
}

FluxPair pec_flux(const Vec3& n, const Vec3& e, const Vec3& h, double y)
{
    return {Vec3::Zero(), -y * e.cross(n) + tangential(h, n)};
}

FluxPair abc_flux(const Vec3& n, const Vec3& e, const Vec3& h, double y, const Vec3& g)
{
    const double z = 1.0 / y;
    const Vec3 e_hat = 0.5 * (tangential(e, n) + z * h.cross(n) + g.cross(n));
    const Vec3 h_hat = 0.5 * y * (z * tangential(h, n) - e.cross(n) - g);
    return {e_hat, h_hat};
}

int face_combination(int local_face, const std::array<int, 3>& triple)
{
    const auto& base = kLocalFaceVertices[local_face];
    std::array<int, 3> perm = base;
    int index = 0;
    do
    {
        if (perm == triple)
            return 6 * local_face + index;
        ++index;
    } while (std::next_permutation(perm.begin(), perm.end()));
    throw std::invalid_argument("vertex triple does not belong to the local face");
}

FaceInterpolation::FaceInterpolation(const ReferenceElement& ref, const QuadratureRule& rule)
{
    for (int f = 0; f < 4; ++f)
    {
        std::array<int, 3> perm = kLocalFaceVertices[f];
        int index = 0;
        do
        {
            points_[6 * f + index] = face_points_on_tet(perm, rule.points);
            matrices_[6 * f + index] = ref.evaluate(points_[6 * f + index]);
            ++index;
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
}

Eigen::MatrixXd map_to_physical(const Mesh& mesh, int e, const Eigen::MatrixXd& ref_points)
{
    const ElementGeometry& g = mesh.geometry(e);
    Eigen::MatrixXd x = ref_points * g.jacobian.transpose();
    x.rowwise() += g.origin.transpose();
    return x;
}

Eigen::MatrixXd physical_nodes(const Mesh& mesh, int e, const ReferenceElement& ref)
{
    return map_to_physical(mesh, e, ref.nodes());
}

Eigen::MatrixXd face_physical_points(const Mesh& mesh, int face, const QuadratureRule& rule)
{
    const Face& f = mesh.face(face);
    const auto triple = mesh.face_vertex_triple(f.minus_element, f.minus_local);
    return map_to_physical(mesh, f.minus_element, face_points_on_tet(triple, rule.points));
}

namespace
{

// Fluxes at every rule point of one face from the interpolated traces
// (Nq x 6 each; `plus` is ignored on boundary faces).
void face_fluxes(const Mesh& mesh, int id, const Eigen::MatrixXd& minus,
                 const Eigen::MatrixXd& plus, const SourceSpec& source, double t,
                 const Eigen::MatrixXd* points, Eigen::MatrixXd& out)
{
    const Face& f = mesh.face(id);
    const Vec3& n = f.normal;
    const double y_minus = 1.0 / mesh.impedance(f.minus_element);
    const Eigen::Index nq = minus.rows();
    for (Eigen::Index q = 0; q < nq; ++q)
    {
        const Vec3 e = minus.row(q).segment<3>(0).transpose();
        const Vec3 h = minus.row(q).segment<3>(3).transpose();
        FluxPair flux;
        switch (f.kind)
        {
            case FaceKind::Interior:
            {
                const double y_plus = 1.0 / mesh.impedance(f.plus_element);
                flux = interior_flux(n, e, h, y_minus, plus.row(q).segment<3>(0).transpose(),
                                     plus.row(q).segment<3>(3).transpose(), y_plus);
                break;
            }
            case FaceKind::PEC:
                flux = pec_flux(n, e, h, y_minus);
                break;
            case FaceKind::ABC:
            {
                Vec3 g = Vec3::Zero();
                if (source.boundary_data)
                    g = source.boundary_data(t, points->row(q).transpose(), n, 1.0 / y_minus);
                flux = abc_flux(n, e, h, y_minus, g);
                break;
            }
        }
        out.row(q).segment<3>(0) = flux.first.transpose();
        out.row(q).segment<3>(3) = flux.second.transpose();
    }
}

}  // namespace

FluxTrace compute_numerical_fluxes(const FieldState& state, const Mesh& mesh,
                                   const ReferenceElement& ref, const SourceSpec& source,
                                   double t, const QuadratureRule& rule,
                                   const std::vector<int>* faces)
{
    FluxTrace trace;
    trace.rule = rule;
    trace.values.resize(mesh.num_faces());
    const FaceInterpolation interp(ref, rule);
    Eigen::MatrixXd minus(rule.size(), 6), plus(rule.size(), 6);

    auto one = [&](int id) {
        const Face& f = mesh.face(id);
        const int cm = face_combination(f.minus_local, mesh.face_vertex_triple(f.minus_element, f.minus_local));
        minus.noalias() = interp.matrix(cm) * state.element(f.minus_element);
        if (!f.is_boundary())
        {
            const int cp = face_combination(f.plus_local, mesh.face_vertex_triple(f.plus_element, f.plus_local));
            plus.noalias() = interp.matrix(cp) * state.element(f.plus_element);
        }
        Eigen::MatrixXd points;
        if (f.kind == FaceKind::ABC)
            points = face_physical_points(mesh, id, rule);
        trace.values[id].resize(rule.size(), 6);
        face_fluxes(mesh, id, minus, plus, source, t, &points, trace.values[id]);
    };

    if (faces)
    {
        for (int id : *faces)
            one(id);
    }
    else
    {
        for (int id = 0; id < mesh.num_faces(); ++id)
            one(id);
    }
    return trace;
}

MaxwellOperator::MaxwellOperator(const Mesh& mesh, int degree, SourceSpec source)
    : mesh_(&mesh),
      ref_(build_reference_element(degree)),
      source_(std::move(source)),
      face_rule_(face_quadrature(2 * degree)),
      volume_rule_(volume_quadrature(2 * degree + 2)),
      face_interp_(ref_, face_rule_)
{
    const int np = ref_.num_nodes();
    const int nq = face_rule_.size();
    const int ne = mesh.num_elements();

    for (int c = 0; c < 24; ++c)
    {
        lift_[c] = ref_.inverse_mass() * face_interp_.matrix(c).transpose() *
                   face_rule_.weights.asDiagonal();
    }

    stacked_derivative_.resize(3 * np, np);
    for (int d = 0; d < 3; ++d)
        stacked_derivative_.middleRows(d * np, np) = ref_.derivative(d);

    volume_basis_ = ref_.inverse_mass() * ref_.evaluate(volume_rule_.points).transpose() *
                    volume_rule_.weights.asDiagonal();

    element_combination_.resize(ne);
    for (int e = 0; e < ne; ++e)
        for (int f = 0; f < 4; ++f)
            element_combination_[e][f] = face_combination(f, mesh.face_vertex_triple(e, f));

    boundary_points_.resize(mesh.num_faces());
    for (int id = 0; id < mesh.num_faces(); ++id)
    {
        if (mesh.face(id).kind == FaceKind::ABC)
            boundary_points_[id] = face_physical_points(mesh, id, face_rule_);
    }

    derivatives_.resize(3 * np, 6 * ne);
    face_terms_.resize(4 * nq, 6 * ne);
    element_rhs_.resize(np, 6);
}

void MaxwellOperator::apply(double t, const FieldState& u, double alpha, double beta,
                            FieldState& out) const
{
    const Mesh& mesh = *mesh_;
    const int np = ref_.num_nodes();
    const int nq = face_rule_.size();
    const int ne = mesh.num_elements();

    derivatives_.noalias() = stacked_derivative_ * u.data;

    Eigen::MatrixXd minus(nq, 6), plus(nq, 6), flux(nq, 6);
    for (int id = 0; id < mesh.num_faces(); ++id)
    {
        const Face& f = mesh.face(id);
        const int em = f.minus_element;
        minus.noalias() = face_interp_.matrix(element_combination_[em][f.minus_local]) * (u.element(em));
        if (!f.is_boundary())
        {
            plus.noalias() = face_interp_.matrix(element_combination_[f.plus_element][f.plus_local])
                                  * (u.element(f.plus_element));
        }
        face_fluxes(mesh, id, minus, plus, source_, t, &boundary_points_[id], flux);

        // Element-local boundary terms n_K x (H_hat - H_K) and n_K x (E_K - E_hat),
        // pre-scaled by the face-to-reference measure ratio.
        auto store = [&](int e, int local, const Eigen::MatrixXd& trace, double sign) {
            const Vec3 n = sign * f.normal;
            const double scale = 2.0 * f.area / mesh.geometry(e).det;
            auto block = face_terms_.block(local * nq, 6 * e, nq, 6);
            for (int q = 0; q < nq; ++q)
            {
                const Vec3 e_hat = flux.row(q).segment<3>(0).transpose();
                const Vec3 h_hat = flux.row(q).segment<3>(3).transpose();
                const Vec3 ek = trace.row(q).segment<3>(0).transpose();
                const Vec3 hk = trace.row(q).segment<3>(3).transpose();
                block.row(q).segment<3>(0) = scale * n.cross(h_hat - hk).transpose();
                block.row(q).segment<3>(3) = scale * n.cross(ek - e_hat).transpose();
            }
        };
        store(em, f.minus_local, minus, 1.0);
        if (!f.is_boundary())
            store(f.plus_element, f.plus_local, plus, -1.0);
    }

    Eigen::MatrixXd current(volume_rule_.size(), 3);
    for (int e = 0; e < ne; ++e)
    {
        const Mat3& G = mesh.geometry(e).inverse_jacobian;  // G(d, j) = dxi_d / dx_j
        const double* d0 = derivatives_.data() + static_cast<Eigen::Index>(6 * e) * 3 * np;
        const Eigen::Index ld = 3 * np;
        for (int i = 0; i < np; ++i)
        {
            // g[c][j] = d u_c / d x_j at node i
            double g[6][3];
            for (int c = 0; c < 6; ++c)
            {
                const double* col = d0 + c * ld + i;
                const double r0 = col[0], r1 = col[np], r2 = col[2 * np];
                for (int j = 0; j < 3; ++j)
                    g[c][j] = G(0, j) * r0 + G(1, j) * r1 + G(2, j) * r2;
            }
            // curl H into columns 0..2, -curl E into 3..5
            element_rhs_(i, 0) = g[5][1] - g[4][2];
            element_rhs_(i, 1) = g[3][2] - g[5][0];
            element_rhs_(i, 2) = g[4][0] - g[3][1];
            element_rhs_(i, 3) = g[1][2] - g[2][1];
            element_rhs_(i, 4) = g[2][0] - g[0][2];
            element_rhs_(i, 5) = g[0][1] - g[1][0];
        }

        for (int f = 0; f < 4; ++f)
        {
            element_rhs_.noalias() +=
                lift_[element_combination_[e][f]] * (face_terms_.block(f * nq, 6 * e, nq, 6));
        }

        if (source_.current)
        {
            const Eigen::MatrixXd x = map_to_physical(mesh, e, volume_rule_.points);
            for (int q = 0; q < volume_rule_.size(); ++q)
                current.row(q) = source_.current(t, x.row(q).transpose()).transpose();
            element_rhs_.leftCols(3).noalias() += volume_basis_ * current;
        }

        element_rhs_.leftCols(3) /= mesh.eps(e);
        element_rhs_.rightCols(3) /= mesh.mu(e);

        auto target = out.element(e);
        if (beta == 0.0)
            target = alpha * element_rhs_;
        else
            target = beta * target + alpha * element_rhs_;
    }
    out.time = t;
}

FieldState apply_rhs(const MaxwellOperator& op, const FieldState& state, double t)
{
    FieldState out = op.zero_state(t);
    op.apply(t, state, 1.0, 0.0, out);
    return out;
}

FieldState project_initial_conditions(const std::function<Vec3(const Vec3&)>& e0,
                                      const std::function<Vec3(const Vec3&)>& h0,
                                      const Mesh& mesh, const ReferenceElement& ref)
{
    FieldState state(mesh.num_elements(), ref.degree(), 0.0);
    for (int e = 0; e < mesh.num_elements(); ++e)
    {
        const Eigen::MatrixXd x = physical_nodes(mesh, e, ref);
        for (int i = 0; i < ref.num_nodes(); ++i)
        {
            const Vec3 p = x.row(i).transpose();
            const Vec3 ev = e0 ? e0(p) : Vec3::Zero();
            const Vec3 hv = h0 ? h0(p) : Vec3::Zero();
            if (!ev.allFinite() || !hv.allFinite())
            {
                throw NonFiniteValueError("initial condition is not finite at element " +
                                          std::to_string(e));
            }
            state.element(e).row(i).segment<3>(0) = ev.transpose();
            state.element(e).row(i).segment<3>(3) = hv.transpose();
        }
    }
    return state;
}

}  // namespace dgmax
