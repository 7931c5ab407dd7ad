// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "dgmax/dg_operator.hpp"
#include "dgmax/scenarios.hpp"

using namespace dgmax;

namespace
{

FieldState random_state(const Mesh& mesh, int k, std::mt19937& rng, double h_scale)
{
    std::normal_distribution<double> g(0.0, 1.0);
    FieldState s(mesh.num_elements(), k);
    for (Eigen::Index j = 0; j < s.data.cols(); ++j)
        for (Eigen::Index i = 0; i < s.data.rows(); ++i)
            s.data(i, j) = g(rng) * ((j % 6) < 3 ? 1.0 : h_scale);
    return s;
}

// sum_K (eps E, dE)_K + (mu H, dH)_K using the exact reference mass matrix.
double energy_rate(const Mesh& mesh, const ReferenceElement& ref, const FieldState& u,
                   const FieldState& du)
{
    double rate = 0.0;
    for (int e = 0; e < mesh.num_elements(); ++e)
    {
        const double det = mesh.geometry(e).det;
        for (int c = 0; c < 6; ++c)
        {
            const double w = c < 3 ? mesh.eps(e) : mesh.mu(e);
            rate += w * det * u.element(e).col(c).dot(ref.mass() * du.element(e).col(c));
        }
    }
    return rate;
}

double energy(const Mesh& mesh, const ReferenceElement& ref, const FieldState& u)
{
    return 0.5 * energy_rate(mesh, ref, u, u);
}

// Upwind dissipation written directly from the jumps of the traces:
// -sum_int int (Y/2)|[E] x n|^2 + (Z/2)|[H] x n|^2 - sum_PEC int Y |E x n|^2.
double dissipation_oracle(const Mesh& mesh, const ReferenceElement& ref, const FieldState& u)
{
    const QuadratureRule rule = face_quadrature(2 * ref.degree());
    double total = 0.0;
    for (int id = 0; id < mesh.num_faces(); ++id)
    {
        const Face& f = mesh.face(id);
        const auto pm = face_points_on_tet(mesh.face_vertex_triple(f.minus_element, f.minus_local), rule.points);
        const Eigen::MatrixXd tm = ref.evaluate(pm) * u.element(f.minus_element);
        Eigen::MatrixXd tp = Eigen::MatrixXd::Zero(tm.rows(), 6);
        if (!f.is_boundary())
        {
            const auto pp = face_points_on_tet(mesh.face_vertex_triple(f.plus_element, f.plus_local), rule.points);
            tp = ref.evaluate(pp) * u.element(f.plus_element);
        }
        const double y = 1.0 / mesh.impedance(f.minus_element);
        for (int q = 0; q < rule.size(); ++q)
        {
            const Vec3 je = (tm.row(q).segment<3>(0) - tp.row(q).segment<3>(0)).transpose();
            const Vec3 jh = (tm.row(q).segment<3>(3) - tp.row(q).segment<3>(3)).transpose();
            double v = 0.0;
            if (f.is_boundary())
                v = y * je.cross(f.normal).squaredNorm();
            else
                v = 0.5 * y * je.cross(f.normal).squaredNorm() +
                    0.5 / y * jh.cross(f.normal).squaredNorm();
            total -= 2.0 * f.area * rule.weights(q) * v;
        }
    }
    return total;
}

}  // namespace

TEST_CASE("pointwise fluxes")
{
    const Vec3 n = Vec3(1, 2, 2) / 3.0;
    const double y = 1.0 / kZ0;
    SUBCASE("zero jump reproduces tangential traces")
    {
        const Vec3 e(1, -2, 0.5), h(0.01, 0.003, -0.02);
        const FluxPair f = interior_flux(n, e, h, y, e, h, y);
        CHECK((f.first - tangential(e, n)).norm() < 1e-14);
        CHECK((f.second - tangential(h, n)).norm() < 1e-17);
    }
    SUBCASE("opposite tangential E, no H")
    {
        const Vec3 e = tangential(Vec3(0.3, -1.0, 2.0), n);
        const FluxPair f = interior_flux(n, -e, Vec3::Zero(), y, e, Vec3::Zero(), y);
        CHECK(f.first.norm() < 1e-15);
        // [E] = -2e, so H_hat = -(1/2)[E] x n / Z = (e x n) / Z.
        CHECK((f.second - y * e.cross(n)).norm() < 1e-16);
    }
    SUBCASE("PEC and tangency")
    {
        std::mt19937 rng(1);
        std::normal_distribution<double> g;
        for (int i = 0; i < 50; ++i)
        {
            const Vec3 a(g(rng), g(rng), g(rng)), b(g(rng), g(rng), g(rng));
            const Vec3 c(g(rng), g(rng), g(rng)), d(g(rng), g(rng), g(rng));
            const FluxPair p = pec_flux(n, a, b, y);
            CHECK(p.first.norm() == 0.0);
            CHECK(std::abs(p.second.dot(n)) < 1e-14);
            const FluxPair q = interior_flux(n, a, b, y, c, d, 2 * y);
            CHECK(std::abs(q.first.dot(n)) < 1e-13);
            CHECK(std::abs(q.second.dot(n)) < 1e-13);
            const FluxPair r = abc_flux(n, a, b, y, tangential(c, n));
            CHECK(std::abs(r.first.dot(n)) < 1e-12);
            CHECK(std::abs(r.second.dot(n)) < 1e-12);
        }
    }
}

TEST_CASE("face combinations")
{
    std::set<int> seen;
    for (int f = 0; f < 4; ++f)
    {
        std::array<int, 3> t = kLocalFaceVertices[f];
        do
            seen.insert(face_combination(f, t));
        while (std::next_permutation(t.begin(), t.end()));
    }
    CHECK(seen.size() == 24);
    CHECK_THROWS(face_combination(0, {0, 1, 2}));
}

TEST_CASE("flux trace on a mesh")
{
    const Mesh mesh = build_structured_cube_mesh(2, 1.0, [](const Vec3& c, const Vec3&) {
        return c.x() < 1e-12 ? FaceKind::PEC : FaceKind::ABC;
    });
    const ReferenceElement ref = build_reference_element(2);
    const Vec3 e0(1.0, 2.0, -1.0), h0(0.002, -0.001, 0.003);
    const FieldState s = project_initial_conditions([&](const Vec3&) { return e0; },
                                                    [&](const Vec3&) { return h0; }, mesh, ref);
    const QuadratureRule rule = face_quadrature(4);
    const FluxTrace tr = compute_numerical_fluxes(s, mesh, ref, SourceSpec{}, 0.0, rule);
    for (int id = 0; id < mesh.num_faces(); ++id)
    {
        const Face& f = mesh.face(id);
        REQUIRE(tr.values[id].rows() == rule.size());
        for (int q = 0; q < rule.size(); ++q)
        {
            const Vec3 eh = tr.values[id].row(q).segment<3>(0).transpose();
            const Vec3 hh = tr.values[id].row(q).segment<3>(3).transpose();
            CHECK(std::abs(eh.dot(f.normal)) <= 1e-12 * e0.norm());
            CHECK(std::abs(hh.dot(f.normal)) <= 1e-12 * h0.norm());
            if (f.kind == FaceKind::Interior)
            {
                CHECK((eh - tangential(e0, f.normal)).norm() < 1e-12 * e0.norm());
                CHECK((hh - tangential(h0, f.normal)).norm() < 1e-12 * h0.norm());
            }
            if (f.kind == FaceKind::PEC)
                CHECK(eh.norm() == 0.0);
        }
    }
    const std::vector<int> subset{3};
    const FluxTrace part = compute_numerical_fluxes(s, mesh, ref, SourceSpec{}, 0.0, rule, &subset);
    CHECK(part.values[3].isApprox(tr.values[3]));
    CHECK(part.values[0].size() == 0);
}

TEST_CASE("rhs: zero state and linearity")
{
    const Mesh mesh = build_structured_cube_mesh(2, 1.0, all_boundaries(FaceKind::ABC),
                                                 Material{1.5, 2.0});
    const MaxwellOperator op(mesh, 2);
    const FieldState zero = op.zero_state();
    CHECK(apply_rhs(op, zero, 0.0).data.norm() == 0.0);

    std::mt19937 rng(2);
    const FieldState a = random_state(mesh, 2, rng, 1.0 / kZ0);
    const FieldState b = random_state(mesh, 2, rng, 1.0 / kZ0);
    FieldState c = a;
    c.data = 2.5 * a.data - 0.75 * b.data;
    const FieldState fa = apply_rhs(op, a, 0.0);
    const FieldState fb = apply_rhs(op, b, 0.0);
    const FieldState fc = apply_rhs(op, c, 0.0);
    CHECK((fc.data - (2.5 * fa.data - 0.75 * fb.data)).norm() <= 1e-12 * fc.data.norm());

    // out = beta * out + alpha * f
    FieldState acc = b;
    op.apply(0.0, a, 0.5, 2.0, acc);
    CHECK((acc.data - (2.0 * b.data + 0.5 * fa.data)).norm() <= 1e-13 * acc.data.norm());
}

TEST_CASE("rhs dissipates energy in a PEC cavity")
{
    const Mesh mesh = build_structured_cube_mesh(2, 1.0, all_boundaries(FaceKind::PEC));
    for (int k = 1; k <= 3; ++k)
    {
        CAPTURE(k);
        const MaxwellOperator op(mesh, k);
        std::mt19937 rng(100 + k);
        for (int trial = 0; trial < 100; ++trial)
        {
            const FieldState u = random_state(mesh, k, rng, 1.0 / kZ0);
            const FieldState du = apply_rhs(op, u, 0.0);
            const double rate = energy_rate(mesh, op.reference(), u, du);
            const double oracle = dissipation_oracle(mesh, op.reference(), u);
            const double scale = energy(mesh, op.reference(), u) * kC0;
            CHECK(rate <= 1e-10 * scale);
            CHECK(std::abs(rate - oracle) <= 1e-10 * scale);
        }
    }

    // Heterogeneous media: still non-increasing.
    const Mesh het = build_sphere_in_cube_mesh(3, 1.0, Vec3::Zero(), Vec3::Constant(0.5), 0.3,
                                               Material{4.0, 1.5}, FaceKind::PEC);
    const MaxwellOperator op(het, 2);
    std::mt19937 rng(9);
    for (int trial = 0; trial < 20; ++trial)
    {
        const FieldState u = random_state(het, 2, rng, 1.0 / kZ0);
        const double rate = energy_rate(het, op.reference(), u, apply_rhs(op, u, 0.0));
        CHECK(rate <= 1e-10 * energy(het, op.reference(), u) * kC0);
    }
}

TEST_CASE("rhs is consistent with the cavity solution")
{
    // d/dt H at t = 0 equals -curl E / mu; nodal error decays at least like h^k.
    for (int k = 1; k <= 3; ++k)
    {
        std::vector<double> errs;
        for (int n : {4, 8})
        {
            const Mesh mesh = build_structured_cube_mesh(n, 1.0, all_boundaries(FaceKind::PEC));
            const MaxwellOperator op(mesh, k);
            const FieldState u = project_initial_conditions(
                [](const Vec3& x) { return cavity_exact(0.0, x).E; },
                [](const Vec3& x) { return cavity_exact(0.0, x).H; }, mesh, op.reference());
            const FieldState du = apply_rhs(op, u, 0.0);
            const FieldState exact = project_initial_conditions(
                [](const Vec3& x) { return cavity_time_derivative(0.0, x).E; },
                [](const Vec3& x) { return cavity_time_derivative(0.0, x).H; }, mesh,
                op.reference());
            double num = 0.0, den = 0.0;
            for (int e = 0; e < mesh.num_elements(); ++e)
                for (int c = 3; c < 6; ++c)
                {
                    const Eigen::VectorXd d = du.element(e).col(c) - exact.element(e).col(c);
                    num += mesh.geometry(e).det * d.dot(op.reference().mass() * d);
                    den += mesh.geometry(e).det *
                           exact.element(e).col(c).dot(op.reference().mass() * exact.element(e).col(c));
                }
            errs.push_back(std::sqrt(num / den));
        }
        const double rate = std::log2(errs[0] / errs[1]);
        MESSAGE("k=" << k << " dH/dt errors " << errs[0] << " " << errs[1] << " rate " << rate);
        CHECK(rate >= k - 0.1);
    }
}

TEST_CASE("current source enters with the printed sign")
{
    const Mesh mesh = build_structured_cube_mesh(1, 1.0, all_boundaries(FaceKind::PEC));
    SourceSpec src;
    const Vec3 j(2.0, -1.0, 0.5);
    src.current = [&](double, const Vec3&) { return j; };
    const MaxwellOperator op(mesh, 1, src);
    const FieldState du = apply_rhs(op, op.zero_state(), 0.0);
    for (int e = 0; e < mesh.num_elements(); ++e)
        for (int i = 0; i < du.num_nodes; ++i)
        {
            CHECK((du.element(e).row(i).segment<3>(0).transpose() - j / kEps0).norm() <=
                  1e-12 * j.norm() / kEps0);
            CHECK(du.element(e).row(i).segment<3>(3).norm() == 0.0);
        }
}

TEST_CASE("initial projection")
{
    const Mesh mesh = build_structured_cube_mesh(2, 1.0, all_boundaries(FaceKind::PEC));
    const ReferenceElement ref = build_reference_element(2);
    const FieldState z = project_initial_conditions({}, {}, mesh, ref);
    CHECK(z.data.norm() == 0.0);
    CHECK(z.time == 0.0);

    auto poly = [](const Vec3& x) { return Vec3(x.x() * x.y(), 1 - x.z() * x.z(), x.x() + 3 * x.y()); };
    const FieldState s = project_initial_conditions(poly, poly, mesh, ref);
    const QuadratureRule q = volume_quadrature(5);
    const Eigen::MatrixXd phi = ref.evaluate(q.points);
    for (int e = 0; e < mesh.num_elements(); ++e)
    {
        const Eigen::MatrixXd x = map_to_physical(mesh, e, q.points);
        const Eigen::MatrixXd vals = phi * s.element(e);
        for (int i = 0; i < q.size(); ++i)
        {
            const Vec3 p = poly(x.row(i).transpose());
            CHECK((vals.row(i).segment<3>(0).transpose() - p).norm() < 1e-12);
            CHECK((vals.row(i).segment<3>(3).transpose() - p).norm() < 1e-12);
        }
    }
    CHECK_THROWS_AS(project_initial_conditions([](const Vec3&) { return Vec3(NAN, 0, 0); }, {},
                                               mesh, ref),
                    NonFiniteValueError);
}
