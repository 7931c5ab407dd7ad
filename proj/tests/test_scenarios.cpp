// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>

#include "dgmax/scenarios.hpp"

using namespace dgmax;

namespace
{

// Central-difference curl and time derivative, used as an independent check
// of the closed-form derivative functions.
FieldValue fd_curl(const FieldFunction& f, double t, const Vec3& x, double h)
{
    Eigen::Matrix3d dE, dH;  // column j = d/dx_j
    for (int j = 0; j < 3; ++j)
    {
        Vec3 xp = x, xm = x;
        xp(j) += h;
        xm(j) -= h;
        const FieldValue a = f(t, xp), b = f(t, xm);
        dE.col(j) = (a.E - b.E) / (2 * h);
        dH.col(j) = (a.H - b.H) / (2 * h);
    }
    auto curl = [](const Eigen::Matrix3d& d) {
        return Vec3(d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1));
    };
    return {curl(dE), curl(dH)};
}

FieldValue fd_dt(const FieldFunction& f, double t, const Vec3& x, double dt)
{
    const FieldValue a = f(t + dt, x), b = f(t - dt, x);
    return {(a.E - b.E) / (2 * dt), (a.H - b.H) / (2 * dt)};
}

void check_maxwell(const ExactSolution& s, double period)
{
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i)
    {
        const double t = 10e-9 * u(rng);
        const Vec3 x(u(rng), u(rng), u(rng));
        const FieldValue c = s.curl(t, x);
        const FieldValue d = s.time_derivative(t, x);
        const double se = std::max(c.H.norm(), kEps0 * d.E.norm()) + kEps0 / period * 1e-3;
        const double sh = std::max(c.E.norm(), kMu0 * d.H.norm()) + 1e-3;
        CHECK((kEps0 * d.E - c.H).norm() <= 1e-10 * se);
        CHECK((kMu0 * d.H + c.E).norm() <= 1e-10 * sh);

        if (i % 50 == 0)
        {
            const FieldValue fc = fd_curl(s.value, t, x, 1e-5);
            const FieldValue ft = fd_dt(s.value, t, x, 1e-5 * period);
            CHECK((fc.E - c.E).norm() <= 1e-6 * (1 + c.E.norm()));
            CHECK((fc.H - c.H).norm() <= 1e-6 * (kEps0 / period + c.H.norm()));
            CHECK((ft.E - d.E).norm() <= 1e-6 * (1.0 / period + d.E.norm()));
            CHECK((ft.H - d.H).norm() <= 1e-6 * (1e-3 / period + d.H.norm()));
        }
    }
}

}  // namespace

TEST_CASE("vacuum constants")
{
    CHECK(kEps0 == doctest::Approx(1e-9 / (36 * M_PI)).epsilon(1e-15));
    CHECK(kMu0 == doctest::Approx(4e-7 * M_PI).epsilon(1e-15));
    CHECK(kC0 == doctest::Approx(3e8).epsilon(1e-14));
}

TEST_CASE("cavity solution")
{
    const Scenario s = cavity_scenario();
    CHECK(s.final_time == doctest::Approx(10e-9));
    const FieldValue v0 = cavity_exact(0.0, Vec3(0.3, 0.2, 0.7));
    CHECK(v0.H.norm() == 0.0);
    CHECK(v0.E(0) == doctest::Approx(-std::cos(0.3 * M_PI) * std::sin(0.2 * M_PI) * std::sin(0.7 * M_PI)));
    CHECK(cavity_omega() == doctest::Approx(std::sqrt(3.0) * M_PI * 3e8));
    check_maxwell(*s.exact, 2 * M_PI / cavity_omega());

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i)
    {
        const double t = 1e-8 * u(rng);
        for (int axis = 0; axis < 3; ++axis)
            for (double side : {0.0, 1.0})
            {
                Vec3 x(u(rng), u(rng), u(rng));
                x(axis) = side;
                Vec3 n = Vec3::Zero();
                n(axis) = side > 0 ? 1.0 : -1.0;
                CHECK(cavity_exact(t, x).E.cross(n).norm() < 1e-15);
            }
    }
}

TEST_CASE("plane wave")
{
    const Scenario s = planewave_scenario();
    const FieldValue v = planewave_incident(0.0, Vec3::Zero());
    CHECK((v.E - Vec3(1, 0, 0)).norm() == 0.0);
    CHECK((v.H - std::sqrt(kEps0 / kMu0) * Vec3(0, 1, 0)).norm() < 1e-18);
    CHECK((s.initial_E(Vec3::Zero()) - Vec3(1, 0, 0)).norm() == 0.0);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 100; ++i)
    {
        const FieldValue w = planewave_incident(1e-8 * u(rng), Vec3(u(rng), u(rng), u(rng)));
        CHECK(w.E(2) == 0.0);
        CHECK(w.H(2) == 0.0);
    }
    check_maxwell(*s.exact, 2 * M_PI / planewave_omega());
}

TEST_CASE("absorbing boundary load")
{
    const double z0 = kZ0;
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 100; ++i)
    {
        const Vec3 n = Vec3(u(rng), u(rng), u(rng)).normalized();
        const FieldValue inc = planewave_incident(1e-8 * u(rng), Vec3(u(rng), u(rng), u(rng)));
        CHECK(std::abs(silver_muller_G(inc, n, z0).dot(n)) < 1e-14);

        // An exact incident field produces fluxes equal to its own tangential traces.
        const Vec3 g = silver_muller_G(inc, n, z0);
        const FluxPair f = abc_flux(n, inc.E, inc.H, 1.0 / z0, g);
        CHECK((f.first - tangential(inc.E, n)).norm() < 1e-13);
        CHECK((f.second - tangential(inc.H, n)).norm() < 1e-13 / z0);
    }
    CHECK(silver_muller_G(FieldValue{}, Vec3(0, 0, 1), z0).norm() == 0.0);

    // Hand expansion on the face with n = (0, 0, 1): E = (a, b, c), H = (p, q, r):
    // n x E = (-b, a, 0); (H x n) x n = (-p, -q, 0).
    const FieldValue f{Vec3(1.5, -2.0, 0.7), Vec3(0.3, 0.4, -0.9)};
    const Vec3 g = silver_muller_G(f, Vec3(0, 0, 1), z0);
    CHECK(g(0) == doctest::Approx(2.0 - z0 * 0.3));
    CHECK(g(1) == doctest::Approx(1.5 - z0 * 0.4));
    CHECK(g(2) == 0.0);

    // Outgoing plane wave on the z = L face: no load.
    const FieldValue out = planewave_incident(1.3e-9, Vec3(0.2, 0.4, 1.0));
    CHECK(silver_muller_G(out, Vec3(0, 0, 1), z0).norm() < 1e-14);
}

TEST_CASE("builtin scenarios")
{
    CHECK(builtin_scenario_names().size() == 3);
    const Scenario sc = builtin_scenario("scattering");
    CHECK(sc.final_time == doctest::Approx(3e-9));
    CHECK(sc.sphere_radius == doctest::Approx(0.15));
    CHECK(sc.sphere_material.eps_rel == 2.0);
    CHECK(sc.domain == DomainKind::MeshFile);
    CHECK(sc.probes.size() == 9);
    CHECK((sc.probes[1].point - Vec3(0.2, -0.3, 0.8)).norm() == 0.0);
    CHECK_FALSE(sc.exact.has_value());
    CHECK_THROWS_AS(builtin_scenario("nope"), std::invalid_argument);

    const Mesh m = build_scattering_standin_mesh(sc, 4);
    CHECK(m.num_elements() == 384);
    for (const Face& f : m.faces())
        CHECK(f.kind == (f.is_boundary() ? FaceKind::ABC : FaceKind::Interior));
}
