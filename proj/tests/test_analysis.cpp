// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "dgmax/analysis.hpp"
#include "dgmax/dg_operator.hpp"

using namespace dgmax;

namespace
{

FaceKind pec(const std::array<int, 3>&, const Vec3&, const Vec3&) { return FaceKind::PEC; }

// E = (y, z^2, x y), H = (z, x, y); curls (x - 2z, -y, -1) and (1, 1, 1).
ExactSolution quadratic_field()
{
    ExactSolution s;
    s.value = [](double, const Vec3& x) {
        return FieldValue{Vec3(x(1), x(2) * x(2), x(0) * x(1)), Vec3(x(2), x(0), x(1))};
    };
    s.curl = [](double, const Vec3& x) {
        return FieldValue{Vec3(x(0) - 2.0 * x(2), -x(1), -1.0), Vec3(1.0, 1.0, 1.0)};
    };
    return s;
}

FieldState interpolate(const ExactSolution& s, double t, const Mesh& mesh, int k)
{
    return project_initial_conditions([&](const Vec3& x) { return s.value(t, x).E; },
                                      [&](const Vec3& x) { return s.value(t, x).H; }, mesh,
                                      shared_reference_element(k));
}

Mesh single_tet()
{
    return Mesh({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)}, {{0, 1, 2, 3}}, {0},
                {{0, Material{}}}, pec);
}

}  // namespace

TEST_CASE("eoc of an exact square law")
{
    const auto rows = eoc({1.0, 0.25}, {1.0, 0.5});
    REQUIRE(rows.size() == 2);
    CHECK_FALSE(rows[0].has_eoc);
    CHECK(rows[1].has_eoc);
    CHECK(rows[1].eoc == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("eoc of the tabulated cavity and plane-wave sequences")
{
    // Tabulated errors carry three significant digits; the band is the worst case of
    // that rounding propagated through the log-ratio.
    auto band = [](const std::vector<double>& e, const std::vector<double>& h, int i) {
        const double rel = 0.5e-2 * (1.0 / (e[i - 1] / std::pow(10.0, std::floor(std::log10(e[i - 1])))) +
                                     1.0 / (e[i] / std::pow(10.0, std::floor(std::log10(e[i])))));
        return rel / std::log(h[i - 1] / h[i]);
    };
    const std::vector<double> e1{7.99e-01, 4.94e-01, 3.65e-01}, h1{1.0 / 4, 1.0 / 6, 1.0 / 8};
    const auto p1 = eoc(e1, h1);
    CHECK(std::abs(p1[1].eoc - 1.19) <= band(e1, h1, 1) + 0.005);
    CHECK(std::abs(p1[2].eoc - 1.05) <= band(e1, h1, 2) + 0.005);

    const std::vector<double> e3{1.01e-01, 4.25e-02, 2.22e-02}, h3{1.0 / 8, 1.0 / 10, 1.0 / 12};
    const auto p3 = eoc(e3, h3);
    CHECK(std::abs(p3[1].eoc - 3.87) <= band(e3, h3, 1) + 0.005);
    CHECK(std::abs(p3[2].eoc - 3.56) <= band(e3, h3, 2) + 0.005);
}

TEST_CASE("eoc recovers power-law exponents")
{
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> p(0.5, 6.0), c(0.1, 10.0);
    for (int trial = 0; trial < 50; ++trial)
    {
        const double order = p(rng), scale = c(rng);
        std::vector<double> hs, errs;
        for (double h = 0.5; h > 0.05; h *= 0.7)
        {
            hs.push_back(h);
            errs.push_back(scale * std::pow(h, order));
        }
        for (const auto& row : eoc(errs, hs))
            if (row.has_eoc)
                CHECK(std::abs(row.eoc - order) < 1e-12);
    }
}

TEST_CASE("eoc input validation")
{
    CHECK_THROWS_AS(eoc({1.0}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(eoc({1.0, 0.5}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(eoc({1.0, 0.0}, {1.0, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(eoc({1.0, -0.5}, {1.0, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(eoc({1.0, 0.5}, {0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(eoc({1.0, 0.5}, {0.5, 1.0}), std::invalid_argument);
}

TEST_CASE("hcurl and l2 errors vanish for reproduced polynomials")
{
    const Mesh mesh = build_structured_cube_mesh(2, 1.0, all_boundaries(FaceKind::PEC));
    const ExactSolution s = quadratic_field();
    for (int k = 2; k <= 4; ++k)
    {
        const FieldState u = interpolate(s, 0.0, mesh, k);
        CHECK(hcurl_error(u, mesh, s, 0.0, Field::E) < 1e-10);
        CHECK(hcurl_error(u, mesh, s, 0.0, Field::H) < 1e-10);
        CHECK(l2_error(u, mesh, s, 0.0, Field::E) < 1e-10);
        CHECK(l2_error(u, mesh, s, 0.0, Field::H) < 1e-10);
    }
    // k = 1 cannot hold z^2: the error is then strictly positive.
    CHECK(hcurl_error(interpolate(s, 0.0, mesh, 1), mesh, s, 0.0, Field::E) > 1e-3);
}

TEST_CASE("point evaluation and point curls of reproduced polynomials")
{
    const Mesh mesh = build_structured_cube_mesh(2, 1.0, all_boundaries(FaceKind::PEC));
    const ExactSolution s = quadratic_field();
    const FieldState u = interpolate(s, 0.0, mesh, 2);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> r(0.0, 1.0);
    for (int i = 0; i < 50; ++i)
    {
        const Vec3 x(r(rng), r(rng), r(rng));
        const int e = locate_point(mesh, x);
        REQUIRE(e >= 0);
        const FieldValue v = evaluate_at(u, mesh, e, x), c = curl_at(u, mesh, e, x);
        CHECK((v.E - s.value(0, x).E).norm() < 1e-12);
        CHECK((v.H - s.value(0, x).H).norm() < 1e-12);
        CHECK((c.E - s.curl(0, x).E).norm() < 1e-11);
        CHECK((c.H - s.curl(0, x).H).norm() < 1e-11);
    }
}

TEST_CASE("hcurl error quadrature is saturated at the default degree")
{
    const Mesh mesh = build_structured_cube_mesh(4, 1.0, all_boundaries(FaceKind::PEC));
    const ExactSolution exact = *cavity_scenario().exact;
    const double t = 3.1e-9;
    for (int k = 1; k <= 3; ++k)
    {
        const FieldState u = interpolate(exact, t, mesh, k);
        for (Field f : {Field::E, Field::H})
        {
            const double base = hcurl_error(u, mesh, exact, t, f);
            const double fine = hcurl_error(u, mesh, exact, t, f, 2 * (2 * k + 4));
            CHECK(std::abs(base - fine) < 1e-3 * fine);
        }
    }
}

TEST_CASE("hcurl error is invariant under element reordering")
{
    const Mesh mesh = build_structured_cube_mesh(3, 1.0, all_boundaries(FaceKind::PEC));
    std::vector<int> perm(mesh.num_elements());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), std::mt19937(5));
    std::vector<std::array<int, 4>> elements;
    for (int e : perm)
        elements.push_back(mesh.element(e));
    const Mesh shuffled(mesh.vertices(), elements, std::vector<int>(elements.size(), 0),
                        {{0, Material{}}}, pec);

    const ExactSolution exact = *cavity_scenario().exact;
    const double t = 2e-9;
    const FieldState u = interpolate(exact, 0.0, mesh, 2);
    FieldState v(u.num_elements, u.degree);
    for (int i = 0; i < mesh.num_elements(); ++i)
        v.element(i) = u.element(perm[i]);
    for (Field f : {Field::E, Field::H})
    {
        const double a = hcurl_error(u, mesh, exact, t, f);
        const double b = hcurl_error(v, shuffled, exact, t, f);
        CHECK(std::abs(a - b) <= 1e-12 * a);
    }
    CHECK(std::abs(discrete_energy(u, mesh) - discrete_energy(v, shuffled)) <=
          1e-12 * discrete_energy(u, mesh));
}

TEST_CASE("hcurl error restricted to a subset sums in quadrature")
{
    const Mesh mesh = build_structured_cube_mesh(2, 1.0, all_boundaries(FaceKind::PEC));
    const ExactSolution exact = *cavity_scenario().exact;
    const FieldState u = interpolate(exact, 0.0, mesh, 1);
    std::vector<int> even, odd;
    for (int e = 0; e < mesh.num_elements(); ++e)
        (e % 2 ? odd : even).push_back(e);
    const double all = hcurl_error(u, mesh, exact, 1e-9, Field::E);
    const double a = hcurl_error(u, mesh, exact, 1e-9, Field::E, 0, &even);
    const double b = hcurl_error(u, mesh, exact, 1e-9, Field::E, 0, &odd);
    CHECK(std::hypot(a, b) == doctest::Approx(all).epsilon(1e-12));
}

TEST_CASE("interpolation error in L2 decays with order k + 1")
{
    const ExactSolution exact = *cavity_scenario().exact;
    for (int k = 1; k <= 3; ++k)
    {
        std::vector<double> errs, hs;
        for (int n : {4, 8})
        {
            const Mesh mesh = build_structured_cube_mesh(n, 1.0, all_boundaries(FaceKind::PEC));
            errs.push_back(l2_error(interpolate(exact, 0.0, mesh, k), mesh, exact, 0.0, Field::E));
            hs.push_back(1.0 / n);
        }
        const double rate = eoc(errs, hs)[1].eoc;
        CAPTURE(k);
        CAPTURE(rate);
        CHECK(rate > k + 1 - 0.3);
        CHECK(rate < k + 1 + 0.3);
    }
}

TEST_CASE("discrete energy of simple states")
{
    const Mesh tet = single_tet();
    FieldState zero(1, 2);
    CHECK(discrete_energy(zero, tet) == 0.0);

    FieldState u(1, 3);
    u.E(0).col(0).setOnes();
    CHECK(discrete_energy(u, tet) == doctest::Approx(0.5 * kEps0 / 6.0).epsilon(1e-13));
    u.H(0).col(1).setOnes();
    CHECK(discrete_energy(u, tet) ==
          doctest::Approx(0.5 * (kEps0 + kMu0) / 6.0).epsilon(1e-13));

    // eps_rel scales the electric part only
    const Mesh dielectric({Vec3(0, 0, 0), Vec3(2, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)},
                          {{0, 1, 2, 3}}, {0}, {{0, Material{4.0, 1.0}}}, pec);
    FieldState w(1, 1);
    w.E(0).col(2).setConstant(3.0);
    CHECK(discrete_energy(w, dielectric) ==
          doctest::Approx(0.5 * 4.0 * kEps0 * 9.0 * (2.0 / 6.0)).epsilon(1e-13));
}

TEST_CASE("probe relative errors")
{
    std::mt19937 rng(2);
    std::normal_distribution<double> g;
    ProbeSeries ref, half, same;
    for (int n = 0; n < 40; ++n)
    {
        const Vec3 e(g(rng), g(rng), g(rng)), h(g(rng), g(rng), g(rng));
        ref.curl_E.push_back(e);
        ref.curl_H.push_back(h);
        half.curl_E.push_back(0.5 * e);
        half.curl_H.push_back(0.5 * h);
    }
    same = ref;

    const ProbeErrors p = probe_relative_errors("A", ref, same, half);
    CHECK(p.name == "A");
    CHECK(p.err_E == 0.0);
    CHECK(p.err_H == 0.0);
    CHECK(p.err_post_E == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(p.err_post_H == doctest::Approx(0.5).epsilon(1e-14));

    // scale invariance
    ProbeSeries noisy = ref;
    for (auto& v : noisy.curl_E)
        v += Vec3(g(rng), g(rng), g(rng)) * 0.1;
    const double base = probe_relative_error(ref.curl_E, noisy.curl_E);
    for (double c : {1e-6, 3.0, 1e8})
    {
        std::vector<Vec3> a = ref.curl_E, b = noisy.curl_E;
        for (auto& v : a)
            v *= c;
        for (auto& v : b)
            v *= c;
        CHECK(probe_relative_error(a, b) == doctest::Approx(base).epsilon(1e-12));
    }

    const std::vector<Vec3> zeros(5, Vec3::Zero());
    CHECK_THROWS_AS(probe_relative_error(zeros, zeros), ZeroDenominatorError);
    CHECK_THROWS_AS(probe_relative_error(zeros, std::vector<Vec3>(4, Vec3::Zero())),
                    std::invalid_argument);
}
