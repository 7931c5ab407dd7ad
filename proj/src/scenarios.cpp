// SPDX-License-Identifier: Apache-2.0
#include "dgmax/scenarios.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dgmax
{

namespace
{

constexpr double kPi = std::numbers::pi;

struct Trig
{
    double sa, ca, sb, cb, sc, cc;
};

Trig cavity_trig(const Vec3& x, double length)
{
    const double k = kPi / length;
    return {std::sin(k * x(0)), std::cos(k * x(0)), std::sin(k * x(1)),
            std::cos(k * x(1)), std::sin(k * x(2)), std::cos(k * x(2))};
}

}  // namespace

double cavity_omega(double length) { return std::sqrt(3.0) * kPi * kC0 / length; }

FieldValue cavity_exact(double t, const Vec3& x, double length)
{
    const Trig s = cavity_trig(x, length);
    const double w = cavity_omega(length);
    const double k = kPi / length;
    FieldValue v;
    v.E = std::cos(w * t) * Vec3(-s.ca * s.sb * s.sc, 0.0, s.sa * s.sb * s.cc);
    v.H = (k / (kMu0 * w)) * std::sin(w * t) *
          Vec3(-s.sa * s.cb * s.cc, 2.0 * s.ca * s.sb * s.cc, -s.ca * s.cb * s.sc);
    return v;
}

FieldValue cavity_curl(double t, const Vec3& x, double length)
{
    const Trig s = cavity_trig(x, length);
    const double w = cavity_omega(length);
    const double k = kPi / length;
    FieldValue v;
    v.E = k * std::cos(w * t) *
          Vec3(s.sa * s.cb * s.cc, -2.0 * s.ca * s.sb * s.cc, s.ca * s.cb * s.sc);
    v.H = (3.0 * k * k / (kMu0 * w)) * std::sin(w * t) *
          Vec3(s.ca * s.sb * s.sc, 0.0, -s.sa * s.sb * s.cc);
    return v;
}

FieldValue cavity_time_derivative(double t, const Vec3& x, double length)
{
    const Trig s = cavity_trig(x, length);
    const double w = cavity_omega(length);
    const double k = kPi / length;
    FieldValue v;
    v.E = -w * std::sin(w * t) * Vec3(-s.ca * s.sb * s.sc, 0.0, s.sa * s.sb * s.cc);
    v.H = (k / kMu0) * std::cos(w * t) *
          Vec3(-s.sa * s.cb * s.cc, 2.0 * s.ca * s.sb * s.cc, -s.ca * s.cb * s.sc);
    return v;
}

double planewave_omega(double length) { return 6.0 * kPi * kC0 / length; }

namespace
{

const Vec3 kPolarization(1.0, 0.0, 0.0);
const Vec3 kDirection(0.0, 0.0, 1.0);

double planewave_phase(double t, const Vec3& x, double length)
{
    return planewave_omega(length) * (t - kDirection.dot(x) / kC0);
}

}  // namespace

FieldValue planewave_incident(double t, const Vec3& x, double length)
{
    const double c = std::cos(planewave_phase(t, x, length));
    FieldValue v;
    v.E = c * kPolarization;
    v.H = std::sqrt(kEps0 / kMu0) * kDirection.cross(v.E);
    return v;
}

FieldValue planewave_curl(double t, const Vec3& x, double length)
{
    const double s = std::sin(planewave_phase(t, x, length));
    const double wc = planewave_omega(length) / kC0;
    FieldValue v;
    v.E = wc * s * kDirection.cross(kPolarization);
    v.H = -wc * std::sqrt(kEps0 / kMu0) * s * kPolarization;
    return v;
}

FieldValue planewave_time_derivative(double t, const Vec3& x, double length)
{
    const double s = std::sin(planewave_phase(t, x, length));
    const double w = planewave_omega(length);
    FieldValue v;
    v.E = -w * s * kPolarization;
    v.H = -w * std::sqrt(kEps0 / kMu0) * s * kDirection.cross(kPolarization);
    return v;
}

Vec3 silver_muller_G(const FieldValue& incident, const Vec3& n, double impedance)
{
    return n.cross(incident.E) + impedance * incident.H.cross(n).cross(n);
}

Scenario cavity_scenario()
{
    Scenario s;
    s.name = "cavity";
    s.length = 1.0;
    s.boundary = all_boundaries(FaceKind::PEC);
    s.final_time = 10e-9;
    const double L = s.length;
    s.initial_E = [L](const Vec3& x) { return cavity_exact(0.0, x, L).E; };
    s.initial_H = [L](const Vec3& x) { return cavity_exact(0.0, x, L).H; };
    s.exact = ExactSolution{
        [L](double t, const Vec3& x) { return cavity_exact(t, x, L); },
        [L](double t, const Vec3& x) { return cavity_curl(t, x, L); },
        [L](double t, const Vec3& x) { return cavity_time_derivative(t, x, L); }};
    return s;
}

namespace
{

SourceSpec planewave_injection(double length)
{
    SourceSpec src;
    src.boundary_data = [length](double t, const Vec3& x, const Vec3& n, double z) {
        return silver_muller_G(planewave_incident(t, x, length), n, z);
    };
    return src;
}

}  // namespace

Scenario planewave_scenario()
{
    Scenario s;
    s.name = "planewave";
    s.length = 1.0;
    s.boundary = all_boundaries(FaceKind::ABC);
    s.final_time = 10e-9;
    const double L = s.length;
    s.source = planewave_injection(L);
    s.initial_E = [L](const Vec3& x) { return planewave_incident(0.0, x, L).E; };
    s.initial_H = [L](const Vec3& x) { return planewave_incident(0.0, x, L).H; };
    s.exact = ExactSolution{
        [L](double t, const Vec3& x) { return planewave_incident(t, x, L); },
        [L](double t, const Vec3& x) { return planewave_curl(t, x, L); },
        [L](double t, const Vec3& x) { return planewave_time_derivative(t, x, L); }};
    return s;
}

Scenario scattering_scenario()
{
    Scenario s;
    s.name = "scattering";
    s.domain = DomainKind::MeshFile;
    s.length = 1.0;
    s.origin = Vec3(-0.5, -0.5, 0.0);
    s.boundary = all_boundaries(FaceKind::ABC);
    s.final_time = 3e-9;
    s.source = planewave_injection(s.length);
    s.sphere_center = Vec3(0.0, 0.0, 0.5);
    s.sphere_radius = 0.15;
    s.sphere_material = Material{2.0, 1.0};
    s.probes = {{"A1", Vec3(0.0, 0.0, 0.45)},   {"A2", Vec3(0.2, -0.3, 0.8)},
                {"A3", Vec3(0.2, -0.3, 0.2)},   {"A4", Vec3(0.2, 0.3, 0.2)},
                {"A5", Vec3(0.2, 0.3, 0.8)},    {"A6", Vec3(-0.2, -0.3, 0.8)},
                {"A7", Vec3(-0.2, -0.3, 0.2)},  {"A8", Vec3(-0.2, 0.3, 0.2)},
                {"A9", Vec3(-0.2, 0.3, 0.8)}};
    return s;
}

std::vector<std::string> builtin_scenario_names() { return {"cavity", "planewave", "scattering"}; }

Scenario builtin_scenario(const std::string& name)
{
    if (name == "cavity")
        return cavity_scenario();
    if (name == "planewave")
        return planewave_scenario();
    if (name == "scattering")
        return scattering_scenario();
    throw std::invalid_argument("unknown scenario '" + name + "'");
}

Mesh build_scattering_standin_mesh(const Scenario& scattering, int n)
{
    return build_sphere_in_cube_mesh(n, scattering.length, scattering.origin,
                                     scattering.sphere_center, scattering.sphere_radius,
                                     scattering.sphere_material, FaceKind::ABC);
}

}  // namespace dgmax
