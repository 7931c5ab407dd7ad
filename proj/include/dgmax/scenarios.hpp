// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dgmax/dg_operator.hpp"
#include "dgmax/mesh.hpp"

namespace dgmax
{

struct FieldValue
{
    Vec3 E = Vec3::Zero();
    Vec3 H = Vec3::Zero();
};

using FieldFunction = std::function<FieldValue(double t, const Vec3& x)>;

/// Analytic solution with its curl and time derivative.
struct ExactSolution
{
    FieldFunction value;
    FieldFunction curl;
    FieldFunction time_derivative;
};

/// Standing wave in the PEC cube (0, L)^3.
double cavity_omega(double length = 1.0);
FieldValue cavity_exact(double t, const Vec3& x, double length = 1.0);
FieldValue cavity_curl(double t, const Vec3& x, double length = 1.0);
FieldValue cavity_time_derivative(double t, const Vec3& x, double length = 1.0);

/// Plane wave p cos(omega (t - d.x / c0)) with p = e_x, d = e_z, omega = 6 pi c0 / L.
double planewave_omega(double length = 1.0);
FieldValue planewave_incident(double t, const Vec3& x, double length = 1.0);
FieldValue planewave_curl(double t, const Vec3& x, double length = 1.0);
FieldValue planewave_time_derivative(double t, const Vec3& x, double length = 1.0);

/// Tangential load for the absorbing boundary with outward normal n:
/// G = n x E_inc + Z (H_inc x n) x n, so that an exact incident field passes
/// through the boundary without reflection.
Vec3 silver_muller_G(const FieldValue& incident, const Vec3& n, double impedance);

struct Probe
{
    std::string name;
    Vec3 point;
};

enum class DomainKind
{
    StructuredCube,
    MeshFile
};

struct Scenario
{
    std::string name;
    DomainKind domain = DomainKind::StructuredCube;
    double length = 1.0;
    Vec3 origin = Vec3::Zero();
    BoundaryRule boundary;
    double final_time = 0.0;
    SourceSpec source;
    std::function<Vec3(const Vec3&)> initial_E;
    std::function<Vec3(const Vec3&)> initial_H;
    std::optional<ExactSolution> exact;
    std::vector<Probe> probes;

    // Dielectric sphere geometry for the mesh-file scenario and its stand-in generator.
    Vec3 sphere_center = Vec3::Zero();
    double sphere_radius = 0.0;
    Material sphere_material;
};

Scenario cavity_scenario();
Scenario planewave_scenario();
Scenario scattering_scenario();

std::vector<std::string> builtin_scenario_names();
/// Throws std::invalid_argument for unknown names.
Scenario builtin_scenario(const std::string& name);

/// Stand-in for the dielectric sphere mesh: structured box of 6 n^3 elements,
/// staircase sphere by element centroid, all faces absorbing.
Mesh build_scattering_standin_mesh(const Scenario& scattering, int n);

}  // namespace dgmax
