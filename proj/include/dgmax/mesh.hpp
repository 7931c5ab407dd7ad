// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "dgmax/constants.hpp"

namespace dgmax
{

enum class FaceKind
{
    Interior,
    PEC,
    ABC
};

const char* to_string(FaceKind kind);

class MeshError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};
class MeshParseError : public MeshError
{
  public:
    using MeshError::MeshError;
};
class MeshConformityError : public MeshError
{
  public:
    using MeshError::MeshError;
};
class MeshOrientationError : public MeshError
{
  public:
    using MeshError::MeshError;
};

/// Relative material parameters; absolute values are eps_rel * kEps0 and mu_rel * kMu0.
struct Material
{
    double eps_rel = 1.0;
    double mu_rel = 1.0;
};

struct Face
{
    std::array<int, 3> vertices{};  // ascending global vertex ids
    FaceKind kind = FaceKind::Interior;
    int minus_element = -1;
    int minus_local = -1;
    int plus_element = -1;  // -1 on boundary faces
    int plus_local = -1;
    Vec3 normal = Vec3::Zero();  // n_F: outward of the minus element
    double area = 0.0;

    bool is_boundary() const { return plus_element < 0; }
};

/// Affine map x = origin + jacobian * xi from the unit tetrahedron.
struct ElementGeometry
{
    Vec3 origin = Vec3::Zero();
    Mat3 jacobian = Mat3::Identity();
    Mat3 inverse_jacobian = Mat3::Identity();
    double det = 0.0;
    double volume = 0.0;
    double surface_area = 0.0;
    std::array<Vec3, 4> normals{};  // outward unit normal per local face
    std::array<double, 4> face_areas{};
};

using BoundaryRule = std::function<FaceKind(const Vec3& centroid, const Vec3& outward_normal)>;

BoundaryRule all_boundaries(FaceKind kind);

/// Conforming tetrahedral mesh; immutable once built.
class Mesh
{
  public:
    /// Builds connectivity and geometry from raw parts. Element vertex order
    /// must be positively oriented. `boundary_kind` classifies each boundary
    /// face given its ascending vertex triple.
    Mesh(std::vector<Vec3> vertices, std::vector<std::array<int, 4>> elements,
         std::vector<int> element_material, std::map<int, Material> materials,
         const std::function<FaceKind(const std::array<int, 3>&, const Vec3&, const Vec3&)>&
             boundary_kind);

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_elements() const { return static_cast<int>(elements_.size()); }
    int num_faces() const { return static_cast<int>(faces_.size()); }

    const std::vector<Vec3>& vertices() const { return vertices_; }
    const std::array<int, 4>& element(int e) const { return elements_[e]; }
    const std::vector<std::array<int, 4>>& elements() const { return elements_; }
    const ElementGeometry& geometry(int e) const { return geometry_[e]; }
    const Face& face(int f) const { return faces_[f]; }
    const std::vector<Face>& faces() const { return faces_; }
    /// Global face index of local face `local` of element e.
    int element_face(int e, int local) const { return element_faces_[e][local]; }

    int material_id(int e) const { return element_material_[e]; }
    const std::map<int, Material>& materials() const { return materials_; }
    double eps(int e) const { return eps_[e]; }
    double mu(int e) const { return mu_[e]; }
    double impedance(int e) const { return std::sqrt(mu_[e] / eps_[e]); }
    double wave_speed(int e) const { return 1.0 / std::sqrt(eps_[e] * mu_[e]); }

    Vec3 element_centroid(int e) const;
    Vec3 face_centroid(int f) const;

    /// Ordered reference-vertex indices of element e matching the ascending
    /// global vertex order of its local face `local`.
    std::array<int, 3> face_vertex_triple(int e, int local) const;

    /// Barycentric coordinates of x relative to element e.
    std::array<double, 4> barycentric(int e, const Vec3& x) const;

  private:
    std::vector<Vec3> vertices_;
    std::vector<std::array<int, 4>> elements_;
    std::vector<int> element_material_;
    std::map<int, Material> materials_;
    std::vector<double> eps_;
    std::vector<double> mu_;
    std::vector<ElementGeometry> geometry_;
    std::vector<Face> faces_;
    std::vector<std::array<int, 4>> element_faces_;
};

/// n^3 cubes, each split into 6 tetrahedra around the (0,0,0)-(1,1,1) diagonal.
Mesh build_structured_cube_mesh(int n, double length, const BoundaryRule& boundary_kind,
                                Material material = {}, const Vec3& origin = Vec3::Zero());

struct MeshDiagnostics
{
    int merged_vertices = 0;
    int repaired_elements = 0;
    std::vector<std::string> warnings;
};

Mesh load_mesh(const std::filesystem::path& path, MeshDiagnostics* diagnostics = nullptr);
Mesh parse_mesh(std::istream& in, MeshDiagnostics* diagnostics = nullptr);
void write_mesh(const Mesh& mesh, const std::filesystem::path& path);
void write_mesh(const Mesh& mesh, std::ostream& out);

/// K plus every element sharing a face with K, ascending.
std::vector<int> neighbor_patch(const Mesh& mesh, int element);

/// Lowest-index element containing x (barycentric tolerance `tol`), or -1.
int locate_point(const Mesh& mesh, const Vec3& x, double tol = 1e-12);

/// Sphere-in-box stand-in geometry: structured cube mesh with elements whose
/// centroid lies inside the sphere tagged with material id 1.
Mesh build_sphere_in_cube_mesh(int n, double length, const Vec3& origin, const Vec3& center,
                               double radius, Material inside, FaceKind boundary);

}  // namespace dgmax
