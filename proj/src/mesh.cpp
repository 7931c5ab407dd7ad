// SPDX-License-Identifier: Apache-2.0
#include "dgmax/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "dgmax/format.hpp"

namespace dgmax
{

namespace
{

std::array<int, 3> sorted_triple(int a, int b, int c)
{
    std::array<int, 3> t{a, b, c};
    std::sort(t.begin(), t.end());
    return t;
}

struct TripleHash
{
    std::size_t operator()(const std::array<int, 3>& t) const noexcept
    {
        std::size_t h = static_cast<std::size_t>(t[0]);
        h = h * 1000003u ^ static_cast<std::size_t>(t[1]);
        h = h * 1000003u ^ static_cast<std::size_t>(t[2]);
        return h;
    }
};

constexpr std::array<std::array<int, 3>, 4> kFaceVertices{
    {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}}};

double signed_det(const std::vector<Vec3>& x, const std::array<int, 4>& v)
{
    Mat3 j;
    j.col(0) = x[v[1]] - x[v[0]];
    j.col(1) = x[v[2]] - x[v[0]];
    j.col(2) = x[v[3]] - x[v[0]];
    return j.determinant();
}

}  // namespace

const char* to_string(FaceKind kind)
{
    switch (kind)
    {
        case FaceKind::Interior:
            return "Interior";
        case FaceKind::PEC:
            return "PEC";
        case FaceKind::ABC:
            return "ABC";
    }
    return "?";
}

BoundaryRule all_boundaries(FaceKind kind)
{
    return [kind](const Vec3&, const Vec3&) { return kind; };
}

Mesh::Mesh(std::vector<Vec3> vertices, std::vector<std::array<int, 4>> elements,
           std::vector<int> element_material, std::map<int, Material> materials,
           const std::function<FaceKind(const std::array<int, 3>&, const Vec3&, const Vec3&)>&
               boundary_kind)
    : vertices_(std::move(vertices)),
      elements_(std::move(elements)),
      element_material_(std::move(element_material)),
      materials_(std::move(materials))
{
    const int ne = num_elements();
    if (static_cast<int>(element_material_.size()) != ne)
        throw MeshError("element material list size does not match element count");

    for (const auto& [id, m] : materials_)
    {
        if (!(m.eps_rel > 0.0) || !(m.mu_rel > 0.0))
            throw MeshError("material " + std::to_string(id) + " has non-positive eps or mu");
    }

    eps_.resize(ne);
    mu_.resize(ne);
    geometry_.resize(ne);
    for (int e = 0; e < ne; ++e)
    {
        const auto it = materials_.find(element_material_[e]);
        if (it == materials_.end())
        {
            throw MeshError("element " + std::to_string(e) + " references unknown material " +
                            std::to_string(element_material_[e]));
        }
        eps_[e] = it->second.eps_rel * kEps0;
        mu_[e] = it->second.mu_rel * kMu0;

        const auto& v = elements_[e];
        for (int a : v)
        {
            if (a < 0 || a >= num_vertices())
                throw MeshError("element " + std::to_string(e) + " has invalid vertex index");
        }
        ElementGeometry& g = geometry_[e];
        g.origin = vertices_[v[0]];
        g.jacobian.col(0) = vertices_[v[1]] - vertices_[v[0]];
        g.jacobian.col(1) = vertices_[v[2]] - vertices_[v[0]];
        g.jacobian.col(2) = vertices_[v[3]] - vertices_[v[0]];
        g.det = g.jacobian.determinant();
        if (!(g.det > 0.0))
            throw MeshOrientationError("element " + std::to_string(e) +
                                       " has non-positive Jacobian determinant");
        g.inverse_jacobian = g.jacobian.inverse();
        g.volume = g.det / 6.0;
        g.surface_area = 0.0;
        for (int f = 0; f < 4; ++f)
        {
            const Vec3& xa = vertices_[v[kFaceVertices[f][0]]];
            const Vec3& xb = vertices_[v[kFaceVertices[f][1]]];
            const Vec3& xc = vertices_[v[kFaceVertices[f][2]]];
            const Vec3& xd = vertices_[v[f]];
            Vec3 n = (xb - xa).cross(xc - xa);
            const double len = n.norm();
            if (n.dot(xd - xa) > 0.0)
                n = -n;
            g.normals[f] = n / len;
            g.face_areas[f] = 0.5 * len;
            g.surface_area += g.face_areas[f];
        }
    }

    element_faces_.assign(ne, {-1, -1, -1, -1});
    std::unordered_map<std::array<int, 3>, int, TripleHash> lookup;
    lookup.reserve(static_cast<std::size_t>(ne) * 3);
    std::vector<int> incidences;
    for (int e = 0; e < ne; ++e)
    {
        for (int f = 0; f < 4; ++f)
        {
            const auto& v = elements_[e];
            const auto key = sorted_triple(v[kFaceVertices[f][0]], v[kFaceVertices[f][1]],
                                           v[kFaceVertices[f][2]]);
            auto [it, inserted] = lookup.try_emplace(key, static_cast<int>(faces_.size()));
            if (inserted)
            {
                Face face;
                face.vertices = key;
                face.minus_element = e;
                face.minus_local = f;
                face.normal = geometry_[e].normals[f];
                face.area = geometry_[e].face_areas[f];
                faces_.push_back(face);
                incidences.push_back(1);
            }
            else
            {
                const int id = it->second;
                if (++incidences[id] > 2)
                {
                    throw MeshConformityError("face (" + std::to_string(key[0]) + ", " +
                                              std::to_string(key[1]) + ", " +
                                              std::to_string(key[2]) +
                                              ") shared by more than two elements");
                }
                Face& face = faces_[id];
                face.plus_element = e;
                face.plus_local = f;
                if (face.normal.dot(geometry_[e].normals[f]) > -0.5)
                {
                    throw MeshConformityError("face (" + std::to_string(key[0]) + ", " +
                                              std::to_string(key[1]) + ", " +
                                              std::to_string(key[2]) +
                                              ") has inconsistent neighbour orientation");
                }
            }
            element_faces_[e][f] = it->second;
        }
    }

    for (int id = 0; id < num_faces(); ++id)
    {
        Face& face = faces_[id];
        if (!face.is_boundary())
        {
            face.kind = FaceKind::Interior;
            continue;
        }
        face.kind = boundary_kind(face.vertices, face_centroid(id), face.normal);
        if (face.kind == FaceKind::Interior)
        {
            throw MeshConformityError("boundary face (" + std::to_string(face.vertices[0]) + ", " +
                                      std::to_string(face.vertices[1]) + ", " +
                                      std::to_string(face.vertices[2]) +
                                      ") has no PEC/ABC classification");
        }
    }
}

Vec3 Mesh::element_centroid(int e) const
{
    const auto& v = elements_[e];
    return 0.25 * (vertices_[v[0]] + vertices_[v[1]] + vertices_[v[2]] + vertices_[v[3]]);
}

Vec3 Mesh::face_centroid(int f) const
{
    const auto& v = faces_[f].vertices;
    return (vertices_[v[0]] + vertices_[v[1]] + vertices_[v[2]]) / 3.0;
}

std::array<int, 3> Mesh::face_vertex_triple(int e, int local) const
{
    const Face& face = faces_[element_faces_[e][local]];
    std::array<int, 3> triple{};
    for (int j = 0; j < 3; ++j)
    {
        for (int l = 0; l < 4; ++l)
        {
            if (elements_[e][l] == face.vertices[j])
                triple[j] = l;
        }
    }
    return triple;
}

std::array<double, 4> Mesh::barycentric(int e, const Vec3& x) const
{
    const ElementGeometry& g = geometry_[e];
    const Vec3 xi = g.inverse_jacobian * (x - g.origin);
    return {1.0 - xi.sum(), xi(0), xi(1), xi(2)};
}

Mesh build_structured_cube_mesh(int n, double length, const BoundaryRule& boundary_kind,
                                Material material, const Vec3& origin)
{
    if (n < 1 || !(length > 0.0))
        throw std::invalid_argument("structured mesh needs n >= 1 and L > 0");
    const int m = n + 1;
    const double h = length / n;
    std::vector<Vec3> vertices;
    vertices.reserve(static_cast<std::size_t>(m) * m * m);
    for (int k = 0; k < m; ++k)
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < m; ++i)
                vertices.push_back(origin + Vec3(i * h, j * h, k * h));

    auto id = [m](int i, int j, int k) { return i + m * (j + m * k); };
    static constexpr std::array<std::array<int, 3>, 6> kPerms{
        {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
    static constexpr std::array<bool, 6> kOdd{false, true, true, false, false, true};

    std::vector<std::array<int, 4>> elements;
    elements.reserve(static_cast<std::size_t>(6) * n * n * n);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                for (int p = 0; p < 6; ++p)
                {
                    std::array<int, 3> c{i, j, k};
                    std::array<int, 4> tet{};
                    tet[0] = id(c[0], c[1], c[2]);
                    for (int s = 0; s < 3; ++s)
                    {
                        ++c[kPerms[p][s]];
                        tet[s + 1] = id(c[0], c[1], c[2]);
                    }
                    if (kOdd[p])
                        std::swap(tet[2], tet[3]);
                    elements.push_back(tet);
                }

    std::vector<int> element_material(elements.size(), 0);
    return Mesh(std::move(vertices), std::move(elements), std::move(element_material),
                {{0, material}},
                [&](const std::array<int, 3>&, const Vec3& c, const Vec3& normal) {
                    return boundary_kind(c, normal);
                });
}

Mesh build_sphere_in_cube_mesh(int n, double length, const Vec3& origin, const Vec3& center,
                               double radius, Material inside, FaceKind boundary)
{
    const Mesh base = build_structured_cube_mesh(n, length, all_boundaries(boundary), {}, origin);
    std::vector<int> element_material(base.num_elements(), 0);
    for (int e = 0; e < base.num_elements(); ++e)
    {
        if ((base.element_centroid(e) - center).norm() < radius)
            element_material[e] = 1;
    }
    return Mesh(base.vertices(), base.elements(), std::move(element_material),
                {{0, Material{}}, {1, inside}},
                [boundary](const std::array<int, 3>&, const Vec3&, const Vec3&) {
                    return boundary;
                });
}

namespace
{

struct CellKey
{
    long long x, y, z;
    bool operator==(const CellKey&) const = default;
};

struct CellHash
{
    std::size_t operator()(const CellKey& k) const noexcept
    {
        return static_cast<std::size_t>(k.x * 73856093LL ^ k.y * 19349663LL ^ k.z * 83492791LL);
    }
};

// Merges vertices closer than `tol`; returns old -> new index map.
std::vector<int> merge_vertices(std::vector<Vec3>& vertices, double tol, int& merged)
{
    std::vector<int> remap(vertices.size());
    std::vector<Vec3> unique;
    std::unordered_map<CellKey, std::vector<int>, CellHash> grid;
    const double cell = (tol > 0.0) ? 2.0 * tol : 1.0;
    auto key_of = [cell](const Vec3& x) {
        return CellKey{static_cast<long long>(std::floor(x(0) / cell)),
                       static_cast<long long>(std::floor(x(1) / cell)),
                       static_cast<long long>(std::floor(x(2) / cell))};
    };
    merged = 0;
    for (std::size_t i = 0; i < vertices.size(); ++i)
    {
        const CellKey k = key_of(vertices[i]);
        int found = -1;
        for (long long dx = -1; dx <= 1 && found < 0; ++dx)
            for (long long dy = -1; dy <= 1 && found < 0; ++dy)
                for (long long dz = -1; dz <= 1 && found < 0; ++dz)
                {
                    const auto it = grid.find({k.x + dx, k.y + dy, k.z + dz});
                    if (it == grid.end())
                        continue;
                    for (int u : it->second)
                    {
                        if ((unique[u] - vertices[i]).norm() <= tol)
                        {
                            found = u;
                            break;
                        }
                    }
                }
        if (found >= 0)
        {
            remap[i] = found;
            ++merged;
        }
        else
        {
            remap[i] = static_cast<int>(unique.size());
            grid[k].push_back(remap[i]);
            unique.push_back(vertices[i]);
        }
    }
    vertices = std::move(unique);
    return remap;
}

FaceKind parse_tag(const std::string& tag, int line)
{
    if (tag == "PEC")
        return FaceKind::PEC;
    if (tag == "ABC")
        return FaceKind::ABC;
    throw MeshParseError("line " + std::to_string(line) + ": unknown boundary tag '" + tag + "'");
}

}  // namespace

Mesh parse_mesh(std::istream& in, MeshDiagnostics* diagnostics)
{
    MeshDiagnostics local;
    MeshDiagnostics& diag = diagnostics ? *diagnostics : local;

    std::vector<std::string> lines;
    std::vector<int> line_numbers;
    {
        std::string line;
        int number = 0;
        while (std::getline(in, line))
        {
            ++number;
            const auto hash = line.find('#');
            if (hash != std::string::npos)
                line.erase(hash);
            if (line.find_first_not_of(" \t\r") == std::string::npos)
                continue;
            lines.push_back(line);
            line_numbers.push_back(number);
        }
    }
    std::size_t cursor = 0;
    auto fail = [&](const std::string& what) -> MeshParseError {
        const int ln = cursor < line_numbers.size() ? line_numbers[cursor] : -1;
        return MeshParseError("line " + std::to_string(ln) + ": " + what);
    };

    if (lines.empty())
        throw MeshParseError("empty mesh file");
    {
        std::istringstream hdr(lines[0]);
        std::string magic;
        int version = 0;
        if (!(hdr >> magic >> version) || magic != "meshfmt" || version != 1)
            throw fail("expected header 'meshfmt 1'");
        cursor = 1;
    }

    std::vector<Vec3> vertices;
    std::vector<std::array<int, 4>> elements;
    std::vector<int> element_material;
    std::map<int, Material> materials;
    std::vector<std::pair<std::array<int, 3>, FaceKind>> tags;
    bool seen_vertices = false, seen_elements = false;

    while (cursor < lines.size())
    {
        std::istringstream sec(lines[cursor]);
        std::string name;
        long long count = -1;
        if (!(sec >> name >> count) || count < 0)
            throw fail("expected '<section> <count>'");
        std::string extra;
        if (sec >> extra)
            throw fail("trailing tokens after section header");
        ++cursor;
        if (cursor + static_cast<std::size_t>(count) > lines.size())
            throw fail("section '" + name + "' truncated");
        for (long long r = 0; r < count; ++r, ++cursor)
        {
            std::istringstream row(lines[cursor]);
            if (name == "vertices")
            {
                double x = 0, y = 0, z = 0;
                if (!(row >> x >> y >> z))
                    throw fail("bad vertex row");
                vertices.emplace_back(x, y, z);
            }
            else if (name == "elements")
            {
                std::array<int, 4> v{};
                int mat = 0;
                if (!(row >> v[0] >> v[1] >> v[2] >> v[3] >> mat))
                    throw fail("bad element row");
                elements.push_back(v);
                element_material.push_back(mat);
            }
            else if (name == "materials")
            {
                int id = 0;
                Material m;
                if (!(row >> id >> m.eps_rel >> m.mu_rel))
                    throw fail("bad material row");
                if (!materials.emplace(id, m).second)
                    throw fail("duplicate material id " + std::to_string(id));
            }
            else if (name == "boundary")
            {
                int a = 0, b = 0, c = 0;
                std::string tag;
                if (!(row >> a >> b >> c >> tag))
                    throw fail("bad boundary row");
                tags.emplace_back(std::array<int, 3>{a, b, c}, parse_tag(tag, line_numbers[cursor]));
            }
            else
            {
                throw fail("unknown section '" + name + "'");
            }
            if (row >> extra)
                throw fail("trailing tokens in '" + name + "' row");
        }
        seen_vertices |= (name == "vertices");
        seen_elements |= (name == "elements");
    }
    if (!seen_vertices || !seen_elements)
        throw MeshParseError("mesh file needs both 'vertices' and 'elements' sections");

    const int nv = static_cast<int>(vertices.size());
    for (const auto& v : elements)
        for (int a : v)
            if (a < 0 || a >= nv)
                throw MeshParseError("element vertex index out of range");
    for (const auto& [t, kind] : tags)
        for (int a : t)
            if (a < 0 || a >= nv)
                throw MeshParseError("boundary vertex index out of range");

    Vec3 lo = vertices.empty() ? Vec3::Zero() : vertices.front();
    Vec3 hi = lo;
    for (const auto& x : vertices)
    {
        lo = lo.cwiseMin(x);
        hi = hi.cwiseMax(x);
    }
    const double diag_len = (hi - lo).norm();
    const std::vector<int> remap = merge_vertices(vertices, 1e-10 * diag_len, diag.merged_vertices);
    for (auto& v : elements)
        for (int& a : v)
            a = remap[a];

    const double degenerate = 1e-14 * diag_len * diag_len * diag_len;
    for (std::size_t e = 0; e < elements.size(); ++e)
    {
        auto& v = elements[e];
        if (std::set<int>(v.begin(), v.end()).size() != 4)
            throw MeshOrientationError("element " + std::to_string(e) + " has repeated vertices");
        const double det = signed_det(vertices, v);
        if (std::abs(det) <= degenerate)
            throw MeshOrientationError("element " + std::to_string(e) + " is degenerate");
        if (det < 0.0)
        {
            std::swap(v[2], v[3]);
            ++diag.repaired_elements;
            diag.warnings.push_back("element " + std::to_string(e) +
                                    " was inverted; swapped vertices 2 and 3");
            std::cerr << "warning: " << diag.warnings.back() << '\n';
        }
    }

    std::unordered_map<std::array<int, 3>, FaceKind, TripleHash> tag_map;
    for (const auto& [t, kind] : tags)
    {
        const auto key = sorted_triple(remap[t[0]], remap[t[1]], remap[t[2]]);
        tag_map[key] = kind;
    }
    if (materials.empty())
        materials.emplace(0, Material{});

    Mesh mesh(std::move(vertices), std::move(elements), std::move(element_material),
              std::move(materials),
              [&](const std::array<int, 3>& key, const Vec3&, const Vec3&) {
                  const auto it = tag_map.find(key);
                  if (it == tag_map.end())
                  {
                      throw MeshConformityError("untagged boundary face (" +
                                                std::to_string(key[0]) + ", " +
                                                std::to_string(key[1]) + ", " +
                                                std::to_string(key[2]) + ")");
                  }
                  return it->second;
              });

    std::unordered_map<std::array<int, 3>, int, TripleHash> boundary_faces;
    for (const Face& f : mesh.faces())
        if (f.is_boundary())
            boundary_faces.emplace(f.vertices, 1);
    for (const auto& [key, kind] : tag_map)
    {
        if (!boundary_faces.contains(key))
            throw MeshConformityError("boundary tag on a face that is not on the boundary");
    }
    return mesh;
}

Mesh load_mesh(const std::filesystem::path& path, MeshDiagnostics* diagnostics)
{
    std::ifstream in(path);
    if (!in)
        throw MeshParseError("cannot open mesh file " + path.string());
    return parse_mesh(in, diagnostics);
}

void write_mesh(const Mesh& mesh, std::ostream& out)
{
    out << "meshfmt 1\n";
    out << "vertices " << mesh.num_vertices() << '\n';
    for (const Vec3& x : mesh.vertices())
        out << format_double(x(0)) << ' ' << format_double(x(1)) << ' ' << format_double(x(2))
            << '\n';
    out << "elements " << mesh.num_elements() << '\n';
    for (int e = 0; e < mesh.num_elements(); ++e)
    {
        const auto& v = mesh.element(e);
        out << v[0] << ' ' << v[1] << ' ' << v[2] << ' ' << v[3] << ' ' << mesh.material_id(e)
            << '\n';
    }
    out << "materials " << mesh.materials().size() << '\n';
    for (const auto& [id, m] : mesh.materials())
        out << id << ' ' << format_double(m.eps_rel) << ' ' << format_double(m.mu_rel) << '\n';
    int nb = 0;
    for (const Face& f : mesh.faces())
        nb += f.is_boundary();
    out << "boundary " << nb << '\n';
    for (const Face& f : mesh.faces())
    {
        if (f.is_boundary())
            out << f.vertices[0] << ' ' << f.vertices[1] << ' ' << f.vertices[2] << ' '
                << to_string(f.kind) << '\n';
    }
}

void write_mesh(const Mesh& mesh, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw MeshError("cannot write mesh file " + path.string());
    write_mesh(mesh, out);
}

std::vector<int> neighbor_patch(const Mesh& mesh, int element)
{
    std::vector<int> patch{element};
    for (int f = 0; f < 4; ++f)
    {
        const Face& face = mesh.face(mesh.element_face(element, f));
        if (face.is_boundary())
            continue;
        patch.push_back(face.minus_element == element ? face.plus_element : face.minus_element);
    }
    std::sort(patch.begin(), patch.end());
    return patch;
}

int locate_point(const Mesh& mesh, const Vec3& x, double tol)
{
    for (int e = 0; e < mesh.num_elements(); ++e)
    {
        const auto lam = mesh.barycentric(e, x);
        if (*std::min_element(lam.begin(), lam.end()) >= -tol)
            return e;
    }
    return -1;
}

}  // namespace dgmax
