#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace fbsurf {

using Vec3 = Eigen::Vector3d;
using Face = std::array<int, 3>;
using Edge = std::array<int, 2>;  // always stored with e[0] < e[1]

/// Discrete domain: a triangle-meshed surface (dim 2) or a polyline curve (dim 1).
///
/// Built only through the validating factories below, after which it is
/// immutable. Edges are derived from faces (or taken from the polyline
/// segments), sorted lexicographically and unique. A vertex is boundary iff it
/// lies on an edge with exactly one incident face (surfaces) or has exactly one
/// incident segment (curves). Vertex weights are barycentric: one third of the
/// incident face areas, or one half of the incident segment lengths.
class Mesh {
public:
    /// Throws Topology for non-manifold edges or unreferenced vertices,
    /// DegenerateGeometry for zero-area faces, InvalidParameter for bad indices.
    static Mesh surface(std::vector<Vec3> vertices, std::vector<Face> faces);

    /// Throws Topology for branching curves, DegenerateGeometry for zero-length segments.
    static Mesh polyline(std::vector<Vec3> vertices, std::vector<Edge> segments);

    int dim() const noexcept { return dim_; }
    std::size_t num_vertices() const noexcept { return vertices_.size(); }
    std::size_t num_faces() const noexcept { return faces_.size(); }
    std::size_t num_edges() const noexcept { return edges_.size(); }
    std::size_t num_boundary() const noexcept;

    std::span<const Vec3> vertices() const noexcept { return vertices_; }
    std::span<const Face> faces() const noexcept { return faces_; }
    std::span<const Edge> edges() const noexcept { return edges_; }
    std::span<const double> vertex_weights() const noexcept { return weights_; }

    const Vec3& vertex(std::size_t i) const { return vertices_[i]; }
    bool is_boundary(std::size_t i) const { return boundary_[i] != 0; }
    double vertex_weight(std::size_t i) const { return weights_[i]; }

    double total_weight() const noexcept;
    double bounding_box_diagonal() const noexcept;

    /// Area-weighted unit vertex normals; surfaces only.
    std::vector<Vec3> vertex_normals() const;

    /// Same connectivity with every position multiplied by c.
    Mesh scaled(double c) const;

    /// Stable 64-bit content hash of dimension, positions and connectivity.
    std::uint64_t content_hash() const noexcept;

private:
    Mesh() = default;
    void finish_weights();

    int dim_ = 0;
    std::vector<Vec3> vertices_;
    std::vector<Face> faces_;
    std::vector<Edge> edges_;
    std::vector<char> boundary_;
    std::vector<double> weights_;
};

struct EdgeLengthStats {
    double min_length = 0.0;
    double max_length = 0.0;
    double mean_length = 0.0;
    double ratio = 0.0;  // max / min
};

/// Mesh-uniformity report.
EdgeLengthStats edge_length_stats(const Mesh& mesh);

// ---------------------------------------------------------------------------
// Generators

/// n equally spaced vertices on [0, 1] along the x-axis.
Mesh generate_interval(int n);

/// Unit-radius cylinder of axis length C with n_len rings of n_circ vertices.
/// Alternate rings are rotated by half a step so triangles are near-equilateral.
Mesh generate_cylinder(double length, int n_circ, int n_len);

/// Ring count that keeps cylinder triangles close to equilateral.
int default_cylinder_rings(double length, int n_circ);

/// Icosahedron subdivided s times, projected to the unit sphere (10*4^s + 2 vertices).
Mesh generate_sphere(int subdivisions);

struct Hole {
    double cx = 0.0;
    double cy = 0.0;
    double radius = 0.0;
};

/// Planar unit disk with circular holes removed, triangulated by Delaunay
/// insertion of concentric rings. Ring spacing is 1/n_rings.
/// Holes must lie strictly inside the disk and be pairwise disjoint
/// (InvalidGeometry otherwise), with at least one ring spacing of clearance.
Mesh generate_disk(int n_rings, std::span<const Hole> holes = {});

/// Three holes of radius 0.2 centred on the circle of radius 0.45.
std::vector<Hole> default_disk_holes();

// ---------------------------------------------------------------------------
// File I/O (ASCII)

enum class MeshFormat { Off, Obj };

/// Infers the format from the extension (.off / .obj); InvalidParameter otherwise.
MeshFormat mesh_format_from_path(const std::filesystem::path& path);

/// OFF or OBJ reader for positions and triangles. OBJ `l` elements are read as
/// a polyline when the file has no faces. Normals and texture coordinates are
/// ignored.
Mesh load_mesh(const std::filesystem::path& path, MeshFormat format);
Mesh load_mesh(const std::filesystem::path& path);

/// Round-trip exact writer (17 significant digits). Curves are only
/// representable as OBJ polylines.
void save_mesh(const std::filesystem::path& path, const Mesh& mesh, MeshFormat format);

}  // namespace fbsurf
