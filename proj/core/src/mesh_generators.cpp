#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "detail/delaunay.hpp"
#include "fbsurf/error.hpp"
#include "fbsurf/mesh.hpp"

namespace fbsurf {

namespace {

constexpr double kPi = std::numbers::pi;

// Fraction of a ring spacing kept free of interior points around each hole rim.
constexpr double kHoleClearance = 0.6;

}  // namespace

Mesh generate_interval(int n) {
    if (n < 3) throw Error(ErrorCategory::InvalidParameter, "interval needs n >= 3 vertices, got " + std::to_string(n));
    std::vector<Vec3> v;
    std::vector<Edge> e;
    v.reserve(n);
    const double h = 1.0 / (n - 1);
    for (int i = 0; i < n; ++i) v.emplace_back(i == n - 1 ? 1.0 : i * h, 0.0, 0.0);
    for (int i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
    return Mesh::polyline(std::move(v), std::move(e));
}

int default_cylinder_rings(double length, int n_circ) {
    const double circ_edge = 2.0 * std::sin(kPi / n_circ);
    const double axial = 0.5 * std::sqrt(3.0) * circ_edge;
    return std::max(4, static_cast<int>(std::lround(length / axial)) + 1);
}

Mesh generate_cylinder(double length, int n_circ, int n_len) {
    if (!(length > 0.0) || !std::isfinite(length)) {
        throw Error(ErrorCategory::InvalidParameter, "cylinder length must be positive");
    }
    if (n_circ < 8) throw Error(ErrorCategory::InvalidParameter, "cylinder needs n_circ >= 8");
    if (n_len < 4) throw Error(ErrorCategory::InvalidParameter, "cylinder needs n_len >= 4");

    std::vector<Vec3> v;
    v.reserve(static_cast<std::size_t>(n_circ) * n_len);
    for (int j = 0; j < n_len; ++j) {
        const double z = j == n_len - 1 ? length : length * j / (n_len - 1);
        const double offset = (j % 2) * 0.5;
        for (int i = 0; i < n_circ; ++i) {
            const double theta = 2.0 * kPi * (i + offset) / n_circ;
            v.emplace_back(std::cos(theta), std::sin(theta), z);
        }
    }
    auto id = [n_circ](int ring, int i) { return ring * n_circ + (i % n_circ); };

    // Faces are counter-clockwise in the unrolled (theta, z) chart: outward normals.
    std::vector<Face> f;
    f.reserve(2 * static_cast<std::size_t>(n_circ) * (n_len - 1));
    for (int j = 0; j + 1 < n_len; ++j) {
        for (int i = 0; i < n_circ; ++i) {
            if (j % 2 == 0) {
                f.push_back({id(j, i), id(j, i + 1), id(j + 1, i)});
                f.push_back({id(j, i + 1), id(j + 1, i + 1), id(j + 1, i)});
            } else {
                f.push_back({id(j, i), id(j + 1, i + 1), id(j + 1, i)});
                f.push_back({id(j, i), id(j, i + 1), id(j + 1, i + 1)});
            }
        }
    }
    return Mesh::surface(std::move(v), std::move(f));
}

Mesh generate_sphere(int subdivisions) {
    if (subdivisions < 1) throw Error(ErrorCategory::InvalidParameter, "sphere needs subdivisions >= 1");
    if (subdivisions > 8) throw Error(ErrorCategory::InvalidParameter, "sphere subdivisions above 8 are not supported");

    const double t = 0.5 * (1.0 + std::sqrt(5.0));
    std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                           {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    for (auto& p : v) p.normalize();
    std::vector<Face> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                           {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4}, {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                           {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},  {9, 8, 1}};

    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            const int id = static_cast<int>(v.size());
            v.push_back((v[a] + v[b]).normalized());
            midpoint.emplace(key, id);
            return id;
        };
        std::vector<Face> next;
        next.reserve(4 * f.size());
        for (const Face& face : f) {
            const int ab = mid(face[0], face[1]);
            const int bc = mid(face[1], face[2]);
            const int ca = mid(face[2], face[0]);
            next.push_back({face[0], ab, ca});
            next.push_back({face[1], bc, ab});
            next.push_back({face[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        f = std::move(next);
    }
    return Mesh::surface(std::move(v), std::move(f));
}

std::vector<Hole> default_disk_holes() {
    std::vector<Hole> holes;
    for (int k = 0; k < 3; ++k) {
        const double a = kPi / 2.0 + 2.0 * kPi * k / 3.0;
        holes.push_back({0.45 * std::cos(a), 0.45 * std::sin(a), 0.2});
    }
    return holes;
}

Mesh generate_disk(int n_rings, std::span<const Hole> holes) {
    if (n_rings < 2) throw Error(ErrorCategory::InvalidParameter, "disk needs n_rings >= 2");
    const double h = 1.0 / n_rings;

    for (std::size_t i = 0; i < holes.size(); ++i) {
        const Hole& a = holes[i];
        const double ca = std::hypot(a.cx, a.cy);
        if (!(a.radius > 0.0) || ca + a.radius >= 1.0) {
            throw Error(ErrorCategory::InvalidGeometry, "hole " + std::to_string(i) + " is not strictly inside the unit disk");
        }
        if (1.0 - ca - a.radius < h) {
            throw Error(ErrorCategory::InvalidGeometry,
                        "hole " + std::to_string(i) + " is closer to the outer rim than one ring spacing");
        }
        for (std::size_t j = 0; j < i; ++j) {
            const Hole& b = holes[j];
            const double gap = std::hypot(a.cx - b.cx, a.cy - b.cy) - a.radius - b.radius;
            if (gap <= 0.0) {
                throw Error(ErrorCategory::InvalidGeometry,
                            "holes " + std::to_string(j) + " and " + std::to_string(i) + " overlap");
            }
            if (gap < h) {
                throw Error(ErrorCategory::InvalidGeometry, "holes " + std::to_string(j) + " and " + std::to_string(i) +
                                                                " are closer than one ring spacing");
            }
        }
    }

    auto blocked = [&](double x, double y) {
        for (const Hole& hole : holes) {
            if (std::hypot(x - hole.cx, y - hole.cy) < hole.radius + kHoleClearance * h) return true;
        }
        return false;
    };

    std::vector<Eigen::Vector2d> pts;
    std::vector<char> on_rim;
    if (!blocked(0.0, 0.0)) {
        pts.emplace_back(0.0, 0.0);
        on_rim.push_back(0);
    }
    for (int ring = 1; ring <= n_rings; ++ring) {
        const int count = 6 * ring;
        const double r = ring == n_rings ? 1.0 : ring * h;
        // Irrational per-ring rotation avoids collinear points across rings.
        const double offset = std::fmod(ring * 0.6180339887498949, 1.0);
        for (int k = 0; k < count; ++k) {
            const double a = 2.0 * kPi * (k + offset) / count;
            const double x = r * std::cos(a);
            const double y = r * std::sin(a);
            if (ring < n_rings && blocked(x, y)) continue;
            pts.emplace_back(x, y);
            on_rim.push_back(ring == n_rings ? 1 : 0);
        }
    }
    for (const Hole& hole : holes) {
        const int count = std::max(8, static_cast<int>(std::lround(2.0 * kPi * hole.radius / h)));
        for (int k = 0; k < count; ++k) {
            const double a = 2.0 * kPi * k / count;
            pts.emplace_back(hole.cx + hole.radius * std::cos(a), hole.cy + hole.radius * std::sin(a));
            on_rim.push_back(1);
        }
    }

    const auto tris = detail::delaunay_triangulate(pts);
    std::vector<Face> faces;
    faces.reserve(tris.size());
    for (const auto& t : tris) {
        const Eigen::Vector2d c = (pts[t[0]] + pts[t[1]] + pts[t[2]]) / 3.0;
        bool inside_hole = false;
        for (const Hole& hole : holes) {
            if (std::hypot(c.x() - hole.cx, c.y() - hole.cy) < hole.radius) inside_hole = true;
        }
        if (inside_hole || c.norm() > 1.0) continue;
        faces.push_back({t[0], t[1], t[2]});
    }

    std::vector<Vec3> verts;
    verts.reserve(pts.size());
    for (const auto& p : pts) verts.emplace_back(p.x(), p.y(), 0.0);
    Mesh mesh = Mesh::surface(std::move(verts), std::move(faces));

    for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
        if (mesh.is_boundary(i) != (on_rim[i] != 0)) {
            throw Error(ErrorCategory::InvalidGeometry,
                        "disk triangulation did not reproduce the rims at vertex " + std::to_string(i) +
                            "; increase n_rings or the hole spacing");
        }
    }
    return mesh;
}

}  // namespace fbsurf
