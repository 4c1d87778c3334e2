#include "fbsurf/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "detail/hash.hpp"
#include "fbsurf/error.hpp"

namespace fbsurf {

namespace {

Edge make_edge(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

void check_index(int idx, std::size_t n, const char* what) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= n) {
        throw Error(ErrorCategory::InvalidParameter,
                    std::string(what) + " references vertex " + std::to_string(idx) + " of " + std::to_string(n));
    }
}

double face_area(const std::vector<Vec3>& v, const Face& f) {
    return 0.5 * (v[f[1]] - v[f[0]]).cross(v[f[2]] - v[f[0]]).norm();
}

}  // namespace

Mesh Mesh::surface(std::vector<Vec3> vertices, std::vector<Face> faces) {
    if (vertices.size() < 3) throw Error(ErrorCategory::InvalidParameter, "surface mesh needs at least 3 vertices");
    if (faces.empty()) throw Error(ErrorCategory::InvalidParameter, "surface mesh needs at least 1 face");

    Mesh m;
    m.dim_ = 2;
    m.vertices_ = std::move(vertices);
    m.faces_ = std::move(faces);
    const std::size_t n = m.vertices_.size();

    // Characteristic scale for the zero-area test.
    double scale = 0.0;
    for (const auto& p : m.vertices_) scale = std::max(scale, p.cwiseAbs().maxCoeff());
    scale = std::max(scale, 1.0);

    std::vector<Edge> corner_edges;
    corner_edges.reserve(3 * m.faces_.size());
    for (std::size_t fi = 0; fi < m.faces_.size(); ++fi) {
        const Face& f = m.faces_[fi];
        for (int c : f) check_index(c, n, "face");
        if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) {
            throw Error(ErrorCategory::DegenerateGeometry, "face " + std::to_string(fi) + " repeats a vertex");
        }
        if (face_area(m.vertices_, f) <= 1e-14 * scale * scale) {
            throw Error(ErrorCategory::DegenerateGeometry, "face " + std::to_string(fi) + " has zero area");
        }
        for (int k = 0; k < 3; ++k) corner_edges.push_back(make_edge(f[k], f[(k + 1) % 3]));
    }
    std::sort(corner_edges.begin(), corner_edges.end());

    m.boundary_.assign(n, 0);
    for (std::size_t i = 0; i < corner_edges.size();) {
        std::size_t j = i;
        while (j < corner_edges.size() && corner_edges[j] == corner_edges[i]) ++j;
        const std::size_t count = j - i;
        const Edge e = corner_edges[i];
        if (count > 2) {
            throw Error(ErrorCategory::Topology, "non-manifold edge (" + std::to_string(e[0]) + ", " +
                                                     std::to_string(e[1]) + ") shared by " + std::to_string(count) +
                                                     " faces");
        }
        if (count == 1) {
            m.boundary_[e[0]] = 1;
            m.boundary_[e[1]] = 1;
        }
        m.edges_.push_back(e);
        i = j;
    }

    m.weights_.assign(n, 0.0);
    for (const Face& f : m.faces_) {
        const double a = face_area(m.vertices_, f) / 3.0;
        for (int c : f) m.weights_[c] += a;
    }
    m.finish_weights();
    return m;
}

Mesh Mesh::polyline(std::vector<Vec3> vertices, std::vector<Edge> segments) {
    if (vertices.size() < 3) throw Error(ErrorCategory::InvalidParameter, "curve mesh needs at least 3 vertices");
    if (segments.empty()) throw Error(ErrorCategory::InvalidParameter, "curve mesh needs at least 1 segment");

    Mesh m;
    m.dim_ = 1;
    m.vertices_ = std::move(vertices);
    const std::size_t n = m.vertices_.size();

    for (auto& s : segments) {
        check_index(s[0], n, "segment");
        check_index(s[1], n, "segment");
        if (s[0] == s[1]) throw Error(ErrorCategory::DegenerateGeometry, "segment repeats a vertex");
        s = make_edge(s[0], s[1]);
    }
    std::sort(segments.begin(), segments.end());
    segments.erase(std::unique(segments.begin(), segments.end()), segments.end());
    m.edges_ = std::move(segments);

    std::vector<int> degree(n, 0);
    m.weights_.assign(n, 0.0);
    for (const Edge& e : m.edges_) {
        const double len = (m.vertices_[e[0]] - m.vertices_[e[1]]).norm();
        if (len == 0.0) {
            throw Error(ErrorCategory::DegenerateGeometry,
                        "segment (" + std::to_string(e[0]) + ", " + std::to_string(e[1]) + ") has zero length");
        }
        ++degree[e[0]];
        ++degree[e[1]];
        m.weights_[e[0]] += 0.5 * len;
        m.weights_[e[1]] += 0.5 * len;
    }
    m.boundary_.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (degree[i] > 2) throw Error(ErrorCategory::Topology, "curve branches at vertex " + std::to_string(i));
        m.boundary_[i] = degree[i] == 1 ? 1 : 0;
    }
    m.finish_weights();
    return m;
}

void Mesh::finish_weights() {
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        if (!(weights_[i] > 0.0)) {
            throw Error(ErrorCategory::Topology, "vertex " + std::to_string(i) + " is not referenced by any element");
        }
    }
}

std::size_t Mesh::num_boundary() const noexcept {
    return static_cast<std::size_t>(std::count(boundary_.begin(), boundary_.end(), char{1}));
}

double Mesh::total_weight() const noexcept {
    double s = 0.0;
    for (double w : weights_) s += w;
    return s;
}

double Mesh::bounding_box_diagonal() const noexcept {
    if (vertices_.empty()) return 0.0;
    Vec3 lo = vertices_.front();
    Vec3 hi = vertices_.front();
    for (const auto& p : vertices_) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    return (hi - lo).norm();
}

std::vector<Vec3> Mesh::vertex_normals() const {
    if (dim_ != 2) throw Error(ErrorCategory::Configuration, "vertex normals need a surface mesh");
    std::vector<Vec3> normals(vertices_.size(), Vec3::Zero());
    for (const Face& f : faces_) {
        // Cross product length is twice the area: area weighting for free.
        const Vec3 n = (vertices_[f[1]] - vertices_[f[0]]).cross(vertices_[f[2]] - vertices_[f[0]]);
        for (int c : f) normals[c] += n;
    }
    for (auto& n : normals) {
        const double len = n.norm();
        n = len > 0.0 ? Vec3(n / len) : Vec3::Zero();
    }
    return normals;
}

Mesh Mesh::scaled(double c) const {
    if (!(c > 0.0)) throw Error(ErrorCategory::InvalidParameter, "scale factor must be positive");
    std::vector<Vec3> v = vertices_;
    for (auto& p : v) p *= c;
    if (dim_ == 1) return polyline(std::move(v), edges_);
    return surface(std::move(v), faces_);
}

std::uint64_t Mesh::content_hash() const noexcept {
    detail::Fnv1a h;
    h.value(static_cast<std::int32_t>(dim_));
    h.value(static_cast<std::uint64_t>(vertices_.size()));
    for (const auto& p : vertices_) {
        h.value(p.x());
        h.value(p.y());
        h.value(p.z());
    }
    if (dim_ == 2) {
        h.value(static_cast<std::uint64_t>(faces_.size()));
        for (const Face& f : faces_) h.value(f);
    } else {
        h.value(static_cast<std::uint64_t>(edges_.size()));
        for (const Edge& e : edges_) h.value(e);
    }
    return h.digest();
}

EdgeLengthStats edge_length_stats(const Mesh& mesh) {
    EdgeLengthStats s;
    s.min_length = std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (const Edge& e : mesh.edges()) {
        const double len = (mesh.vertex(e[0]) - mesh.vertex(e[1])).norm();
        s.min_length = std::min(s.min_length, len);
        s.max_length = std::max(s.max_length, len);
        sum += len;
    }
    s.mean_length = sum / static_cast<double>(mesh.num_edges());
    s.ratio = s.max_length / s.min_length;
    return s;
}

}  // namespace fbsurf
