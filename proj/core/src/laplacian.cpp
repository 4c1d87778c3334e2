#include "fbsurf/laplacian.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "detail/hash.hpp"
#include "fbsurf/atomic_write.hpp"
#include "fbsurf/error.hpp"

namespace fbsurf {

std::string_view to_string(WeightScheme scheme) {
    return scheme == WeightScheme::InverseSquareDistance ? "invsq" : "cotan";
}

std::string_view to_string(BoundaryCondition bc) {
    switch (bc) {
        case BoundaryCondition::Dirichlet: return "dirichlet";
        case BoundaryCondition::Closed: return "closed";
        case BoundaryCondition::Mixed: return "mixed";
    }
    return "unknown";
}

WeightScheme parse_weight_scheme(std::string_view text) {
    if (text == "invsq" || text == "inverse-square-distance") return WeightScheme::InverseSquareDistance;
    if (text == "cotan" || text == "cotangent") return WeightScheme::Cotangent;
    throw Error(ErrorCategory::InvalidParameter, "unknown weight scheme '" + std::string(text) + "'");
}

BoundaryCondition parse_boundary_condition(std::string_view text) {
    if (text == "dirichlet") return BoundaryCondition::Dirichlet;
    if (text == "closed") return BoundaryCondition::Closed;
    if (text == "mixed") return BoundaryCondition::Mixed;
    throw Error(ErrorCategory::InvalidParameter, "unknown boundary condition '" + std::string(text) + "'");
}

std::vector<double> edge_weights(const Mesh& mesh, WeightScheme scheme) {
    const auto edges = mesh.edges();
    std::vector<double> w(edges.size(), 0.0);

    for (std::size_t k = 0; k < edges.size(); ++k) {
        const double len2 = (mesh.vertex(edges[k][0]) - mesh.vertex(edges[k][1])).squaredNorm();
        if (len2 == 0.0) {
            throw Error(ErrorCategory::DegenerateGeometry, "coincident adjacent vertices " + std::to_string(edges[k][0]) +
                                                               " and " + std::to_string(edges[k][1]));
        }
        if (scheme == WeightScheme::InverseSquareDistance) {
            w[k] = 1.0 / len2;
        } else if (mesh.dim() == 1) {
            w[k] = 1.0 / std::sqrt(len2);
        }
    }

    if (scheme == WeightScheme::Cotangent && mesh.dim() == 2) {
        auto edge_index = [&](int a, int b) {
            const Edge e = a < b ? Edge{a, b} : Edge{b, a};
            return static_cast<std::size_t>(std::lower_bound(edges.begin(), edges.end(), e) - edges.begin());
        };
        for (const Face& f : mesh.faces()) {
            for (int c = 0; c < 3; ++c) {
                const int k = f[c];
                const int i = f[(c + 1) % 3];
                const int j = f[(c + 2) % 3];
                const Vec3 u = mesh.vertex(i) - mesh.vertex(k);
                const Vec3 v = mesh.vertex(j) - mesh.vertex(k);
                const double cot = u.dot(v) / u.cross(v).norm();
                w[edge_index(i, j)] += 0.5 * cot;
            }
        }
    }
    return w;
}

SparseMatrix graph_laplacian(const Mesh& mesh, WeightScheme scheme) {
    const auto edges = mesh.edges();
    const std::vector<double> w = edge_weights(mesh, scheme);
    const auto n = static_cast<Eigen::Index>(mesh.num_vertices());

    std::vector<double> diag(static_cast<std::size_t>(n), 0.0);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(2 * edges.size() + static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < edges.size(); ++k) {
        trips.emplace_back(edges[k][0], edges[k][1], -w[k]);
        trips.emplace_back(edges[k][1], edges[k][0], -w[k]);
        diag[edges[k][0]] += w[k];
        diag[edges[k][1]] += w[k];
    }
    for (Eigen::Index i = 0; i < n; ++i) trips.emplace_back(i, i, diag[i]);

    SparseMatrix l(n, n);
    l.setFromTriplets(trips.begin(), trips.end());
    return l;
}

std::uint64_t system_hash(const Mesh& mesh, WeightScheme scheme, BoundaryCondition bc) {
    detail::Fnv1a h;
    h.value(mesh.content_hash());
    h.string(to_string(scheme));
    h.string(to_string(bc));
    return h.digest();
}

LaplacianSystem assemble(const Mesh& mesh, WeightScheme scheme, BoundaryCondition bc) {
    const std::size_t n = mesh.num_vertices();
    const std::size_t n_boundary = mesh.num_boundary();

    std::vector<char> pinned(n, 0);
    switch (bc) {
        case BoundaryCondition::Dirichlet:
            if (n_boundary == 0) {
                throw Error(ErrorCategory::Configuration, "dirichlet boundary condition requested on a closed mesh");
            }
            for (std::size_t i = 0; i < n; ++i) pinned[i] = mesh.is_boundary(i) ? 1 : 0;
            break;
        case BoundaryCondition::Closed:
            if (n_boundary != 0) {
                throw Error(ErrorCategory::Configuration,
                            "closed boundary condition requested on a mesh with " + std::to_string(n_boundary) +
                                " boundary vertices");
            }
            break;
        case BoundaryCondition::Mixed:
            if (mesh.dim() != 1 || n_boundary != 2) {
                throw Error(ErrorCategory::Configuration, "mixed boundary condition needs an open curve");
            }
            for (std::size_t i = 0; i < n; ++i) {
                if (mesh.is_boundary(i)) {
                    pinned[i] = 1;
                    break;
                }
            }
            break;
    }

    LaplacianSystem sys;
    sys.scheme = scheme;
    sys.bc = bc;
    sys.dim = mesh.dim();
    sys.num_vertices = n;
    sys.mesh_hash = system_hash(mesh, scheme, bc);
    sys.row_of_vertex.assign(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        if (pinned[i]) continue;
        sys.row_of_vertex[i] = static_cast<int>(sys.interior_map.size());
        sys.interior_map.push_back(static_cast<int>(i));
        sys.row_weights.push_back(mesh.vertex_weight(i));
    }
    const auto m = static_cast<Eigen::Index>(sys.interior_map.size());
    if (m == 0) throw Error(ErrorCategory::Topology, "mesh has no unknown vertices");

    // Connectivity of the unknowns through edges that avoid pinned vertices.
    {
        std::vector<std::vector<int>> adj(static_cast<std::size_t>(m));
        for (const Edge& e : mesh.edges()) {
            const int a = sys.row_of_vertex[e[0]];
            const int b = sys.row_of_vertex[e[1]];
            if (a >= 0 && b >= 0) {
                adj[a].push_back(b);
                adj[b].push_back(a);
            }
        }
        std::vector<char> seen(static_cast<std::size_t>(m), 0);
        std::vector<int> stack = {0};
        seen[0] = 1;
        Eigen::Index reached = 1;
        while (!stack.empty()) {
            const int r = stack.back();
            stack.pop_back();
            for (int s : adj[r]) {
                if (!seen[s]) {
                    seen[s] = 1;
                    ++reached;
                    stack.push_back(s);
                }
            }
        }
        if (reached != m) {
            throw Error(ErrorCategory::Topology, "unknown vertices are disconnected (" + std::to_string(reached) +
                                                     " of " + std::to_string(m) + " reachable)");
        }
    }

    const SparseMatrix full = graph_laplacian(mesh, scheme);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(full.nonZeros()));
    for (Eigen::Index col = 0; col < full.outerSize(); ++col) {
        const int c = sys.row_of_vertex[col];
        if (c < 0) continue;
        for (SparseMatrix::InnerIterator it(full, col); it; ++it) {
            const int r = sys.row_of_vertex[it.row()];
            if (r >= 0) trips.emplace_back(r, c, it.value());
        }
    }
    sys.matrix.resize(m, m);
    sys.matrix.setFromTriplets(trips.begin(), trips.end());

    if (scheme == WeightScheme::Cotangent) {
        sys.nodal_scale.resize(m);
        for (Eigen::Index i = 0; i < m; ++i) sys.nodal_scale[i] = 1.0 / std::sqrt(sys.row_weights[i]);
        // D C D with D = diag(nodal_scale); both factors of an entry use the same products.
        for (Eigen::Index col = 0; col < sys.matrix.outerSize(); ++col) {
            for (SparseMatrix::InnerIterator it(sys.matrix, col); it; ++it) {
                it.valueRef() = it.value() * (sys.nodal_scale[it.row()] * sys.nodal_scale[col]);
            }
        }
    }
    sys.matrix.makeCompressed();
    return sys;
}

double inf_norm(const SparseMatrix& a) {
    Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(a.rows());
    for (Eigen::Index col = 0; col < a.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(a, col); it; ++it) row_sums[it.row()] += std::abs(it.value());
    }
    return row_sums.size() ? row_sums.maxCoeff() : 0.0;
}

void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& a) {
    std::size_t lower = 0;
    for (Eigen::Index col = 0; col < a.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(a, col); it; ++it) {
            if (it.row() >= col) ++lower;
        }
    }
    std::string out = "%%MatrixMarket matrix coordinate real symmetric\n";
    out += fmt::format("{} {} {}\n", a.rows(), a.cols(), lower);
    for (Eigen::Index col = 0; col < a.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(a, col); it; ++it) {
            if (it.row() >= col) out += fmt::format("{} {} {:.17g}\n", it.row() + 1, col + 1, it.value());
        }
    }
    write_file_atomic(path, out);
}

SparseMatrix read_matrix_market(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCategory::Io, "cannot open " + path.string());
    std::string line;
    long line_no = 0;
    bool symmetric = false;
    if (!std::getline(in, line)) throw FormatError("empty Matrix Market file", 1);
    ++line_no;
    if (line.rfind("%%MatrixMarket matrix coordinate real", 0) != 0) {
        throw FormatError("unsupported Matrix Market banner", line_no);
    }
    symmetric = line.find("symmetric") != std::string::npos;
    do {
        if (!std::getline(in, line)) throw FormatError("missing size line", line_no);
        ++line_no;
    } while (!line.empty() && line[0] == '%');

    Eigen::Index rows = 0, cols = 0;
    std::size_t nnz = 0;
    std::istringstream(line) >> rows >> cols >> nnz;
    std::vector<Eigen::Triplet<double>> trips;
    for (std::size_t k = 0; k < nnz; ++k) {
        if (!std::getline(in, line)) throw FormatError("truncated entry list", line_no);
        ++line_no;
        std::istringstream s(line);
        Eigen::Index r = 0, c = 0;
        double v = 0.0;
        if (!(s >> r >> c >> v)) throw FormatError("malformed entry", line_no);
        trips.emplace_back(r - 1, c - 1, v);
        if (symmetric && r != c) trips.emplace_back(c - 1, r - 1, v);
    }
    SparseMatrix a(rows, cols);
    a.setFromTriplets(trips.begin(), trips.end());
    return a;
}

}  // namespace fbsurf
