#include "detail/delaunay.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

#include "fbsurf/error.hpp"

namespace fbsurf::detail {

namespace {

using Vec2 = Eigen::Vector2d;

struct Triangle {
    std::array<int, 3> v;
    std::array<int, 3> nb;  // nb[i] is across the edge opposite v[i]; -1 on the hull
    bool alive = true;
};

double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
    return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

// Positive when d lies strictly inside the circumcircle of ccw (a, b, c).
double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const double adx = a.x() - d.x(), ady = a.y() - d.y();
    const double bdx = b.x() - d.x(), bdy = b.y() - d.y();
    const double cdx = c.x() - d.x(), cdy = c.y() - d.y();
    const double ad = adx * adx + ady * ady;
    const double bd = bdx * bdx + bdy * bdy;
    const double cd = cdx * cdx + cdy * cdy;
    return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

struct BoundaryEdge {
    int a;
    int b;
    int outside;  // triangle beyond the edge, or -1
    int inside;   // cavity triangle owning the edge
};

}  // namespace

std::vector<std::array<int, 3>> delaunay_triangulate(const std::vector<Vec2>& input) {
    const int n = static_cast<int>(input.size());
    if (n < 3) throw Error(ErrorCategory::InvalidParameter, "triangulation needs at least 3 points");

    double extent = 0.0;
    for (const auto& p : input) extent = std::max(extent, p.cwiseAbs().maxCoeff());
    const double big = 50.0 * std::max(extent, 1.0);

    std::vector<Vec2> pts = input;
    pts.emplace_back(-big, -big);
    pts.emplace_back(big, -big);
    pts.emplace_back(0.0, big);

    std::vector<Triangle> tris;
    tris.push_back({{n, n + 1, n + 2}, {-1, -1, -1}, true});

    std::vector<int> mark;  // cavity membership stamp per triangle
    std::vector<int> cavity;
    std::vector<BoundaryEdge> boundary;

    for (int pi = 0; pi < n; ++pi) {
        const Vec2& p = pts[pi];

        // Locate: the alive triangle maximizing the smallest edge orientation.
        int seed = -1;
        double best = -std::numeric_limits<double>::infinity();
        for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
            if (!tris[t].alive) continue;
            const auto& v = tris[t].v;
            const double o = std::min({orient(pts[v[0]], pts[v[1]], p), orient(pts[v[1]], pts[v[2]], p),
                                       orient(pts[v[2]], pts[v[0]], p)});
            if (o > best) {
                best = o;
                seed = t;
            }
        }

        mark.resize(tris.size(), -1);
        cavity.clear();
        cavity.push_back(seed);
        mark[seed] = pi;
        for (std::size_t q = 0; q < cavity.size(); ++q) {
            const Triangle& t = tris[cavity[q]];
            for (int nb : t.nb) {
                if (nb < 0 || mark[nb] == pi) continue;
                const auto& v = tris[nb].v;
                if (incircle(pts[v[0]], pts[v[1]], pts[v[2]], p) > 0.0) {
                    mark[nb] = pi;
                    cavity.push_back(nb);
                }
            }
        }

        // Shrink until the cavity is star-shaped with respect to p.
        for (bool changed = true; changed;) {
            changed = false;
            boundary.clear();
            for (int ti : cavity) {
                const Triangle& t = tris[ti];
                for (int k = 0; k < 3; ++k) {
                    const int nb = t.nb[k];
                    if (nb >= 0 && mark[nb] == pi) continue;
                    boundary.push_back({t.v[(k + 1) % 3], t.v[(k + 2) % 3], nb, ti});
                }
            }
            for (const auto& e : boundary) {
                if (e.inside != seed && orient(pts[e.a], pts[e.b], p) <= 0.0) {
                    mark[e.inside] = -1;
                    cavity.erase(std::find(cavity.begin(), cavity.end(), e.inside));
                    changed = true;
                    break;
                }
            }
        }

        for (int ti : cavity) tris[ti].alive = false;

        std::unordered_map<int, int> starts_at;  // edge start vertex -> new triangle
        std::unordered_map<int, int> ends_at;
        for (const auto& e : boundary) {
            const int id = static_cast<int>(tris.size());
            tris.push_back({{e.a, e.b, pi}, {-1, -1, e.outside}, true});
            if (e.outside >= 0) {
                for (int& back : tris[e.outside].nb) {
                    if (back == e.inside) back = id;
                }
            }
            starts_at[e.a] = id;
            ends_at[e.b] = id;
        }
        for (const auto& [a, id] : starts_at) {
            Triangle& t = tris[id];
            // Edge (b, p) is opposite a: shared with the triangle starting at b.
            t.nb[0] = starts_at.at(t.v[1]);
            // Edge (p, a) is opposite b: shared with the triangle ending at a.
            t.nb[1] = ends_at.at(a);
        }
    }

    std::vector<std::array<int, 3>> out;
    for (const auto& t : tris) {
        if (!t.alive) continue;
        if (t.v[0] >= n || t.v[1] >= n || t.v[2] >= n) continue;
        out.push_back(t.v);
    }
    return out;
}

}  // namespace fbsurf::detail
