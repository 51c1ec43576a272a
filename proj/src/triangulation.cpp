#include "morphline/triangulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>

#include "morphline/errors.hpp"

namespace morphline {

namespace {

// Relative tolerances under which a determinant is treated as zero.
constexpr double kOrientEps = 1e-12;
constexpr double kIncircleEps = 1e-12;

double orient_raw(const Point2d& a, const Point2d& b, const Point2d& p, double* magnitude) {
    const double l = (b.x - a.x) * (p.y - a.y);
    const double r = (b.y - a.y) * (p.x - a.x);
    if (magnitude) *magnitude = std::abs(l) + std::abs(r);
    return l - r;
}

/// Sign of orientation with a tolerance band: +1 left turn (CCW), -1 right turn, 0 collinear.
int orient(const Point2d& a, const Point2d& b, const Point2d& p) {
    double mag = 0.0;
    const double d = orient_raw(a, b, p, &mag);
    if (std::abs(d) <= kOrientEps * mag) return 0;
    return d > 0 ? 1 : -1;
}

/// +1 if d is strictly inside the circumcircle of counter-clockwise (a, b, c), 0 if cocircular.
int incircle(const Point2d& a, const Point2d& b, const Point2d& c, const Point2d& d) {
    const double adx = a.x - d.x, ady = a.y - d.y;
    const double bdx = b.x - d.x, bdy = b.y - d.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;
    const double alift = adx * adx + ady * ady;
    const double blift = bdx * bdx + bdy * bdy;
    const double clift = cdx * cdx + cdy * cdy;
    const double t1 = alift * (bdx * cdy - cdx * bdy);
    const double t2 = blift * (cdx * ady - adx * cdy);
    const double t3 = clift * (adx * bdy - bdx * ady);
    const double perm = alift * (std::abs(bdx * cdy) + std::abs(cdx * bdy)) +
                        blift * (std::abs(cdx * ady) + std::abs(adx * cdy)) +
                        clift * (std::abs(adx * bdy) + std::abs(bdx * ady));
    const double det = t1 + t2 + t3;
    if (std::abs(det) <= kIncircleEps * perm) return 0;
    return det > 0 ? 1 : -1;
}

class Triangulator {
public:
    explicit Triangulator(std::span<const Point2d> pts) : pts_(pts) {}

    void add(const Triangle& t) {
        const int id = static_cast<int>(tris_.size());
        tris_.push_back(t);
        alive_.push_back(true);
        link(id);
    }

    void remove(int id) {
        unlink(id);
        alive_[id] = false;
    }

    /// Inserts vertex p; returns false when it coincides (within tolerance) with a vertex.
    bool insert(int p) {
        for (int id = 0; id < static_cast<int>(tris_.size()); ++id) {
            if (!alive_[id]) continue;
            const Triangle t = tris_[id];
            int o[3];
            bool outside = false;
            for (int e = 0; e < 3; ++e) {
                o[e] = orient(pts_[t[e]], pts_[t[(e + 1) % 3]], pts_[p]);
                if (o[e] < 0) outside = true;
            }
            if (outside) continue;
            const int zeros = (o[0] == 0) + (o[1] == 0) + (o[2] == 0);
            if (zeros >= 2) return false;
            if (zeros == 0) {
                remove(id);
                add({t[0], t[1], p});
                add({t[1], t[2], p});
                add({t[2], t[0], p});
                return true;
            }
            const int e = o[0] == 0 ? 0 : (o[1] == 0 ? 1 : 2);
            split_edge(id, t[e], t[(e + 1) % 3], p);
            return true;
        }
        return false;
    }

    void legalize() {
        std::vector<std::pair<int, int>> stack;
        for (int id = 0; id < static_cast<int>(tris_.size()); ++id) {
            if (!alive_[id]) continue;
            for (int e = 0; e < 3; ++e) stack.emplace_back(tris_[id][e], tris_[id][(e + 1) % 3]);
        }
        // Each flip strictly advances a (perturbed) lifted-surface potential, so the loop
        // terminates; the cap guards against tolerance-induced cycles.
        std::size_t budget = 64 * (pts_.size() + 16) * (pts_.size() + 16);
        while (!stack.empty()) {
            const auto [a, b] = stack.back();
            stack.pop_back();
            const auto t1 = edges_.find(key(a, b));
            const auto t2 = edges_.find(key(b, a));
            if (t1 == edges_.end() || t2 == edges_.end()) continue;
            const int id1 = t1->second;
            const int id2 = t2->second;
            const int c = third(id1, a, b);
            const int d = third(id2, b, a);
            if (!should_flip(a, b, c, d)) continue;
            if (budget-- == 0) throw DegenerateConfiguration("Delaunay flip budget exhausted");
            remove(id1);
            remove(id2);
            add({a, d, c});
            add({d, b, c});
            stack.emplace_back(a, d);
            stack.emplace_back(d, b);
            stack.emplace_back(b, c);
            stack.emplace_back(c, a);
        }
    }

    std::vector<Triangle> result() const {
        std::vector<Triangle> out;
        for (std::size_t id = 0; id < tris_.size(); ++id) {
            if (!alive_[id]) continue;
            Triangle t = tris_[id];
            const auto m = std::min_element(t.begin(), t.end()) - t.begin();
            std::rotate(t.begin(), t.begin() + m, t.end());
            out.push_back(t);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    static std::int64_t key(int a, int b) { return (static_cast<std::int64_t>(a) << 32) | static_cast<std::uint32_t>(b); }

    void link(int id) {
        const Triangle& t = tris_[id];
        for (int e = 0; e < 3; ++e) edges_[key(t[e], t[(e + 1) % 3])] = id;
    }

    void unlink(int id) {
        const Triangle& t = tris_[id];
        for (int e = 0; e < 3; ++e) edges_.erase(key(t[e], t[(e + 1) % 3]));
    }

    int third(int id, int a, int b) const {
        for (int v : tris_[id]) {
            if (v != a && v != b) return v;
        }
        return -1;
    }

    // Edge (a, b) with triangles (a, b, c) and (b, a, d).
    bool should_flip(int a, int b, int c, int d) const {
        const int ic = incircle(pts_[a], pts_[b], pts_[c], pts_[d]);
        if (ic < 0) return false;
        if (ic == 0) {
            // Cocircular: keep the diagonal containing the lowest index.
            if (std::min(a, b) < std::min(c, d)) return false;
        }
        return orient(pts_[a], pts_[d], pts_[c]) > 0 && orient(pts_[d], pts_[b], pts_[c]) > 0;
    }

    void split_edge(int id, int a, int b, int p) {
        // p lies on edge (a, b) of triangle id = (a, b, c).
        const int c = third(id, a, b);
        const auto other = edges_.find(key(b, a));
        const int oid = other == edges_.end() ? -1 : other->second;
        remove(id);
        add({a, p, c});
        add({p, b, c});
        if (oid >= 0) {
            const int d = third(oid, b, a);
            remove(oid);
            add({b, p, d});
            add({p, a, d});
        }
    }

    std::span<const Point2d> pts_;
    std::vector<Triangle> tris_;
    std::vector<bool> alive_;
    std::unordered_map<std::int64_t, int> edges_;
};

/// Strict convex hull (no collinear points), counter-clockwise in y-down coordinates.
std::vector<int> convex_hull(std::span<const Point2d> pts, std::vector<int> ids) {
    std::sort(ids.begin(), ids.end(), [&](int i, int j) {
        if (pts[i].x != pts[j].x) return pts[i].x < pts[j].x;
        if (pts[i].y != pts[j].y) return pts[i].y < pts[j].y;
        return i < j;
    });
    if (ids.size() < 3) return ids;
    std::vector<int> hull(2 * ids.size());
    std::size_t k = 0;
    for (int i : ids) {
        while (k >= 2 && orient(pts[hull[k - 2]], pts[hull[k - 1]], pts[i]) <= 0) --k;
        hull[k++] = i;
    }
    for (std::size_t n = ids.size() - 1, lower = k + 1; n-- > 0;) {
        const int i = ids[n];
        while (k >= lower && orient(pts[hull[k - 2]], pts[hull[k - 1]], pts[i]) <= 0) --k;
        hull[k++] = i;
    }
    hull.resize(k - 1);
    return hull;
}

}  // namespace

double signed_area(const Point2d& a, const Point2d& b, const Point2d& c) noexcept {
    return 0.5 * orient_raw(a, b, c, nullptr);
}

std::vector<Triangle> delaunay(std::span<const Point2d> points) {
    std::map<std::pair<double, double>, int> seen;
    std::vector<int> unique;
    for (int i = 0; i < static_cast<int>(points.size()); ++i) {
        const Point2d& p = points[i];
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw DegenerateConfiguration("non-finite point " + std::to_string(i));
        }
        if (seen.emplace(std::make_pair(p.x, p.y), i).second) unique.push_back(i);
    }
    if (unique.size() < 3) throw DegenerateConfiguration("fewer than 3 distinct points");

    const std::vector<int> hull = convex_hull(points, unique);
    if (hull.size() < 3) throw DegenerateConfiguration("all points are collinear");

    Triangulator tr(points);
    for (std::size_t i = 1; i + 1 < hull.size(); ++i) tr.add({hull[0], hull[i], hull[i + 1]});

    std::vector<bool> on_hull(points.size(), false);
    for (int h : hull) on_hull[h] = true;
    for (int i : unique) {
        if (!on_hull[i]) tr.insert(i);
    }
    tr.legalize();
    return tr.result();
}

std::array<Point2d, kBoundaryAnchorCount> boundary_anchors(int width, int height) {
    const double w = width, h = height;
    return {{{0, 0}, {w, 0}, {w, h}, {0, h}, {w / 2, 0}, {w, h / 2}, {w / 2, h}, {0, h / 2}}};
}

TriangleMesh triangulate(std::span<const Point2d> points, int width, int height) {
    if (width <= 0 || height <= 0) throw DegenerateConfiguration("image size must be positive");
    for (const Point2d& p : points) {
        if (!(p.x >= 0 && p.x <= width && p.y >= 0 && p.y <= height)) {
            throw DegenerateConfiguration("point outside the image rectangle");
        }
    }
    // An empty input is the anchors-only mesh; a non-empty one must span a triangle itself.
    if (!points.empty()) {
        std::vector<int> ids(points.size());
        for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
        if (convex_hull(points, ids).size() < 3) {
            throw DegenerateConfiguration("need at least 3 non-collinear points");
        }
    }
    TriangleMesh mesh;
    mesh.vertices.assign(points.begin(), points.end());
    for (const Point2d& a : boundary_anchors(width, height)) mesh.vertices.push_back(a);
    mesh.triangles = delaunay(mesh.vertices);
    return mesh;
}

TriangleMesh with_vertices(const TriangleMesh& topology, std::span<const Point2d> points, int width,
                           int height) {
    if (points.size() + kBoundaryAnchorCount != topology.vertices.size()) {
        throw TopologyMismatch("vertex count " + std::to_string(points.size()) +
                               " does not match mesh topology");
    }
    TriangleMesh mesh;
    mesh.vertices.assign(points.begin(), points.end());
    for (const Point2d& a : boundary_anchors(width, height)) mesh.vertices.push_back(a);
    mesh.triangles = topology.triangles;
    return mesh;
}

}  // namespace morphline
