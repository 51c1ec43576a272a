#include "morphline/warp.hpp"

#include <algorithm>
#include <cmath>

#include "morphline/errors.hpp"

namespace morphline {

namespace {

constexpr double kInsideEps = 1e-9;

void check_topology(const TriangleMesh& src, const TriangleMesh& dst) {
    if (src.triangles != dst.triangles || src.vertices.size() != dst.vertices.size()) {
        throw TopologyMismatch("source and destination meshes do not share triangle topology");
    }
    const int n = static_cast<int>(src.vertices.size());
    for (const Triangle& t : src.triangles) {
        for (int v : t) {
            if (v < 0 || v >= n) throw TopologyMismatch("triangle references a missing vertex");
        }
    }
}

}  // namespace

ImageF warp_piecewise_affine(const ImageF& img, const TriangleMesh& src_mesh, const TriangleMesh& dst_mesh) {
    check_topology(src_mesh, dst_mesh);
    if (src_mesh.vertices == dst_mesh.vertices) return img;

    const int w = img.width();
    const int h = img.height();
    ImageF out(w, h);
    std::vector<bool> covered(static_cast<std::size_t>(w) * h, false);

    for (const Triangle& t : dst_mesh.triangles) {
        const Point2d& p0 = dst_mesh.vertices[t[0]];
        const Point2d& p1 = dst_mesh.vertices[t[1]];
        const Point2d& p2 = dst_mesh.vertices[t[2]];
        const Point2d& q0 = src_mesh.vertices[t[0]];
        const Point2d& q1 = src_mesh.vertices[t[1]];
        const Point2d& q2 = src_mesh.vertices[t[2]];
        const double area = signed_area(p0, p1, p2);
        if (std::abs(area) < 1e-12) continue;
        const bool identity = p0 == q0 && p1 == q1 && p2 == q2;

        const int x_lo = std::max(0, static_cast<int>(std::ceil(std::min({p0.x, p1.x, p2.x}))));
        const int x_hi = std::min(w - 1, static_cast<int>(std::floor(std::max({p0.x, p1.x, p2.x}))));
        const int y_lo = std::max(0, static_cast<int>(std::ceil(std::min({p0.y, p1.y, p2.y}))));
        const int y_hi = std::min(h - 1, static_cast<int>(std::floor(std::max({p0.y, p1.y, p2.y}))));

        for (int y = y_lo; y <= y_hi; ++y) {
            for (int x = x_lo; x <= x_hi; ++x) {
                const std::size_t idx = static_cast<std::size_t>(y) * w + x;
                if (covered[idx]) continue;
                const Point2d p{static_cast<double>(x), static_cast<double>(y)};
                const double l0 = signed_area(p, p1, p2) / area;
                const double l1 = signed_area(p0, p, p2) / area;
                const double l2 = 1.0 - l0 - l1;
                if (l0 < -kInsideEps || l1 < -kInsideEps || l2 < -kInsideEps) continue;
                covered[idx] = true;
                if (identity) {
                    for (int c = 0; c < ImageF::kChannels; ++c) out.at(x, y, c) = img.at(x, y, c);
                    continue;
                }
                const double sx = l0 * q0.x + l1 * q1.x + l2 * q2.x;
                const double sy = l0 * q0.y + l1 * q1.y + l2 * q2.y;
                for (int c = 0; c < ImageF::kChannels; ++c) out.at(x, y, c) = img.sample(sx, sy, c);
            }
        }
    }

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (covered[static_cast<std::size_t>(y) * w + x]) continue;
            for (int c = 0; c < ImageF::kChannels; ++c) out.at(x, y, c) = img.at(x, y, c);
        }
    }
    return out;
}

ImageRaster warp_piecewise_affine(const ImageRaster& img, const TriangleMesh& src_mesh,
                                  const TriangleMesh& dst_mesh) {
    return warp_piecewise_affine(ImageF(img), src_mesh, dst_mesh).to_raster();
}

}  // namespace morphline
