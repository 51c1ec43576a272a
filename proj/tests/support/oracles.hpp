#pragma once

// Reference computations written from first principles, independent of the library code.

#include <algorithm>
#include <cmath>
#include <vector>

#include "morphline/geometry.hpp"
#include "morphline/image.hpp"

namespace oracle {

using morphline::GrayImage;
using morphline::Point2d;

inline Point2d circumcentre(Point2d a, Point2d b, Point2d c) {
    const double d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    const double a2 = a.x * a.x + a.y * a.y, b2 = b.x * b.x + b.y * b.y, c2 = c.x * c.x + c.y * c.y;
    return {(a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d,
            (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d};
}

/// True when p lies strictly inside the circumcircle of abc by more than rel_tol of the radius.
inline bool strictly_inside_circumcircle(Point2d a, Point2d b, Point2d c, Point2d p, double rel_tol = 1e-9) {
    const Point2d o = circumcentre(a, b, c);
    const double r = std::hypot(a.x - o.x, a.y - o.y);
    return std::hypot(p.x - o.x, p.y - o.y) < r * (1.0 - rel_tol);
}

inline double cross(Point2d o, Point2d a, Point2d b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

/// Andrew's monotone chain; strictly convex hull vertices.
inline std::vector<Point2d> convex_hull(std::vector<Point2d> pts) {
    std::sort(pts.begin(), pts.end(), [](Point2d a, Point2d b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    std::vector<Point2d> h(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
        while (k >= t && cross(h[k - 2], h[k - 1], pts[i - 1]) <= 0) --k;
        h[k++] = pts[i - 1];
    }
    h.resize(k - 1);
    return h;
}

inline double polygon_area(const std::vector<Point2d>& poly) {
    double a = 0.0;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) a += poly[j].x * poly[i].y - poly[i].x * poly[j].y;
    return std::abs(a) / 2.0;
}

/// Structural similarity of two equally sized signals from global statistics:
/// means, population variances and covariance over every sample.
inline double ssim_global(const std::vector<double>& x, const std::vector<double>& y, double c1, double c2) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    sxx /= n;
    syy /= n;
    sxy /= n;
    const double luminance = (2.0 * mx * my + c1) / (mx * mx + my * my + c1);
    const double contrast_structure = (2.0 * sxy + c2) / (sxx + syy + c2);
    return luminance * contrast_structure;
}

/// Mean over all valid window placements of the Gaussian-weighted index, evaluated directly
/// from E[x], E[x^2], E[xy] under the normalized window weights.
inline double ssim_gaussian(const GrayImage& x, const GrayImage& y, int size, double sigma, double c1, double c2) {
    std::vector<double> w(static_cast<std::size_t>(size) * size);
    double total = 0.0;
    const double centre = (size - 1) / 2.0;
    for (int j = 0; j < size; ++j) {
        for (int i = 0; i < size; ++i) {
            total += w[j * size + i] = std::exp(-((i - centre) * (i - centre) + (j - centre) * (j - centre)) / (2 * sigma * sigma));
        }
    }
    double sum = 0.0;
    int count = 0;
    for (int oy = 0; oy + size <= x.height; ++oy) {
        for (int ox = 0; ox + size <= x.width; ++ox) {
            double ex = 0, ey = 0, exx = 0, eyy = 0, exy = 0;
            for (int j = 0; j < size; ++j) {
                for (int i = 0; i < size; ++i) {
                    const double k = w[j * size + i] / total;
                    const double a = x.at(ox + i, oy + j), b = y.at(ox + i, oy + j);
                    ex += k * a;
                    ey += k * b;
                    exx += k * a * a;
                    eyy += k * b * b;
                    exy += k * a * b;
                }
            }
            const double vx = exx - ex * ex, vy = eyy - ey * ey, cv = exy - ex * ey;
            sum += (2 * ex * ey + c1) * (2 * cv + c2) / ((ex * ex + ey * ey + c1) * (vx + vy + c2));
            ++count;
        }
    }
    return sum / count;
}

/// Variance of the 4-neighbour Laplacian over interior pixels, population form.
inline double laplacian_variance(const GrayImage& g) {
    std::vector<double> v;
    for (int y = 1; y + 1 < g.height; ++y) {
        for (int x = 1; x + 1 < g.width; ++x) {
            v.push_back(g.at(x - 1, y) + g.at(x + 1, y) + g.at(x, y - 1) + g.at(x, y + 1) - 4 * g.at(x, y));
        }
    }
    double m = 0.0;
    for (double a : v) m += a;
    m /= v.size();
    double s = 0.0;
    for (double a : v) s += (a - m) * (a - m);
    return s / v.size();
}

}  // namespace oracle
