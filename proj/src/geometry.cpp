#include "morphline/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "morphline/errors.hpp"

namespace morphline {

bool validate_landmarks(const LandmarkSet& l) noexcept {
    if (l.points.size() != static_cast<std::size_t>(kLandmarkCount)) return false;
    if (l.image_width <= 0 || l.image_height <= 0) return false;
    return std::all_of(l.points.begin(), l.points.end(), [&](const Point2d& p) {
        return std::isfinite(p.x) && std::isfinite(p.y) && p.x >= 0.0 && p.y >= 0.0 &&
               p.x < l.image_width && p.y < l.image_height;
    });
}

Point2d SimilarityTransform::apply(Point2d p) const noexcept {
    const double c = scale * std::cos(rotation);
    const double s = scale * std::sin(rotation);
    return {c * p.x - s * p.y + translation.x, s * p.x + c * p.y + translation.y};
}

SimilarityTransform SimilarityTransform::inverse() const {
    if (!(scale > 0.0)) throw DegenerateConfiguration("similarity transform with non-positive scale");
    SimilarityTransform inv;
    inv.scale = 1.0 / scale;
    inv.rotation = -rotation;
    const Point2d t = SimilarityTransform{inv.scale, inv.rotation, {}}.apply(translation);
    inv.translation = {-t.x, -t.y};
    return inv;
}

SimilarityTransform estimate_similarity(std::span<const Point2d> src, std::span<const Point2d> dst) {
    using C = std::complex<double>;
    if (src.size() != dst.size() || src.empty()) {
        throw DegenerateConfiguration("similarity fit needs two equally sized, non-empty point sets");
    }
    const double n = static_cast<double>(src.size());
    C ms{}, md{};
    for (std::size_t i = 0; i < src.size(); ++i) {
        ms += C(src[i].x, src[i].y);
        md += C(dst[i].x, dst[i].y);
    }
    ms /= n;
    md /= n;

    // Closed form in the complex plane: a = sum(conj(z) w) / sum(|z|^2) on centred sets.
    C num{};
    double den = 0.0;
    for (std::size_t i = 0; i < src.size(); ++i) {
        const C z = C(src[i].x, src[i].y) - ms;
        const C w = C(dst[i].x, dst[i].y) - md;
        num += std::conj(z) * w;
        den += std::norm(z);
    }
    if (!(den > 0.0)) throw DegenerateConfiguration("all source points are coincident");
    const C a = num / den;
    if (std::abs(a) == 0.0) throw DegenerateConfiguration("destination points are coincident");
    const C t = md - a * ms;
    return {std::abs(a), std::arg(a), {t.real(), t.imag()}};
}

SimilarityTransform estimate_similarity(const LandmarkSet& src, const LandmarkSet& dst) {
    return estimate_similarity(std::span<const Point2d>(src.points), std::span<const Point2d>(dst.points));
}

std::vector<Point2d> lerp_points(std::span<const Point2d> a, std::span<const Point2d> b, double t) {
    if (a.size() != b.size()) throw DimensionMismatch("point sets differ in size");
    std::vector<Point2d> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = {(1.0 - t) * a[i].x + t * b[i].x, (1.0 - t) * a[i].y + t * b[i].y};
    }
    return out;
}

LandmarkSet rescale_landmarks(const LandmarkSet& l, int width, int height) {
    if (width == l.image_width && height == l.image_height) return l;
    LandmarkSet out{{}, width, height};
    const double sx = static_cast<double>(width) / l.image_width;
    const double sy = static_cast<double>(height) / l.image_height;
    // Largest double below the bound keeps the half-open invariant.
    const double max_x = std::nextafter(static_cast<double>(width), 0.0);
    const double max_y = std::nextafter(static_cast<double>(height), 0.0);
    out.points.reserve(l.points.size());
    for (const Point2d& p : l.points) {
        out.points.push_back({std::clamp((p.x + 0.5) * sx - 0.5, 0.0, max_x),
                              std::clamp((p.y + 0.5) * sy - 0.5, 0.0, max_y)});
    }
    return out;
}

}  // namespace morphline
