#pragma once

#include <span>
#include <vector>

namespace morphline {

struct Point2d {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2d&, const Point2d&) = default;
};

inline constexpr int kLandmarkCount = 68;

/// 68-point face annotation in pixel coordinates of an image of the given size.
struct LandmarkSet {
    std::vector<Point2d> points;
    int image_width = 0;
    int image_height = 0;

    friend bool operator==(const LandmarkSet&, const LandmarkSet&) = default;
};

/// True iff there are exactly 68 finite points inside [0, width) x [0, height).
bool validate_landmarks(const LandmarkSet& l) noexcept;

/// x' = scale * R(rotation) * x + translation
struct SimilarityTransform {
    double scale = 1.0;
    double rotation = 0.0;
    Point2d translation{};

    Point2d apply(Point2d p) const noexcept;
    SimilarityTransform inverse() const;
};

/// Least-squares similarity (uniform scale, rotation, translation) mapping src onto dst.
/// Throws DegenerateConfiguration when src is a single repeated point or sizes differ.
SimilarityTransform estimate_similarity(std::span<const Point2d> src, std::span<const Point2d> dst);
SimilarityTransform estimate_similarity(const LandmarkSet& src, const LandmarkSet& dst);

/// Pointwise (1 - t) * a + t * b. Sizes must match.
std::vector<Point2d> lerp_points(std::span<const Point2d> a, std::span<const Point2d> b, double t);

/// Rescales landmarks to a new image size with the same pixel-centre convention as resize_bilinear.
LandmarkSet rescale_landmarks(const LandmarkSet& l, int width, int height);

}  // namespace morphline
