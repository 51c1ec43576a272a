#include "morphline/asymmetry.hpp"

#include <algorithm>
#include <cmath>

#include "morphline/errors.hpp"
#include "morphline/landmark_template.hpp"

namespace morphline {

namespace {

struct CornerSpec {
    Region region;
    int x1, y1, x2, y2;
};

constexpr std::array<CornerSpec, 6> kRoiTable{{
    {Region::LeftEye, 17, 19, 29, 29},
    {Region::RightEye, 29, 24, 26, 29},
    {Region::LeftCheek, 4, 30, 48, 4},
    {Region::RightCheek, 54, 30, 12, 54},
    {Region::LeftMouth, 5, 51, 8, 8},
    {Region::RightMouth, 51, 51, 11, 8},
}};

int pixel_extent(double length) { return std::max(1, static_cast<int>(std::lround(length)) + 1); }

GrayImage sample_roi(const GrayImage& gray, const RoiRect& r, int w, int h, bool mirror) {
    GrayImage out(w, h);
    for (int j = 0; j < h; ++j) {
        const double ty = h > 1 ? static_cast<double>(j) / (h - 1) : 0.5;
        const double y = r.p1.y + ty * r.height();
        for (int i = 0; i < w; ++i) {
            const double tx = w > 1 ? static_cast<double>(i) / (w - 1) : 0.5;
            const double x = mirror ? r.p2.x - tx * r.width() : r.p1.x + tx * r.width();
            out.at(i, j) = gray.sample(x, y);
        }
    }
    return out;
}

}  // namespace

std::string_view to_string(Region r) noexcept {
    switch (r) {
        case Region::LeftEye: return "left_eye";
        case Region::RightEye: return "right_eye";
        case Region::LeftCheek: return "left_cheek";
        case Region::RightCheek: return "right_cheek";
        case Region::LeftMouth: return "left_mouth";
        case Region::RightMouth: return "right_mouth";
    }
    return "?";
}

RoiRect RoiRect::from_corners(Region region, Point2d a, Point2d b) {
    return {region, {std::min(a.x, b.x), std::min(a.y, b.y)}, {std::max(a.x, b.x), std::max(a.y, b.y)}};
}

std::array<RoiRect, 6> extract_rois(const LandmarkSet& l) {
    if (!validate_landmarks(l)) throw DegenerateRoi("ROI extraction needs 68 in-bounds landmarks");
    const double max_x = l.image_width - 1;
    const double max_y = l.image_height - 1;
    std::array<RoiRect, 6> out{};
    for (std::size_t i = 0; i < kRoiTable.size(); ++i) {
        const CornerSpec& s = kRoiTable[i];
        RoiRect r = RoiRect::from_corners(s.region, {l.points[s.x1].x, l.points[s.y1].y},
                                          {l.points[s.x2].x, l.points[s.y2].y});
        r.p1 = {std::clamp(r.p1.x, 0.0, max_x), std::clamp(r.p1.y, 0.0, max_y)};
        r.p2 = {std::clamp(r.p2.x, 0.0, max_x), std::clamp(r.p2.y, 0.0, max_y)};
        if (!(r.width() > 0.0 && r.height() > 0.0)) {
            throw DegenerateRoi(std::string("region ") + std::string(to_string(s.region)) + " has zero area");
        }
        out[i] = r;
    }
    return out;
}

AsymmetryReport AsymmetryReport::from_scores(double eyes, double cheeks, double mouth) {
    return {eyes, cheeks, mouth, (eyes + cheeks + mouth) / 3.0};
}

double mirrored_roi_ssim(const GrayImage& gray, const RoiRect& left, const RoiRect& right, const SsimParams& params) {
    const int w = std::max(pixel_extent(left.width()), pixel_extent(right.width()));
    const int h = std::max(pixel_extent(left.height()), pixel_extent(right.height()));
    return ssim(sample_roi(gray, left, w, h, false), sample_roi(gray, right, w, h, true), params);
}

AsymmetryReport asymmetry_report(const ImageRaster& img, const LandmarkSet& l, const AsymmetryOptions& options) {
    if (!validate_landmarks(l)) throw DegenerateRoi("asymmetry needs 68 in-bounds landmarks");
    if (l.image_width != img.width() || l.image_height != img.height()) {
        throw DimensionMismatch("landmarks were annotated on a different image size");
    }
    const int s = options.canonical_size;
    const LandmarkSet canonical = template_landmarks(s, s);
    const SimilarityTransform to_canonical = estimate_similarity(l, canonical);
    const SimilarityTransform to_source = to_canonical.inverse();

    const GrayImage source = to_gray(img);
    GrayImage aligned(s, s);
    for (int y = 0; y < s; ++y) {
        for (int x = 0; x < s; ++x) {
            const Point2d p = to_source.apply({static_cast<double>(x), static_cast<double>(y)});
            aligned.at(x, y) = source.sample(p.x, p.y);
        }
    }

    LandmarkSet aligned_landmarks{{}, s, s};
    const double max_c = std::nextafter(static_cast<double>(s), 0.0);
    for (const Point2d& p : l.points) {
        const Point2d q = to_canonical.apply(p);
        aligned_landmarks.points.push_back({std::clamp(q.x, 0.0, max_c), std::clamp(q.y, 0.0, max_c)});
    }

    const auto rois = extract_rois(aligned_landmarks);
    // Anti-correlated halves (negative SSIM) report as 0 %.
    auto pct = [&](const RoiRect& a, const RoiRect& b) {
        return std::clamp(100.0 * mirrored_roi_ssim(aligned, a, b, options.ssim), 0.0, 100.0);
    };
    return AsymmetryReport::from_scores(pct(rois[0], rois[1]), pct(rois[2], rois[3]), pct(rois[4], rois[5]));
}

}  // namespace morphline
