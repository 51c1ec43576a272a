#pragma once

#include <array>
#include <string_view>

#include "morphline/geometry.hpp"
#include "morphline/image.hpp"
#include "morphline/ssim.hpp"

namespace morphline {

enum class Region { LeftEye, RightEye, LeftCheek, RightCheek, LeftMouth, RightMouth };

std::string_view to_string(Region r) noexcept;

/// Axis-aligned rectangle with p1 the top-left and p2 the bottom-right corner.
struct RoiRect {
    Region region = Region::LeftEye;
    Point2d p1;
    Point2d p2;

    /// Normalizes the corners; any corner order is accepted.
    static RoiRect from_corners(Region region, Point2d a, Point2d b);

    double width() const noexcept { return p2.x - p1.x; }
    double height() const noexcept { return p2.y - p1.y; }
};

/// Six ROIs in Region order, from these landmark index pairs (iBUG 68-point indexing):
///   left eye    (X17, Y19) - (X29, Y29)     right eye    (X29, Y24) - (X26, Y29)
///   left cheek  (X4,  Y30) - (X48, Y4)      right cheek  (X54, Y30) - (X12, Y54)
///   left mouth  (X5,  Y51) - (X8,  Y8)      right mouth  (X51, Y51) - (X11, Y8)
/// Rectangles are clipped to the image; throws DegenerateRoi when one clips to zero area.
std::array<RoiRect, 6> extract_rois(const LandmarkSet& l);

/// Region similarities as percentages (100 = identical halves).
struct AsymmetryReport {
    double eyes = 0.0;
    double cheeks = 0.0;
    double mouth = 0.0;
    double mean = 0.0;

    static AsymmetryReport from_scores(double eyes, double cheeks, double mouth);

    friend bool operator==(const AsymmetryReport&, const AsymmetryReport&) = default;
};

struct AsymmetryOptions {
    /// Side of the square frame faces are similarity-aligned to before cropping.
    int canonical_size = 256;
    SsimParams ssim;
};

/// SSIM between a left ROI and the horizontally mirrored right ROI, both resampled
/// bilinearly to the element-wise maximum of their pixel sizes.
double mirrored_roi_ssim(const GrayImage& gray, const RoiRect& left, const RoiRect& right,
                         const SsimParams& params = {});

/// Aligns the face to the canonical frame, then scores eyes, cheeks and mouth.
AsymmetryReport asymmetry_report(const ImageRaster& img, const LandmarkSet& l,
                                 const AsymmetryOptions& options = {});

}  // namespace morphline
