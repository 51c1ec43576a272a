#pragma once

#include "morphline/image.hpp"

namespace morphline {

struct SsimParams {
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 255.0;
    int window = 11;
    double sigma = 1.5;

    double c1() const noexcept { return (k1 * dynamic_range) * (k1 * dynamic_range); }
    double c2() const noexcept { return (k2 * dynamic_range) * (k2 * dynamic_range); }
};

/// Mean SSIM over all valid placements of a window x window Gaussian (sigma) window.
/// Images narrower or shorter than the window use one uniform window spanning the whole
/// image, which is the global-statistics form of the index. Throws DimensionMismatch.
double ssim(const GrayImage& x, const GrayImage& y, const SsimParams& params = {});

}  // namespace morphline
