#include "morphline/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "morphline/errors.hpp"

namespace morphline {

namespace {

void check_dims(int width, int height) {
    if (width <= 0 || height <= 0) {
        throw DimensionMismatch("image dimensions must be positive, got " + std::to_string(width) +
                                "x" + std::to_string(height));
    }
}

struct BilinearTap {
    int x0, x1, y0, y1;
    double fx, fy;
};

BilinearTap make_tap(double x, double y, int width, int height) {
    x = std::clamp(x, 0.0, static_cast<double>(width - 1));
    y = std::clamp(y, 0.0, static_cast<double>(height - 1));
    BilinearTap t{};
    t.x0 = static_cast<int>(std::floor(x));
    t.y0 = static_cast<int>(std::floor(y));
    t.x1 = std::min(t.x0 + 1, width - 1);
    t.y1 = std::min(t.y0 + 1, height - 1);
    t.fx = x - t.x0;
    t.fy = y - t.y0;
    return t;
}

}  // namespace

ImageRaster::ImageRaster(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
    check_dims(width, height);
    samples_.assign(static_cast<std::size_t>(width) * height * kChannels, fill);
}

ImageRaster::ImageRaster(int width, int height, std::vector<std::uint8_t> samples)
    : width_(width), height_(height), samples_(std::move(samples)) {
    check_dims(width, height);
    if (samples_.size() != static_cast<std::size_t>(width) * height * kChannels) {
        throw DimensionMismatch("sample count " + std::to_string(samples_.size()) +
                                " does not match " + std::to_string(width) + "x" +
                                std::to_string(height) + "x3");
    }
}

ImageF::ImageF(int width, int height, float fill) : width_(width), height_(height) {
    check_dims(width, height);
    samples_.assign(static_cast<std::size_t>(width) * height * kChannels, fill);
}

ImageF::ImageF(const ImageRaster& src) : width_(src.width()), height_(src.height()) {
    auto s = src.samples();
    samples_.assign(s.begin(), s.end());
}

float ImageF::sample(double x, double y, int c) const {
    const BilinearTap t = make_tap(x, y, width_, height_);
    const double a = at(t.x0, t.y0, c);
    const double b = at(t.x1, t.y0, c);
    const double d = at(t.x0, t.y1, c);
    const double e = at(t.x1, t.y1, c);
    const double top = a + (b - a) * t.fx;
    const double bottom = d + (e - d) * t.fx;
    return static_cast<float>(top + (bottom - top) * t.fy);
}

ImageRaster ImageF::to_raster() const {
    ImageRaster out(width_, height_);
    auto dst = out.samples();
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        dst[i] = round_half_up_u8(samples_[i]);
    }
    return out;
}

double GrayImage::sample(double x, double y) const {
    const BilinearTap t = make_tap(x, y, width, height);
    const double a = at(t.x0, t.y0);
    const double b = at(t.x1, t.y0);
    const double d = at(t.x0, t.y1);
    const double e = at(t.x1, t.y1);
    const double top = a + (b - a) * t.fx;
    const double bottom = d + (e - d) * t.fx;
    return top + (bottom - top) * t.fy;
}

std::uint8_t round_half_up_u8(double v) noexcept {
    const double r = std::floor(v + 0.5);
    if (!(r > 0.0)) return 0;
    if (r >= 255.0) return 255;
    return static_cast<std::uint8_t>(r);
}

GrayImage to_gray(const ImageRaster& img) {
    GrayImage out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            out.at(x, y) = 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
        }
    }
    return out;
}

ImageRaster resize_bilinear(const ImageRaster& img, int width, int height) {
    if (width == img.width() && height == img.height()) return img;
    ImageRaster out(width, height);
    const ImageF src(img);
    const double sx = static_cast<double>(img.width()) / width;
    const double sy = static_cast<double>(img.height()) / height;
    for (int y = 0; y < height; ++y) {
        const double fy = (y + 0.5) * sy - 0.5;
        for (int x = 0; x < width; ++x) {
            const double fx = (x + 0.5) * sx - 0.5;
            for (int c = 0; c < ImageRaster::kChannels; ++c) {
                out.at(x, y, c) = round_half_up_u8(src.sample(fx, fy, c));
            }
        }
    }
    return out;
}

ImageRaster flip_horizontal(const ImageRaster& img) {
    ImageRaster out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            for (int c = 0; c < ImageRaster::kChannels; ++c) {
                out.at(img.width() - 1 - x, y, c) = img.at(x, y, c);
            }
        }
    }
    return out;
}

}  // namespace morphline
