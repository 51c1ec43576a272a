#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace morphline {

/// 8-bit interleaved RGB raster, row-major, origin top-left.
class ImageRaster {
public:
    static constexpr int kChannels = 3;

    ImageRaster() = default;
    ImageRaster(int width, int height, std::uint8_t fill = 0);
    /// Throws DimensionMismatch unless samples.size() == width * height * 3.
    ImageRaster(int width, int height, std::vector<std::uint8_t> samples);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool empty() const noexcept { return samples_.empty(); }

    std::uint8_t at(int x, int y, int c) const { return samples_[index(x, y, c)]; }
    std::uint8_t& at(int x, int y, int c) { return samples_[index(x, y, c)]; }

    std::span<const std::uint8_t> samples() const noexcept { return samples_; }
    std::span<std::uint8_t> samples() noexcept { return samples_; }

    friend bool operator==(const ImageRaster&, const ImageRaster&) = default;

private:
    std::size_t index(int x, int y, int c) const {
        return (static_cast<std::size_t>(y) * width_ + x) * kChannels + c;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> samples_;
};

/// Floating-point RGB raster used for intermediate warp/blend math.
class ImageF {
public:
    static constexpr int kChannels = 3;

    ImageF() = default;
    ImageF(int width, int height, float fill = 0.0f);
    explicit ImageF(const ImageRaster& src);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    float at(int x, int y, int c) const { return samples_[index(x, y, c)]; }
    float& at(int x, int y, int c) { return samples_[index(x, y, c)]; }

    std::span<const float> samples() const noexcept { return samples_; }
    std::span<float> samples() noexcept { return samples_; }

    /// Bilinear sample with edge clamping; (x, y) are pixel-centre coordinates.
    float sample(double x, double y, int c) const;

    /// Rounds half-up and saturates to [0, 255].
    ImageRaster to_raster() const;

private:
    std::size_t index(int x, int y, int c) const {
        return (static_cast<std::size_t>(y) * width_ + x) * kChannels + c;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<float> samples_;
};

/// Single-channel double image, used by SSIM and the sharpness/embedding stubs.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    GrayImage() = default;
    GrayImage(int w, int h, double fill = 0.0)
        : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }

    /// Bilinear sample with edge clamping.
    double sample(double x, double y) const;
};

std::uint8_t round_half_up_u8(double v) noexcept;

/// Rec. 601 luma.
GrayImage to_gray(const ImageRaster& img);

/// Bilinear resize using pixel-centre alignment.
ImageRaster resize_bilinear(const ImageRaster& img, int width, int height);

ImageRaster flip_horizontal(const ImageRaster& img);

}  // namespace morphline
