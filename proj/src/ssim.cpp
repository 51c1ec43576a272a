#include "morphline/ssim.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "morphline/errors.hpp"

namespace morphline {

namespace {

struct Window {
    int w = 0;
    int h = 0;
    std::vector<double> weights;  // sum to 1
};

Window gaussian_window(int size, double sigma) {
    Window win{size, size, std::vector<double>(static_cast<std::size_t>(size) * size)};
    const double c = (size - 1) / 2.0;
    double total = 0.0;
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double d2 = (x - c) * (x - c) + (y - c) * (y - c);
            const double v = std::exp(-d2 / (2.0 * sigma * sigma));
            win.weights[static_cast<std::size_t>(y) * size + x] = v;
            total += v;
        }
    }
    for (double& v : win.weights) v /= total;
    return win;
}

Window uniform_window(int w, int h) {
    const double v = 1.0 / (static_cast<double>(w) * h);
    return {w, h, std::vector<double>(static_cast<std::size_t>(w) * h, v)};
}

double ssim_at(const GrayImage& x, const GrayImage& y, const Window& win, int ox, int oy, double c1, double c2) {
    double mx = 0.0, my = 0.0;
    for (int j = 0; j < win.h; ++j) {
        for (int i = 0; i < win.w; ++i) {
            const double w = win.weights[static_cast<std::size_t>(j) * win.w + i];
            mx += w * x.at(ox + i, oy + j);
            my += w * y.at(ox + i, oy + j);
        }
    }
    double vx = 0.0, vy = 0.0, cxy = 0.0;
    for (int j = 0; j < win.h; ++j) {
        for (int i = 0; i < win.w; ++i) {
            const double w = win.weights[static_cast<std::size_t>(j) * win.w + i];
            const double dx = x.at(ox + i, oy + j) - mx;
            const double dy = y.at(ox + i, oy + j) - my;
            vx += w * dx * dx;
            vy += w * dy * dy;
            cxy += w * dx * dy;
        }
    }
    return ((2.0 * mx * my + c1) * (2.0 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
}

}  // namespace

double ssim(const GrayImage& x, const GrayImage& y, const SsimParams& params) {
    if (x.width != y.width || x.height != y.height) {
        throw DimensionMismatch("SSIM inputs differ in size: " + std::to_string(x.width) + "x" +
                                std::to_string(x.height) + " vs " + std::to_string(y.width) + "x" +
                                std::to_string(y.height));
    }
    if (x.width <= 0 || x.height <= 0) throw DimensionMismatch("SSIM of an empty image");
    const double c1 = params.c1();
    const double c2 = params.c2();

    if (x.width < params.window || x.height < params.window) {
        return ssim_at(x, y, uniform_window(x.width, x.height), 0, 0, c1, c2);
    }
    const Window win = gaussian_window(params.window, params.sigma);
    double total = 0.0;
    const int nx = x.width - params.window + 1;
    const int ny = x.height - params.window + 1;
    for (int oy = 0; oy < ny; ++oy) {
        for (int ox = 0; ox < nx; ++ox) total += ssim_at(x, y, win, ox, oy, c1, c2);
    }
    return total / (static_cast<double>(nx) * ny);
}

}  // namespace morphline
