#include "morphline/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "morphline/errors.hpp"

namespace morphline {

ImageRaster read_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DecodeFailure("cannot open image " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    cv::Mat bgr;
    try {
        bgr = cv::imdecode(bytes, cv::IMREAD_COLOR);
    } catch (const cv::Exception& e) {
        throw DecodeFailure("cannot decode image " + path.string() + ": " + e.what());
    }
    if (bgr.empty() || bgr.type() != CV_8UC3) throw DecodeFailure("cannot decode image " + path.string());

    ImageRaster out(bgr.cols, bgr.rows);
    for (int y = 0; y < bgr.rows; ++y) {
        const auto* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < bgr.cols; ++x) {
            out.at(x, y, 0) = row[x][2];
            out.at(x, y, 1) = row[x][1];
            out.at(x, y, 2) = row[x][0];
        }
    }
    return out;
}

std::vector<std::uint8_t> encode_png(const ImageRaster& img) {
    cv::Mat bgr(img.height(), img.width(), CV_8UC3);
    for (int y = 0; y < img.height(); ++y) {
        auto* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < img.width(); ++x) {
            row[x] = cv::Vec3b(img.at(x, y, 2), img.at(x, y, 1), img.at(x, y, 0));
        }
    }
    std::vector<std::uint8_t> bytes;
    const std::vector<int> params{cv::IMWRITE_PNG_COMPRESSION, 6, cv::IMWRITE_PNG_STRATEGY,
                                  cv::IMWRITE_PNG_STRATEGY_DEFAULT};
    if (!cv::imencode(".png", bgr, bytes, params)) throw IoFailure("PNG encoding failed");
    return bytes;
}

void write_png(const ImageRaster& img, const std::filesystem::path& path) {
    const auto bytes = encode_png(img);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoFailure("short write to " + path.string());
}

bool is_image_file(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

}  // namespace morphline
