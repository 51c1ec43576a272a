#include "morphline/landmark_template.hpp"

#include <algorithm>

namespace morphline {

namespace {

// Image-left half of the shape; the right half is generated by mirroring.
constexpr std::array<std::pair<int, Point2d>, 39> kLeftHalf{{
    // jaw 0..8
    {0, {0.00, 0.20}}, {1, {0.01, 0.33}}, {2, {0.03, 0.46}}, {3, {0.06, 0.59}},
    {4, {0.11, 0.72}}, {5, {0.18, 0.82}}, {6, {0.27, 0.90}}, {7, {0.38, 0.96}},
    {8, {0.50, 1.00}},
    // left brow 17..21
    {17, {0.08, 0.15}}, {18, {0.16, 0.10}}, {19, {0.26, 0.09}}, {20, {0.35, 0.10}},
    {21, {0.44, 0.13}},
    // nose bridge and base
    {27, {0.50, 0.20}}, {28, {0.50, 0.31}}, {29, {0.50, 0.42}}, {30, {0.50, 0.53}},
    {31, {0.41, 0.59}}, {32, {0.45, 0.61}}, {33, {0.50, 0.62}},
    // left eye
    {36, {0.14, 0.24}}, {37, {0.20, 0.20}}, {38, {0.28, 0.20}}, {39, {0.34, 0.245}},
    {40, {0.28, 0.27}}, {41, {0.20, 0.27}},
    // outer lip; corners share the height of jaw points 4 and 12
    {48, {0.32, 0.72}}, {49, {0.38, 0.69}}, {50, {0.44, 0.665}}, {51, {0.50, 0.675}},
    {57, {0.50, 0.80}}, {58, {0.43, 0.795}}, {59, {0.37, 0.77}},
    // inner lip
    {60, {0.34, 0.72}}, {61, {0.43, 0.705}}, {62, {0.50, 0.71}}, {66, {0.50, 0.74}}, {67, {0.43, 0.74}},
}};

constexpr std::array<int, kLandmarkCount> make_mirror_index() {
    std::array<int, kLandmarkCount> m{};
    for (int i = 0; i < kLandmarkCount; ++i) m[i] = i;
    auto pair = [&m](int a, int b) {
        m[a] = b;
        m[b] = a;
    };
    for (int i = 0; i < 8; ++i) pair(i, 16 - i);
    for (int k = 0; k < 5; ++k) pair(17 + k, 26 - k);
    pair(31, 35);
    pair(32, 34);
    pair(36, 45);
    pair(37, 44);
    pair(38, 43);
    pair(39, 42);
    pair(40, 47);
    pair(41, 46);
    pair(48, 54);
    pair(49, 53);
    pair(50, 52);
    pair(55, 59);
    pair(56, 58);
    pair(60, 64);
    pair(61, 63);
    pair(65, 67);
    return m;
}

constexpr std::array<int, kLandmarkCount> kMirror = make_mirror_index();

std::array<Point2d, kLandmarkCount> build_template() {
    std::array<Point2d, kLandmarkCount> t{};
    std::array<bool, kLandmarkCount> set{};
    for (const auto& [idx, p] : kLeftHalf) {
        t[idx] = p;
        set[idx] = true;
    }
    for (int i = 0; i < kLandmarkCount; ++i) {
        if (!set[i]) t[i] = {1.0 - t[kMirror[i]].x, t[kMirror[i]].y};
    }
    return t;
}

}  // namespace

const std::array<Point2d, kLandmarkCount>& unit_face_template() {
    static const std::array<Point2d, kLandmarkCount> t = build_template();
    return t;
}

const std::array<int, kLandmarkCount>& mirror_index() { return kMirror; }

LandmarkSet template_landmarks(int width, int height) {
    LandmarkSet l{{}, width, height};
    const double cx = (width - 1) / 2.0;
    const double box_w = 0.6 * width;
    const double box_h = 0.68 * height;
    const double top = 0.18 * height;
    l.points.reserve(kLandmarkCount);
    for (const Point2d& u : unit_face_template()) {
        l.points.push_back({cx + (u.x - 0.5) * box_w, top + u.y * box_h});
    }
    return l;
}

LandmarkSet mirror_landmarks(const LandmarkSet& l) {
    LandmarkSet out{std::vector<Point2d>(l.points.size()), l.image_width, l.image_height};
    for (std::size_t i = 0; i < l.points.size(); ++i) {
        const int j = l.points.size() == kLandmarkCount ? kMirror[i] : static_cast<int>(i);
        out.points[j] = {std::max(0.0, l.image_width - 1 - l.points[i].x), l.points[i].y};
    }
    return out;
}

}  // namespace morphline
