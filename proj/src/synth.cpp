#include "morphline/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "morphline/dataset_io.hpp"
#include "morphline/errors.hpp"
#include "morphline/image_io.hpp"
#include "morphline/landmark_template.hpp"
#include "morphline/random.hpp"

namespace fs = std::filesystem;

namespace morphline {

namespace {

struct Rgb {
    double r = 0.0;
    double g = 0.0;
    double b = 0.0;
};

Rgb scaled(Rgb c, double k) { return {c.r * k, c.g * k, c.b * k}; }

struct Box {
    int x0, y0, x1, y1;
};

Box bounds(const std::vector<Point2d>& pts, double pad, int w, int h) {
    double lx = pts[0].x, hx = pts[0].x, ly = pts[0].y, hy = pts[0].y;
    for (const Point2d& p : pts) {
        lx = std::min(lx, p.x);
        hx = std::max(hx, p.x);
        ly = std::min(ly, p.y);
        hy = std::max(hy, p.y);
    }
    return {std::max(0, static_cast<int>(std::floor(lx - pad))), std::max(0, static_cast<int>(std::floor(ly - pad))),
            std::min(w - 1, static_cast<int>(std::ceil(hx + pad))),
            std::min(h - 1, static_cast<int>(std::ceil(hy + pad)))};
}

bool inside(const std::vector<Point2d>& poly, double x, double y) {
    bool in = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const Point2d& a = poly[i];
        const Point2d& b = poly[j];
        if ((a.y > y) != (b.y > y) && x < (b.x - a.x) * (y - a.y) / (b.y - a.y) + a.x) in = !in;
    }
    return in;
}

double segment_distance(Point2d p, Point2d a, Point2d b) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

void put(ImageF& img, int x, int y, Rgb c, double a) {
    img.at(x, y, 0) = static_cast<float>((1.0 - a) * img.at(x, y, 0) + a * c.r);
    img.at(x, y, 1) = static_cast<float>((1.0 - a) * img.at(x, y, 1) + a * c.g);
    img.at(x, y, 2) = static_cast<float>((1.0 - a) * img.at(x, y, 2) + a * c.b);
}

void fill_polygon(ImageF& img, const std::vector<Point2d>& poly, Rgb c, double opacity = 1.0) {
    const Box bb = bounds(poly, 1.0, img.width(), img.height());
    for (int y = bb.y0; y <= bb.y1; ++y) {
        for (int x = bb.x0; x <= bb.x1; ++x) {
            if (inside(poly, x, y)) put(img, x, y, c, opacity);
        }
    }
}

void stroke(ImageF& img, const std::vector<Point2d>& pts, double thickness, Rgb c, double opacity = 1.0) {
    const Box bb = bounds(pts, thickness + 1.0, img.width(), img.height());
    for (int y = bb.y0; y <= bb.y1; ++y) {
        for (int x = bb.x0; x <= bb.x1; ++x) {
            double d = 1e300;
            for (std::size_t i = 0; i + 1 < pts.size(); ++i) d = std::min(d, segment_distance({double(x), double(y)}, pts[i], pts[i + 1]));
            if (d <= thickness * 0.5) put(img, x, y, c, opacity);
        }
    }
}

void fill_disk(ImageF& img, Point2d centre, double radius, Rgb c, double opacity = 1.0) {
    const Box bb = bounds({centre}, radius + 1.0, img.width(), img.height());
    for (int y = bb.y0; y <= bb.y1; ++y) {
        for (int x = bb.x0; x <= bb.x1; ++x) {
            if (std::hypot(x - centre.x, y - centre.y) <= radius) put(img, x, y, c, opacity);
        }
    }
}

// Gaussian-weighted blend towards c, strongest at the centre.
void soft_spot(ImageF& img, Point2d centre, double rx, double ry, Rgb c, double strength) {
    const Box bb = bounds({centre}, 3.0 * std::max(rx, ry), img.width(), img.height());
    for (int y = bb.y0; y <= bb.y1; ++y) {
        for (int x = bb.x0; x <= bb.x1; ++x) {
            const double u = (x - centre.x) / rx, v = (y - centre.y) / ry;
            const double a = strength * std::exp(-0.5 * (u * u + v * v));
            if (a > 1e-3) put(img, x, y, c, a);
        }
    }
}

std::vector<Point2d> pick(const std::vector<Point2d>& pts, int from, int to) {
    return {pts.begin() + from, pts.begin() + to + 1};
}

Point2d centroid(const std::vector<Point2d>& pts) {
    Point2d c;
    for (const Point2d& p : pts) {
        c.x += p.x;
        c.y += p.y;
    }
    return {c.x / pts.size(), c.y / pts.size()};
}

LandmarkSet jittered_landmarks(RandomStream& rng, const SynthOptions& o) {
    const int s = o.size;
    LandmarkSet l = template_landmarks(s, s);
    const double cx = (s - 1) / 2.0;
    const Point2d centre{cx, centroid(l.points).y};

    const double face_sx = 1.0 + 0.05 * rng.normal();
    const double face_sy = 1.0 + 0.04 * rng.normal();
    const double eye_spread = 0.012 * s * rng.normal();
    const double eye_lift = 0.008 * s * rng.normal();
    const double mouth_scale = 1.0 + 0.08 * rng.normal();
    const double mouth_drop = 0.008 * s * rng.normal();
    const double nose_scale = 1.0 + 0.08 * rng.normal();
    const Point2d shift = o.symmetric ? Point2d{0.0, 0.006 * s * rng.normal()}
                                      : Point2d{0.01 * s * rng.normal(), 0.006 * s * rng.normal()};
    const Point2d mouth_centre = centroid(pick(l.points, 48, 59));

    for (int i = 0; i < kLandmarkCount; ++i) {
        Point2d p = l.points[i];
        const double side = p.x < cx - 1e-9 ? -1.0 : (p.x > cx + 1e-9 ? 1.0 : 0.0);
        if (i >= 36 && i <= 47) {
            p.x += side * eye_spread;
            p.y -= eye_lift;
        }
        if (i >= 48) {
            p.x = mouth_centre.x + (p.x - mouth_centre.x) * mouth_scale;
            p.y += mouth_drop;
        }
        if (i >= 28 && i <= 35) p.y = l.points[27].y + (p.y - l.points[27].y) * nose_scale;
        p.x = centre.x + (p.x - centre.x) * face_sx + shift.x;
        p.y = centre.y + (p.y - centre.y) * face_sy + shift.y;
        p.x += 0.003 * s * rng.normal();
        p.y += 0.003 * s * rng.normal();
        l.points[i] = p;
    }

    if (o.symmetric) {
        const auto& mirror = mirror_index();
        const LandmarkSet tmpl = template_landmarks(s, s);
        for (int i = 0; i < kLandmarkCount; ++i) {
            if (mirror[i] == i) {
                l.points[i].x = cx;
            } else if (tmpl.points[i].x < cx) {
                l.points[mirror[i]] = {2.0 * cx - l.points[i].x, l.points[i].y};
            }
        }
    }
    // Cheek rectangles use the jaw and mouth-corner heights interchangeably.
    l.points[4].y = l.points[48].y;
    l.points[12].y = l.points[54].y;
    for (Point2d& p : l.points) {
        p.x = std::clamp(p.x, 1.0, s - 2.0);
        p.y = std::clamp(p.y, 1.0, s - 2.0);
    }
    return l;
}

}  // namespace

std::string_view to_string(SynthStyle s) noexcept { return s == SynthStyle::Healthy ? "healthy" : "drug"; }

SynthStyle parse_synth_style(std::string_view s) {
    if (s == "healthy") return SynthStyle::Healthy;
    if (s == "drug") return SynthStyle::Drug;
    throw InvalidConfig("unknown synthetic style '" + std::string(s) + "'");
}

SynthFace render_synthetic_face(std::uint64_t seed, const SynthOptions& o) {
    if (o.size < 32) throw InvalidConfig("synthetic faces need a size of at least 32");
    if (!(o.texture_sigma >= 0.0)) throw InvalidConfig("texture sigma must be non-negative");
    const int s = o.size;
    const bool drug = o.style == SynthStyle::Drug;
    RandomStream rng(seed);

    SynthFace face;
    face.landmarks = jittered_landmarks(rng, o);
    const auto& p = face.landmarks.points;

    const double tone = rng.uniform01();
    Rgb skin{110 + 120 * tone, 75 + 105 * tone, 55 + 90 * tone};
    const double bg_level = (0.45 + 0.35 * tone) * 255.0 * (0.8 + 0.4 * rng.uniform01());
    const Rgb background{bg_level * (0.8 + 0.4 * rng.uniform01()), bg_level * (0.8 + 0.4 * rng.uniform01()),
                         bg_level * (0.8 + 0.4 * rng.uniform01())};
    // Directional key light across the whole frame.
    const double light_angle = 2.0 * 3.141592653589793 * rng.uniform01();
    const double light_gain = 0.1 + 0.15 * rng.uniform01();
    const Point2d light{std::cos(light_angle), std::sin(light_angle)};
    if (drug) skin = {skin.r * 0.95, skin.g * 0.88, skin.b * 0.85};
    const Rgb hair = scaled({60, 45, 35}, 0.6 + 0.8 * rng.uniform01());
    const Rgb iris{40 + 80 * rng.uniform01(), 50 + 70 * rng.uniform01(), 40 + 60 * rng.uniform01()};
    const Rgb lips{skin.r * 0.85 + 20, skin.g * 0.55, skin.b * 0.6};

    ImageF img(s, s);
    for (int y = 0; y < s; ++y) {
        const double k = 0.8 + 0.4 * y / (s - 1.0);
        for (int x = 0; x < s; ++x) put(img, x, y, scaled(background, k), 1.0);
    }
    // Identity-specific mottling: broad light and dark patches over face and background.
    struct Patch {
        Point2d c;
        double r, gain;
    };
    std::vector<Patch> patches(32);
    for (Patch& pa : patches) {
        pa.c = {rng.uniform01() * (s - 1), rng.uniform01() * (s - 1)};
        pa.r = (0.04 + 0.05 * rng.uniform01()) * s;
        pa.gain = rng.uniform01() < 0.5 ? -0.45 : 0.45;
    }
    auto lighting = [&](int x, int y) {
        const double u = (x - (s - 1) / 2.0) / (s / 2.0), v = (y - (s - 1) / 2.0) / (s / 2.0);
        double k = 1.0 + light_gain * (u * light.x + v * light.y);
        for (const Patch& pa : patches) {
            const double d2 = (x - pa.c.x) * (x - pa.c.x) + (y - pa.c.y) * (y - pa.c.y);
            k += pa.gain * std::exp(-0.5 * d2 / (pa.r * pa.r));
        }
        return std::max(0.2, k);
    };

    std::vector<Point2d> outline = pick(p, 0, 16);
    const double forehead = 0.12 * s;
    for (int i = 26; i >= 17; --i) outline.push_back({p[i].x, p[i].y - forehead});
    const double cx = (s - 1) / 2.0;
    const double half_w = std::max(1.0, (p[16].x - p[0].x) / 2.0);
    std::vector<bool> face_mask(static_cast<std::size_t>(s) * s, false);
    {
        const Box bb = bounds(outline, 1.0, s, s);
        for (int y = bb.y0; y <= bb.y1; ++y) {
            for (int x = bb.x0; x <= bb.x1; ++x) {
                if (!inside(outline, x, y)) continue;
                face_mask[static_cast<std::size_t>(y) * s + x] = true;
                const double u = (x - cx) / half_w;
                put(img, x, y, scaled(skin, 1.0 - 0.18 * u * u), 1.0);
            }
        }
    }

    const std::vector<Point2d> left_eye = pick(p, 36, 41);
    const std::vector<Point2d> right_eye = pick(p, 42, 47);
    if (drug) {
        const double eye_w = p[39].x - p[36].x;
        for (const auto* eye : {&left_eye, &right_eye}) {
            const Point2d c = centroid(*eye);
            soft_spot(img, {c.x, c.y + 0.35 * eye_w}, 0.55 * eye_w, 0.25 * eye_w, scaled(skin, 0.55), 0.6);
        }
        const Box bb = bounds(outline, 0.0, s, s);
        const int blotches = 5 + static_cast<int>(rng.below(6));
        for (int b = 0; b < blotches; ++b) {
            const Point2d c{bb.x0 + rng.uniform01() * (bb.x1 - bb.x0), bb.y0 + rng.uniform01() * (bb.y1 - bb.y0)};
            const double r = (0.015 + 0.025 * rng.uniform01()) * s;
            const Rgb tint{skin.r * 0.95 + 15, skin.g * 0.7, skin.b * 0.7};
            if (inside(outline, c.x, c.y)) soft_spot(img, c, r, r * (0.7 + 0.6 * rng.uniform01()), tint, 0.5);
        }
        const int sores = 2 + static_cast<int>(rng.below(4));
        for (int k = 0; k < sores; ++k) {
            const Point2d c{bb.x0 + rng.uniform01() * (bb.x1 - bb.x0), bb.y0 + rng.uniform01() * (bb.y1 - bb.y0)};
            if (inside(outline, c.x, c.y)) fill_disk(img, c, (0.004 + 0.006 * rng.uniform01()) * s, {120, 40, 35}, 0.85);
        }
    }

    const double brow_t = std::max(1.5, 0.014 * s);
    stroke(img, pick(p, 17, 21), brow_t, hair);
    stroke(img, pick(p, 22, 26), brow_t, hair);
    for (const auto* eye : {&left_eye, &right_eye}) {
        fill_polygon(img, *eye, {232, 228, 220});
        const Point2d c = centroid(*eye);
        const double eye_h = std::max(1.0, ((*eye)[4].y + (*eye)[5].y - (*eye)[1].y - (*eye)[2].y) / 2.0);
        fill_disk(img, c, 0.55 * eye_h, iris);
        fill_disk(img, c, 0.25 * eye_h, {15, 12, 12});
        std::vector<Point2d> lid(eye->begin(), eye->begin() + 4);
        stroke(img, lid, std::max(1.0, 0.005 * s), scaled(hair, 0.7));
    }
    stroke(img, pick(p, 27, 30), std::max(1.0, 0.006 * s), scaled(skin, 0.85), 0.6);
    stroke(img, pick(p, 31, 35), std::max(1.0, 0.008 * s), scaled(skin, 0.6));
    fill_polygon(img, pick(p, 48, 59), lips);
    fill_polygon(img, pick(p, 60, 67), {70, 30, 30});

    const double sigma = o.texture_sigma * (drug ? 1.25 : 1.0);
    for (int y = 0; y < s; ++y) {
        for (int x = 0; x < s; ++x) {
            const double k = lighting(x, y);
            for (int c = 0; c < 3; ++c) img.at(x, y, c) = static_cast<float>(img.at(x, y, c) * k);
            const bool on_face = face_mask[static_cast<std::size_t>(y) * s + x];
            const double lum = (on_face ? sigma : sigma / 3.0) * rng.normal();
            for (int c = 0; c < 3; ++c) {
                const double chroma = (on_face ? sigma / 4.0 : 0.0) * rng.normal();
                img.at(x, y, c) = static_cast<float>(std::clamp(img.at(x, y, c) + lum + chroma, 0.0, 255.0));
            }
        }
    }

    if (o.symmetric) {
        for (int y = 0; y < s; ++y) {
            for (int x = s / 2; x < s; ++x) {
                for (int c = 0; c < 3; ++c) img.at(x, y, c) = img.at(s - 1 - x, y, c);
            }
        }
    }

    face.raster = img.to_raster();
    return face;
}

std::vector<fs::path> write_synthetic_corpus(const fs::path& dir, int count, std::uint64_t seed,
                                             const SynthOptions& options) {
    if (count < 0) throw InvalidConfig("corpus size must be non-negative");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoFailure("cannot create directory " + dir.string());

    std::vector<fs::path> out;
    const std::uint64_t style_tag = options.style == SynthStyle::Healthy ? 1 : 2;
    for (int i = 0; i < count; ++i) {
        const SynthFace face =
            render_synthetic_face(derive_seed(seed, {style_tag, static_cast<std::uint64_t>(i)}), options);
        char name[32];
        std::snprintf(name, sizeof name, "face_%04d.png", i);
        const fs::path path = dir / name;
        write_png(face.raster, path);
        write_sidecar(sidecar_path_for(path), face.landmarks, name);
        out.push_back(path);
    }
    return out;
}

}  // namespace morphline
