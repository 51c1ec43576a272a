#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "morphline/errors.hpp"
#include "morphline/fusion.hpp"
#include "morphline/landmark_template.hpp"
#include "morphline/random.hpp"
#include "morphline/scoring.hpp"
#include "morphline/synth.hpp"
#include "morphline/warp.hpp"
#include "oracles.hpp"

using namespace morphline;

namespace {

ImageRaster noise_image(int w, int h, std::uint64_t seed) {
    RandomStream rng(seed);
    ImageRaster img(w, h);
    for (auto& v : img.samples()) v = static_cast<std::uint8_t>(rng.below(256));
    return img;
}

FaceAsset synthetic_asset(std::uint64_t seed, SynthStyle style, std::string id, int size = 128) {
    SynthOptions o;
    o.size = size;
    o.style = style;
    SynthFace f = render_synthetic_face(seed, o);
    FaceAsset a;
    a.id = std::move(id);
    a.raster = std::move(f.raster);
    a.landmarks = std::move(f.landmarks);
    a.pool = style == SynthStyle::Drug ? AssetPool::DrugOriginal : AssetPool::HealthyGan;
    return a;
}

}  // namespace

TEST_SUITE("warp") {

TEST_CASE("identical meshes leave the image bit-identical") {
    const ImageRaster img = noise_image(64, 48, 1);
    const LandmarkSet l = template_landmarks(64, 48);
    const TriangleMesh m = triangulate(l.points, 64, 48);
    CHECK(warp_piecewise_affine(img, m, m) == img);
}

TEST_CASE("translating every vertex moves a marked patch by the same amount") {
    ImageRaster img(80, 60, 20);
    for (int y = 20; y < 25; ++y) {
        for (int x = 20; x < 25; ++x) {
            for (int c = 0; c < 3; ++c) img.at(x, y, c) = static_cast<std::uint8_t>(200 + c);
        }
    }
    const std::vector<Point2d> src{{10, 10}, {40, 12}, {15, 45}, {45, 40}};
    std::vector<Point2d> dst = src;
    for (Point2d& p : dst) p.x += 10.0;
    const TriangleMesh sm = triangulate(src, 80, 60);
    TriangleMesh dm = with_vertices(sm, dst, 80, 60);
    // Anchors move too, so the whole frame shifts rigidly.
    for (std::size_t i = src.size(); i < dm.vertices.size(); ++i) dm.vertices[i].x += 10.0;
    const ImageRaster out = warp_piecewise_affine(img, sm, dm);
    for (int y = 20; y < 25; ++y) {
        for (int x = 30; x < 35; ++x) {
            CHECK(out.at(x, y, 0) == 200);
            CHECK(out.at(x, y, 2) == 202);
        }
    }
    CHECK(out.at(22, 22, 0) == 20);
}

TEST_CASE("constant images stay constant under any warp") {
    const ImageRaster img(50, 50, 77);
    RandomStream rng(3);
    const LandmarkSet l = template_landmarks(50, 50);
    std::vector<Point2d> moved = l.points;
    for (Point2d& p : moved) {
        p.x = std::clamp(p.x + 2.0 * rng.normal(), 0.0, 49.0);
        p.y = std::clamp(p.y + 2.0 * rng.normal(), 0.0, 49.0);
    }
    const TriangleMesh sm = triangulate(l.points, 50, 50);
    const TriangleMesh dm = with_vertices(sm, moved, 50, 50);
    const ImageRaster out = warp_piecewise_affine(img, sm, dm);
    for (auto v : out.samples()) CHECK(v == 77);
}

TEST_CASE("topology mismatch is rejected") {
    const ImageRaster img(40, 40, 0);
    const TriangleMesh a = triangulate(template_landmarks(40, 40).points, 40, 40);
    TriangleMesh b = a;
    b.triangles.pop_back();
    CHECK_THROWS_AS(warp_piecewise_affine(img, a, b), TopologyMismatch);
}

TEST_CASE("pixels inside a triangle depend only on the source triangle's neighbourhood") {
    const std::vector<Point2d> src{{20, 20}, {60, 25}, {30, 55}};
    const std::vector<Point2d> dst{{22, 18}, {58, 28}, {33, 52}};
    const TriangleMesh sm = triangulate(src, 80, 80);
    const TriangleMesh dm = with_vertices(sm, dst, 80, 80);
    const ImageRaster base = noise_image(80, 80, 11);
    ImageRaster changed = base;
    // Repaint everything outside the source triangle's bounding box plus a 1 px margin.
    for (int y = 0; y < 80; ++y) {
        for (int x = 0; x < 80; ++x) {
            if (x >= 19 && x <= 61 && y >= 19 && y <= 56) continue;
            for (int c = 0; c < 3; ++c) changed.at(x, y, c) = static_cast<std::uint8_t>(255 - base.at(x, y, c));
        }
    }
    const ImageRaster a = warp_piecewise_affine(base, sm, dm);
    const ImageRaster b = warp_piecewise_affine(changed, sm, dm);
    int inside = 0;
    for (int y = 0; y < 80; ++y) {
        for (int x = 0; x < 80; ++x) {
            const Point2d p{double(x), double(y)};
            const double e = 1e-6;
            if (signed_area(dst[0], dst[1], p) > e && signed_area(dst[1], dst[2], p) > e &&
                signed_area(dst[2], dst[0], p) > e) {
                ++inside;
                for (int c = 0; c < 3; ++c) CHECK(a.at(x, y, c) == b.at(x, y, c));
            }
            if (signed_area(dst[0], dst[2], p) > e && signed_area(dst[2], dst[1], p) > e &&
                signed_area(dst[1], dst[0], p) > e) {
                ++inside;
                for (int c = 0; c < 3; ++c) CHECK(a.at(x, y, c) == b.at(x, y, c));
            }
        }
    }
    CHECK(inside > 100);
}

}

TEST_SUITE("fusion") {

TEST_CASE("MorphSpec keeps alpha on the tenths grid") {
    CHECK(MorphSpec::from_tenths(3).alpha() == 0.3);
    CHECK(MorphSpec::from_tenths(3).tenths() == 3);
    CHECK(MorphSpec::from_alpha(0.1 + 0.2).tenths() == 3);
    CHECK_FALSE(MorphSpec::from_alpha(0.25).quantized());
    CHECK(MorphSpec::from_alpha(0.25).alpha() == 0.25);
    CHECK_THROWS_AS(MorphSpec::from_tenths(11), InvalidConfig);
    CHECK_THROWS_AS(MorphSpec::from_tenths(-1), InvalidConfig);
    CHECK_THROWS_AS(MorphSpec::from_alpha(1.01), InvalidConfig);
    CHECK_THROWS_AS(MorphSpec::from_alpha(std::nan("")), InvalidConfig);
}

TEST_CASE("enum names round-trip") {
    for (auto p : {AssetPool::DrugOriginal, AssetPool::HealthyGan, AssetPool::Generated}) {
        CHECK(parse_asset_pool(to_string(p)) == p);
    }
    for (auto o : {OpType::Original, OpType::Crossover, OpType::Mutation}) CHECK(parse_op_type(to_string(o)) == o);
    CHECK_THROWS_AS(parse_op_type("splice"), InvalidConfig);
}

TEST_CASE("alpha endpoints reproduce the parents exactly") {
    const FaceAsset d = synthetic_asset(1, SynthStyle::Drug, "d");
    const FaceAsset h = synthetic_asset(2, SynthStyle::Healthy, "h");
    const FaceAsset one = face_merge(d, h, MorphSpec::from_tenths(10), {"m1"});
    const FaceAsset zero = face_merge(d, h, MorphSpec::from_tenths(0), {"m0"});
    CHECK(one.raster == d.raster);
    CHECK(zero.raster == h.raster);
    CHECK(one.landmarks == d.landmarks);
    CHECK(zero.landmarks == h.landmarks);
}

TEST_CASE("constant grays blend to their average") {
    FaceAsset a{"a", ImageRaster(64, 64, 100), template_landmarks(64, 64), AssetPool::DrugOriginal, 0, {}};
    FaceAsset b{"b", ImageRaster(64, 64, 200), template_landmarks(64, 64), AssetPool::HealthyGan, 0, {}};
    const FaceAsset m = face_merge(a, b, MorphSpec::from_tenths(5), {"m"});
    for (auto v : m.raster.samples()) CHECK(v == 150);
}

TEST_CASE("merge records lineage and generation") {
    FaceAsset d = synthetic_asset(3, SynthStyle::Drug, "d");
    FaceAsset h = synthetic_asset(4, SynthStyle::Healthy, "h");
    d.generation = 2;
    h.generation = 0;
    const FaceAsset m = face_merge(d, h, MorphSpec::from_tenths(4), {"child", OpType::Mutation});
    CHECK(m.id == "child");
    CHECK(m.pool == AssetPool::Generated);
    CHECK(m.generation == 3);
    REQUIRE(m.parents.has_value());
    CHECK(m.parents->drug_parent == "d");
    CHECK(m.parents->healthy_parent == "h");
    CHECK(m.parents->alpha == MorphSpec::from_tenths(4));
    CHECK(m.parents->op == OpType::Mutation);
}

TEST_CASE("intermediate landmarks are the pointwise blend") {
    const FaceAsset d = synthetic_asset(5, SynthStyle::Drug, "d");
    const FaceAsset h = synthetic_asset(6, SynthStyle::Healthy, "h");
    const FaceAsset m = face_merge(d, h, MorphSpec::from_tenths(5), {"m"});
    for (int i = 0; i < kLandmarkCount; ++i) {
        CHECK(m.landmarks.points[i].x == doctest::Approx((d.landmarks.points[i].x + h.landmarks.points[i].x) / 2));
        CHECK(m.landmarks.points[i].y == doctest::Approx((d.landmarks.points[i].y + h.landmarks.points[i].y) / 2));
    }
}

TEST_CASE("each output pixel lies between the warped parents") {
    const FaceAsset d = synthetic_asset(7, SynthStyle::Drug, "d", 96);
    const FaceAsset h = synthetic_asset(8, SynthStyle::Healthy, "h", 96);
    for (int tenths : {2, 5, 7}) {
        const double alpha = tenths / 10.0;
        const MorphResult r = morph_faces(d.raster, d.landmarks, h.raster, h.landmarks, alpha);
        const TriangleMesh mesh = triangulate(r.landmarks.points, 96, 96);
        const ImageF wd = warp_piecewise_affine(ImageF(d.raster), with_vertices(mesh, d.landmarks.points, 96, 96), mesh);
        const ImageF wh = warp_piecewise_affine(ImageF(h.raster), with_vertices(mesh, h.landmarks.points, 96, 96), mesh);
        for (int y = 0; y < 96; ++y) {
            for (int x = 0; x < 96; ++x) {
                for (int c = 0; c < 3; ++c) {
                    const double lo = std::min(wd.at(x, y, c), wh.at(x, y, c));
                    const double hi = std::max(wd.at(x, y, c), wh.at(x, y, c));
                    CHECK(r.raster.at(x, y, c) >= lo - 0.5);
                    CHECK(r.raster.at(x, y, c) <= hi + 0.5);
                }
            }
        }
    }
}

TEST_CASE("half merge is no sharper than the sharper parent") {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const FaceAsset d = synthetic_asset(100 + s, SynthStyle::Drug, "d");
        const FaceAsset h = synthetic_asset(200 + s, SynthStyle::Healthy, "h");
        const FaceAsset m = face_merge(d, h, MorphSpec::from_tenths(5), {"m"});
        const double e = oracle::laplacian_variance(to_gray(m.raster));
        CHECK(e <= std::max(oracle::laplacian_variance(to_gray(d.raster)), oracle::laplacian_variance(to_gray(h.raster))));
    }
}

TEST_CASE("healthy parent is resized to the drug parent unless disabled") {
    const FaceAsset d = synthetic_asset(9, SynthStyle::Drug, "d", 128);
    const FaceAsset h = synthetic_asset(10, SynthStyle::Healthy, "h", 96);
    const FaceAsset m = face_merge(d, h, MorphSpec::from_tenths(5), {"m"});
    CHECK(m.raster.width() == 128);
    CHECK(m.landmarks.image_width == 128);
    CHECK_THROWS_AS(face_merge(d, h, MorphSpec::from_tenths(5), {"m", OpType::Crossover, false}), DimensionMismatch);
}

TEST_CASE("invalid landmarks are rejected") {
    FaceAsset d = synthetic_asset(11, SynthStyle::Drug, "d");
    const FaceAsset h = synthetic_asset(12, SynthStyle::Healthy, "h");
    d.landmarks.points.resize(10);
    CHECK_THROWS_AS(face_merge(d, h, MorphSpec::from_tenths(5), {"m"}), DegenerateConfiguration);
}

}
