#include <doctest.h>

#include <cmath>
#include <numbers>

#include "morphline/errors.hpp"
#include "morphline/geometry.hpp"
#include "morphline/landmark_template.hpp"
#include "morphline/random.hpp"

using namespace morphline;

namespace {

std::vector<Point2d> transform_points(const std::vector<Point2d>& pts, double s, double theta, Point2d t) {
    std::vector<Point2d> out;
    for (const Point2d& p : pts) {
        out.push_back({s * (std::cos(theta) * p.x - std::sin(theta) * p.y) + t.x,
                       s * (std::sin(theta) * p.x + std::cos(theta) * p.y) + t.y});
    }
    return out;
}

double wrap_angle(double a) { return std::remainder(a, 2.0 * std::numbers::pi); }

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("validate_landmarks accepts the template and rejects count and bounds violations") {
    LandmarkSet l = template_landmarks(200, 240);
    CHECK(validate_landmarks(l));

    LandmarkSet short_set = l;
    short_set.points.pop_back();
    CHECK_FALSE(validate_landmarks(short_set));

    LandmarkSet outside = l;
    outside.points[10] = {-1.0, 5.0};
    CHECK_FALSE(validate_landmarks(outside));

    LandmarkSet at_edge = l;
    at_edge.points[0] = {200.0, 5.0};
    CHECK_FALSE(validate_landmarks(at_edge));

    LandmarkSet nan_set = l;
    nan_set.points[3].y = std::nan("");
    CHECK_FALSE(validate_landmarks(nan_set));
}

TEST_CASE("estimate_similarity of identical sets is the identity") {
    const LandmarkSet l = template_landmarks(300, 300);
    const SimilarityTransform t = estimate_similarity(l, l);
    CHECK(t.scale == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(t.rotation) < 1e-12);
    CHECK(std::abs(t.translation.x) < 1e-9);
    CHECK(std::abs(t.translation.y) < 1e-9);
}

TEST_CASE("estimate_similarity recovers a quarter turn plus shift") {
    const std::vector<Point2d> src = template_landmarks(100, 100).points;
    const std::vector<Point2d> dst = transform_points(src, 1.0, std::numbers::pi / 2.0, {10.0, 0.0});
    const SimilarityTransform t = estimate_similarity(src, dst);
    CHECK(std::abs(t.rotation - std::numbers::pi / 2.0) < 1e-6);
    CHECK(std::abs(t.translation.x - 10.0) < 1e-6);
    CHECK(std::abs(t.translation.y) < 1e-6);
    CHECK(std::abs(t.scale - 1.0) < 1e-6);
}

TEST_CASE("estimate_similarity recovers a uniform scale of two") {
    const std::vector<Point2d> src = template_landmarks(100, 100).points;
    const std::vector<Point2d> dst = transform_points(src, 2.0, 0.0, {0.0, 0.0});
    CHECK(std::abs(estimate_similarity(src, dst).scale - 2.0) < 1e-6);
}

TEST_CASE("estimate_similarity rejects coincident sources and size mismatch") {
    const std::vector<Point2d> same(68, Point2d{3.0, 4.0});
    const std::vector<Point2d> dst = template_landmarks(100, 100).points;
    CHECK_THROWS_AS(estimate_similarity(same, dst), DegenerateConfiguration);
    const std::vector<Point2d> fewer(dst.begin(), dst.begin() + 10);
    CHECK_THROWS_AS(estimate_similarity(fewer, dst), DegenerateConfiguration);
}

TEST_CASE("alignment round-trip recovers random transforms") {
    RandomStream rng(42);
    const std::vector<Point2d> src = template_landmarks(512, 512).points;
    for (int trial = 0; trial < 200; ++trial) {
        const double s = 0.2 + 3.0 * rng.uniform01();
        const double theta = (rng.uniform01() * 2.0 - 1.0) * std::numbers::pi;
        const Point2d t{(rng.uniform01() - 0.5) * 2000.0, (rng.uniform01() - 0.5) * 2000.0};
        const SimilarityTransform est = estimate_similarity(src, transform_points(src, s, theta, t));
        CHECK(std::abs(est.scale - s) < 1e-6);
        CHECK(std::abs(wrap_angle(est.rotation - theta)) < 1e-6);
        CHECK(std::abs(est.translation.x - t.x) < 1e-6);
        CHECK(std::abs(est.translation.y - t.y) < 1e-6);
    }
}

TEST_CASE("least-squares fit is not improved by perturbing its parameters") {
    RandomStream rng(5);
    std::vector<Point2d> src = template_landmarks(256, 256).points;
    std::vector<Point2d> dst = transform_points(src, 1.3, 0.4, {12.0, -7.0});
    for (Point2d& p : dst) {
        p.x += 3.0 * rng.normal();
        p.y += 3.0 * rng.normal();
    }
    const SimilarityTransform best = estimate_similarity(src, dst);
    auto residual = [&](const SimilarityTransform& t) {
        double r = 0.0;
        for (std::size_t i = 0; i < src.size(); ++i) {
            const Point2d q = t.apply(src[i]);
            r += (q.x - dst[i].x) * (q.x - dst[i].x) + (q.y - dst[i].y) * (q.y - dst[i].y);
        }
        return r;
    };
    const double r0 = residual(best);
    for (int k = 0; k < 50; ++k) {
        SimilarityTransform t = best;
        t.scale *= 1.0 + 0.01 * rng.normal();
        t.rotation += 0.01 * rng.normal();
        t.translation.x += 0.5 * rng.normal();
        t.translation.y += 0.5 * rng.normal();
        CHECK(residual(t) >= r0 - 1e-9);
    }
}

TEST_CASE("transform followed by its inverse returns the input") {
    const SimilarityTransform t{1.7, -2.1, {33.0, -12.5}};
    const SimilarityTransform inv = t.inverse();
    for (const Point2d& p : template_landmarks(640, 480).points) {
        const Point2d q = inv.apply(t.apply(p));
        CHECK(std::abs(q.x - p.x) < 1e-6);
        CHECK(std::abs(q.y - p.y) < 1e-6);
    }
}

TEST_CASE("lerp_points interpolates linearly and hits the midpoint exactly") {
    const std::vector<Point2d> a{{0.0, 0.0}, {2.0, 4.0}};
    const std::vector<Point2d> b{{10.0, 20.0}, {4.0, 8.0}};
    const auto mid = lerp_points(a, b, 0.5);
    CHECK(mid[0] == Point2d{5.0, 10.0});
    CHECK(mid[1] == Point2d{3.0, 6.0});
    CHECK(lerp_points(a, b, 0.0) == a);
    CHECK(lerp_points(a, b, 1.0) == b);
}

TEST_CASE("rescale_landmarks maps pixel centres proportionally") {
    LandmarkSet l = template_landmarks(572, 838);
    const LandmarkSet r = rescale_landmarks(l, 1024, 1024);
    CHECK(r.image_width == 1024);
    CHECK(r.image_height == 1024);
    CHECK(validate_landmarks(r));
    for (std::size_t i = 0; i < l.points.size(); ++i) {
        CHECK(r.points[i].x == doctest::Approx((l.points[i].x + 0.5) * 1024.0 / 572.0 - 0.5));
        CHECK(r.points[i].y == doctest::Approx((l.points[i].y + 0.5) * 1024.0 / 838.0 - 0.5));
    }
}

TEST_CASE("template is symmetric and mirroring is an involution") {
    const auto& m = mirror_index();
    for (int i = 0; i < kLandmarkCount; ++i) CHECK(m[m[i]] == i);
    const auto& t = unit_face_template();
    for (int i = 0; i < kLandmarkCount; ++i) {
        CHECK(t[m[i]].x == doctest::Approx(1.0 - t[i].x));
        CHECK(t[m[i]].y == doctest::Approx(t[i].y));
    }
    const LandmarkSet l = template_landmarks(101, 120);
    const LandmarkSet mm = mirror_landmarks(l);
    for (int i = 0; i < kLandmarkCount; ++i) {
        CHECK(mm.points[i].x == doctest::Approx(l.points[i].x).epsilon(1e-12));
        CHECK(mm.points[i].y == doctest::Approx(l.points[i].y));
    }
    const LandmarkSet back = mirror_landmarks(mm);
    for (int i = 0; i < kLandmarkCount; ++i) {
        CHECK(back.points[i].x == doctest::Approx(l.points[i].x).epsilon(1e-12));
        CHECK(back.points[i].y == l.points[i].y);
    }
}

}
