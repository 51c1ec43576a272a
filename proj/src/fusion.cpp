#include "morphline/fusion.hpp"

#include <algorithm>
#include <cmath>

#include "morphline/errors.hpp"
#include "morphline/triangulation.hpp"
#include "morphline/warp.hpp"

namespace morphline {

MorphSpec MorphSpec::from_tenths(int tenths) {
    if (tenths < 0 || tenths > 10) {
        throw InvalidConfig("alpha tenths must be in [0, 10], got " + std::to_string(tenths));
    }
    MorphSpec s;
    s.tenths_ = tenths;
    s.alpha_ = tenths / 10.0;
    s.quantized_ = true;
    return s;
}

MorphSpec MorphSpec::from_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw InvalidConfig("alpha must be in [0, 1], got " + std::to_string(alpha));
    }
    const double scaled = std::round(alpha * 10.0);
    if (std::abs(alpha * 10.0 - scaled) <= 1e-9) return from_tenths(static_cast<int>(scaled));
    MorphSpec s;
    s.alpha_ = alpha;
    s.quantized_ = false;
    return s;
}

std::string_view to_string(AssetPool pool) noexcept {
    switch (pool) {
        case AssetPool::DrugOriginal: return "drug";
        case AssetPool::HealthyGan: return "healthy";
        case AssetPool::Generated: return "generated";
    }
    return "?";
}

std::string_view to_string(OpType op) noexcept {
    switch (op) {
        case OpType::Original: return "original";
        case OpType::Crossover: return "crossover";
        case OpType::Mutation: return "mutation";
    }
    return "?";
}

AssetPool parse_asset_pool(std::string_view s) {
    if (s == "drug") return AssetPool::DrugOriginal;
    if (s == "healthy") return AssetPool::HealthyGan;
    if (s == "generated") return AssetPool::Generated;
    throw InvalidConfig("unknown asset pool '" + std::string(s) + "'");
}

OpType parse_op_type(std::string_view s) {
    if (s == "original") return OpType::Original;
    if (s == "crossover") return OpType::Crossover;
    if (s == "mutation") return OpType::Mutation;
    throw InvalidConfig("unknown op type '" + std::string(s) + "'");
}

MorphResult morph_faces(const ImageRaster& drug, const LandmarkSet& drug_landmarks,
                        const ImageRaster& healthy, const LandmarkSet& healthy_landmarks, double alpha) {
    if (drug.width() != healthy.width() || drug.height() != healthy.height()) {
        throw DimensionMismatch("merge inputs differ in size");
    }
    if (!validate_landmarks(drug_landmarks) || !validate_landmarks(healthy_landmarks)) {
        throw DegenerateConfiguration("merge inputs need 68 in-bounds landmarks");
    }
    if (drug_landmarks.image_width != drug.width() || drug_landmarks.image_height != drug.height() ||
        healthy_landmarks.image_width != healthy.width() ||
        healthy_landmarks.image_height != healthy.height()) {
        throw DimensionMismatch("landmarks were annotated on a different image size");
    }
    const int w = drug.width();
    const int h = drug.height();

    MorphResult result;
    result.landmarks = {lerp_points(healthy_landmarks.points, drug_landmarks.points, alpha), w, h};

    const TriangleMesh target = triangulate(result.landmarks.points, w, h);
    const double wd = alpha;
    const double wh = 1.0 - alpha;

    ImageF warped_drug, warped_healthy;
    if (wd != 0.0) warped_drug = warp_piecewise_affine(ImageF(drug), with_vertices(target, drug_landmarks.points, w, h), target);
    if (wh != 0.0) warped_healthy = warp_piecewise_affine(ImageF(healthy), with_vertices(target, healthy_landmarks.points, w, h), target);

    result.raster = ImageRaster(w, h);
    auto out = result.raster.samples();
    for (std::size_t i = 0; i < out.size(); ++i) {
        double v = 0.0;
        if (wd != 0.0) v += wd * warped_drug.samples()[i];
        if (wh != 0.0) v += wh * warped_healthy.samples()[i];
        out[i] = round_half_up_u8(v);
    }
    return result;
}

FaceAsset face_merge(const FaceAsset& drug, const FaceAsset& healthy, const MorphSpec& spec,
                     const MergeOptions& options) {
    if (!validate_landmarks(drug.landmarks) || !validate_landmarks(healthy.landmarks)) {
        throw DegenerateConfiguration("merge parents need 68 in-bounds landmarks");
    }
    const int w = drug.raster.width();
    const int h = drug.raster.height();
    const bool same_size = healthy.raster.width() == w && healthy.raster.height() == h;
    if (!same_size && !options.resize_healthy) {
        throw DimensionMismatch("parents '" + drug.id + "' and '" + healthy.id + "' differ in size");
    }

    MorphResult merged;
    if (same_size) {
        merged = morph_faces(drug.raster, drug.landmarks, healthy.raster, healthy.landmarks, spec.alpha());
    } else {
        merged = morph_faces(drug.raster, drug.landmarks, resize_bilinear(healthy.raster, w, h),
                             rescale_landmarks(healthy.landmarks, w, h), spec.alpha());
    }

    FaceAsset child;
    child.id = options.id;
    child.raster = std::move(merged.raster);
    child.landmarks = std::move(merged.landmarks);
    child.pool = AssetPool::Generated;
    child.generation = std::max(drug.generation, healthy.generation) + 1;
    child.parents = Lineage{drug.id, healthy.id, spec, options.op};
    return child;
}

}  // namespace morphline
