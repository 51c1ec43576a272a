#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "morphline/geometry.hpp"
#include "morphline/image.hpp"

namespace morphline {

/// Fusion coefficient: the fraction of the drug face in a merge. Grid values are kept as an
/// integer number of tenths so 0.3 round-trips exactly through filenames and manifests.
class MorphSpec {
public:
    MorphSpec() = default;

    /// Throws InvalidConfig unless 0 <= tenths <= 10.
    static MorphSpec from_tenths(int tenths);
    /// Throws InvalidConfig unless alpha is in [0, 1]. Values within 1e-9 of the 0.1 grid snap to it.
    static MorphSpec from_alpha(double alpha);

    double alpha() const noexcept { return quantized_ ? tenths_ / 10.0 : alpha_; }
    bool quantized() const noexcept { return quantized_; }
    std::optional<int> tenths() const noexcept {
        return quantized_ ? std::optional<int>(tenths_) : std::nullopt;
    }

    friend bool operator==(const MorphSpec&, const MorphSpec&) = default;

private:
    double alpha_ = 0.0;
    int tenths_ = 0;
    bool quantized_ = true;
};

enum class AssetPool { DrugOriginal, HealthyGan, Generated };
enum class OpType { Original, Crossover, Mutation };

std::string_view to_string(AssetPool pool) noexcept;
std::string_view to_string(OpType op) noexcept;
AssetPool parse_asset_pool(std::string_view s);
OpType parse_op_type(std::string_view s);

struct Lineage {
    std::string drug_parent;
    std::string healthy_parent;
    MorphSpec alpha;
    OpType op = OpType::Crossover;

    friend bool operator==(const Lineage&, const Lineage&) = default;
};

/// One individual of the population: a face image, its landmarks and where it came from.
struct FaceAsset {
    std::string id;
    ImageRaster raster;
    LandmarkSet landmarks;
    AssetPool pool = AssetPool::DrugOriginal;
    int generation = 0;
    std::optional<Lineage> parents;
};

struct MorphResult {
    ImageRaster raster;
    LandmarkSet landmarks;
};

/// Intermediate-shape morph: both images are warped onto alpha * drug + (1 - alpha) * healthy
/// landmarks over one shared Delaunay topology, then cross-dissolved with the same weight.
/// The healthy image must already have the drug image's dimensions.
MorphResult morph_faces(const ImageRaster& drug, const LandmarkSet& drug_landmarks,
                        const ImageRaster& healthy, const LandmarkSet& healthy_landmarks, double alpha);

struct MergeOptions {
    std::string id;
    OpType op = OpType::Crossover;
    /// Resize the healthy parent to the drug parent's size when they differ.
    bool resize_healthy = true;
};

/// Produces a Generated asset with lineage and generation = max(parent generations) + 1.
/// Throws DegenerateConfiguration on invalid landmarks, DimensionMismatch when sizes differ
/// and resizing is disabled.
FaceAsset face_merge(const FaceAsset& drug, const FaceAsset& healthy, const MorphSpec& spec,
                     const MergeOptions& options = {});

}  // namespace morphline
