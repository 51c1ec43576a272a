#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "morphline/fusion.hpp"
#include "morphline/geometry.hpp"
#include "morphline/image.hpp"

namespace morphline {

enum class ScorerKind { BuiltinStub, ExternalCommand };

/// How a scorer is provided. External commands follow the adapter protocol: the engine runs
/// `<command> <absolute-image-path>` and reads one JSON object from standard output.
struct ScorerBinding {
    ScorerKind kind = ScorerKind::BuiltinStub;
    std::string command;
    std::chrono::milliseconds timeout{60'000};

    static ScorerBinding stub() { return {}; }
    static ScorerBinding external(std::string command,
                                  std::chrono::milliseconds timeout = std::chrono::milliseconds{60'000});

    /// Throws InvalidConfig when an external binding has no command.
    void validate() const;
};

// ---------------------------------------------------------------------------
// Forgery

enum class Verdict { Real, Fake };

struct ForgeryScore {
    double real_confidence = 0.0;
    Verdict verdict = Verdict::Fake;
    double threshold_used = 0.5;
};

/// Applies the verdict rule Real iff confidence >= threshold. Throws InvalidThreshold.
ForgeryScore make_forgery_score(double real_confidence, double threshold);

/// Logistic calibration of the sharpness stub: confidence = 1 / (1 + exp(-(s - midpoint) / scale)),
/// s being the variance of the 3x3 Laplacian of the luma image. Defaults are tuned to the
/// synthetic corpus at 256 px.
struct SharpnessStubParams {
    double midpoint = 60.0;
    double scale = 8.0;
};

/// Variance of the 4-neighbour Laplacian over interior pixels.
double laplacian_variance(const GrayImage& gray);

class ForgeryScorer {
public:
    virtual ~ForgeryScorer() = default;
    /// Probability-like confidence in [0, 1] that the image is real.
    virtual double real_confidence(const ImageRaster& img) const = 0;
};

class SharpnessForgeryStub final : public ForgeryScorer {
public:
    explicit SharpnessForgeryStub(SharpnessStubParams params = {});
    double real_confidence(const ImageRaster& img) const override;
    const SharpnessStubParams& params() const noexcept { return params_; }

private:
    SharpnessStubParams params_;
};

class ExternalForgeryScorer final : public ForgeryScorer {
public:
    explicit ExternalForgeryScorer(ScorerBinding binding);
    double real_confidence(const ImageRaster& img) const override;

private:
    ScorerBinding binding_;
};

std::shared_ptr<const ForgeryScorer> make_forgery_scorer(const ScorerBinding& binding,
                                                         const SharpnessStubParams& stub_params = {});

ForgeryScore score_forgery(const ImageRaster& img, const ForgeryScorer& scorer, double threshold);
ForgeryScore score_forgery(const ImageRaster& img, const ScorerBinding& binding, double threshold,
                           const SharpnessStubParams& stub_params = {});

// ---------------------------------------------------------------------------
// Anonymity

class EmbeddingModel {
public:
    virtual ~EmbeddingModel() = default;
    virtual std::vector<double> embed(const ImageRaster& img, const LandmarkSet& landmarks) const = 0;
};

/// 16x16 luma thumbnail of the landmark-aligned face, mean-removed and L2-normalized.
class CropEmbeddingStub final : public EmbeddingModel {
public:
    static constexpr int kSide = 16;
    std::vector<double> embed(const ImageRaster& img, const LandmarkSet& landmarks) const override;
};

class ExternalEmbedder final : public EmbeddingModel {
public:
    explicit ExternalEmbedder(ScorerBinding binding);
    std::vector<double> embed(const ImageRaster& img, const LandmarkSet& landmarks) const override;

private:
    ScorerBinding binding_;
};

std::shared_ptr<const EmbeddingModel> make_embedding_model(const ScorerBinding& binding);

struct AnonymityReport {
    double min_distance = 0.0;
    std::optional<std::string> matched_id;
    bool is_unknown = false;
    double threshold_used = 0.0;
};

/// Immutable-after-build set of reference embeddings keyed by asset id, plus the model
/// that produced them (used to embed probes).
class EmbeddingGallery {
public:
    explicit EmbeddingGallery(std::shared_ptr<const EmbeddingModel> model);

    /// Throws InvalidConfig on duplicate id or dimension change.
    void add(std::string id, std::vector<double> embedding);

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    const std::map<std::string, std::vector<double>>& entries() const noexcept { return entries_; }
    const EmbeddingModel& model() const { return *model_; }

    std::vector<double> embed(const ImageRaster& img, const LandmarkSet& landmarks) const {
        return model_->embed(img, landmarks);
    }

private:
    std::shared_ptr<const EmbeddingModel> model_;
    std::map<std::string, std::vector<double>> entries_;
};

EmbeddingGallery build_gallery(std::span<const FaceAsset> assets, std::shared_ptr<const EmbeddingModel> model);
EmbeddingGallery build_gallery(std::span<const FaceAsset> assets, const ScorerBinding& binding);

/// Nearest gallery entry by L2 distance; ties go to the lexicographically smallest id.
/// Throws InvalidThreshold for negative or non-finite thresholds, EmptyPool for an empty gallery.
AnonymityReport match_embedding(std::span<const double> probe, const EmbeddingGallery& gallery,
                                double threshold);
AnonymityReport check_anonymity(const ImageRaster& img, const LandmarkSet& landmarks,
                                const EmbeddingGallery& gallery, double threshold);

// ---------------------------------------------------------------------------
// Landmarks

class LandmarkDetector {
public:
    virtual ~LandmarkDetector() = default;
    virtual LandmarkSet detect(const ImageRaster& img) const = 0;
};

/// Returns the mean-shape template scaled to the image; for tests and synthetic data only.
class TemplateLandmarkStub final : public LandmarkDetector {
public:
    LandmarkSet detect(const ImageRaster& img) const override;
};

class ExternalLandmarkDetector final : public LandmarkDetector {
public:
    /// Exit status an adapter uses to report that no face was found.
    static constexpr int kNoFaceExitCode = 4;

    explicit ExternalLandmarkDetector(ScorerBinding binding);
    LandmarkSet detect(const ImageRaster& img) const override;

private:
    ScorerBinding binding_;
};

std::shared_ptr<const LandmarkDetector> make_landmark_detector(const ScorerBinding& binding);

LandmarkSet detect_landmarks(const ImageRaster& img, const ScorerBinding& binding);

}  // namespace morphline
