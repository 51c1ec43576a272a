#include "morphline/scoring.hpp"

#include <stdlib.h>
#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <json.hpp>

#include "morphline/errors.hpp"
#include "morphline/image_io.hpp"
#include "morphline/landmark_template.hpp"
#include "morphline/subprocess.hpp"

namespace morphline {

namespace {

using nlohmann::json;

/// PNG copy of a raster in the temp directory, removed on destruction.
class TempImage {
public:
    explicit TempImage(const ImageRaster& img) {
        std::string tmpl = (std::filesystem::temp_directory_path() / "morphline-XXXXXX.png").string();
        const int fd = mkstemps(tmpl.data(), 4);
        if (fd < 0) throw AdapterFailure("cannot create temporary image file");
        close(fd);
        path_ = tmpl;
        write_png(img, path_);
    }
    ~TempImage() {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
    TempImage(const TempImage&) = delete;
    TempImage& operator=(const TempImage&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
};

CommandResult run_adapter(const ScorerBinding& b, const ImageRaster& img, const std::string& what) {
    b.validate();
    if (b.kind != ScorerKind::ExternalCommand) throw InvalidConfig(what + " binding is not external");
    const TempImage tmp(img);
    CommandResult r = run_command(b.command, std::filesystem::absolute(tmp.path()).string(), b.timeout);
    if (r.timed_out) throw AdapterFailure(what + " adapter timed out: " + b.command);
    return r;
}

json parse_adapter_output(const CommandResult& r, const std::string& what, const std::string& command) {
    if (r.exit_code != 0) {
        throw AdapterFailure(what + " adapter exited with code " + std::to_string(r.exit_code) + ": " + command,
                             r.exit_code);
    }
    json j;
    try {
        j = json::parse(r.standard_output);
    } catch (const json::exception& e) {
        throw AdapterFailure(what + " adapter wrote malformed JSON: " + e.what());
    }
    if (!j.is_object()) throw AdapterFailure(what + " adapter output is not a JSON object");
    return j;
}

double finite_number(const json& j, const char* key, const std::string& what) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_number()) {
        throw AdapterFailure(what + " adapter output lacks numeric '" + key + "'");
    }
    const double v = it->get<double>();
    if (!std::isfinite(v)) throw AdapterFailure(what + " adapter returned a non-finite value");
    return v;
}

void check_probability_threshold(double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw InvalidThreshold("forgery threshold must be in [0, 1], got " + std::to_string(threshold));
    }
}

}  // namespace

ScorerBinding ScorerBinding::external(std::string command, std::chrono::milliseconds timeout) {
    ScorerBinding b;
    b.kind = ScorerKind::ExternalCommand;
    b.command = std::move(command);
    b.timeout = timeout;
    b.validate();
    return b;
}

void ScorerBinding::validate() const {
    if (kind == ScorerKind::ExternalCommand && command.empty()) {
        throw InvalidConfig("external scorer binding requires a command");
    }
    if (timeout.count() <= 0) throw InvalidConfig("scorer timeout must be positive");
}

// ---------------------------------------------------------------------------
// Forgery

ForgeryScore make_forgery_score(double real_confidence, double threshold) {
    check_probability_threshold(threshold);
    if (!(real_confidence >= 0.0 && real_confidence <= 1.0)) {
        throw AdapterFailure("real_confidence outside [0, 1]: " + std::to_string(real_confidence));
    }
    return {real_confidence, real_confidence >= threshold ? Verdict::Real : Verdict::Fake, threshold};
}

double laplacian_variance(const GrayImage& g) {
    if (g.width < 3 || g.height < 3) return 0.0;
    double sum = 0.0, sum_sq = 0.0;
    const double n = static_cast<double>(g.width - 2) * (g.height - 2);
    for (int y = 1; y < g.height - 1; ++y) {
        for (int x = 1; x < g.width - 1; ++x) {
            const double lap = g.at(x - 1, y) + g.at(x + 1, y) + g.at(x, y - 1) + g.at(x, y + 1) - 4.0 * g.at(x, y);
            sum += lap;
            sum_sq += lap * lap;
        }
    }
    const double mean = sum / n;
    return std::max(0.0, sum_sq / n - mean * mean);
}

SharpnessForgeryStub::SharpnessForgeryStub(SharpnessStubParams params) : params_(params) {
    if (!(params_.scale > 0.0) || !std::isfinite(params_.midpoint)) {
        throw InvalidConfig("sharpness stub needs a finite midpoint and a positive scale");
    }
}

double SharpnessForgeryStub::real_confidence(const ImageRaster& img) const {
    const double s = laplacian_variance(to_gray(img));
    return 1.0 / (1.0 + std::exp(-(s - params_.midpoint) / params_.scale));
}

ExternalForgeryScorer::ExternalForgeryScorer(ScorerBinding binding) : binding_(std::move(binding)) {
    binding_.validate();
}

double ExternalForgeryScorer::real_confidence(const ImageRaster& img) const {
    const CommandResult r = run_adapter(binding_, img, "forgery");
    const json j = parse_adapter_output(r, "forgery", binding_.command);
    const double p = finite_number(j, "real_confidence", "forgery");
    if (p < 0.0 || p > 1.0) throw AdapterFailure("forgery adapter real_confidence outside [0, 1]");
    return p;
}

std::shared_ptr<const ForgeryScorer> make_forgery_scorer(const ScorerBinding& binding,
                                                         const SharpnessStubParams& stub_params) {
    binding.validate();
    if (binding.kind == ScorerKind::ExternalCommand) return std::make_shared<ExternalForgeryScorer>(binding);
    return std::make_shared<SharpnessForgeryStub>(stub_params);
}

ForgeryScore score_forgery(const ImageRaster& img, const ForgeryScorer& scorer, double threshold) {
    check_probability_threshold(threshold);
    return make_forgery_score(scorer.real_confidence(img), threshold);
}

ForgeryScore score_forgery(const ImageRaster& img, const ScorerBinding& binding, double threshold,
                           const SharpnessStubParams& stub_params) {
    check_probability_threshold(threshold);
    return score_forgery(img, *make_forgery_scorer(binding, stub_params), threshold);
}

// ---------------------------------------------------------------------------
// Anonymity

std::vector<double> CropEmbeddingStub::embed(const ImageRaster& img, const LandmarkSet& landmarks) const {
    constexpr int kCanonical = 64;
    constexpr int kCell = kCanonical / kSide;
    const LandmarkSet canonical = template_landmarks(kCanonical, kCanonical);
    const SimilarityTransform to_image = estimate_similarity(canonical, landmarks);
    const GrayImage gray = to_gray(img);

    std::vector<double> e(static_cast<std::size_t>(kSide) * kSide, 0.0);
    for (int cy = 0; cy < kSide; ++cy) {
        for (int cx = 0; cx < kSide; ++cx) {
            double acc = 0.0;
            for (int sy = 0; sy < kCell; ++sy) {
                for (int sx = 0; sx < kCell; ++sx) {
                    const Point2d p = to_image.apply({static_cast<double>(cx * kCell + sx),
                                                      static_cast<double>(cy * kCell + sy)});
                    acc += gray.sample(p.x, p.y);
                }
            }
            e[static_cast<std::size_t>(cy) * kSide + cx] = acc / (kCell * kCell);
        }
    }
    double mean = 0.0;
    for (double v : e) mean += v;
    mean /= static_cast<double>(e.size());
    double norm = 0.0;
    for (double& v : e) {
        v -= mean;
        norm += v * v;
    }
    norm = std::sqrt(norm);
    if (norm < 1e-12) {
        // Featureless crop: fall back to the constant unit vector.
        std::fill(e.begin(), e.end(), 1.0 / kSide);
        return e;
    }
    for (double& v : e) v /= norm;
    return e;
}

ExternalEmbedder::ExternalEmbedder(ScorerBinding binding) : binding_(std::move(binding)) { binding_.validate(); }

std::vector<double> ExternalEmbedder::embed(const ImageRaster& img, const LandmarkSet&) const {
    const CommandResult r = run_adapter(binding_, img, "embedding");
    const json j = parse_adapter_output(r, "embedding", binding_.command);
    const auto it = j.find("embedding");
    if (it == j.end() || !it->is_array() || it->empty()) {
        throw AdapterFailure("embedding adapter output lacks a non-empty 'embedding' array");
    }
    std::vector<double> e;
    e.reserve(it->size());
    for (const json& v : *it) {
        if (!v.is_number()) throw AdapterFailure("embedding adapter returned a non-numeric component");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw AdapterFailure("embedding adapter returned a non-finite component");
        e.push_back(d);
    }
    return e;
}

std::shared_ptr<const EmbeddingModel> make_embedding_model(const ScorerBinding& binding) {
    binding.validate();
    if (binding.kind == ScorerKind::ExternalCommand) return std::make_shared<ExternalEmbedder>(binding);
    return std::make_shared<CropEmbeddingStub>();
}

EmbeddingGallery::EmbeddingGallery(std::shared_ptr<const EmbeddingModel> model) : model_(std::move(model)) {
    if (!model_) throw InvalidConfig("gallery needs an embedding model");
}

void EmbeddingGallery::add(std::string id, std::vector<double> embedding) {
    if (embedding.empty()) throw InvalidConfig("empty embedding for '" + id + "'");
    if (!entries_.empty() && entries_.begin()->second.size() != embedding.size()) {
        throw InvalidConfig("embedding for '" + id + "' has a different dimension");
    }
    if (!entries_.emplace(id, std::move(embedding)).second) {
        throw InvalidConfig("duplicate gallery id '" + id + "'");
    }
}

EmbeddingGallery build_gallery(std::span<const FaceAsset> assets, std::shared_ptr<const EmbeddingModel> model) {
    if (assets.empty()) throw EmptyPool("cannot build a gallery from zero assets");
    EmbeddingGallery gallery(std::move(model));
    for (const FaceAsset& a : assets) gallery.add(a.id, gallery.embed(a.raster, a.landmarks));
    return gallery;
}

EmbeddingGallery build_gallery(std::span<const FaceAsset> assets, const ScorerBinding& binding) {
    return build_gallery(assets, make_embedding_model(binding));
}

AnonymityReport match_embedding(std::span<const double> probe, const EmbeddingGallery& gallery, double threshold) {
    if (!std::isfinite(threshold) || threshold < 0.0) {
        throw InvalidThreshold("anonymity threshold must be finite and non-negative");
    }
    if (gallery.empty()) throw EmptyPool("anonymity gallery is empty");

    AnonymityReport report;
    report.threshold_used = threshold;
    double best = std::numeric_limits<double>::infinity();
    const std::string* best_id = nullptr;
    // std::map iterates ids in ascending order, so strict '<' keeps the smallest id on ties.
    for (const auto& [id, e] : gallery.entries()) {
        if (e.size() != probe.size()) {
            throw DimensionMismatch("probe embedding has " + std::to_string(probe.size()) +
                                    " components, gallery has " + std::to_string(e.size()));
        }
        double d2 = 0.0;
        for (std::size_t i = 0; i < e.size(); ++i) {
            const double d = probe[i] - e[i];
            d2 += d * d;
        }
        const double d = std::sqrt(d2);
        if (d < best) {
            best = d;
            best_id = &id;
        }
    }
    report.min_distance = best;
    report.is_unknown = best > threshold;
    if (!report.is_unknown) report.matched_id = *best_id;
    return report;
}

AnonymityReport check_anonymity(const ImageRaster& img, const LandmarkSet& landmarks,
                                const EmbeddingGallery& gallery, double threshold) {
    if (!std::isfinite(threshold) || threshold < 0.0) {
        throw InvalidThreshold("anonymity threshold must be finite and non-negative");
    }
    const std::vector<double> probe = gallery.embed(img, landmarks);
    return match_embedding(probe, gallery, threshold);
}

// ---------------------------------------------------------------------------
// Landmarks

LandmarkSet TemplateLandmarkStub::detect(const ImageRaster& img) const {
    return template_landmarks(img.width(), img.height());
}

ExternalLandmarkDetector::ExternalLandmarkDetector(ScorerBinding binding) : binding_(std::move(binding)) {
    binding_.validate();
}

LandmarkSet ExternalLandmarkDetector::detect(const ImageRaster& img) const {
    const CommandResult r = run_adapter(binding_, img, "landmarks");
    if (r.exit_code == kNoFaceExitCode) throw NoFaceFound("landmarks adapter found no face");
    const json j = parse_adapter_output(r, "landmarks", binding_.command);
    const auto it = j.find("points");
    if (it == j.end() || !it->is_array()) throw AdapterFailure("landmarks adapter output lacks 'points'");
    if (it->empty()) throw NoFaceFound("landmarks adapter found no face");
    if (it->size() != static_cast<std::size_t>(kLandmarkCount)) {
        throw AdapterFailure("landmarks adapter returned " + std::to_string(it->size()) + " points, expected 68");
    }
    LandmarkSet l{{}, img.width(), img.height()};
    for (const json& p : *it) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
            throw AdapterFailure("landmarks adapter point is not an [x, y] pair");
        }
        l.points.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    if (!validate_landmarks(l)) throw AdapterFailure("landmarks adapter returned out-of-bounds points");
    return l;
}

std::shared_ptr<const LandmarkDetector> make_landmark_detector(const ScorerBinding& binding) {
    binding.validate();
    if (binding.kind == ScorerKind::ExternalCommand) return std::make_shared<ExternalLandmarkDetector>(binding);
    return std::make_shared<TemplateLandmarkStub>();
}

LandmarkSet detect_landmarks(const ImageRaster& img, const ScorerBinding& binding) {
    return make_landmark_detector(binding)->detect(img);
}

}  // namespace morphline
