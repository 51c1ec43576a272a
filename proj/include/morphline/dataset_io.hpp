#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "morphline/asymmetry.hpp"
#include "morphline/fusion.hpp"
#include "morphline/ga_engine.hpp"
#include "morphline/scoring.hpp"

namespace morphline {

// ---------------------------------------------------------------------------
// Landmark sidecars: `<stem>.landmarks.json` next to the image,
// {"image": "<file name>", "width": W, "height": H, "points": [[x, y], ...]}.

std::filesystem::path sidecar_path_for(const std::filesystem::path& image_path);

/// Throws IoFailure when unreadable, InvalidConfig when malformed.
LandmarkSet read_sidecar(const std::filesystem::path& path);
void write_sidecar(const std::filesystem::path& path, const LandmarkSet& landmarks,
                   const std::string& image_name);

// ---------------------------------------------------------------------------
// Loading originals

struct LoadOptions {
    /// Used for images without a sidecar; when null such images raise MissingLandmarks.
    std::shared_ptr<const LandmarkDetector> detector;
    /// Square side images are resized to; 0 keeps the native size.
    int working_size = 1024;
    AssetPool pool = AssetPool::DrugOriginal;
    /// Prepended to the file stem to form the asset id.
    std::string id_prefix;
};

/// Loads one image with its landmarks, resized to the working size. Same errors as load_pool.
FaceAsset load_face(const std::filesystem::path& file, const LoadOptions& options);

/// PNG/JPEG files of a directory in file-name order. A detector reporting no face yields an
/// asset with empty landmarks, which the engine counts as a no-face attempt.
/// Throws IoFailure (missing directory), DecodeFailure, MissingLandmarks, DimensionMismatch
/// (sidecar size differs from the image).
std::vector<FaceAsset> load_pool(const std::filesystem::path& dir, const LoadOptions& options);

// ---------------------------------------------------------------------------
// Manifest

struct RunInfo {
    int alpha_tenths = 5;
    int max_generations = 5;
    int max_per_generation = 300;
    double p_crossover = 0.95;
    double p_mutation = 0.05;
    double forgery_threshold = 0.5;
    double anonymity_threshold = 0.6;
    std::uint64_t seed = 0;
    std::string pool_policy = "previous-generation";
    std::string anonymity_mode = "gate";
    std::string forgery_scorer = "stub";
    std::string matcher = "stub";
    std::string landmark_source = "sidecar";
    int working_size = 1024;
    bool terminated_early = false;
    std::string termination_reason;

    static RunInfo from_config(const GaConfig& cfg);

    friend bool operator==(const RunInfo&, const RunInfo&) = default;
};

struct OriginalEntry {
    std::string id;
    AssetPool pool = AssetPool::DrugOriginal;
    std::string source;

    friend bool operator==(const OriginalEntry&, const OriginalEntry&) = default;
};

/// One accepted generated image. `file` is relative to the manifest's directory.
struct ManifestRecord {
    std::string id;
    std::string file;
    int generation = 0;
    int alpha_tenths = 0;
    OpType op = OpType::Crossover;
    std::optional<std::string> drug_parent;
    std::optional<std::string> healthy_parent;
    double real_confidence = 0.0;
    double min_distance = 0.0;
    bool is_unknown = true;
    std::optional<AsymmetryReport> asymmetry;
    std::uint64_t attempt_index = 0;

    friend bool operator==(const ManifestRecord&, const ManifestRecord&) = default;
};

struct Manifest {
    RunInfo run;
    std::vector<OriginalEntry> originals;
    std::vector<std::string> gallery;
    std::vector<ManifestRecord> records;
    std::vector<AttemptRecord> attempts;
    std::vector<GenerationState> generations;

    friend bool operator==(const Manifest&, const Manifest&) = default;
};

std::string gen_directory_name(int generation);
ManifestRecord make_record(const AcceptedAsset& accepted);

std::string manifest_to_json(const Manifest& m);
Manifest manifest_from_json(const std::string& text);
/// Throws IoFailure / InvalidConfig.
Manifest read_manifest(const std::filesystem::path& path);

/// Header line plus one row per generation.
std::string stats_csv(std::span<const GenerationState> generations);

/// Writes `manifest.json` and `stats.csv` into out_dir; returns the manifest path.
std::filesystem::path write_manifest(const std::filesystem::path& out_dir, const Manifest& m);

/// Writes `gen_<g>/<id>.png` plus its sidecar; returns the path relative to out_dir.
std::string write_asset(const std::filesystem::path& out_dir, const FaceAsset& asset);

/// Writes every asset, then the manifest and stats. Identical inputs give identical bytes.
/// Throws IoFailure.
std::filesystem::path write_dataset(const std::filesystem::path& out_dir, const Manifest& m,
                                    std::span<const FaceAsset> assets);

/// Streams generations to disk as they complete so rasters need not stay in memory.
class DatasetWriter {
public:
    explicit DatasetWriter(std::filesystem::path out_dir);

    void add_generation(const GenerationResult& gen);
    /// Completes `header` with the collected records, attempts and stats and writes it.
    std::filesystem::path finish(Manifest header);

private:
    std::filesystem::path out_dir_;
    std::vector<ManifestRecord> records_;
    std::vector<AttemptRecord> attempts_;
    std::vector<GenerationState> generations_;
};

/// Reads back the generated assets of a dataset, with lineage, in manifest order.
std::vector<FaceAsset> load_dataset(const std::filesystem::path& manifest_path);

}  // namespace morphline
