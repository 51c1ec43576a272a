#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "morphline/asymmetry.hpp"
#include "morphline/fusion.hpp"
#include "morphline/random.hpp"
#include "morphline/scoring.hpp"

namespace morphline {

enum class PoolPolicy { OriginalsOnly, PreviousGeneration, Cumulative };
enum class AnonymityMode { Gate, PostHoc };
enum class ScorerFailurePolicy { Abort, CountAsRejected };

std::string_view to_string(PoolPolicy p) noexcept;
std::string_view to_string(AnonymityMode m) noexcept;
PoolPolicy parse_pool_policy(std::string_view s);
AnonymityMode parse_anonymity_mode(std::string_view s);

struct GaConfig {
    MorphSpec alpha = MorphSpec::from_tenths(5);
    int max_generations = 5;
    int max_per_generation = 300;
    double p_crossover = 0.95;
    double p_mutation = 0.05;
    double forgery_threshold = 0.5;
    double anonymity_threshold = 0.6;
    std::uint64_t seed = 0;
    PoolPolicy pool_policy = PoolPolicy::PreviousGeneration;
    AnonymityMode anonymity_mode = AnonymityMode::Gate;
    ScorerFailurePolicy on_scorer_error = ScorerFailurePolicy::Abort;
    /// Upper bound on concurrently evaluated candidates; results do not depend on it.
    int jobs = 1;

    /// Throws InvalidConfig / InvalidThreshold.
    void validate() const;
};

/// Counters for one generation; attempted == accepted + all rejections.
struct GenerationState {
    int generation_index = 0;
    int alpha_tenths = 0;
    int accepted_count = 0;
    int attempted_count = 0;
    int rejected_forgery = 0;
    int rejected_recognized = 0;
    int rejected_no_face = 0;

    friend bool operator==(const GenerationState&, const GenerationState&) = default;
};

enum class AttemptOutcome { Accepted, RejectedForgery, RejectedRecognized, RejectedNoFace };

std::string_view to_string(AttemptOutcome o) noexcept;
AttemptOutcome parse_attempt_outcome(std::string_view s);

/// Audit row for every candidate the engine evaluated, accepted or not.
struct AttemptRecord {
    int generation = 0;
    std::uint64_t attempt_index = 0;
    std::string drug_parent;
    std::string healthy_parent;
    OpType op = OpType::Crossover;
    int alpha_tenths = 0;
    std::optional<double> real_confidence;
    std::optional<double> min_distance;
    std::optional<bool> is_unknown;
    AttemptOutcome outcome = AttemptOutcome::RejectedNoFace;
    std::string asset_id;
    std::string error;

    friend bool operator==(const AttemptRecord&, const AttemptRecord&) = default;
};

struct AcceptedAsset {
    FaceAsset asset;
    ForgeryScore forgery;
    AnonymityReport anonymity;
    std::uint64_t attempt_index = 0;
    std::optional<AsymmetryReport> asymmetry;
};

struct GenerationResult {
    GenerationState stats;
    std::vector<AcceptedAsset> accepted;
    std::vector<AttemptRecord> attempts;
};

/// Picks Crossover with probability p_crossover, otherwise Mutation.
OpType choose_operation(RandomStream& rng, double p_crossover = 0.95);

/// Uniform over {0.0, 0.1, ..., 1.0}.
MorphSpec draw_mutation_alpha(RandomStream& rng);

/// Id of a generated asset, e.g. "g2_a05_000137".
std::string generated_asset_id(int generation, int alpha_tenths, std::uint64_t attempt_index);

/// One pass of pairing, fusion and selection over drug x healthy pairs in seeded shuffled
/// order, stopping at cfg.max_per_generation accepted or when pairs run out.
/// Throws EmptyPool when either pool is empty.
GenerationResult run_generation(std::span<const FaceAsset* const> drug_pool,
                                std::span<const FaceAsset* const> healthy_pool, const GaConfig& cfg,
                                int generation, const ForgeryScorer& forgery, const EmbeddingGallery& gallery);
GenerationResult run_generation(std::span<const FaceAsset> drug_pool, std::span<const FaceAsset> healthy_pool,
                                const GaConfig& cfg, int generation, const ForgeryScorer& forgery,
                                const EmbeddingGallery& gallery);

struct Scorers {
    std::shared_ptr<const ForgeryScorer> forgery;
    std::shared_ptr<const EmbeddingModel> embedder;
};

struct EvolutionOptions {
    /// Added to the anonymity gallery next to the drug originals (ids prefixed "extra/").
    std::vector<FaceAsset> extra_gallery;
    /// Score accepted assets with asymmetry_report.
    bool compute_asymmetry = false;
    /// Called after each generation, in order.
    std::function<void(const GenerationResult&)> on_generation;
    /// When false, rasters in the returned result are released after on_generation runs.
    bool retain_rasters = true;
};

struct EvolutionResult {
    std::vector<GenerationResult> generations;
    std::vector<std::string> gallery_ids;
    bool terminated_early = false;
    std::string termination_reason;
};

/// Runs max_generations generations. Parent pools follow cfg.pool_policy; with
/// PreviousGeneration, generation g > 1 pairs survivors of g - 1 with healthy originals
/// plus the same survivors. Stops early, recording why, when a required pool is empty.
EvolutionResult run_evolution(const GaConfig& cfg, std::span<const FaceAsset> drug_originals,
                              std::span<const FaceAsset> healthy_originals, const Scorers& scorers,
                              const EvolutionOptions& options = {});

}  // namespace morphline
