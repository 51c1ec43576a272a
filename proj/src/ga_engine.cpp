#include "morphline/ga_engine.hpp"

#include <cmath>
#include <cstdio>
#include <deque>
#include <exception>
#include <future>

#include "morphline/errors.hpp"

namespace morphline {

namespace {

constexpr std::uint64_t kShuffleStream = 0x5348554646ULL;  // "SHUFF"
constexpr std::uint64_t kCandidateStream = 0x43414E44ULL;  // "CAND"

struct Candidate {
    AttemptRecord record;
    std::optional<AcceptedAsset> accepted;
    std::exception_ptr error;
};

template <class Fn>
auto guarded_score(Fn&& fn, const GaConfig& cfg, AttemptRecord& rec, AttemptOutcome reject_as)
    -> std::optional<decltype(fn())> {
    try {
        return fn();
    } catch (const AdapterFailure& e) {
        if (cfg.on_scorer_error == ScorerFailurePolicy::Abort) throw;
        rec.outcome = reject_as;
        rec.error = e.what();
        return std::nullopt;
    }
}

Candidate evaluate(const FaceAsset& drug, const FaceAsset& healthy, const GaConfig& cfg, int generation,
                   std::uint64_t attempt, const ForgeryScorer& forgery, const EmbeddingGallery& gallery) {
    Candidate c;
    AttemptRecord& rec = c.record;
    rec.generation = generation;
    rec.attempt_index = attempt;
    rec.drug_parent = drug.id;
    rec.healthy_parent = healthy.id;
    rec.op = OpType::Crossover;
    rec.alpha_tenths = *cfg.alpha.tenths();

    if (!validate_landmarks(drug.landmarks) || !validate_landmarks(healthy.landmarks)) {
        rec.outcome = AttemptOutcome::RejectedNoFace;
        return c;
    }

    RandomStream rng(derive_seed(cfg.seed, {kCandidateStream, static_cast<std::uint64_t>(generation), attempt}));
    const OpType op = choose_operation(rng, cfg.p_crossover);
    const MorphSpec spec = op == OpType::Crossover ? cfg.alpha : draw_mutation_alpha(rng);
    rec.op = op;
    rec.alpha_tenths = *spec.tenths();

    const std::string id = generated_asset_id(generation, rec.alpha_tenths, attempt);
    FaceAsset child = face_merge(drug, healthy, spec, {id, op, true});
    child.generation = generation;

    const auto fs = guarded_score([&] { return score_forgery(child.raster, forgery, cfg.forgery_threshold); },
                                  cfg, rec, AttemptOutcome::RejectedForgery);
    if (!fs) return c;
    const auto an = guarded_score(
        [&] { return check_anonymity(child.raster, child.landmarks, gallery, cfg.anonymity_threshold); }, cfg, rec,
        AttemptOutcome::RejectedRecognized);
    if (!an) {
        rec.real_confidence = fs->real_confidence;
        return c;
    }
    rec.real_confidence = fs->real_confidence;
    rec.min_distance = an->min_distance;
    rec.is_unknown = an->is_unknown;

    if (fs->verdict == Verdict::Fake) {
        rec.outcome = AttemptOutcome::RejectedForgery;
    } else if (cfg.anonymity_mode == AnonymityMode::Gate && !an->is_unknown) {
        rec.outcome = AttemptOutcome::RejectedRecognized;
    } else {
        rec.outcome = AttemptOutcome::Accepted;
        rec.asset_id = id;
        c.accepted = AcceptedAsset{std::move(child), *fs, *an, attempt, std::nullopt};
    }
    return c;
}

void count(GenerationState& s, AttemptOutcome o) {
    ++s.attempted_count;
    switch (o) {
        case AttemptOutcome::Accepted: ++s.accepted_count; break;
        case AttemptOutcome::RejectedForgery: ++s.rejected_forgery; break;
        case AttemptOutcome::RejectedRecognized: ++s.rejected_recognized; break;
        case AttemptOutcome::RejectedNoFace: ++s.rejected_no_face; break;
    }
}

std::vector<const FaceAsset*> pointers(std::span<const FaceAsset> v) {
    std::vector<const FaceAsset*> out;
    out.reserve(v.size());
    for (const FaceAsset& a : v) out.push_back(&a);
    return out;
}

}  // namespace

std::string_view to_string(PoolPolicy p) noexcept {
    switch (p) {
        case PoolPolicy::OriginalsOnly: return "originals-only";
        case PoolPolicy::PreviousGeneration: return "previous-generation";
        case PoolPolicy::Cumulative: return "cumulative";
    }
    return "?";
}

std::string_view to_string(AnonymityMode m) noexcept {
    return m == AnonymityMode::Gate ? "gate" : "posthoc";
}

PoolPolicy parse_pool_policy(std::string_view s) {
    if (s == "originals-only") return PoolPolicy::OriginalsOnly;
    if (s == "previous-generation") return PoolPolicy::PreviousGeneration;
    if (s == "cumulative") return PoolPolicy::Cumulative;
    throw InvalidConfig("unknown pool policy '" + std::string(s) + "'");
}

AnonymityMode parse_anonymity_mode(std::string_view s) {
    if (s == "gate") return AnonymityMode::Gate;
    if (s == "posthoc") return AnonymityMode::PostHoc;
    throw InvalidConfig("unknown anonymity mode '" + std::string(s) + "'");
}

std::string_view to_string(AttemptOutcome o) noexcept {
    switch (o) {
        case AttemptOutcome::Accepted: return "accepted";
        case AttemptOutcome::RejectedForgery: return "rejected_forgery";
        case AttemptOutcome::RejectedRecognized: return "rejected_recognized";
        case AttemptOutcome::RejectedNoFace: return "rejected_no_face";
    }
    return "?";
}

AttemptOutcome parse_attempt_outcome(std::string_view s) {
    if (s == "accepted") return AttemptOutcome::Accepted;
    if (s == "rejected_forgery") return AttemptOutcome::RejectedForgery;
    if (s == "rejected_recognized") return AttemptOutcome::RejectedRecognized;
    if (s == "rejected_no_face") return AttemptOutcome::RejectedNoFace;
    throw InvalidConfig("unknown attempt outcome '" + std::string(s) + "'");
}

void GaConfig::validate() const {
    if (!alpha.quantized()) throw InvalidConfig("run alpha must lie on the 0.1 grid");
    if (max_generations < 1) throw InvalidConfig("max_generations must be >= 1");
    if (max_per_generation < 1) throw InvalidConfig("max_per_generation must be >= 1");
    if (!(p_crossover >= 0.0 && p_crossover <= 1.0 && p_mutation >= 0.0 && p_mutation <= 1.0)) {
        throw InvalidConfig("operation probabilities must lie in [0, 1]");
    }
    if (std::abs(p_crossover + p_mutation - 1.0) > 1e-12) {
        throw InvalidConfig("p_crossover + p_mutation must equal 1");
    }
    if (!(forgery_threshold >= 0.0 && forgery_threshold <= 1.0)) {
        throw InvalidThreshold("forgery threshold must be in [0, 1]");
    }
    if (!std::isfinite(anonymity_threshold) || anonymity_threshold < 0.0) {
        throw InvalidThreshold("anonymity threshold must be finite and non-negative");
    }
    if (jobs < 1) throw InvalidConfig("jobs must be >= 1");
}

OpType choose_operation(RandomStream& rng, double p_crossover) {
    return rng.uniform01() < p_crossover ? OpType::Crossover : OpType::Mutation;
}

MorphSpec draw_mutation_alpha(RandomStream& rng) {
    return MorphSpec::from_tenths(static_cast<int>(rng.below(11)));
}

std::string generated_asset_id(int generation, int alpha_tenths, std::uint64_t attempt_index) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "g%d_a%02d_%06llu", generation, alpha_tenths,
                  static_cast<unsigned long long>(attempt_index));
    return buf;
}

GenerationResult run_generation(std::span<const FaceAsset* const> drug_pool,
                                std::span<const FaceAsset* const> healthy_pool, const GaConfig& cfg,
                                int generation, const ForgeryScorer& forgery, const EmbeddingGallery& gallery) {
    cfg.validate();
    if (drug_pool.empty()) throw EmptyPool("generation " + std::to_string(generation) + ": drug pool is empty");
    if (healthy_pool.empty()) {
        throw EmptyPool("generation " + std::to_string(generation) + ": healthy pool is empty");
    }

    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    pairs.reserve(drug_pool.size() * healthy_pool.size());
    for (std::uint32_t i = 0; i < drug_pool.size(); ++i) {
        for (std::uint32_t j = 0; j < healthy_pool.size(); ++j) pairs.emplace_back(i, j);
    }
    RandomStream shuffle_rng(derive_seed(cfg.seed, {kShuffleStream, static_cast<std::uint64_t>(generation)}));
    shuffle_rng.shuffle(pairs);

    GenerationResult result;
    result.stats.generation_index = generation;
    result.stats.alpha_tenths = *cfg.alpha.tenths();

    auto eval = [&](std::size_t k) {
        Candidate c;
        try {
            c = evaluate(*drug_pool[pairs[k].first], *healthy_pool[pairs[k].second], cfg, generation, k, forgery,
                         gallery);
        } catch (...) {
            c.error = std::current_exception();
        }
        return c;
    };

    const std::size_t jobs = static_cast<std::size_t>(cfg.jobs);
    std::size_t next = 0;
    while (next < pairs.size() && result.stats.accepted_count < cfg.max_per_generation) {
        const std::size_t batch = std::min(jobs, pairs.size() - next);
        std::vector<Candidate> done(batch);
        if (batch == 1) {
            done[0] = eval(next);
        } else {
            std::vector<std::future<Candidate>> futures;
            futures.reserve(batch - 1);
            for (std::size_t b = 1; b < batch; ++b) futures.push_back(std::async(std::launch::async, eval, next + b));
            done[0] = eval(next);
            for (std::size_t b = 1; b < batch; ++b) done[b] = futures[b - 1].get();
        }
        // Serial commit in attempt order keeps the outcome independent of the batch size.
        for (Candidate& c : done) {
            if (result.stats.accepted_count >= cfg.max_per_generation) break;
            if (c.error) std::rethrow_exception(c.error);
            count(result.stats, c.record.outcome);
            if (c.accepted) result.accepted.push_back(std::move(*c.accepted));
            result.attempts.push_back(std::move(c.record));
        }
        next += batch;
    }

    if (cfg.anonymity_mode == AnonymityMode::PostHoc) {
        std::vector<AcceptedAsset> kept;
        for (AcceptedAsset& a : result.accepted) {
            if (a.anonymity.is_unknown) {
                kept.push_back(std::move(a));
                continue;
            }
            for (AttemptRecord& r : result.attempts) {
                if (r.attempt_index == a.attempt_index) {
                    r.outcome = AttemptOutcome::RejectedRecognized;
                    r.asset_id.clear();
                }
            }
            --result.stats.accepted_count;
            ++result.stats.rejected_recognized;
        }
        result.accepted = std::move(kept);
    }
    return result;
}

GenerationResult run_generation(std::span<const FaceAsset> drug_pool, std::span<const FaceAsset> healthy_pool,
                                const GaConfig& cfg, int generation, const ForgeryScorer& forgery,
                                const EmbeddingGallery& gallery) {
    const auto d = pointers(drug_pool);
    const auto h = pointers(healthy_pool);
    return run_generation(std::span<const FaceAsset* const>(d), std::span<const FaceAsset* const>(h), cfg,
                          generation, forgery, gallery);
}

EvolutionResult run_evolution(const GaConfig& cfg, std::span<const FaceAsset> drug_originals,
                              std::span<const FaceAsset> healthy_originals, const Scorers& scorers,
                              const EvolutionOptions& options) {
    cfg.validate();
    if (!scorers.forgery || !scorers.embedder) throw InvalidConfig("run_evolution needs both scorers");
    if (drug_originals.empty()) throw EmptyPool("no drug originals");
    if (healthy_originals.empty()) throw EmptyPool("no healthy originals");

    EmbeddingGallery gallery(scorers.embedder);
    for (const FaceAsset& a : drug_originals) {
        if (validate_landmarks(a.landmarks)) gallery.add(a.id, gallery.embed(a.raster, a.landmarks));
    }
    for (const FaceAsset& a : options.extra_gallery) {
        if (validate_landmarks(a.landmarks)) gallery.add("extra/" + a.id, gallery.embed(a.raster, a.landmarks));
    }
    if (gallery.empty()) throw EmptyPool("anonymity gallery is empty: no original has valid landmarks");

    EvolutionResult result;
    for (const auto& [id, e] : gallery.entries()) result.gallery_ids.push_back(id);

    const std::vector<const FaceAsset*> drug0 = pointers(drug_originals);
    const std::vector<const FaceAsset*> healthy0 = pointers(healthy_originals);
    std::deque<FaceAsset> cumulative;
    std::deque<FaceAsset> previous;

    for (int g = 1; g <= cfg.max_generations; ++g) {
        std::vector<const FaceAsset*> drug = drug0;
        std::vector<const FaceAsset*> healthy = healthy0;
        if (cfg.pool_policy == PoolPolicy::PreviousGeneration && g > 1) {
            drug.clear();
            for (const FaceAsset& a : previous) {
                drug.push_back(&a);
                healthy.push_back(&a);
            }
        } else if (cfg.pool_policy == PoolPolicy::Cumulative) {
            for (const FaceAsset& a : cumulative) {
                drug.push_back(&a);
                healthy.push_back(&a);
            }
        }
        if (drug.empty()) {
            result.terminated_early = true;
            result.termination_reason = "generation " + std::to_string(g - 1) + " produced no survivors";
            break;
        }

        GenerationResult gen = run_generation(drug, healthy, cfg, g, *scorers.forgery, gallery);
        if (options.compute_asymmetry) {
            for (AcceptedAsset& a : gen.accepted) {
                try {
                    a.asymmetry = asymmetry_report(a.asset.raster, a.asset.landmarks);
                } catch (const DegenerateRoi&) {
                    a.asymmetry.reset();
                }
            }
        }

        std::deque<FaceAsset> survivors;
        for (const AcceptedAsset& a : gen.accepted) {
            if (cfg.pool_policy == PoolPolicy::Cumulative) {
                cumulative.push_back(a.asset);
            } else if (cfg.pool_policy == PoolPolicy::PreviousGeneration) {
                survivors.push_back(a.asset);
            }
        }
        previous = std::move(survivors);

        if (options.on_generation) options.on_generation(gen);
        if (!options.retain_rasters) {
            for (AcceptedAsset& a : gen.accepted) a.asset.raster = ImageRaster{};
        }
        result.generations.push_back(std::move(gen));
    }
    return result;
}

}  // namespace morphline
