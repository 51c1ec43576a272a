#include <doctest.h>

#include <algorithm>
#include <set>

#include "fixtures.hpp"
#include "morphline/errors.hpp"
#include "morphline/ga_engine.hpp"

using namespace morphline;
using fixture::ConstantForgery;
using fixture::HashEmbedder;

namespace {

GaConfig small_config() {
    GaConfig cfg;
    cfg.alpha = MorphSpec::from_tenths(5);
    cfg.max_generations = 2;
    cfg.max_per_generation = 6;
    cfg.seed = 11;
    return cfg;
}

Scorers hash_scorers(double real = 1.0) {
    return {std::make_shared<ConstantForgery>(real), std::make_shared<HashEmbedder>()};
}

std::vector<std::string> accepted_ids(const EvolutionResult& r) {
    std::vector<std::string> ids;
    for (const auto& g : r.generations) {
        for (const auto& a : g.accepted) ids.push_back(a.asset.id);
    }
    return ids;
}

}  // namespace

TEST_SUITE("ga_engine") {

TEST_CASE("operation mix over 10000 draws stays near 95/5") {
    RandomStream rng(derive_seed(1, {}));
    int crossover = 0;
    for (int i = 0; i < 10000; ++i) crossover += choose_operation(rng) == OpType::Crossover;
    CHECK(crossover >= 9400);
    CHECK(crossover <= 9600);
}

TEST_CASE("mutation alphas are uniform on the 0.1 grid") {
    RandomStream rng(77);
    std::array<int, 11> hist{};
    for (int i = 0; i < 11000; ++i) {
        const MorphSpec m = draw_mutation_alpha(rng);
        REQUIRE(m.quantized());
        ++hist[static_cast<std::size_t>(*m.tenths())];
    }
    for (int h : hist) {
        CHECK(h >= 800);
        CHECK(h <= 1200);
    }
}

TEST_CASE("asset ids encode generation, alpha and attempt") {
    CHECK(generated_asset_id(2, 5, 137) == "g2_a05_000137");
    CHECK(generated_asset_id(1, 10, 0) == "g1_a10_000000");
}

TEST_CASE("enum names round-trip") {
    for (auto p : {PoolPolicy::OriginalsOnly, PoolPolicy::PreviousGeneration, PoolPolicy::Cumulative}) {
        CHECK(parse_pool_policy(to_string(p)) == p);
    }
    for (auto m : {AnonymityMode::Gate, AnonymityMode::PostHoc}) CHECK(parse_anonymity_mode(to_string(m)) == m);
    for (auto o : {AttemptOutcome::Accepted, AttemptOutcome::RejectedForgery, AttemptOutcome::RejectedRecognized,
                   AttemptOutcome::RejectedNoFace}) {
        CHECK(parse_attempt_outcome(to_string(o)) == o);
    }
    CHECK_THROWS_AS(parse_pool_policy("all"), InvalidConfig);
}

TEST_CASE("config validation") {
    CHECK_NOTHROW(GaConfig{}.validate());
    GaConfig c;
    c.alpha = MorphSpec::from_alpha(0.25);
    CHECK_THROWS_AS(c.validate(), InvalidConfig);
    c = {};
    c.max_generations = 0;
    CHECK_THROWS_AS(c.validate(), InvalidConfig);
    c = {};
    c.max_per_generation = 0;
    CHECK_THROWS_AS(c.validate(), InvalidConfig);
    c = {};
    c.p_crossover = 0.9;
    CHECK_THROWS_AS(c.validate(), InvalidConfig);
    c = {};
    c.forgery_threshold = 1.2;
    CHECK_THROWS_AS(c.validate(), InvalidThreshold);
    c = {};
    c.anonymity_threshold = -0.1;
    CHECK_THROWS_AS(c.validate(), InvalidThreshold);
    c = {};
    c.jobs = 0;
    CHECK_THROWS_AS(c.validate(), InvalidConfig);
}

TEST_CASE("accept-all scorers fill the cap exactly") {
    const auto drug = fixture::synth_pool(SynthStyle::Drug, 3, 1);
    const auto healthy = fixture::synth_pool(SynthStyle::Healthy, 3, 2);
    GaConfig cfg = small_config();
    const auto r = run_evolution(cfg, drug, healthy, hash_scorers());
    REQUIRE(r.generations.size() == 2);
    for (const auto& g : r.generations) {
        CHECK(g.stats.accepted_count == 6);
        CHECK(g.stats.attempted_count == 6);
        CHECK(g.accepted.size() == 6);
        CHECK(g.attempts.size() == 6);
    }
    CHECK_FALSE(r.terminated_early);
    const auto ids = accepted_ids(r);
    CHECK(std::set<std::string>(ids.begin(), ids.end()).size() == ids.size());
}

TEST_CASE("reject-all forgery scorer exhausts pairs and stops early") {
    const auto drug = fixture::synth_pool(SynthStyle::Drug, 2, 1);
    const auto healthy = fixture::synth_pool(SynthStyle::Healthy, 3, 2);
    GaConfig cfg = small_config();
    cfg.max_generations = 3;
    const auto r = run_evolution(cfg, drug, healthy, hash_scorers(0.0));
    REQUIRE(r.generations.size() == 1);
    CHECK(r.generations[0].stats.attempted_count == 6);
    CHECK(r.generations[0].stats.rejected_forgery == 6);
    CHECK(r.generations[0].stats.accepted_count == 0);
    CHECK(r.terminated_early);
    CHECK(r.termination_reason == "generation 1 produced no survivors");
}

TEST_CASE("a candidate identical to its drug parent is always rejected as recognized") {
    const auto drug = fixture::synth_pool(SynthStyle::Drug, 3, 1);
    const auto healthy = fixture::synth_pool(SynthStyle::Healthy, 3, 2);
    GaConfig cfg = small_config();
    cfg.alpha = MorphSpec::from_tenths(10);
    cfg.p_crossover = 1.0;
    cfg.p_mutation = 0.0;
    cfg.max_generations = 1;
    for (const auto& scorers : {hash_scorers(), Scorers{std::make_shared<ConstantForgery>(1.0),
                                                        std::make_shared<CropEmbeddingStub>()}}) {
        const auto r = run_evolution(cfg, drug, healthy, scorers);
        CHECK(r.generations[0].stats.accepted_count == 0);
        CHECK(r.generations[0].stats.rejected_recognized == 9);
        for (const auto& a : r.generations[0].attempts) {
            REQUIRE(a.min_distance.has_value());
            CHECK(*a.min_distance == doctest::Approx(0.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("accepted assets pass both gates when re-scored") {
    const auto drug = fixture::synth_pool(SynthStyle::Drug, 4, 3, 96);
    const auto healthy = fixture::synth_pool(SynthStyle::Healthy, 4, 4, 96);
    GaConfig cfg = small_config();
    cfg.max_per_generation = 5;
    Scorers s{std::make_shared<SharpnessForgeryStub>(SharpnessStubParams{20.0, 8.0}),
              std::make_shared<CropEmbeddingStub>()};
    const auto r = run_evolution(cfg, drug, healthy, s);
    EmbeddingGallery gallery(s.embedder);
    for (const auto& a : drug) gallery.add(a.id, gallery.embed(a.raster, a.landmarks));
    int n = 0;
    for (const auto& g : r.generations) {
        for (const auto& a : g.accepted) {
            ++n;
            CHECK(score_forgery(a.asset.raster, *s.forgery, cfg.forgery_threshold).verdict == Verdict::Real);
            CHECK(check_anonymity(a.asset.raster, a.asset.landmarks, gallery, cfg.anonymity_threshold).is_unknown);
        }
    }
    CHECK(n > 0);
}

TEST_CASE("results do not depend on the number of jobs") {
    const auto drug = fixture::synth_pool(SynthStyle::Drug, 3, 5);
    const auto healthy = fixture::synth_pool(SynthStyle::Healthy, 3, 6);
    GaConfig cfg = small_config();
    cfg.max_per_generation = 4;
    Scorers s{std::make_shared<SharpnessForgeryStub>(SharpnessStubParams{20.0, 8.0}),
              std::make_shared<CropEmbeddingStub>()};
    const auto a = run_evolution(cfg, drug, healthy, s);
    cfg.jobs = 4;
    const auto b = run_evolution(cfg, drug, healthy, s);
    REQUIRE(a.generations.size() == b.generations.size());
    for (std::size_t g = 0; g < a.generations.size(); ++g) {
        CHECK(a.generations[g].stats == b.generations[g].stats);
        CHECK(a.generations[g].attempts == b.generations[g].attempts);
        REQUIRE(a.generations[g].accepted.size() == b.generations[g].accepted.size());
        for (std::size_t i = 0; i < a.generations[g].accepted.size(); ++i) {
            CHECK(a.generations[g].accepted[i].asset.raster == b.generations[g].accepted[i].asset.raster);
        }
    }
}

TEST_CASE("same seed, same run; different seed, different pairing") {
    const auto drug = fixture::synth_pool(SynthStyle::Drug, 3, 1);
    const auto healthy = fixture::synth_pool(SynthStyle::Healthy, 3, 2);
    GaConfig cfg = small_config();
    cfg.max_per_generation = 3;
    const auto a = run_evolution(cfg, drug, healthy, hash_scorers());
    const auto b = run_evolution(cfg, drug, healthy, hash_scorers());
    CHECK(a.generations[0].attempts == b.generations[0].attempts);
    cfg.seed = 12;
    const auto c = run_evolution(cfg, drug, healthy, hash_scorers());
    CHECK(a.generations[0].attempts != c.generations[0].attempts);
}

TEST_CASE("post-hoc mode scores after the cap and drops recognized assets") {
    const auto drug = fixture::synth_pool(SynthStyle::Drug, 3, 1);
    const auto healthy = fixture::synth_pool(SynthStyle::Healthy, 3, 2);
    GaConfig cfg = small_config();
    cfg.alpha = MorphSpec::from_tenths(10);
    cfg.p_crossover = 1.0;
    cfg.p_mutation = 0.0;
    cfg.max_generations = 1;
    cfg.max_per_generation = 4;
    cfg.anonymity_mode = AnonymityMode::PostHoc;
    const auto r = run_evolution(cfg, drug, healthy, hash_scorers());
    const auto& g = r.generations[0];
    // Four candidates pass the forgery gate, then all four are removed as copies of originals.
    CHECK(g.stats.attempted_count == 4);
    CHECK(g.stats.rejected_recognized == 4);
    CHECK(g.stats.accepted_count == 0);
    CHECK(g.accepted.empty());
}

TEST_CASE("pool policies pick different parents for generation 2") {
    const auto drug = fixture::synth_pool(SynthStyle::Drug, 2, 1);
    const auto healthy = fixture::synth_pool(SynthStyle::Healthy, 2, 2);
    GaConfig cfg = small_config();
    cfg.max_per_generation = 3;
    auto parents = [&](PoolPolicy p) {
        cfg.pool_policy = p;
        const auto r = run_evolution(cfg, drug, healthy, hash_scorers());
        std::set<std::string> drug_parents;
        for (const auto& a : r.generations.at(1).attempts) drug_parents.insert(a.drug_parent);
        return drug_parents;
    };
    for (const auto& id : parents(PoolPolicy::OriginalsOnly)) CHECK(id.front() == 'd');
    for (const auto& id : parents(PoolPolicy::PreviousGeneration)) CHECK(id.rfind("g1_", 0) == 0);
    const auto cumulative = parents(PoolPolicy::Cumulative);
    CHECK(cumulative.size() >= 2);
}

TEST_CASE("generated assets carry the generation index and lineage") {
    const auto drug = fixture::synth_pool(SynthStyle::Drug, 2, 1);
    const auto healthy = fixture::synth_pool(SynthStyle::Healthy, 2, 2);
    GaConfig cfg = small_config();
    cfg.max_per_generation = 2;
    const auto r = run_evolution(cfg, drug, healthy, hash_scorers());
    for (std::size_t g = 0; g < r.generations.size(); ++g) {
        for (const auto& a : r.generations[g].accepted) {
            CHECK(a.asset.generation == static_cast<int>(g) + 1);
            CHECK(a.asset.pool == AssetPool::Generated);
            REQUIRE(a.asset.parents.has_value());
            if (a.asset.parents->op == OpType::Crossover) CHECK(a.asset.parents->alpha == cfg.alpha);
        }
    }
}

TEST_CASE("parents without landmarks count as no-face rejections") {
    auto drug = fixture::synth_pool(SynthStyle::Drug, 2, 1);
    const auto healthy = fixture::synth_pool(SynthStyle::Healthy, 2, 2);
    drug[1].landmarks.points.clear();
    GaConfig cfg = small_config();
    cfg.max_generations = 1;
    cfg.max_per_generation = 10;
    const auto r = run_evolution(cfg, drug, healthy, hash_scorers());
    CHECK(r.generations[0].stats.rejected_no_face == 2);
    CHECK(r.generations[0].stats.accepted_count == 2);
    CHECK(r.gallery_ids == std::vector<std::string>{"d0"});
}

TEST_CASE("extra gallery entries are prefixed and used for matching") {
    const auto drug = fixture::synth_pool(SynthStyle::Drug, 2, 1);
    const auto healthy = fixture::synth_pool(SynthStyle::Healthy, 2, 2);
    GaConfig cfg = small_config();
    cfg.alpha = MorphSpec::from_tenths(0);
    cfg.p_crossover = 1.0;
    cfg.p_mutation = 0.0;
    cfg.max_generations = 1;
    EvolutionOptions opts;
    opts.extra_gallery = healthy;
    const auto r = run_evolution(cfg, drug, healthy, hash_scorers(), opts);
    CHECK(r.gallery_ids == std::vector<std::string>{"d0", "d1", "extra/h0", "extra/h1"});
    // Alpha 0 reproduces the healthy parent, which the extra gallery now recognizes.
    CHECK(r.generations[0].stats.rejected_recognized == 4);
}

TEST_CASE("scorer failures abort or count as rejections") {
    struct Failing final : ForgeryScorer {
        double real_confidence(const ImageRaster&) const override { throw AdapterFailure("boom", 3); }
    };
    const auto drug = fixture::synth_pool(SynthStyle::Drug, 2, 1);
    const auto healthy = fixture::synth_pool(SynthStyle::Healthy, 2, 2);
    GaConfig cfg = small_config();
    cfg.max_generations = 1;
    Scorers s{std::make_shared<Failing>(), std::make_shared<HashEmbedder>()};
    CHECK_THROWS_AS(run_evolution(cfg, drug, healthy, s), AdapterFailure);
    cfg.on_scorer_error = ScorerFailurePolicy::CountAsRejected;
    const auto r = run_evolution(cfg, drug, healthy, s);
    CHECK(r.generations[0].stats.rejected_forgery == 4);
    CHECK(r.generations[0].attempts[0].error.find("boom") != std::string::npos);
}

TEST_CASE("empty pools are rejected") {
    const auto drug = fixture::synth_pool(SynthStyle::Drug, 2, 1);
    const std::vector<FaceAsset> none;
    CHECK_THROWS_AS(run_evolution(small_config(), drug, none, hash_scorers()), EmptyPool);
    CHECK_THROWS_AS(run_evolution(small_config(), none, drug, hash_scorers()), EmptyPool);
    const EmbeddingGallery g(std::make_shared<HashEmbedder>());
    CHECK_THROWS_AS(run_generation(std::span<const FaceAsset>(drug), std::span<const FaceAsset>(none),
                                   small_config(), 1, ConstantForgery(1.0), g),
                    EmptyPool);
}

TEST_CASE("rasters are released when not retained") {
    const auto drug = fixture::synth_pool(SynthStyle::Drug, 2, 1);
    const auto healthy = fixture::synth_pool(SynthStyle::Healthy, 2, 2);
    GaConfig cfg = small_config();
    EvolutionOptions opts;
    opts.retain_rasters = false;
    int calls = 0;
    opts.on_generation = [&](const GenerationResult& g) {
        ++calls;
        for (const auto& a : g.accepted) CHECK_FALSE(a.asset.raster.empty());
    };
    const auto r = run_evolution(cfg, drug, healthy, hash_scorers(), opts);
    CHECK(calls == 2);
    for (const auto& g : r.generations) {
        for (const auto& a : g.accepted) CHECK(a.asset.raster.empty());
    }
}

}
