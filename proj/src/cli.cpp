#include "morphline/cli.hpp"

#include <glob.h>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "morphline/asymmetry.hpp"
#include "morphline/dataset_io.hpp"
#include "morphline/errors.hpp"
#include "morphline/ga_engine.hpp"
#include "morphline/image_io.hpp"
#include "morphline/report.hpp"
#include "morphline/scoring.hpp"
#include "morphline/synth.hpp"

namespace fs = std::filesystem;

namespace morphline {

namespace {

// Raised for flag combinations CLI11 cannot check by itself.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint64_t resolve_seed(const CLI::Option* flag, std::uint64_t value) {
    if (flag->count() > 0) return value;
    const char* env = std::getenv("MORPHLINE_SEED");
    if (env == nullptr || *env == '\0') return 0;
    try {
        std::size_t used = 0;
        const std::string text(env);
        if (text.front() == '-') throw std::invalid_argument(text);
        const std::uint64_t seed = std::stoull(text, &used, 10);
        if (used != text.size()) throw std::invalid_argument(text);
        return seed;
    } catch (const std::exception&) {
        throw UsageError(std::string("MORPHLINE_SEED is not an unsigned integer: '") + env + "'");
    }
}

std::chrono::milliseconds timeout_from_seconds(double seconds) {
    if (!(seconds > 0.0)) throw UsageError("--adapter-timeout must be positive");
    return std::chrono::milliseconds(static_cast<std::int64_t>(seconds * 1000.0));
}

std::shared_ptr<const LandmarkDetector> landmark_detector(const std::string& source, std::chrono::milliseconds timeout) {
    if (source == "sidecar") return nullptr;
    if (source == "stub") return std::make_shared<TemplateLandmarkStub>();
    if (source.rfind("cmd:", 0) == 0 && source.size() > 4) {
        return make_landmark_detector(ScorerBinding::external(source.substr(4), timeout));
    }
    throw UsageError("--landmarks must be 'sidecar', 'stub' or 'cmd:<command>'");
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot write " + path.string());
    out << text;
    if (!out.flush()) throw IoFailure("write failed for " + path.string());
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<fs::path> expand_globs(const std::vector<std::string>& patterns) {
    std::vector<fs::path> out;
    for (const std::string& pattern : patterns) {
        glob_t g{};
        const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
        if (rc == 0) {
            for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
        }
        ::globfree(&g);
        if (rc == GLOB_NOMATCH) throw IoFailure("no manifest matches '" + pattern + "'");
        if (rc != 0) throw IoFailure("cannot expand '" + pattern + "'");
    }
    return out;
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
    std::string drug_dir;
    std::string healthy_dir;
    std::string out;
    int alpha = 5;
    int generations = 5;
    int max_per_gen = 300;
    std::uint64_t seed = 0;
    std::string forgery_cmd;
    bool forgery_stub = false;
    std::string matcher_cmd;
    bool matcher_stub = false;
    std::string landmarks = "sidecar";
    double forgery_threshold = 0.5;
    double anonymity_threshold = 0.6;
    std::string anonymity_mode = "gate";
    std::string pool_policy = "previous-generation";
    int jobs = 1;
    int working_size = 1024;
    double stub_midpoint = SharpnessStubParams{}.midpoint;
    double stub_scale = SharpnessStubParams{}.scale;
    std::string extra_gallery_dir;
    std::string on_scorer_error = "abort";
    bool with_asymmetry = false;
    double adapter_timeout = 60.0;
    CLI::Option* seed_flag = nullptr;
};

void add_generate(CLI::App& app, GenerateArgs& a) {
    auto* cmd = app.add_subcommand("generate", "Grow a synthetic dataset from drug and healthy face pools");
    cmd->add_option("--drug-dir", a.drug_dir, "Directory of drug-cohort originals")->required();
    cmd->add_option("--healthy-dir", a.healthy_dir, "Directory of healthy faces")->required();
    cmd->add_option("--out", a.out, "Output dataset directory")->required();
    cmd->add_option("--alpha", a.alpha, "Fusion coefficient in tenths (0..10)")->capture_default_str()->check(CLI::Range(0, 10));
    cmd->add_option("--generations", a.generations, "Number of generations")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--max-per-gen", a.max_per_gen, "Accepted images per generation")->capture_default_str()->check(CLI::PositiveNumber);
    a.seed_flag = cmd->add_option("--seed", a.seed, "Master seed (default: $MORPHLINE_SEED, else 0)");
    auto* fcmd = cmd->add_option("--forgery-cmd", a.forgery_cmd, "External forgery scorer command");
    auto* fstub = cmd->add_flag("--forgery-stub", a.forgery_stub, "Use the built-in sharpness scorer (default)");
    fcmd->excludes(fstub);
    auto* mcmd = cmd->add_option("--matcher-cmd", a.matcher_cmd, "External face embedding command");
    auto* mstub = cmd->add_flag("--matcher-stub", a.matcher_stub, "Use the built-in crop embedding (default)");
    mcmd->excludes(mstub);
    cmd->add_option("--landmarks", a.landmarks, "Landmark source for images without sidecars: sidecar | stub | cmd:<command>")
        ->capture_default_str();
    cmd->add_option("--forgery-threshold", a.forgery_threshold, "Minimum real confidence")->capture_default_str();
    cmd->add_option("--anonymity-threshold", a.anonymity_threshold, "Minimum embedding distance to the gallery")
        ->capture_default_str();
    cmd->add_option("--anonymity-mode", a.anonymity_mode, "gate | posthoc")
        ->capture_default_str()
        ->check(CLI::IsMember({"gate", "posthoc"}));
    cmd->add_option("--pool-policy", a.pool_policy, "previous-generation | originals-only | cumulative")
        ->capture_default_str()
        ->check(CLI::IsMember({"previous-generation", "originals-only", "cumulative"}));
    cmd->add_option("--jobs", a.jobs, "Concurrent candidate evaluations")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--working-size", a.working_size, "Square side inputs are resized to (0 keeps native size)")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--stub-midpoint", a.stub_midpoint, "Sharpness stub: Laplacian variance at confidence 0.5")
        ->capture_default_str();
    cmd->add_option("--stub-scale", a.stub_scale, "Sharpness stub: logistic scale")->capture_default_str();
    cmd->add_option("--extra-gallery-dir", a.extra_gallery_dir, "Additional faces the anonymity gate compares against");
    cmd->add_option("--on-scorer-error", a.on_scorer_error, "abort | reject")
        ->capture_default_str()
        ->check(CLI::IsMember({"abort", "reject"}));
    cmd->add_flag("--with-asymmetry", a.with_asymmetry, "Store asymmetry scores of accepted images in the manifest");
    cmd->add_option("--adapter-timeout", a.adapter_timeout, "Seconds before an external command is killed")
        ->capture_default_str();
}

int run_generate(const GenerateArgs& a) {
    GaConfig cfg;
    RunInfo info;
    std::shared_ptr<const LandmarkDetector> detector;
    Scorers scorers;
    try {
        cfg.alpha = MorphSpec::from_tenths(a.alpha);
        cfg.max_generations = a.generations;
        cfg.max_per_generation = a.max_per_gen;
        cfg.seed = resolve_seed(a.seed_flag, a.seed);
        cfg.forgery_threshold = a.forgery_threshold;
        cfg.anonymity_threshold = a.anonymity_threshold;
        cfg.anonymity_mode = parse_anonymity_mode(a.anonymity_mode);
        cfg.pool_policy = parse_pool_policy(a.pool_policy);
        cfg.on_scorer_error = a.on_scorer_error == "reject" ? ScorerFailurePolicy::CountAsRejected : ScorerFailurePolicy::Abort;
        cfg.jobs = a.jobs;
        cfg.validate();
        if (!(a.stub_scale > 0.0) || !std::isfinite(a.stub_midpoint)) {
            throw UsageError("--stub-scale must be positive and --stub-midpoint finite");
        }

        const auto timeout = timeout_from_seconds(a.adapter_timeout);
        detector = landmark_detector(a.landmarks, timeout);
        const ScorerBinding forgery =
            a.forgery_cmd.empty() ? ScorerBinding::stub() : ScorerBinding::external(a.forgery_cmd, timeout);
        const ScorerBinding matcher =
            a.matcher_cmd.empty() ? ScorerBinding::stub() : ScorerBinding::external(a.matcher_cmd, timeout);
        scorers.forgery = make_forgery_scorer(forgery, {a.stub_midpoint, a.stub_scale});
        scorers.embedder = make_embedding_model(matcher);

        info = RunInfo::from_config(cfg);
        std::ostringstream label;
        label << "stub(midpoint=" << a.stub_midpoint << ",scale=" << a.stub_scale << ")";
        info.forgery_scorer = a.forgery_cmd.empty() ? label.str() : "cmd:" + a.forgery_cmd;
        info.matcher = a.matcher_cmd.empty() ? "stub" : "cmd:" + a.matcher_cmd;
        info.landmark_source = a.landmarks;
        info.working_size = a.working_size;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const InvalidConfig& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const InvalidThreshold& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    LoadOptions drug_opts{detector, a.working_size, AssetPool::DrugOriginal, "drug/"};
    LoadOptions healthy_opts{detector, a.working_size, AssetPool::HealthyGan, "healthy/"};
    const std::vector<FaceAsset> drug = load_pool(a.drug_dir, drug_opts);
    const std::vector<FaceAsset> healthy = load_pool(a.healthy_dir, healthy_opts);
    if (drug.empty()) throw EmptyPool("no images in " + a.drug_dir);
    if (healthy.empty()) throw EmptyPool("no images in " + a.healthy_dir);

    EvolutionOptions options;
    if (!a.extra_gallery_dir.empty()) {
        options.extra_gallery = load_pool(a.extra_gallery_dir, {detector, a.working_size, AssetPool::DrugOriginal, ""});
    }
    options.compute_asymmetry = a.with_asymmetry;
    options.retain_rasters = false;
    DatasetWriter writer(a.out);
    options.on_generation = [&](const GenerationResult& gen) {
        writer.add_generation(gen);
        const GenerationState& s = gen.stats;
        std::cout << "generation " << s.generation_index << ": attempted " << s.attempted_count << ", accepted "
                  << s.accepted_count << ", rejected forgery " << s.rejected_forgery << ", recognized "
                  << s.rejected_recognized << ", no face " << s.rejected_no_face << "\n";
    };

    const EvolutionResult result = run_evolution(cfg, drug, healthy, scorers, options);

    Manifest header;
    info.terminated_early = result.terminated_early;
    info.termination_reason = result.termination_reason;
    header.run = info;
    for (const auto* pool : {&drug, &healthy}) {
        for (const FaceAsset& f : *pool) {
            const std::string stem = f.id.substr(f.id.find('/') + 1);
            header.originals.push_back({f.id, f.pool, stem});
        }
    }
    header.gallery = result.gallery_ids;
    const fs::path manifest = writer.finish(std::move(header));
    if (result.terminated_early) std::cout << "stopped early: " << result.termination_reason << "\n";
    std::cout << "wrote " << manifest.string() << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct MorphArgs {
    std::string drug;
    std::string healthy;
    std::string out;
    int alpha = 5;
    std::string landmarks = "sidecar";
    int working_size = 0;
};

void add_morph(CLI::App& app, MorphArgs& a) {
    auto* cmd = app.add_subcommand("morph", "Fuse one drug face with one healthy face");
    cmd->add_option("drug", a.drug, "Drug face image (alpha 10 reproduces it)")->required();
    cmd->add_option("healthy", a.healthy, "Healthy face image (alpha 0 reproduces it)")->required();
    cmd->add_option("--alpha", a.alpha, "Fusion coefficient in tenths (0..10)")->capture_default_str()->check(CLI::Range(0, 10));
    cmd->add_option("--out", a.out, "Output PNG; a landmark sidecar is written next to it")->required();
    cmd->add_option("--landmarks", a.landmarks, "sidecar | stub | cmd:<command>")->capture_default_str();
    cmd->add_option("--working-size", a.working_size, "Square side inputs are resized to (0 keeps native size)")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
}

int run_morph(const MorphArgs& a) {
    std::shared_ptr<const LandmarkDetector> detector;
    try {
        detector = landmark_detector(a.landmarks, std::chrono::milliseconds{60'000});
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    const FaceAsset drug = load_face(a.drug, {detector, a.working_size, AssetPool::DrugOriginal, ""});
    const FaceAsset healthy = load_face(a.healthy, {detector, a.working_size, AssetPool::HealthyGan, ""});
    if (!validate_landmarks(drug.landmarks)) throw NoFaceFound("no usable landmarks for " + a.drug);
    if (!validate_landmarks(healthy.landmarks)) throw NoFaceFound("no usable landmarks for " + a.healthy);
    const fs::path out(a.out);
    const FaceAsset merged = face_merge(drug, healthy, MorphSpec::from_tenths(a.alpha), {out.stem().string()});
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    write_png(merged.raster, out);
    write_sidecar(sidecar_path_for(out), merged.landmarks, out.filename().string());
    std::cout << "wrote " << out.string() << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct AsymmetryArgs {
    std::string dir;
    std::string out;
    std::string landmarks = "sidecar";
    int canonical_size = 256;
};

void add_asymmetry(CLI::App& app, AsymmetryArgs& a) {
    auto* cmd = app.add_subcommand("asymmetry", "Score facial asymmetry of every image in a directory or dataset");
    cmd->add_option("dir", a.dir, "Image directory, or a generated dataset containing manifest.json")->required();
    cmd->add_option("--out", a.out, "Output CSV")->required();
    cmd->add_option("--landmarks", a.landmarks, "sidecar | stub | cmd:<command>")->capture_default_str();
    cmd->add_option("--canonical-size", a.canonical_size, "Side of the alignment frame")
        ->capture_default_str()
        ->check(CLI::Range(32, 4096));
}

int run_asymmetry(const AsymmetryArgs& a) {
    std::shared_ptr<const LandmarkDetector> detector;
    try {
        detector = landmark_detector(a.landmarks, std::chrono::milliseconds{60'000});
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    AsymmetryOptions options;
    options.canonical_size = a.canonical_size;

    std::vector<AsymmetryRow> rows;
    auto score = [&](const FaceAsset& f) {
        if (!validate_landmarks(f.landmarks)) throw NoFaceFound("no usable landmarks for " + f.id);
        return asymmetry_report(f.raster, f.landmarks, options);
    };
    const fs::path manifest = fs::path(a.dir) / "manifest.json";
    if (fs::exists(manifest)) {
        for (const FaceAsset& f : load_dataset(manifest)) {
            std::optional<int> alpha;
            if (f.parents) alpha = f.parents->alpha.tenths();
            rows.push_back({f.id, f.generation, alpha, score(f)});
        }
    } else {
        for (const FaceAsset& f : load_pool(a.dir, {detector, 0, AssetPool::DrugOriginal, ""})) {
            rows.push_back({f.id, 0, std::nullopt, score(f)});
        }
    }
    if (rows.empty()) throw EmptyPool("no images in " + a.dir);
    write_file(a.out, asymmetry_rows_csv(rows));
    std::cout << "scored " << rows.size() << " images into " << a.out << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct StatsArgs {
    std::vector<std::string> manifests;
    std::string out;
    std::string before;
    std::string after;
};

void add_stats(CLI::App& app, StatsArgs& a) {
    auto* cmd = app.add_subcommand("stats", "Rejection and recognition curves over a set of runs");
    cmd->add_option("manifests", a.manifests, "manifest.json paths or glob patterns, typically one per alpha")->required();
    cmd->add_option("--out", a.out, "Directory for the CSV and gnuplot files")->required();
    auto* b = cmd->add_option("--asymmetry-before", a.before, "Asymmetry CSV of the original cohort");
    auto* f = cmd->add_option("--asymmetry-after", a.after, "Asymmetry CSV of the generated cohort");
    b->needs(f);
    f->needs(b);
}

int run_stats(const StatsArgs& a) {
    std::vector<Manifest> manifests;
    for (const fs::path& p : expand_globs(a.manifests)) manifests.push_back(read_manifest(p));
    const CurveTable rejection = rejection_curves(manifests);
    const CurveTable recognition = recognition_curves(manifests);
    const fs::path out(a.out);
    write_file(out / "rejection.csv", curve_csv(rejection, "rejected_forgery"));
    write_file(out / "rejection.dat", gnuplot_matrix(rejection));
    write_file(out / "recognition.csv", curve_csv(recognition, "identified"));
    write_file(out / "recognition.dat", gnuplot_matrix(recognition));
    std::cout << "rejection fraction (rows: generation, columns: alpha)\n" << gnuplot_matrix(rejection);
    std::cout << "identified fraction (rows: generation, columns: alpha)\n" << gnuplot_matrix(recognition);

    if (!a.before.empty()) {
        auto reports = [](const std::string& path) {
            std::vector<AsymmetryReport> r;
            for (const AsymmetryRow& row : parse_asymmetry_csv(read_file(path))) r.push_back(row.report);
            return r;
        };
        const auto before = reports(a.before);
        const auto after = reports(a.after);
        const AsymmetrySummary s = asymmetry_summary(before, after);
        write_file(out / "asymmetry_summary.csv", asymmetry_summary_csv(s));
        std::cout << render_asymmetry_table(s);
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
    std::string out;
    int count = 10;
    std::uint64_t seed = 0;
    std::string style = "healthy";
    bool symmetric = false;
    int size = 256;
    double texture_sigma = SynthOptions{}.texture_sigma;
    CLI::Option* seed_flag = nullptr;
};

void add_synth(CLI::App& app, SynthArgs& a) {
    auto* cmd = app.add_subcommand("synth-corpus", "Write procedurally generated faces with landmark sidecars");
    cmd->add_option("--out", a.out, "Output directory")->required();
    cmd->add_option("--count", a.count, "Number of faces")->capture_default_str()->check(CLI::NonNegativeNumber);
    a.seed_flag = cmd->add_option("--seed", a.seed, "Master seed (default: $MORPHLINE_SEED, else 0)");
    cmd->add_option("--style", a.style, "healthy | drug")->capture_default_str()->check(CLI::IsMember({"healthy", "drug"}));
    cmd->add_flag("--symmetric", a.symmetric, "Make every face exactly left-right symmetric");
    cmd->add_option("--size", a.size, "Image side in pixels")->capture_default_str()->check(CLI::Range(32, 4096));
    cmd->add_option("--texture-sigma", a.texture_sigma, "Skin noise level")->capture_default_str()->check(CLI::NonNegativeNumber);
}

int run_synth(const SynthArgs& a) {
    std::uint64_t seed = 0;
    try {
        seed = resolve_seed(a.seed_flag, a.seed);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    SynthOptions o;
    o.size = a.size;
    o.style = parse_synth_style(a.style);
    o.symmetric = a.symmetric;
    o.texture_sigma = a.texture_sigma;
    const auto files = write_synthetic_corpus(a.out, a.count, seed, o);
    std::cout << "wrote " << files.size() << " faces to " << a.out << "\n";
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Face-fusion dataset generator with forgery and anonymity gates", "morphline"};
    app.require_subcommand(1);
    GenerateArgs generate;
    MorphArgs morph;
    AsymmetryArgs asym;
    StatsArgs stats;
    SynthArgs synth;
    add_generate(app, generate);
    add_morph(app, morph);
    add_asymmetry(app, asym);
    add_stats(app, stats);
    add_synth(app, synth);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "error: " << e.what() << "\n\n";
        const auto parsed = app.get_subcommands();
        std::cerr << (parsed.empty() ? app.help() : parsed.back()->help());
        return kExitUsage;
    }

    try {
        if (app.got_subcommand("generate")) return run_generate(generate);
        if (app.got_subcommand("morph")) return run_morph(morph);
        if (app.got_subcommand("asymmetry")) return run_asymmetry(asym);
        if (app.got_subcommand("stats")) return run_stats(stats);
        if (app.got_subcommand("synth-corpus")) return run_synth(synth);
    } catch (const AdapterFailure& e) {
        std::cerr << "adapter failure: " << e.what() << "\n";
        return kExitAdapter;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitUsage;
}

}  // namespace morphline
