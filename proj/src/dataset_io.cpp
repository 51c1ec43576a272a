#include "morphline/dataset_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "morphline/errors.hpp"
#include "morphline/image_io.hpp"

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace morphline {

namespace {

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot write " + path.string());
    out << text;
    out.close();
    if (!out) throw IoFailure("write failed for " + path.string());
}

void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoFailure("cannot create directory " + dir.string());
}

ojson optional_json(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

template <class T>
std::optional<T> optional_field(const ojson& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<T>();
}

ojson stats_json(const GenerationState& s) {
    return ojson{{"generation", s.generation_index},
                 {"alpha_tenths", s.alpha_tenths},
                 {"attempted", s.attempted_count},
                 {"accepted", s.accepted_count},
                 {"rejected_forgery", s.rejected_forgery},
                 {"rejected_recognized", s.rejected_recognized},
                 {"rejected_no_face", s.rejected_no_face}};
}

GenerationState stats_from_json(const ojson& j) {
    GenerationState s;
    s.generation_index = j.at("generation").get<int>();
    s.alpha_tenths = j.at("alpha_tenths").get<int>();
    s.attempted_count = j.at("attempted").get<int>();
    s.accepted_count = j.at("accepted").get<int>();
    s.rejected_forgery = j.at("rejected_forgery").get<int>();
    s.rejected_recognized = j.at("rejected_recognized").get<int>();
    s.rejected_no_face = j.at("rejected_no_face").get<int>();
    return s;
}

ojson attempt_json(const AttemptRecord& a) {
    ojson j{{"generation", a.generation},
            {"attempt_index", a.attempt_index},
            {"drug_parent", a.drug_parent},
            {"healthy_parent", a.healthy_parent},
            {"op", to_string(a.op)},
            {"alpha_tenths", a.alpha_tenths},
            {"real_confidence", optional_json(a.real_confidence)},
            {"min_distance", optional_json(a.min_distance)},
            {"is_unknown", a.is_unknown ? ojson(*a.is_unknown) : ojson(nullptr)},
            {"outcome", to_string(a.outcome)}};
    if (!a.asset_id.empty()) j["asset_id"] = a.asset_id;
    if (!a.error.empty()) j["error"] = a.error;
    return j;
}

AttemptRecord attempt_from_json(const ojson& j) {
    AttemptRecord a;
    a.generation = j.at("generation").get<int>();
    a.attempt_index = j.at("attempt_index").get<std::uint64_t>();
    a.drug_parent = j.at("drug_parent").get<std::string>();
    a.healthy_parent = j.at("healthy_parent").get<std::string>();
    a.op = parse_op_type(j.at("op").get<std::string>());
    a.alpha_tenths = j.at("alpha_tenths").get<int>();
    a.real_confidence = optional_field<double>(j, "real_confidence");
    a.min_distance = optional_field<double>(j, "min_distance");
    a.is_unknown = optional_field<bool>(j, "is_unknown");
    a.outcome = parse_attempt_outcome(j.at("outcome").get<std::string>());
    a.asset_id = j.value("asset_id", std::string{});
    a.error = j.value("error", std::string{});
    return a;
}

ojson record_json(const ManifestRecord& r) {
    ojson j{{"id", r.id},
            {"file", r.file},
            {"generation", r.generation},
            {"alpha_tenths", r.alpha_tenths},
            {"op", to_string(r.op)},
            {"parents", r.drug_parent || r.healthy_parent
                            ? ojson{{"drug", r.drug_parent.value_or("")}, {"healthy", r.healthy_parent.value_or("")}}
                            : ojson(nullptr)},
            {"real_confidence", r.real_confidence},
            {"min_distance", r.min_distance},
            {"is_unknown", r.is_unknown}};
    if (r.asymmetry) {
        j["asymmetry"] = ojson{{"eyes", r.asymmetry->eyes},
                               {"cheeks", r.asymmetry->cheeks},
                               {"mouth", r.asymmetry->mouth},
                               {"mean", r.asymmetry->mean}};
    } else {
        j["asymmetry"] = nullptr;
    }
    j["attempt_index"] = r.attempt_index;
    return j;
}

ManifestRecord record_from_json(const ojson& j) {
    ManifestRecord r;
    r.id = j.at("id").get<std::string>();
    r.file = j.at("file").get<std::string>();
    r.generation = j.at("generation").get<int>();
    r.alpha_tenths = j.at("alpha_tenths").get<int>();
    r.op = parse_op_type(j.at("op").get<std::string>());
    if (const auto& p = j.at("parents"); !p.is_null()) {
        r.drug_parent = p.at("drug").get<std::string>();
        r.healthy_parent = p.at("healthy").get<std::string>();
    }
    r.real_confidence = j.at("real_confidence").get<double>();
    r.min_distance = j.at("min_distance").get<double>();
    r.is_unknown = j.at("is_unknown").get<bool>();
    if (const auto& a = j.at("asymmetry"); !a.is_null()) {
        AsymmetryReport rep;
        rep.eyes = a.at("eyes").get<double>();
        rep.cheeks = a.at("cheeks").get<double>();
        rep.mouth = a.at("mouth").get<double>();
        rep.mean = a.at("mean").get<double>();
        r.asymmetry = rep;
    }
    r.attempt_index = j.at("attempt_index").get<std::uint64_t>();
    return r;
}

ojson run_json(const RunInfo& r) {
    return ojson{{"alpha_tenths", r.alpha_tenths},
                 {"max_generations", r.max_generations},
                 {"max_per_generation", r.max_per_generation},
                 {"p_crossover", r.p_crossover},
                 {"p_mutation", r.p_mutation},
                 {"forgery_threshold", r.forgery_threshold},
                 {"anonymity_threshold", r.anonymity_threshold},
                 {"seed", r.seed},
                 {"pool_policy", r.pool_policy},
                 {"anonymity_mode", r.anonymity_mode},
                 {"forgery_scorer", r.forgery_scorer},
                 {"matcher", r.matcher},
                 {"landmark_source", r.landmark_source},
                 {"working_size", r.working_size},
                 {"terminated_early", r.terminated_early},
                 {"termination_reason", r.termination_reason}};
}

RunInfo run_from_json(const ojson& j) {
    RunInfo r;
    r.alpha_tenths = j.at("alpha_tenths").get<int>();
    r.max_generations = j.at("max_generations").get<int>();
    r.max_per_generation = j.at("max_per_generation").get<int>();
    r.p_crossover = j.at("p_crossover").get<double>();
    r.p_mutation = j.at("p_mutation").get<double>();
    r.forgery_threshold = j.at("forgery_threshold").get<double>();
    r.anonymity_threshold = j.at("anonymity_threshold").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.pool_policy = j.at("pool_policy").get<std::string>();
    r.anonymity_mode = j.at("anonymity_mode").get<std::string>();
    r.forgery_scorer = j.at("forgery_scorer").get<std::string>();
    r.matcher = j.at("matcher").get<std::string>();
    r.landmark_source = j.at("landmark_source").get<std::string>();
    r.working_size = j.at("working_size").get<int>();
    r.terminated_early = j.at("terminated_early").get<bool>();
    r.termination_reason = j.at("termination_reason").get<std::string>();
    return r;
}

constexpr const char* kManifestFormat = "morphline-manifest";
constexpr int kManifestVersion = 1;

}  // namespace

fs::path sidecar_path_for(const fs::path& image_path) {
    fs::path p = image_path;
    p.replace_filename(image_path.stem().string() + ".landmarks.json");
    return p;
}

LandmarkSet read_sidecar(const fs::path& path) {
    const std::string text = read_text(path);
    try {
        const ojson j = ojson::parse(text);
        LandmarkSet l;
        l.image_width = j.at("width").get<int>();
        l.image_height = j.at("height").get<int>();
        for (const auto& p : j.at("points")) {
            if (!p.is_array() || p.size() != 2) throw InvalidConfig("point is not an [x, y] pair");
            l.points.push_back({p[0].get<double>(), p[1].get<double>()});
        }
        return l;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidConfig("malformed sidecar " + path.string() + ": " + e.what());
    } catch (const InvalidConfig& e) {
        throw InvalidConfig("malformed sidecar " + path.string() + ": " + e.what());
    }
}

void write_sidecar(const fs::path& path, const LandmarkSet& landmarks, const std::string& image_name) {
    ojson points = ojson::array();
    for (const Point2d& p : landmarks.points) points.push_back(ojson::array({p.x, p.y}));
    const ojson j{{"image", image_name},
                  {"width", landmarks.image_width},
                  {"height", landmarks.image_height},
                  {"points", std::move(points)}};
    write_text(path, j.dump() + "\n");
}

FaceAsset load_face(const fs::path& file, const LoadOptions& options) {
    if (options.working_size < 0) throw InvalidConfig("working size must be non-negative");
    FaceAsset a;
    a.id = options.id_prefix + file.stem().string();
    a.pool = options.pool;
    a.raster = read_image(file);

    const fs::path sidecar = sidecar_path_for(file);
    if (fs::exists(sidecar)) {
        a.landmarks = read_sidecar(sidecar);
        if (a.landmarks.image_width != a.raster.width() || a.landmarks.image_height != a.raster.height()) {
            throw DimensionMismatch("sidecar " + sidecar.filename().string() + " describes a " +
                                    std::to_string(a.landmarks.image_width) + "x" +
                                    std::to_string(a.landmarks.image_height) + " image but " +
                                    file.filename().string() + " is " + std::to_string(a.raster.width()) + "x" +
                                    std::to_string(a.raster.height()));
        }
    } else if (options.detector) {
        try {
            a.landmarks = options.detector->detect(a.raster);
        } catch (const NoFaceFound&) {
            a.landmarks = LandmarkSet{{}, a.raster.width(), a.raster.height()};
        }
    } else {
        throw MissingLandmarks("no landmark sidecar for " + file.string() + " and no detector configured");
    }

    const int side = options.working_size;
    if (side > 0 && (a.raster.width() != side || a.raster.height() != side)) {
        a.raster = resize_bilinear(a.raster, side, side);
        if (a.landmarks.points.empty()) {
            a.landmarks.image_width = side;
            a.landmarks.image_height = side;
        } else {
            a.landmarks = rescale_landmarks(a.landmarks, side, side);
        }
    }
    return a;
}

std::vector<FaceAsset> load_pool(const fs::path& dir, const LoadOptions& options) {
    if (!fs::is_directory(dir)) throw IoFailure("not a directory: " + dir.string());
    if (options.working_size < 0) throw InvalidConfig("working size must be non-negative");

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });

    std::vector<FaceAsset> assets;
    assets.reserve(files.size());
    for (const fs::path& file : files) assets.push_back(load_face(file, options));
    return assets;
}

RunInfo RunInfo::from_config(const GaConfig& cfg) {
    RunInfo r;
    r.alpha_tenths = *cfg.alpha.tenths();
    r.max_generations = cfg.max_generations;
    r.max_per_generation = cfg.max_per_generation;
    r.p_crossover = cfg.p_crossover;
    r.p_mutation = cfg.p_mutation;
    r.forgery_threshold = cfg.forgery_threshold;
    r.anonymity_threshold = cfg.anonymity_threshold;
    r.seed = cfg.seed;
    r.pool_policy = std::string(to_string(cfg.pool_policy));
    r.anonymity_mode = std::string(to_string(cfg.anonymity_mode));
    return r;
}

std::string gen_directory_name(int generation) { return "gen_" + std::to_string(generation); }

ManifestRecord make_record(const AcceptedAsset& accepted) {
    const FaceAsset& a = accepted.asset;
    ManifestRecord r;
    r.id = a.id;
    r.file = gen_directory_name(a.generation) + "/" + a.id + ".png";
    r.generation = a.generation;
    if (a.parents) {
        r.alpha_tenths = a.parents->alpha.tenths().value_or(-1);
        r.op = a.parents->op;
        r.drug_parent = a.parents->drug_parent;
        r.healthy_parent = a.parents->healthy_parent;
    } else {
        r.op = OpType::Original;
    }
    r.real_confidence = accepted.forgery.real_confidence;
    r.min_distance = accepted.anonymity.min_distance;
    r.is_unknown = accepted.anonymity.is_unknown;
    r.asymmetry = accepted.asymmetry;
    r.attempt_index = accepted.attempt_index;
    return r;
}

std::string manifest_to_json(const Manifest& m) {
    ojson originals = ojson::array();
    for (const auto& o : m.originals) {
        originals.push_back(ojson{{"id", o.id}, {"pool", to_string(o.pool)}, {"source", o.source}});
    }
    ojson records = ojson::array();
    for (const auto& r : m.records) records.push_back(record_json(r));
    ojson attempts = ojson::array();
    for (const auto& a : m.attempts) attempts.push_back(attempt_json(a));
    ojson generations = ojson::array();
    for (const auto& g : m.generations) generations.push_back(stats_json(g));

    const ojson j{{"format", kManifestFormat},
                  {"version", kManifestVersion},
                  {"run", run_json(m.run)},
                  {"originals", std::move(originals)},
                  {"gallery", m.gallery},
                  {"generations", std::move(generations)},
                  {"records", std::move(records)},
                  {"attempts", std::move(attempts)}};
    return j.dump(1) + "\n";
}

Manifest manifest_from_json(const std::string& text) {
    try {
        const ojson j = ojson::parse(text);
        if (j.at("format").get<std::string>() != kManifestFormat) throw InvalidConfig("not a morphline manifest");
        if (j.at("version").get<int>() != kManifestVersion) {
            throw InvalidConfig("unsupported manifest version " + j.at("version").dump());
        }
        Manifest m;
        m.run = run_from_json(j.at("run"));
        for (const auto& o : j.at("originals")) {
            m.originals.push_back({o.at("id").get<std::string>(), parse_asset_pool(o.at("pool").get<std::string>()),
                                   o.at("source").get<std::string>()});
        }
        m.gallery = j.at("gallery").get<std::vector<std::string>>();
        for (const auto& g : j.at("generations")) m.generations.push_back(stats_from_json(g));
        for (const auto& r : j.at("records")) m.records.push_back(record_from_json(r));
        for (const auto& a : j.at("attempts")) m.attempts.push_back(attempt_from_json(a));
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidConfig(std::string("malformed manifest: ") + e.what());
    }
}

Manifest read_manifest(const fs::path& path) {
    try {
        return manifest_from_json(read_text(path));
    } catch (const InvalidConfig& e) {
        throw InvalidConfig(path.string() + ": " + e.what());
    }
}

std::string stats_csv(std::span<const GenerationState> generations) {
    std::string out = "generation,alpha_tenths,attempted,accepted,rejected_forgery,rejected_recognized,rejected_no_face\n";
    for (const GenerationState& s : generations) {
        out += std::to_string(s.generation_index) + ',' + std::to_string(s.alpha_tenths) + ',' +
               std::to_string(s.attempted_count) + ',' + std::to_string(s.accepted_count) + ',' +
               std::to_string(s.rejected_forgery) + ',' + std::to_string(s.rejected_recognized) + ',' +
               std::to_string(s.rejected_no_face) + '\n';
    }
    return out;
}

fs::path write_manifest(const fs::path& out_dir, const Manifest& m) {
    ensure_directory(out_dir);
    const fs::path manifest = out_dir / "manifest.json";
    write_text(manifest, manifest_to_json(m));
    write_text(out_dir / "stats.csv", stats_csv(m.generations));
    return manifest;
}

std::string write_asset(const fs::path& out_dir, const FaceAsset& asset) {
    if (asset.raster.empty()) throw IoFailure("asset " + asset.id + " has no raster to write");
    const std::string dir = gen_directory_name(asset.generation);
    ensure_directory(out_dir / dir);
    const std::string name = asset.id + ".png";
    write_png(asset.raster, out_dir / dir / name);
    write_sidecar(sidecar_path_for(out_dir / dir / name), asset.landmarks, name);
    return dir + "/" + name;
}

fs::path write_dataset(const fs::path& out_dir, const Manifest& m, std::span<const FaceAsset> assets) {
    ensure_directory(out_dir);
    for (const FaceAsset& a : assets) write_asset(out_dir, a);
    return write_manifest(out_dir, m);
}

DatasetWriter::DatasetWriter(fs::path out_dir) : out_dir_(std::move(out_dir)) { ensure_directory(out_dir_); }

void DatasetWriter::add_generation(const GenerationResult& gen) {
    for (const AcceptedAsset& a : gen.accepted) {
        ManifestRecord r = make_record(a);
        r.file = write_asset(out_dir_, a.asset);
        records_.push_back(std::move(r));
    }
    attempts_.insert(attempts_.end(), gen.attempts.begin(), gen.attempts.end());
    generations_.push_back(gen.stats);
}

fs::path DatasetWriter::finish(Manifest header) {
    header.records = std::move(records_);
    header.attempts = std::move(attempts_);
    header.generations = std::move(generations_);
    return write_manifest(out_dir_, header);
}

std::vector<FaceAsset> load_dataset(const fs::path& manifest_path) {
    const Manifest m = read_manifest(manifest_path);
    const fs::path base = manifest_path.parent_path();
    std::vector<FaceAsset> out;
    out.reserve(m.records.size());
    for (const ManifestRecord& r : m.records) {
        FaceAsset a;
        a.id = r.id;
        a.raster = read_image(base / r.file);
        a.landmarks = read_sidecar(sidecar_path_for(base / r.file));
        a.pool = AssetPool::Generated;
        a.generation = r.generation;
        if (r.drug_parent && r.healthy_parent) {
            a.parents = Lineage{*r.drug_parent, *r.healthy_parent, MorphSpec::from_tenths(r.alpha_tenths), r.op};
        }
        out.push_back(std::move(a));
    }
    return out;
}

}  // namespace morphline
