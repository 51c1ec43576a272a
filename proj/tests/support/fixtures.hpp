#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "morphline/fusion.hpp"
#include "morphline/random.hpp"
#include "morphline/scoring.hpp"
#include "morphline/synth.hpp"

namespace fixture {

using namespace morphline;

inline std::vector<FaceAsset> synth_pool(SynthStyle style, int n, std::uint64_t seed, int size = 64,
                                         const std::string& prefix = "") {
    std::vector<FaceAsset> pool;
    for (int i = 0; i < n; ++i) {
        SynthOptions o;
        o.size = size;
        o.style = style;
        SynthFace f = render_synthetic_face(derive_seed(seed, {static_cast<std::uint64_t>(i)}), o);
        FaceAsset a;
        a.id = prefix + (style == SynthStyle::Drug ? "d" : "h") + std::to_string(i);
        a.raster = std::move(f.raster);
        a.landmarks = std::move(f.landmarks);
        a.pool = style == SynthStyle::Drug ? AssetPool::DrugOriginal : AssetPool::HealthyGan;
        pool.push_back(std::move(a));
    }
    return pool;
}

class ConstantForgery final : public ForgeryScorer {
public:
    explicit ConstantForgery(double p) : p_(p) {}
    double real_confidence(const ImageRaster&) const override { return p_; }

private:
    double p_;
};

/// Unit vector seeded by the image bytes: identical images collide, anything else lands
/// about sqrt(2) away.
class HashEmbedder final : public EmbeddingModel {
public:
    std::vector<double> embed(const ImageRaster& img, const LandmarkSet&) const override {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (std::uint8_t b : img.samples()) h = (h ^ b) * 0x100000001b3ULL;
        RandomStream rng(h);
        std::vector<double> v(32);
        double n = 0.0;
        for (double& x : v) {
            x = rng.normal();
            n += x * x;
        }
        for (double& x : v) x /= std::sqrt(n);
        return v;
    }
};

}  // namespace fixture

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fixture {

class TempDir {
public:
    TempDir() {
        std::string tmpl = (std::filesystem::temp_directory_path() / "morphline-test-XXXXXX").string();
        if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& p) const { return path_ / p; }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

}  // namespace fixture
