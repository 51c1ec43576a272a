#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "morphline/geometry.hpp"
#include "morphline/image.hpp"

namespace morphline {

enum class SynthStyle { Healthy, Drug };

std::string_view to_string(SynthStyle s) noexcept;
SynthStyle parse_synth_style(std::string_view s);

struct SynthOptions {
    int size = 256;
    SynthStyle style = SynthStyle::Healthy;
    /// Mirror the left half of shape and texture onto the right half.
    bool symmetric = false;
    /// Standard deviation of the per-pixel skin texture noise, in 8-bit levels.
    double texture_sigma = 9.0;
};

struct SynthFace {
    ImageRaster raster;
    LandmarkSet landmarks;
};

/// Procedural face: jittered mean-shape landmarks, a filled face outline with eyes, brows,
/// nose and lips, low-frequency shading and pixel noise. Drug style adds blotches, sores and
/// dark under-eye areas. The same seed and options always give the same pixels.
SynthFace render_synthetic_face(std::uint64_t seed, const SynthOptions& options);

/// Writes `face_<i>.png` and `face_<i>.landmarks.json` for i in [0, count); returns the image
/// paths. Face i uses a seed derived from (seed, style, i).
std::vector<std::filesystem::path> write_synthetic_corpus(const std::filesystem::path& dir, int count,
                                                          std::uint64_t seed, const SynthOptions& options);

}  // namespace morphline
