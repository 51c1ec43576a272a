#pragma once

#include <array>

#include "morphline/geometry.hpp"

namespace morphline {

/// Mean-shape layout in the 68-point iBUG/dlib indexing, normalized to a unit face box
/// (x in [0, 1] left to right, y in [0, 1] brow-top to chin). Exactly left/right symmetric.
const std::array<Point2d, kLandmarkCount>& unit_face_template();

/// Index of the horizontally mirrored counterpart of each landmark (e.g. 36 <-> 45).
const std::array<int, kLandmarkCount>& mirror_index();

/// Template placed centred in a width x height image; symmetric about x = (width - 1) / 2.
LandmarkSet template_landmarks(int width, int height);

/// Landmarks of the horizontally flipped image, re-indexed so semantic indices are preserved.
LandmarkSet mirror_landmarks(const LandmarkSet& l);

}  // namespace morphline
