#pragma once

#include "morphline/image.hpp"
#include "morphline/triangulation.hpp"

namespace morphline {

/// Piecewise-affine warp: each destination pixel is pulled from the source position given
/// by the inverse affine map of its containing destination triangle, sampled bilinearly
/// with edge clamping. Both meshes must share triangle index triples (TopologyMismatch).
/// Output has the input's dimensions; pixels outside every triangle are copied unchanged.
ImageF warp_piecewise_affine(const ImageF& img, const TriangleMesh& src_mesh, const TriangleMesh& dst_mesh);

/// 8-bit convenience wrapper; rounds half-up once at the end.
ImageRaster warp_piecewise_affine(const ImageRaster& img, const TriangleMesh& src_mesh,
                                  const TriangleMesh& dst_mesh);

}  // namespace morphline
