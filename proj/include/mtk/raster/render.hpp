// Copyright 2026 The mtk Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>

#include "mtk/field/network.hpp"
#include "mtk/flexi/mesh.hpp"
#include "mtk/raster/camera.hpp"

namespace mtk::raster {

/// Images from one viewpoint. mask and depth are height x width matrices;
/// normal and rgb hold one column per pixel in row-major order
/// (column index = row * width + col). Empty pixels carry mask 0,
/// depth +inf, normal zero. rgb is 0x0 unless a texture was supplied.
struct RenderTarget {
  int width = 0;
  int height = 0;
  Mat mask;
  Mat depth;
  Mat normal;
  Mat rgb;

  bool has_rgb() const { return rgb.size() > 0; }
};

/// Z-buffered rasterization at pixel centers with barycentric interpolation
/// of positions and vertex normals (perspective-correct under the pinhole
/// model). Depth is the distance along the view axis. No back-face culling;
/// depth ties keep the lower triangle index. An empty mesh renders to an
/// all-empty target.
RenderTarget render(const flexi::TriMesh& mesh, const Camera& camera,
                    const field::TextureField* tex = nullptr);

/// 10*log10(1/MSE) against a peak of 1.0, capped at 99 dB. Identical images
/// have zero MSE and return the cap. Shapes must match.
double psnr(const Mat& a, const Mat& b);

/// Depth image scaled to [0,1] over its finite entries (nearest -> 0,
/// farthest -> 1); empty pixels map to 1. A constant plane maps to 0.
Mat depth_to_unit(const Mat& depth);

/// Binary image files. rgb and normal images are 3 x (width*height) in the
/// row-major pixel order of RenderTarget; gray images are height x width.
/// Values outside [0,1] are clamped on 8-bit writes. The normal-map format
/// is the 8-byte magic "MTFN\0\0\0\0", two 64-bit dimensions, then packed
/// 64-bit floats (3 per pixel).
void write_ppm(const std::string& path, const Mat& rgb, int width, int height);
Mat read_ppm(const std::string& path, int& width, int& height);
void write_pgm(const std::string& path, const Mat& gray);
Mat read_pgm(const std::string& path);
void write_normal_map(const std::string& path, const Mat& normal, int width,
                      int height);
Mat read_normal_map(const std::string& path, int& width, int& height);

}  // namespace mtk::raster
