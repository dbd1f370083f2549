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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "mtk/raster/render.hpp"

namespace mtk::raster {

namespace {

constexpr char kNormalMagic[8] = {'M', 'T', 'F', 'N', 0, 0, 0, 0};

unsigned char to_byte(double v) {
  return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "' for reading");
  return in;
}

void read_pnm_header(std::istream& in, const std::string& path,
                     const char* magic, int& width, int& height) {
  std::string seen;
  in >> seen;
  if (seen != magic)
    throw ConfigError("'" + path + "' is not a " + magic + " image");
  long maxval = 0;
  in >> width >> height >> maxval;
  if (!in || width < 1 || height < 1)
    throw ConfigError("bad image header in '" + path + "'");
  if (maxval != 255)
    throw ConfigError("'" + path + "': only 8-bit images are supported");
  in.get();  // the single whitespace byte ending the header
}

std::vector<unsigned char> read_payload(std::istream& in,
                                        const std::string& path, size_t want) {
  std::vector<unsigned char> bytes(want);
  in.read(reinterpret_cast<char*>(bytes.data()),
          static_cast<std::streamsize>(want));
  if (static_cast<size_t>(in.gcount()) != want)
    throw ConfigError("'" + path + "' is truncated");
  return bytes;
}

}  // namespace

void write_ppm(const std::string& path, const Mat& rgb, int width, int height) {
  if (width < 1 || height < 1 || rgb.rows() != 3 ||
      rgb.cols() != static_cast<long>(width) * height)
    throw ConfigError("rgb image must be 3 x width*height");
  auto out = open_out(path);
  out << "P6\n" << width << " " << height << "\n255\n";
  std::vector<unsigned char> bytes(static_cast<size_t>(rgb.cols()) * 3);
  for (long p = 0; p < rgb.cols(); ++p)
    for (int k = 0; k < 3; ++k)
      bytes[static_cast<size_t>(p) * 3 + k] = to_byte(rgb(k, p));
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

Mat read_ppm(const std::string& path, int& width, int& height) {
  auto in = open_in(path);
  read_pnm_header(in, path, "P6", width, height);
  const size_t count = static_cast<size_t>(width) * height * 3;
  const auto bytes = read_payload(in, path, count);
  Mat rgb(3, static_cast<long>(width) * height);
  for (long p = 0; p < rgb.cols(); ++p)
    for (int k = 0; k < 3; ++k)
      rgb(k, p) = bytes[static_cast<size_t>(p) * 3 + k] / 255.0;
  return rgb;
}

void write_pgm(const std::string& path, const Mat& gray) {
  if (gray.rows() < 1 || gray.cols() < 1)
    throw ConfigError("gray image must be non-empty");
  auto out = open_out(path);
  out << "P5\n" << gray.cols() << " " << gray.rows() << "\n255\n";
  std::vector<unsigned char> bytes(static_cast<size_t>(gray.size()));
  for (long r = 0; r < gray.rows(); ++r)
    for (long c = 0; c < gray.cols(); ++c)
      bytes[static_cast<size_t>(r * gray.cols() + c)] = to_byte(gray(r, c));
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

Mat read_pgm(const std::string& path) {
  auto in = open_in(path);
  int width = 0, height = 0;
  read_pnm_header(in, path, "P5", width, height);
  const auto bytes =
      read_payload(in, path, static_cast<size_t>(width) * height);
  Mat gray(height, width);
  for (long r = 0; r < height; ++r)
    for (long c = 0; c < width; ++c)
      gray(r, c) = bytes[static_cast<size_t>(r * width + c)] / 255.0;
  return gray;
}

void write_normal_map(const std::string& path, const Mat& normal, int width,
                      int height) {
  if (width < 1 || height < 1 || normal.rows() != 3 ||
      normal.cols() != static_cast<long>(width) * height)
    throw ConfigError("normal image must be 3 x width*height");
  auto out = open_out(path);
  out.write(kNormalMagic, sizeof(kNormalMagic));
  const uint64_t dims[2] = {static_cast<uint64_t>(width),
                            static_cast<uint64_t>(height)};
  out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  // column-major storage is already (x,y,z) per pixel in row-major order
  out.write(reinterpret_cast<const char*>(normal.data()),
            static_cast<std::streamsize>(sizeof(double) * normal.size()));
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

Mat read_normal_map(const std::string& path, int& width, int& height) {
  auto in = open_in(path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (in.gcount() != sizeof(magic) ||
      std::memcmp(magic, kNormalMagic, sizeof(magic)) != 0)
    throw ConfigError("'" + path + "' is not a normal-map file");
  uint64_t dims[2];
  in.read(reinterpret_cast<char*>(dims), sizeof(dims));
  if (in.gcount() != sizeof(dims) || dims[0] < 1 || dims[1] < 1 ||
      dims[0] > (1u << 20) || dims[1] > (1u << 20))
    throw ConfigError("bad normal-map header in '" + path + "'");
  width = static_cast<int>(dims[0]);
  height = static_cast<int>(dims[1]);
  Mat normal(3, static_cast<long>(width) * height);
  const std::streamsize want =
      static_cast<std::streamsize>(sizeof(double) * normal.size());
  in.read(reinterpret_cast<char*>(normal.data()), want);
  if (in.gcount() != want) throw ConfigError("'" + path + "' is truncated");
  return normal;
}

}  // namespace mtk::raster
