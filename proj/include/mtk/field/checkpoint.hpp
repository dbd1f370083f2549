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

namespace mtk::field {

/// Flat binary checkpoint: magic "MTFK", version u32, kind u32 (0 = sdf
/// field, 1 = texture field), hyperparameters, then every parameter buffer
/// as 64-bit IEEE-754 little-endian values in declaration order.
void save_sdf(SdfNetwork& net, const std::string& path);
SdfNetwork load_sdf(const std::string& path);

void save_texture(TextureField& tex, const std::string& path);
TextureField load_texture(const std::string& path);

}  // namespace mtk::field
