// Copyright 2026 The epicolor Authors.
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

// Epitome model file, version 1. All integers are little-endian u32 and all
// reals little-endian IEEE-754 f64:
//
//   offset  size  field
//   0       4     magic "EPTM"
//   4       4     version (1)
//   8       4     M_e   epitome rows
//   12      4     N_e   epitome cols
//   16      4     C     color channels (3)
//   20      4     K     patch size
//   24      4     R     descriptor grid
//   28      4     L     mappings, = M_e * N_e
//   32      8     lambda
//   40      ...   yiq mu      M_e * N_e * C   (row, col, channel)
//                 yiq phi     M_e * N_e * C
//                 desc mu     L * 8R^2        (mapping, dim)
//                 desc phi    L * 8R^2
//                 log_pi      L

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "epicolor/model.hpp"

namespace epicolor {

inline constexpr char kModelMagic[4] = {'E', 'P', 'T', 'M'};
inline constexpr std::uint32_t kModelVersion = 1;
inline constexpr std::size_t kModelHeaderBytes = 40;

std::vector<std::uint8_t> serialize_model(const DualEpitome& model);

// Throws CorruptModel on bad magic, version, inconsistent dimensions,
// truncated or oversized payload, or invalid values.
DualEpitome deserialize_model(std::span<const std::uint8_t> bytes);

// IoError on filesystem failures.
void save_model(const DualEpitome& model, const std::string& path);
DualEpitome load_model(const std::string& path);

}  // namespace epicolor
